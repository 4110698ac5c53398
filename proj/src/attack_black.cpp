#include "choiceleak/attack_black.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "choiceleak/attack_side.hpp"
#include "choiceleak/parallel.hpp"
#include "choiceleak/rng.hpp"

namespace choiceleak {

std::vector<std::uint8_t> median_evidence(const Eigen::Ref<const Eigen::VectorXd>& distances) {
  const Index w = distances.size();
  if (w < 1) throw std::invalid_argument("median evidence needs at least one distance");
  for (Index i = 0; i < w; ++i)
    if (!std::isfinite(distances(i)) || distances(i) < 0)
      throw std::invalid_argument("distances must be finite and non-negative");

  // lower median: the ceil(W/2)-th smallest distance
  std::vector<double> sorted(distances.data(), distances.data() + w);
  const std::size_t rank = static_cast<std::size_t>((w + 1) / 2) - 1;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank),
                   sorted.end());
  const double median = sorted[rank];

  std::vector<std::uint8_t> bits(static_cast<std::size_t>(w), 0);
  for (Index i = 0; i < w; ++i) bits[static_cast<std::size_t>(i)] = distances(i) <= median ? 1 : 0;
  return bits;
}

WindowEvidence evidence_black(const Eigen::Ref<const RowMatrixXd>& window_points, Index k,
                              const KMeansOptions& options) {
  const ClusterResult<double> clusters = kmeans<double>(window_points, k, options);
  WindowEvidence out;
  out.distances = clusters.distances;
  out.bits = median_evidence(out.distances);
  return out;
}

EvidenceLedger aggregate_black(const WindowPlan& plan,
                               const std::vector<WindowEvidence>& evidence) {
  if (static_cast<Index>(evidence.size()) != plan.window_count())
    throw std::runtime_error("evidence misaligned with plan: got " +
                             std::to_string(evidence.size()) + " windows, expected " +
                             std::to_string(plan.window_count()));
  for (std::size_t i = 0; i < evidence.size(); ++i) {
    if (static_cast<Index>(evidence[i].bits.size()) != plan.window_size() ||
        evidence[i].distances.size() != plan.window_size())
      throw std::runtime_error("evidence misaligned with plan: window " + std::to_string(i) +
                               " carries " + std::to_string(evidence[i].bits.size()) +
                               " bits / " + std::to_string(evidence[i].distances.size()) +
                               " distances, expected " + std::to_string(plan.window_size()));
  }

  Index max_id = 0;
  for (Index id : plan.order()) max_id = std::max(max_id, id);

  EvidenceLedger ledger;
  ledger.n = static_cast<int>(plan.exposure());
  ledger.t.assign(static_cast<std::size_t>(max_id) + 1, 0);
  ledger.dist_sum.assign(static_cast<std::size_t>(max_id) + 1, 0.0);

  const Index n = plan.size();
  for (Index i = 0; i < plan.window_count(); ++i) {
    const Index start = i * plan.interval();
    const auto& win = evidence[static_cast<std::size_t>(i)];
    for (Index j = 0; j < plan.window_size(); ++j) {
      if (!win.bits[static_cast<std::size_t>(j)]) continue;
      const Index id = plan.order()[static_cast<std::size_t>((start + j) % n)];
      ledger.t[static_cast<std::size_t>(id)] += 1;
      ledger.dist_sum[static_cast<std::size_t>(id)] += win.distances(j);
    }
  }

  for (std::size_t id = 0; id < ledger.t.size(); ++id)
    if (ledger.t[id] > ledger.n)
      throw std::runtime_error("evidence integrity violation: id " + std::to_string(id) +
                               " counted " + std::to_string(ledger.t[id]) +
                               " inclusions with exposure " + std::to_string(ledger.n));
  return ledger;
}

double score_black(Index t, Index n, double d_bar) {
  if (n < 1) throw std::invalid_argument("exposure must be >= 1, got " + std::to_string(n));
  if (t < 0 || t > n)
    throw std::invalid_argument("inclusion count " + std::to_string(t) +
                                " outside [0, " + std::to_string(n) + "]");
  if (!std::isfinite(d_bar) || d_bar < 0)
    throw std::invalid_argument("mean distance must be finite and >= 0");
  if (t == 0) return 0.0;  // never included: no distance evidence at all
  const double w = score_side(t, n);
  if (d_bar == 0.0) return w / 1e-12;  // exact-centroid degenerate case
  return w / d_bar;
}

BlackAttackResult run_black_attack(const Dataset& dataset, const WindowPlan& plan,
                                   const BlackAttackOptions& options) {
  for (Index id : plan.order())
    if (id >= dataset.size())
      throw std::invalid_argument("plan id " + std::to_string(id) +
                                  " out of dataset range [0, " +
                                  std::to_string(dataset.size()) + ")");
  if (options.k_clusters > plan.window_size())
    throw std::invalid_argument("cluster count " + std::to_string(options.k_clusters) +
                                " exceeds window size " + std::to_string(plan.window_size()));

  const Index m = plan.window_count();
  std::vector<WindowEvidence> evidence(static_cast<std::size_t>(m));
  parallel_for(
      m,
      [&](Index i) {
        const std::vector<Index> ids = plan.window(i);
        RowMatrixXd points(static_cast<Index>(ids.size()), dataset.dim());
        for (std::size_t j = 0; j < ids.size(); ++j)
          points.row(static_cast<Index>(j)) = dataset.features().row(ids[j]);
        KMeansOptions km;
        km.seed = mix_seed(options.seed, static_cast<std::uint64_t>(i));
        km.max_iter = options.kmeans_iters;
        km.tol = options.kmeans_tol;
        evidence[static_cast<std::size_t>(i)] = evidence_black(points, options.k_clusters, km);
      },
      options.threads);

  EvidenceLedger folded = aggregate_black(plan, evidence);

  BlackAttackResult result;
  result.ledger.n = folded.n;
  result.ledger.t.assign(static_cast<std::size_t>(dataset.size()), 0);
  result.ledger.dist_sum.assign(static_cast<std::size_t>(dataset.size()), 0.0);
  std::copy(folded.t.begin(), folded.t.end(), result.ledger.t.begin());
  std::copy(folded.dist_sum.begin(), folded.dist_sum.end(), result.ledger.dist_sum.begin());

  result.scores.mode = ScoreMode::Black;
  result.scores.scores.resize(dataset.size());
  for (Index id = 0; id < dataset.size(); ++id) {
    const int t = result.ledger.t[static_cast<std::size_t>(id)];
    const double sum = result.ledger.dist_sum[static_cast<std::size_t>(id)];
    const double d_bar = t > 0 ? sum / static_cast<double>(t) : 0.0;
    result.scores.scores(id) = score_black(t, folded.n, d_bar);
  }
  return result;
}

}  // namespace choiceleak
