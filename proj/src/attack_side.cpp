#include "choiceleak/attack_side.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "choiceleak/parallel.hpp"
#include "choiceleak/selectors.hpp"

namespace choiceleak {

std::vector<std::uint8_t> evidence_side(const Dataset& dataset, std::span<const Index> window_ids,
                                        const SelectorSpec& selector, double ratio) {
  const std::vector<Index> kept = select(dataset, window_ids, selector, ratio);
  std::vector<std::uint8_t> bits(window_ids.size(), 0);
  for (std::size_t j = 0; j < window_ids.size(); ++j)
    bits[j] = std::binary_search(kept.begin(), kept.end(), window_ids[j]) ? 1 : 0;
  return bits;
}

EvidenceLedger accumulate_counts(const WindowPlan& plan,
                                 const std::vector<std::vector<std::uint8_t>>& window_bits) {
  if (static_cast<Index>(window_bits.size()) != plan.window_count())
    throw std::runtime_error("evidence misaligned with plan: got " +
                             std::to_string(window_bits.size()) + " windows, expected " +
                             std::to_string(plan.window_count()));
  for (std::size_t i = 0; i < window_bits.size(); ++i)
    if (static_cast<Index>(window_bits[i].size()) != plan.window_size())
      throw std::runtime_error("evidence misaligned with plan: window " + std::to_string(i) +
                               " has " + std::to_string(window_bits[i].size()) +
                               " bits, expected " + std::to_string(plan.window_size()));

  Index max_id = 0;
  for (Index id : plan.order()) max_id = std::max(max_id, id);

  EvidenceLedger ledger;
  ledger.n = static_cast<int>(plan.exposure());
  ledger.t.assign(static_cast<std::size_t>(max_id) + 1, 0);

  const Index n = plan.size();
  for (Index i = 0; i < plan.window_count(); ++i) {
    const Index start = i * plan.interval();
    const auto& bits = window_bits[static_cast<std::size_t>(i)];
    for (Index j = 0; j < plan.window_size(); ++j) {
      if (!bits[static_cast<std::size_t>(j)]) continue;
      const Index id = plan.order()[static_cast<std::size_t>((start + j) % n)];
      ledger.t[static_cast<std::size_t>(id)] += 1;
    }
  }

  for (std::size_t id = 0; id < ledger.t.size(); ++id)
    if (ledger.t[id] > ledger.n)
      throw std::runtime_error("evidence integrity violation: id " + std::to_string(id) +
                               " counted " + std::to_string(ledger.t[id]) +
                               " inclusions with exposure " + std::to_string(ledger.n));
  return ledger;
}

double score_side(Index t, Index n) {
  if (n < 1) throw std::invalid_argument("exposure must be >= 1, got " + std::to_string(n));
  if (t < 0 || t > n)
    throw std::invalid_argument("inclusion count " + std::to_string(t) +
                                " outside [0, " + std::to_string(n) + "]");
  const double margin = static_cast<double>(t) - static_cast<double>(n) / 2.0;
  return 1.0 / (1.0 + std::exp(-margin));
}

double score_side_general(Index t, Index n, double ratio, double kappa) {
  if (n < 1) throw std::invalid_argument("exposure must be >= 1, got " + std::to_string(n));
  if (t < 0 || t > n)
    throw std::invalid_argument("inclusion count " + std::to_string(t) +
                                " outside [0, " + std::to_string(n) + "]");
  if (!(ratio > 0.0) || ratio > 1.0)
    throw std::invalid_argument("selection ratio must lie in (0, 1]");
  if (!(kappa > 0.0) || !std::isfinite(kappa))
    throw std::invalid_argument("sharpness kappa must be positive and finite");
  const double margin = kappa * (static_cast<double>(t) - ratio * static_cast<double>(n));
  return 1.0 / (1.0 + std::exp(-margin));
}

std::vector<std::uint8_t> decide(const ScoreTable& table, double tau) {
  if (!std::isfinite(tau)) throw std::invalid_argument("decision threshold must be finite");
  std::vector<std::uint8_t> out(static_cast<std::size_t>(table.size()), 0);
  for (Index i = 0; i < table.size(); ++i) out[static_cast<std::size_t>(i)] = table.scores(i) >= tau ? 1 : 0;
  return out;
}

SideAttackResult run_side_attack(const Dataset& dataset, const WindowPlan& plan,
                                 const SelectorSpec& selector, double ratio,
                                 const SideAttackOptions& options) {
  for (Index id : plan.order())
    if (id >= dataset.size())
      throw std::invalid_argument("plan id " + std::to_string(id) +
                                  " out of dataset range [0, " +
                                  std::to_string(dataset.size()) + ")");

  const Index m = plan.window_count();
  std::vector<std::vector<std::uint8_t>> bits(static_cast<std::size_t>(m));
  parallel_for(
      m,
      [&](Index i) {
        const std::vector<Index> ids = plan.window(i);
        bits[static_cast<std::size_t>(i)] = evidence_side(dataset, ids, selector, ratio);
      },
      options.threads);

  EvidenceLedger folded = accumulate_counts(plan, bits);

  SideAttackResult result;
  result.ledger.n = folded.n;
  result.ledger.t.assign(static_cast<std::size_t>(dataset.size()), 0);
  std::copy(folded.t.begin(), folded.t.end(), result.ledger.t.begin());

  result.scores.mode =
      options.scoring == SideScoring::Simplified ? ScoreMode::Side : ScoreMode::SideGeneral;
  result.scores.scores.resize(dataset.size());
  for (Index id = 0; id < dataset.size(); ++id) {
    const Index t = result.ledger.t[static_cast<std::size_t>(id)];
    result.scores.scores(id) = options.scoring == SideScoring::Simplified
                                   ? score_side(t, folded.n)
                                   : score_side_general(t, folded.n, ratio, options.kappa);
  }
  return result;
}

}  // namespace choiceleak
