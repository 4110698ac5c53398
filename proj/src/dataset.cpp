#include "choiceleak/dataset.hpp"

#include <cfenv>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "choiceleak/rng.hpp"
#include "choiceleak/selectors.hpp"

namespace choiceleak {

const char* to_string(Tag t) {
  switch (t) {
    case Tag::Included: return "included";
    case Tag::Excluded: return "excluded";
    case Tag::Outside: return "outside";
  }
  throw std::invalid_argument("unknown tag value");
}

const char* to_string(Surface s) {
  switch (s) {
    case Surface::TM: return "tm";
    case Surface::SP: return "sp";
  }
  throw std::invalid_argument("unknown surface value");
}

Tag tag_from_string(const std::string& s) {
  if (s == "included") return Tag::Included;
  if (s == "excluded") return Tag::Excluded;
  if (s == "outside") return Tag::Outside;
  throw std::invalid_argument("unknown tag: " + s);
}

Surface surface_from_string(const std::string& s) {
  if (s == "tm") return Surface::TM;
  if (s == "sp") return Surface::SP;
  throw std::invalid_argument("unknown surface: " + s + " (expected tm or sp)");
}

const char* to_string(SelectorKind k) {
  switch (k) {
    case SelectorKind::Random: return "random";
    case SelectorKind::TopScore: return "top_score";
    case SelectorKind::Herding: return "herding";
    case SelectorKind::KCenter: return "k_center";
  }
  throw std::invalid_argument("unknown selector kind value");
}

SelectorKind selector_kind_from_string(const std::string& s) {
  if (s == "random") return SelectorKind::Random;
  if (s == "top_score") return SelectorKind::TopScore;
  if (s == "herding") return SelectorKind::Herding;
  if (s == "k_center") return SelectorKind::KCenter;
  throw std::invalid_argument("unknown selector kind: " + s);
}

const char* to_string(ScoreMode m) {
  switch (m) {
    case ScoreMode::Side: return "side";
    case ScoreMode::SideGeneral: return "side_general";
    case ScoreMode::Black: return "black";
    case ScoreMode::Baseline: return "baseline";
  }
  throw std::invalid_argument("unknown score mode value");
}

ScoreMode score_mode_from_string(const std::string& s) {
  if (s == "side") return ScoreMode::Side;
  if (s == "side_general") return ScoreMode::SideGeneral;
  if (s == "black") return ScoreMode::Black;
  if (s == "baseline") return ScoreMode::Baseline;
  throw std::invalid_argument("unknown score mode: " + s);
}

Dataset::Dataset(RowMatrixXd features, Eigen::VectorXi labels, Eigen::VectorXd scores)
    : features_(std::move(features)), labels_(std::move(labels)), scores_(std::move(scores)) {
  if (features_.rows() < 2)
    throw std::invalid_argument("dataset needs at least 2 samples, got " +
                                std::to_string(features_.rows()));
  if (features_.cols() < 1) throw std::invalid_argument("dataset needs at least 1 feature");
  if (labels_.size() > 0 && labels_.size() != features_.rows())
    throw std::invalid_argument("label column length " + std::to_string(labels_.size()) +
                                " does not match sample count " +
                                std::to_string(features_.rows()));
  if (scores_.size() > 0 && scores_.size() != features_.rows())
    throw std::invalid_argument("score column length " + std::to_string(scores_.size()) +
                                " does not match sample count " +
                                std::to_string(features_.rows()));
  if (!features_.allFinite()) throw std::invalid_argument("dataset features must be finite");
  if (scores_.size() > 0 && !scores_.allFinite())
    throw std::invalid_argument("dataset scores must be finite");
}

Index GroundTruth::count(Tag t) const {
  Index c = 0;
  for (Tag tag : tags)
    if (tag == t) ++c;
  return c;
}

Index SurfaceLabels::member_count() const {
  Index c = 0;
  for (std::uint8_t v : labels) c += v;
  return c;
}

Index round_half_even(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("round_half_even: value must be finite");
  // nearbyint under the default FE_TONEAREST mode rounds halfway cases to even
  return static_cast<Index>(std::llrint(std::nearbyint(x)));
}

Index synthetic_component_count(Index dim) {
  return std::max<Index>(2, std::min<Index>(10, dim));
}

SyntheticResult generate_synthetic(std::uint64_t seed, Index n_pool, Index n_outside, Index dim,
                                   double shift) {
  if (n_pool < 2) throw std::invalid_argument("n_pool must be >= 2");
  if (n_outside < 0) throw std::invalid_argument("n_outside must be >= 0");
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  if (!std::isfinite(shift) || shift < 0)
    throw std::invalid_argument("shift must be finite and >= 0");

  const Index n = n_pool + n_outside;
  const Index k = synthetic_component_count(dim);

  Rng g(mix_seed(seed, 0x646174ull));  // independent data stream

  // unit-variance mixture; modest component spread keeps the clouds a single
  // soft blob so the translated copy drifts rather than detaching
  RowMatrixXd means(k, dim);
  for (Index c = 0; c < k; ++c)
    for (Index j = 0; j < dim; ++j) means(c, j) = 1.5 * standard_normal(g);

  // stratified component assignment: round-robin over a shuffled id order,
  // so both the pool and the outside block see every component evenly
  std::vector<Index> comp_order(static_cast<std::size_t>(n));
  std::iota(comp_order.begin(), comp_order.end(), Index{0});
  shuffle_in_place(comp_order, g);
  Eigen::VectorXi component(n);
  for (Index i = 0; i < n; ++i) component(comp_order[static_cast<std::size_t>(i)]) = static_cast<int>(i % k);

  RowMatrixXd features(n, dim);
  for (Index i = 0; i < n; ++i) {
    const Index c = component(i);
    for (Index j = 0; j < dim; ++j) features(i, j) = means(c, j) + standard_normal(g);
    if (i >= n_pool) features(i, 0) += shift;  // outside block: translate along axis 0
  }

  // model score: confidence of a model fit to pool-like data, i.e. negative
  // distance to the nearest untranslated component mean, plus mild noise
  Eigen::VectorXd scores(n);
  for (Index i = 0; i < n; ++i) {
    double best = (features.row(i) - means.row(0)).norm();
    for (Index c = 1; c < k; ++c)
      best = std::min(best, (features.row(i) - means.row(c)).norm());
    scores(i) = -best + 0.1 * standard_normal(g);
  }

  SyntheticResult out;
  out.dataset = Dataset(std::move(features), std::move(component), std::move(scores));
  out.pool_size = n_pool;
  return out;
}

GroundTruth partition_supply_chain(const Dataset& dataset, std::span<const Index> pool_ids,
                                   const SelectorSpec& selector, double ratio) {
  if (pool_ids.empty()) throw std::invalid_argument("selection pool must not be empty");
  for (Index id : pool_ids)
    if (id < 0 || id >= dataset.size())
      throw std::invalid_argument("pool id " + std::to_string(id) + " out of range [0, " +
                                  std::to_string(dataset.size()) + ")");

  const std::vector<Index> included = select(dataset, pool_ids, selector, ratio);

  GroundTruth truth;
  truth.tags.assign(static_cast<std::size_t>(dataset.size()), Tag::Outside);
  for (Index id : pool_ids) truth.tags[static_cast<std::size_t>(id)] = Tag::Excluded;
  for (Index id : included) truth.tags[static_cast<std::size_t>(id)] = Tag::Included;
  return truth;
}

SurfaceLabels surface_labels(const GroundTruth& truth, Surface surface) {
  SurfaceLabels out;
  out.surface = surface;
  out.labels.resize(truth.tags.size());
  for (std::size_t i = 0; i < truth.tags.size(); ++i) {
    const Tag t = truth.tags[i];
    const bool member = (surface == Surface::TM) ? (t == Tag::Included) : (t != Tag::Outside);
    out.labels[i] = member ? 1 : 0;
  }
  return out;
}

}  // namespace choiceleak
