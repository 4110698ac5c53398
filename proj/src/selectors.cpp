#include "choiceleak/selectors.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "choiceleak/dataset.hpp"

namespace choiceleak {

namespace detail {

std::vector<Index> canonical_candidates(std::span<const Index> candidates) {
  if (candidates.empty()) throw std::invalid_argument("candidate list must not be empty");
  std::vector<Index> ids(candidates.begin(), candidates.end());
  std::sort(ids.begin(), ids.end());
  if (ids.front() < 0)
    throw std::invalid_argument("candidate id " + std::to_string(ids.front()) +
                                " is negative");
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
    throw std::invalid_argument("candidate list contains duplicate ids");
  return ids;
}

void check_k(Index k, Index candidate_count) {
  if (k < 0 || k > candidate_count)
    throw std::invalid_argument("selection size " + std::to_string(k) +
                                " outside [0, " + std::to_string(candidate_count) + "]");
}

}  // namespace detail

std::vector<Index> select_top_score(const Eigen::Ref<const Eigen::VectorXd>& scores,
                                    std::span<const Index> candidates, Index k, bool invert) {
  std::vector<Index> ids = detail::canonical_candidates(candidates);
  detail::check_k(k, static_cast<Index>(ids.size()));
  for (Index id : ids) {
    if (id >= scores.size())
      throw std::invalid_argument("candidate id " + std::to_string(id) +
                                  " has no model score");
    if (!std::isfinite(scores(id)))
      throw std::invalid_argument("model score for id " + std::to_string(id) +
                                  " is not finite");
  }

  std::sort(ids.begin(), ids.end(), [&](Index a, Index b) {
    if (scores(a) != scores(b)) return invert ? scores(a) > scores(b) : scores(a) < scores(b);
    return a < b;
  });
  ids.resize(static_cast<std::size_t>(k));
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<Index> select_random(std::span<const Index> candidates, Index k,
                                 std::uint64_t seed) {
  if (candidates.empty()) throw std::invalid_argument("candidate list must not be empty");
  detail::check_k(k, static_cast<Index>(candidates.size()));
  {
    std::vector<Index> check(candidates.begin(), candidates.end());
    std::sort(check.begin(), check.end());
    if (check.front() < 0) throw std::invalid_argument("candidate ids must be non-negative");
    if (std::adjacent_find(check.begin(), check.end()) != check.end())
      throw std::invalid_argument("candidate list contains duplicate ids");
  }

  // partial Fisher-Yates over list positions: the draw depends on where a
  // candidate sits, not on its id
  std::vector<Index> pool(candidates.begin(), candidates.end());
  Rng g(seed);
  const std::size_t n = pool.size();
  for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
    const std::size_t j = i + static_cast<std::size_t>(bounded(g, n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(k));
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<Index> select(const Dataset& dataset, std::span<const Index> candidates,
                          const SelectorSpec& spec, double ratio) {
  if (!(ratio > 0.0) || ratio > 1.0)
    throw std::invalid_argument("selection ratio must lie in (0, 1], got " +
                                std::to_string(ratio));
  if (candidates.empty()) throw std::invalid_argument("candidate list must not be empty");
  for (Index id : candidates)
    if (id < 0 || id >= dataset.size())
      throw std::invalid_argument("candidate id " + std::to_string(id) +
                                  " out of range [0, " + std::to_string(dataset.size()) + ")");

  const Index k = round_half_even(ratio * static_cast<double>(candidates.size()));

  switch (spec.kind) {
    case SelectorKind::Random:
      return select_random(candidates, k, spec.seed);
    case SelectorKind::TopScore:
      if (!dataset.has_scores())
        throw std::invalid_argument("top_score selector needs a dataset with model scores");
      return select_top_score(dataset.scores(), candidates, k, spec.invert);
    case SelectorKind::Herding:
      return select_herding<double>(dataset.features(), candidates, k);
    case SelectorKind::KCenter:
      return select_k_center<double>(dataset.features(), candidates, k);
  }
  throw std::invalid_argument("unknown selector kind value");
}

}  // namespace choiceleak
