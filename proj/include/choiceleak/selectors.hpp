#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "choiceleak/rng.hpp"
#include "choiceleak/types.hpp"

namespace choiceleak {

// Subset selectors. Each takes an explicit candidate id list and a target
// size k and returns exactly k candidate ids, sorted ascending. Ties always
// break toward the lower id, which makes every selector (except Random,
// whose draw is intentionally tied to candidate order) invariant under
// permutations of the candidate list.

namespace detail {

/// Candidate ids sorted ascending; rejects duplicates and negatives.
std::vector<Index> canonical_candidates(std::span<const Index> candidates);

void check_k(Index k, Index candidate_count);

}  // namespace detail

/// Keeps the k lowest-scored candidates (invert=true: the k highest). Ties
/// on score break toward the lower id.
std::vector<Index> select_top_score(const Eigen::Ref<const Eigen::VectorXd>& scores,
                                    std::span<const Index> candidates, Index k,
                                    bool invert = false);

/// Position-based partial Fisher-Yates draw of k candidates. Depends on the
/// candidate list order, not on the ids themselves, so replaying the draw on
/// a different window re-randomizes which ids come out.
std::vector<Index> select_random(std::span<const Index> candidates, Index k,
                                 std::uint64_t seed);

/// Greedy mean matching: step t adds the candidate whose inclusion brings the
/// running selection mean closest (squared Euclidean) to the candidate mean.
template <typename Scalar>
std::vector<Index> select_herding(const Eigen::Ref<const RowMatrix<Scalar>>& features,
                                  std::span<const Index> candidates, Index k) {
  const std::vector<Index> ids = detail::canonical_candidates(candidates);
  const Index c = static_cast<Index>(ids.size());
  detail::check_k(k, c);

  const Index d = features.cols();
  RowMatrix<Scalar> x(c, d);
  for (Index i = 0; i < c; ++i) x.row(i) = features.row(ids[i]);

  // target mean accumulated in id order so the result is order-independent
  VectorX<Scalar> mu = VectorX<Scalar>::Zero(d);
  for (Index i = 0; i < c; ++i) mu += x.row(i).transpose();
  mu /= static_cast<Scalar>(c);

  VectorX<Scalar> running = VectorX<Scalar>::Zero(d);
  std::vector<char> taken(static_cast<std::size_t>(c), 0);
  std::vector<Index> picked;
  picked.reserve(static_cast<std::size_t>(k));

  for (Index step = 1; step <= k; ++step) {
    Index best = -1;
    Scalar best_gap = Scalar(0);
    for (Index i = 0; i < c; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      const Scalar gap =
          ((running + x.row(i).transpose()) / static_cast<Scalar>(step) - mu).squaredNorm();
      if (best < 0 || gap < best_gap) {
        best = i;
        best_gap = gap;
      }
    }
    taken[static_cast<std::size_t>(best)] = 1;
    running += x.row(best).transpose();
    picked.push_back(ids[static_cast<std::size_t>(best)]);
  }

  std::sort(picked.begin(), picked.end());
  return picked;
}

/// Coverage-first pick: starts at the candidate nearest the candidate
/// centroid, then repeatedly adds the candidate farthest from the selection
/// (greedy farthest-point traversal).
template <typename Scalar>
std::vector<Index> select_k_center(const Eigen::Ref<const RowMatrix<Scalar>>& features,
                                   std::span<const Index> candidates, Index k) {
  const std::vector<Index> ids = detail::canonical_candidates(candidates);
  const Index c = static_cast<Index>(ids.size());
  detail::check_k(k, c);

  const Index d = features.cols();
  RowMatrix<Scalar> x(c, d);
  for (Index i = 0; i < c; ++i) x.row(i) = features.row(ids[i]);

  VectorX<Scalar> mu = VectorX<Scalar>::Zero(d);
  for (Index i = 0; i < c; ++i) mu += x.row(i).transpose();
  mu /= static_cast<Scalar>(c);

  Index first = 0;
  Scalar first_gap = (x.row(0).transpose() - mu).squaredNorm();
  for (Index i = 1; i < c; ++i) {
    const Scalar gap = (x.row(i).transpose() - mu).squaredNorm();
    if (gap < first_gap) {
      first = i;
      first_gap = gap;
    }
  }

  std::vector<char> taken(static_cast<std::size_t>(c), 0);
  taken[static_cast<std::size_t>(first)] = 1;
  std::vector<Index> picked{ids[static_cast<std::size_t>(first)]};
  picked.reserve(static_cast<std::size_t>(k));

  VectorX<Scalar> min_d2(c);
  for (Index i = 0; i < c; ++i) min_d2(i) = (x.row(i) - x.row(first)).squaredNorm();

  while (static_cast<Index>(picked.size()) < k) {
    Index best = -1;
    Scalar best_d2 = Scalar(0);
    for (Index i = 0; i < c; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      if (best < 0 || min_d2(i) > best_d2) {
        best = i;
        best_d2 = min_d2(i);
      }
    }
    taken[static_cast<std::size_t>(best)] = 1;
    picked.push_back(ids[static_cast<std::size_t>(best)]);
    for (Index i = 0; i < c; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      const Scalar d2 = (x.row(i) - x.row(best)).squaredNorm();
      if (d2 < min_d2(i)) min_d2(i) = d2;
    }
  }

  std::sort(picked.begin(), picked.end());
  return picked;
}

/// Dispatch by SelectorSpec at intensity `ratio`: keeps
/// round_half_even(ratio * |candidates|) candidates.
std::vector<Index> select(const Dataset& dataset, std::span<const Index> candidates,
                          const SelectorSpec& spec, double ratio);

}  // namespace choiceleak
