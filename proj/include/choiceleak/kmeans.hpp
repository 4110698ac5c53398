#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "choiceleak/rng.hpp"
#include "choiceleak/types.hpp"

namespace choiceleak {

struct KMeansOptions {
  std::uint64_t seed = 0;
  Index max_iter = 100;
  double tol = 1e-6;  // stop when max centroid movement falls below this
};

template <typename Scalar>
struct ClusterResult {
  Eigen::VectorXi assignments;        // nearest-centroid index per point
  RowMatrix<Scalar> centroids;        // k x d
  VectorX<Scalar> distances;          // Euclidean distance to assigned centroid
  Scalar inertia = Scalar(0);         // sum of squared assigned distances
  std::vector<Scalar> inertia_trace;  // inertia after each assignment pass
  Index iterations = 0;               // Lloyd update steps performed
};

namespace detail {

/// Nearest-centroid assignment via the expansion |x|^2 - 2 x.c + |c|^2,
/// batched through one GEMM. Ties go to the lower centroid index. Returns
/// squared distances (clamped at zero against rounding).
template <typename Scalar>
void assign_nearest(const Eigen::Ref<const RowMatrix<Scalar>>& points,
                    const RowMatrix<Scalar>& centroids, Eigen::VectorXi& assignments,
                    VectorX<Scalar>& sq_dist) {
  const Index n = points.rows();
  const Index k = centroids.rows();
  const RowMatrix<Scalar> gram = points * centroids.transpose();
  const VectorX<Scalar> pn = points.rowwise().squaredNorm();
  const VectorX<Scalar> cn = centroids.rowwise().squaredNorm();

  assignments.resize(n);
  sq_dist.resize(n);
  for (Index i = 0; i < n; ++i) {
    Index best = 0;
    Scalar best_d = pn(i) - Scalar(2) * gram(i, 0) + cn(0);
    for (Index j = 1; j < k; ++j) {
      const Scalar d = pn(i) - Scalar(2) * gram(i, j) + cn(j);
      if (d < best_d) {
        best = j;
        best_d = d;
      }
    }
    assignments(i) = static_cast<int>(best);
    sq_dist(i) = std::max(best_d, Scalar(0));
  }
}

}  // namespace detail

/// Lloyd's algorithm with kmeans++ seeding. Deterministic in (points, k,
/// options). An update pass that empties a cluster re-seeds it at the point
/// farthest from its assigned centroid; assignment ties go to the lower
/// centroid index. Stops after max_iter updates or when no centroid moved by
/// tol or more (movement exactly zero always stops). The returned assignments
/// and distances are consistent with the returned centroids.
template <typename Scalar>
ClusterResult<Scalar> kmeans(const Eigen::Ref<const RowMatrix<Scalar>>& points, Index k,
                             const KMeansOptions& opts = {}) {
  const Index n = points.rows();
  const Index d = points.cols();
  if (n < 1) throw std::invalid_argument("kmeans: need at least one point");
  if (k < 1) throw std::invalid_argument("kmeans: cluster count must be >= 1");
  if (k > n)
    throw std::invalid_argument("kmeans: cluster count " + std::to_string(k) +
                                " exceeds point count " + std::to_string(n));
  if (opts.max_iter < 1) throw std::invalid_argument("kmeans: max_iter must be >= 1");
  if (opts.tol < 0) throw std::invalid_argument("kmeans: tol must be >= 0");

  Rng g(opts.seed);

  // kmeans++ seeding: first centroid uniform, the rest sampled with
  // probability proportional to squared distance from the chosen set.
  RowMatrix<Scalar> centroids(k, d);
  std::vector<char> is_seed(static_cast<std::size_t>(n), 0);
  {
    const Index first = static_cast<Index>(bounded(g, static_cast<std::uint64_t>(n)));
    centroids.row(0) = points.row(first);
    is_seed[static_cast<std::size_t>(first)] = 1;

    VectorX<Scalar> d2 =
        (points.rowwise() - centroids.row(0)).rowwise().squaredNorm().cwiseMax(Scalar(0));
    for (Index j = 1; j < k; ++j) {
      Scalar total = Scalar(0);
      for (Index i = 0; i < n; ++i) total += d2(i);
      Index next = -1;
      if (total > Scalar(0)) {
        const Scalar u = static_cast<Scalar>(uniform01(g)) * total;
        Scalar acc = Scalar(0);
        for (Index i = 0; i < n; ++i) {
          acc += d2(i);
          if (u < acc) {
            next = i;
            break;
          }
        }
        if (next < 0) {  // rounding spill: last point with positive mass
          for (Index i = n - 1; i >= 0; --i) {
            if (d2(i) > Scalar(0)) {
              next = i;
              break;
            }
          }
        }
      }
      if (next < 0) {  // all residual distances zero: lowest unused index
        for (Index i = 0; i < n; ++i) {
          if (!is_seed[static_cast<std::size_t>(i)]) {
            next = i;
            break;
          }
        }
      }
      centroids.row(j) = points.row(next);
      is_seed[static_cast<std::size_t>(next)] = 1;
      d2 = d2.cwiseMin(
          (points.rowwise() - centroids.row(j)).rowwise().squaredNorm().cwiseMax(Scalar(0)));
    }
  }

  ClusterResult<Scalar> result;
  Eigen::VectorXi assign;
  VectorX<Scalar> sq;

  for (Index iter = 0; iter < opts.max_iter; ++iter) {
    detail::assign_nearest<Scalar>(points, centroids, assign, sq);
    result.inertia_trace.push_back(sq.sum());

    RowMatrix<Scalar> next = RowMatrix<Scalar>::Zero(k, d);
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
    for (Index i = 0; i < n; ++i) {
      next.row(assign(i)) += points.row(i);
      counts(assign(i)) += 1;
    }
    std::vector<char> reseeded(static_cast<std::size_t>(n), 0);
    for (Index j = 0; j < k; ++j) {
      if (counts(j) > 0) {
        next.row(j) /= static_cast<Scalar>(counts(j));
        continue;
      }
      // re-seed an emptied cluster at the farthest point not already used
      // for another re-seed this pass
      Index far = -1;
      Scalar far_d = Scalar(0);
      for (Index i = 0; i < n; ++i) {
        if (reseeded[static_cast<std::size_t>(i)]) continue;
        if (far < 0 || sq(i) > far_d) {
          far = i;
          far_d = sq(i);
        }
      }
      next.row(j) = points.row(far);
      reseeded[static_cast<std::size_t>(far)] = 1;
    }

    Scalar moved = Scalar(0);
    for (Index j = 0; j < k; ++j)
      moved = std::max(moved, static_cast<Scalar>((next.row(j) - centroids.row(j)).norm()));
    centroids = next;
    result.iterations = iter + 1;
    if (moved == Scalar(0) || moved < static_cast<Scalar>(opts.tol)) break;
  }

  detail::assign_nearest<Scalar>(points, centroids, assign, sq);
  result.inertia = sq.sum();
  result.inertia_trace.push_back(result.inertia);
  result.assignments = std::move(assign);
  result.centroids = std::move(centroids);
  result.distances = sq.cwiseSqrt();
  return result;
}

}  // namespace choiceleak
