#pragma once

#include <cstdint>
#include <span>

#include "choiceleak/types.hpp"

namespace choiceleak {

/// Rounds to nearest integer, ties to even (IEEE default rounding).
Index round_half_even(double x);

struct SyntheticResult {
  Dataset dataset;
  Index pool_size = 0;  // ids [0, pool_size) form the selection pool
};

/// Draws a labeled synthetic benchmark: `n_pool` selection-pool samples from
/// a unit-variance Gaussian mixture, then `n_outside` samples from the same
/// mixture with every component mean translated by `shift` along a fixed unit
/// direction (axis 0). Every sample carries a model score: negative distance
/// to the nearest base-mixture center plus small Gaussian noise, mimicking a
/// confidence signal from a model fit to pool-like data. Labels record the
/// mixture component. Deterministic in (seed, n_pool, n_outside, dim, shift).
SyntheticResult generate_synthetic(std::uint64_t seed, Index n_pool, Index n_outside,
                                   Index dim, double shift);

/// Number of mixture components used by generate_synthetic for a given dim.
Index synthetic_component_count(Index dim);

/// Applies the selector once to the pool at intensity `ratio`, producing the
/// Included / Excluded / Outside partition over all dataset ids. The retained
/// count is round_half_even(ratio * pool size).
GroundTruth partition_supply_chain(const Dataset& dataset, std::span<const Index> pool_ids,
                                   const SelectorSpec& selector, double ratio);

/// Projects ground truth onto one audit surface: TM members are Included
/// samples only; SP members are Included and Excluded samples.
SurfaceLabels surface_labels(const GroundTruth& truth, Surface surface);

}  // namespace choiceleak
