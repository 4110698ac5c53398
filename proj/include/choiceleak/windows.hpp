#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "choiceleak/types.hpp"

namespace choiceleak {

/// Cyclic sliding-window schedule over an ordered id list. Window i holds the
/// ids at order positions (i*interval + j) mod N for j in [0, window_size);
/// there are m = N / interval windows, and every id lands in exactly
/// window_size / interval of them.
class WindowPlan {
 public:
  WindowPlan() = default;

  Index size() const { return static_cast<Index>(order_.size()); }  // N
  Index window_size() const { return window_size_; }                // W
  Index interval() const { return interval_; }                      // delta
  Index window_count() const { return size() / interval_; }         // m
  Index exposure() const { return window_size_ / interval_; }       // n
  std::optional<std::uint64_t> shuffle_seed() const { return shuffle_seed_; }
  std::span<const Index> order() const { return order_; }

  /// Materializes window i (ids in window-position order).
  std::vector<Index> window(Index i) const;

 private:
  friend WindowPlan build_window_plan(std::span<const Index> ids, Index window_size,
                                      Index interval, std::optional<std::uint64_t> shuffle_seed);

  std::vector<Index> order_;
  Index window_size_ = 0;
  Index interval_ = 0;
  std::optional<std::uint64_t> shuffle_seed_;
};

/// Builds the schedule. The order is the id list as given, Fisher-Yates
/// shuffled when a shuffle seed is supplied. Requires interval >= 1,
/// window_size >= 1, interval | window_size, interval | N, window_size <= N.
WindowPlan build_window_plan(std::span<const Index> ids, Index window_size, Index interval,
                             std::optional<std::uint64_t> shuffle_seed = std::nullopt);

/// Returns the uniform exposure n = window_size / interval after verifying it
/// by counting every id's appearances across all windows. A count mismatch is
/// an integrity failure.
Index exposure_count(const WindowPlan& plan);

}  // namespace choiceleak
