#include "choiceleak/windows.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "choiceleak/rng.hpp"

namespace choiceleak {

std::vector<Index> WindowPlan::window(Index i) const {
  const Index m = window_count();
  if (i < 0 || i >= m)
    throw std::invalid_argument("window index " + std::to_string(i) + " out of range [0, " +
                                std::to_string(m) + ")");
  const Index n = size();
  std::vector<Index> out(static_cast<std::size_t>(window_size_));
  const Index start = i * interval_;
  for (Index j = 0; j < window_size_; ++j)
    out[static_cast<std::size_t>(j)] = order_[static_cast<std::size_t>((start + j) % n)];
  return out;
}

WindowPlan build_window_plan(std::span<const Index> ids, Index window_size, Index interval,
                             std::optional<std::uint64_t> shuffle_seed) {
  const Index n = static_cast<Index>(ids.size());
  if (interval < 1)
    throw std::invalid_argument("window interval must be >= 1, got " + std::to_string(interval));
  if (window_size < 1)
    throw std::invalid_argument("window size must be >= 1, got " + std::to_string(window_size));
  if (window_size % interval != 0)
    throw std::invalid_argument("window size " + std::to_string(window_size) +
                                " must be a multiple of interval " + std::to_string(interval));
  if (n % interval != 0)
    throw std::invalid_argument("id count " + std::to_string(n) +
                                " must be a multiple of interval " + std::to_string(interval));
  if (window_size > n)
    throw std::invalid_argument("window size " + std::to_string(window_size) +
                                " exceeds id count " + std::to_string(n));
  {
    std::vector<Index> check(ids.begin(), ids.end());
    std::sort(check.begin(), check.end());
    if (!check.empty() && check.front() < 0)
      throw std::invalid_argument("window plan ids must be non-negative");
    if (std::adjacent_find(check.begin(), check.end()) != check.end())
      throw std::invalid_argument("window plan ids contain duplicates");
  }

  WindowPlan plan;
  plan.order_.assign(ids.begin(), ids.end());
  plan.window_size_ = window_size;
  plan.interval_ = interval;
  plan.shuffle_seed_ = shuffle_seed;
  if (shuffle_seed) {
    Rng g(*shuffle_seed);
    shuffle_in_place(plan.order_, g);
  }
  return plan;
}

Index exposure_count(const WindowPlan& plan) {
  if (plan.size() == 0) throw std::invalid_argument("window plan is empty");
  const Index expected = plan.exposure();
  std::vector<Index> seen(static_cast<std::size_t>(plan.size()), 0);

  // re-walk every window by position; ids map to order slots
  const Index n = plan.size();
  const Index m = plan.window_count();
  for (Index i = 0; i < m; ++i) {
    const Index start = i * plan.interval();
    for (Index j = 0; j < plan.window_size(); ++j)
      seen[static_cast<std::size_t>((start + j) % n)] += 1;
  }
  for (Index p = 0; p < n; ++p) {
    if (seen[static_cast<std::size_t>(p)] != expected)
      throw std::runtime_error(
          "window plan integrity violation: id " + std::to_string(plan.order()[p]) +
          " appears in " + std::to_string(seen[static_cast<std::size_t>(p)]) +
          " windows, expected " + std::to_string(expected));
  }
  return expected;
}

}  // namespace choiceleak
