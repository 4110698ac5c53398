#pragma once

#include <span>

#include "choiceleak/types.hpp"

namespace choiceleak {

/// Loss-threshold baseline: lower loss reads as stronger membership, so the
/// score is the negated loss. Loss must be finite.
double attack_loss(double loss);

/// Shadow-calibration scores for the Gaussian likelihood-ratio baseline,
/// split by whether the shadow run included the sample.
struct ShadowScores {
  std::vector<double> member;     // observed when the sample was included
  std::vector<double> nonmember;  // observed when it was excluded
};

/// Gaussian likelihood-ratio baseline: fits one Gaussian to each shadow
/// population (unbiased variance, floored at 1e-12) and returns the
/// log-likelihood ratio of the target score under member vs nonmember fits.
/// Each population needs at least two observations.
double attack_gaussian_lr(double target_score, const ShadowScores& shadows);

}  // namespace choiceleak
