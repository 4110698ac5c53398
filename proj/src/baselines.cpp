#include "choiceleak/baselines.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace choiceleak {

namespace {

constexpr double kVarianceFloor = 1e-12;

struct GaussianFit {
  double mean = 0.0;
  double var = kVarianceFloor;
};

GaussianFit fit_gaussian(const std::vector<double>& xs, const char* side) {
  if (xs.size() < 2)
    throw std::invalid_argument(std::string("gaussian likelihood-ratio needs >= 2 ") + side +
                                " shadow scores, got " + std::to_string(xs.size()));
  double mean = 0.0;
  for (double x : xs) {
    if (!std::isfinite(x))
      throw std::invalid_argument(std::string("shadow score on ") + side + " side is not finite");
    mean += x;
  }
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  GaussianFit fit;
  fit.mean = mean;
  fit.var = std::max(ss / static_cast<double>(xs.size() - 1), kVarianceFloor);  // unbiased
  return fit;
}

double log_pdf(double x, const GaussianFit& fit) {
  const double d = x - fit.mean;
  return -0.5 * (std::log(2.0 * M_PI * fit.var) + d * d / fit.var);
}

}  // namespace

double attack_loss(double loss) {
  if (!std::isfinite(loss)) throw std::invalid_argument("loss must be finite");
  return -loss;
}

double attack_gaussian_lr(double target_score, const ShadowScores& shadows) {
  if (!std::isfinite(target_score))
    throw std::invalid_argument("target score must be finite");
  const GaussianFit member = fit_gaussian(shadows.member, "member");
  const GaussianFit nonmember = fit_gaussian(shadows.nonmember, "nonmember");
  return log_pdf(target_score, member) - log_pdf(target_score, nonmember);
}

}  // namespace choiceleak
