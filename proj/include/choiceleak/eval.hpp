#pragma once

#include <span>
#include <utility>
#include <vector>

#include "choiceleak/types.hpp"

namespace choiceleak {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // score cut-off achieving this point (member iff score >= threshold)
};

struct RocReport {
  Surface surface = Surface::TM;
  double auc = 0.0;
  Index n_members = 0;
  Index n_nonmembers = 0;
  std::vector<RocPoint> curve;                     // anchored at (0,0), ends at (1,1)
  std::vector<std::pair<double, double>> tpr_at;  // (fpr level, tpr), request order
};

/// ROC via a single sorted sweep. Tied scores collapse into one curve step
/// and contribute half-credit to the AUC (Mann-Whitney convention); the AUC
/// is accumulated in exact integer arithmetic with one final division, so it
/// matches brute-force pairwise counting bit for bit. Both classes must be
/// non-empty and scores must be finite.
RocReport roc_auc(const Eigen::Ref<const Eigen::VectorXd>& scores, const SurfaceLabels& labels);

/// True-positive rate at the largest achievable false-positive rate <= level
/// (step convention, no interpolation). Level must lie in (0, 1).
double tpr_at_fpr(const RocReport& report, double level);
double tpr_at_fpr(const Eigen::Ref<const Eigen::VectorXd>& scores, const SurfaceLabels& labels,
                  double level);

/// Builds one RocReport per requested surface from a dense score table and
/// ground truth. Scores must cover every labeled id.
std::vector<RocReport> assemble_report(const ScoreTable& table, const GroundTruth& truth,
                                       std::span<const Surface> surfaces,
                                       std::span<const double> fpr_levels);

}  // namespace choiceleak
