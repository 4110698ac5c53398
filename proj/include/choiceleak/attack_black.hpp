#pragma once

#include <cstdint>
#include <vector>

#include "choiceleak/kmeans.hpp"
#include "choiceleak/types.hpp"
#include "choiceleak/windows.hpp"

namespace choiceleak {

/// Marks the window members whose distance is at most the lower median
/// (the ceil(W/2)-th smallest distance). All distances must be finite and
/// non-negative. With distinct distances exactly ceil(W/2) bits are set.
std::vector<std::uint8_t> median_evidence(const Eigen::Ref<const Eigen::VectorXd>& distances);

/// Evidence for one window in the black-box setting: cluster the window's
/// feature rows, take each member's distance to its assigned centroid, and
/// flag the members at or below the window's lower median distance.
struct WindowEvidence {
  std::vector<std::uint8_t> bits;
  Eigen::VectorXd distances;
};

WindowEvidence evidence_black(const Eigen::Ref<const RowMatrixXd>& window_points, Index k,
                              const KMeansOptions& options);

/// Folds per-window black-box evidence into counts and per-id distance sums
/// (distances accumulate only over windows where the evidence bit is set).
/// Alignment with the plan is an integrity requirement.
EvidenceLedger aggregate_black(const WindowPlan& plan,
                               const std::vector<WindowEvidence>& evidence);

/// Black-box score: sigma(t - n/2) / d_bar where d_bar is the mean clustering
/// distance over included windows. Zero inclusions score 0; a zero mean
/// distance divides by 1e-12 instead. Requires 0 <= t <= n and d_bar >= 0.
double score_black(Index t, Index n, double d_bar);

struct BlackAttackOptions {
  Index k_clusters = 5;
  std::uint64_t seed = 0;  // per-window kmeans seeds derive from this
  Index kmeans_iters = 100;
  double kmeans_tol = 1e-6;
  int threads = 0;  // 0 = thread_cap()
};

struct BlackAttackResult {
  EvidenceLedger ledger;
  ScoreTable scores;
};

/// Full black-box pass: per-window clustering evidence (windows processed in
/// parallel, folded in window order), then a score for every dataset id. Ids
/// outside the plan order carry zero evidence.
BlackAttackResult run_black_attack(const Dataset& dataset, const WindowPlan& plan,
                                   const BlackAttackOptions& options = {});

}  // namespace choiceleak
