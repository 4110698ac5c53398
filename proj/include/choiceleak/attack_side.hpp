#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "choiceleak/types.hpp"
#include "choiceleak/windows.hpp"

namespace choiceleak {

/// Replays the supply chain's selector on one window and marks which window
/// members survive. Bit j corresponds to the id at window position j.
std::vector<std::uint8_t> evidence_side(const Dataset& dataset, std::span<const Index> window_ids,
                                        const SelectorSpec& selector, double ratio);

/// Folds per-window evidence bits into inclusion counts t per id. Bits must
/// be aligned with the plan (window_count vectors of window_size bits each);
/// misalignment is an integrity failure. The ledger spans ids
/// [0, max id in plan order].
EvidenceLedger accumulate_counts(const WindowPlan& plan,
                                 const std::vector<std::vector<std::uint8_t>>& window_bits);

/// Membership score sigma(t - n/2): the logistic of the margin between the
/// observed inclusion count and half the exposure. Requires 0 <= t <= n,
/// n >= 1.
double score_side(Index t, Index n);

/// Generalized form sigma(kappa * (t - ratio * n)) with sharpness kappa > 0
/// and expected inclusion rate `ratio`. The constant normalizer that would
/// map this to a probability is omitted; rankings are unaffected.
double score_side_general(Index t, Index n, double ratio, double kappa);

/// Thresholds scores at tau: member iff score >= tau.
std::vector<std::uint8_t> decide(const ScoreTable& table, double tau);

enum class SideScoring : std::uint8_t { Simplified, General };

struct SideAttackOptions {
  SideScoring scoring = SideScoring::Simplified;
  double kappa = 1.0;  // used by General scoring only
  int threads = 0;     // 0 = thread_cap()
};

struct SideAttackResult {
  EvidenceLedger ledger;
  ScoreTable scores;
};

/// Full subset-aware pass: replays the selector over every window (windows
/// processed in parallel, folded in window order), then scores every dataset
/// id. Ids outside the plan order carry zero evidence.
SideAttackResult run_side_attack(const Dataset& dataset, const WindowPlan& plan,
                                 const SelectorSpec& selector, double ratio,
                                 const SideAttackOptions& options = {});

}  // namespace choiceleak
