#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "choiceleak/baselines.hpp"
#include "choiceleak/eval.hpp"
#include "choiceleak/types.hpp"
#include "choiceleak/windows.hpp"

namespace choiceleak {

// File formats. CSV files carry a header row; the binary dataset format is
// little-endian with layout:
//   magic "CLEB" | u32 version=1 | u64 rows | u32 dim | u32 flags
//   then per row: dim * f32 features [, i32 label][, f32 score]
// flags bit 0 = labels present, bit 1 = scores present.

/// id,feat_0..feat_{d-1}[,label][,score]
void write_dataset_csv(const std::string& path, const Dataset& dataset);
Dataset read_dataset_csv(const std::string& path);

void write_dataset_binary(const std::string& path, const Dataset& dataset);
Dataset read_dataset_binary(const std::string& path);

/// Reads a dataset by extension: .csv as CSV, anything else as binary.
Dataset read_dataset_auto(const std::string& path);

/// id,tag with tag in {included, excluded, outside}
void write_groundtruth_csv(const std::string& path, const GroundTruth& truth);
GroundTruth read_groundtruth_csv(const std::string& path);

/// id,score (ids must be dense 0..N-1, any order)
void write_scores_csv(const std::string& path, const ScoreTable& table);
ScoreTable read_scores_csv(const std::string& path);

nlohmann::json scores_to_json(const ScoreTable& table);
ScoreTable scores_from_json(const nlohmann::json& j);

/// id,t,n[,dbar]; dbar column present only for black-box ledgers (empty cell
/// when t = 0, where the mean distance is undefined)
void write_ledger_csv(const std::string& path, const EvidenceLedger& ledger);
EvidenceLedger read_ledger_csv(const std::string& path);

/// id,score,side with side in {member, nonmember}; one row per shadow
/// observation, multiple rows per id allowed
void write_shadow_csv(const std::string& path, const std::vector<ShadowScores>& per_id);
std::vector<ShadowScores> read_shadow_csv(const std::string& path, Index n_ids);

/// Per-id losses for the loss baseline: id,score CSV holding losses.
std::vector<double> read_loss_csv(const std::string& path, Index n_ids);
void write_loss_csv(const std::string& path, const std::vector<double>& losses);

nlohmann::json report_to_json(const RocReport& report);
void write_report_json(const std::string& path, const RocReport& report);
RocReport report_from_json(const nlohmann::json& j);

/// fpr,tpr rows for plotting
void write_roc_csv(const std::string& path, const RocReport& report);

nlohmann::json window_plan_summary(const WindowPlan& plan);

}  // namespace choiceleak
