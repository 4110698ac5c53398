#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "choiceleak/baselines.hpp"
#include "choiceleak/config.hpp"
#include "choiceleak/dataset.hpp"
#include "choiceleak/eval.hpp"
#include "choiceleak/types.hpp"
#include "choiceleak/windows.hpp"

namespace choiceleak {

// Pipeline command implementations shared by the CLI and the test suites.
// Every command takes a resolved config (see resolve_config) and is
// deterministic in it; file-writing variants overwrite their outputs.

struct SimulationArtifacts {
  Dataset dataset;
  GroundTruth truth;
  Index pool_size = 0;
  std::vector<ShadowScores> shadow_scores;
};

/// Draws (or loads) the dataset, runs the supply-chain selection once, and
/// synthesizes balanced shadow observations for the likelihood-ratio
/// baseline.
SimulationArtifacts build_simulation(const RunConfig& config);

/// Builds the attack's window schedule over the dataset ids. Honors
/// pad_to_multiple by truncating the shuffled order to the largest usable
/// size (a loud stderr warning reports dropped ids, which keep zero
/// evidence).
WindowPlan build_attack_plan(const RunConfig& config, Index n_ids);

struct AttackArtifacts {
  EvidenceLedger ledger;  // empty for baseline modes
  ScoreTable scores;
};

/// Runs the configured attack (side, black, or a baseline) against a dataset.
AttackArtifacts build_attack(const RunConfig& config, const Dataset& dataset,
                             const SimulationArtifacts* simulation = nullptr);

/// simulate: writes dataset.bin, dataset.csv, groundtruth.csv,
/// shadow_scores.csv, manifest.json into the output directory.
void cmd_simulate(const RunConfig& config);

/// attack: loads the dataset from the output directory (or config's dataset
/// file), runs the attack, writes scores.csv, scores.json, ledger.csv,
/// manifest.json.
void cmd_attack(const RunConfig& config);

/// eval: loads scores + ground truth, writes report_<surface>.json and
/// roc_<surface>.csv, prints a metric table.
std::vector<RocReport> cmd_eval(const RunConfig& config, std::ostream& out);

enum class SweepAxis : std::uint8_t { Ratio, Interval, KClusters, Shift };

const char* to_string(SweepAxis a);
SweepAxis sweep_axis_from_string(const std::string& s);

/// sweep: reruns the full pipeline per axis value (subdirectories under
/// <output_dir>/sweep) and writes an aggregated sweep_<axis>.csv with rows
/// sorted by axis value.
void cmd_sweep(const RunConfig& config, SweepAxis axis, const std::vector<double>& values,
               std::ostream& out);

/// report: re-renders the metric table and plot CSVs from stored report
/// JSON.
void cmd_report(const RunConfig& config, std::ostream& out);

}  // namespace choiceleak
