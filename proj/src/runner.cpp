#include "choiceleak/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "choiceleak/attack_black.hpp"
#include "choiceleak/attack_side.hpp"
#include "choiceleak/baselines.hpp"
#include "choiceleak/io.hpp"
#include "choiceleak/rng.hpp"
#include "choiceleak/selectors.hpp"

namespace choiceleak {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kShadowStream = 4;
constexpr int kShadowRuns = 8;  // per id, split evenly member/nonmember

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
}

void write_manifest(const RunConfig& config) {
  json j;
  j["format_version"] = 1;
  j["config"] = config_to_json(config);
  std::ofstream out(join(config.output_dir, "manifest.json"));
  if (!out) throw std::runtime_error("cannot write manifest.json in " + config.output_dir);
  out << j.dump(2) << "\n";
}

Index dataset_pool_size(const RunConfig& config, const Dataset& dataset) {
  const Index pool = config.dataset.synthetic ? config.dataset.synthetic->n_pool
                                              : config.dataset.pool_size.value_or(0);
  if (pool < 1 || pool > dataset.size())
    throw std::invalid_argument("pool size " + std::to_string(pool) +
                                " outside [1, " + std::to_string(dataset.size()) + "]");
  return pool;
}

/// Balanced synthetic shadow observations: each id gets kShadowRuns
/// observations of its model score, half under the member condition (score
/// nudged up) and half under nonmember, with mild noise. Placeholder
/// calibration data for the likelihood-ratio baseline.
std::vector<ShadowScores> synthesize_shadows(const Dataset& dataset, std::uint64_t seed) {
  if (!dataset.has_scores())
    throw std::invalid_argument("shadow synthesis needs a dataset with model scores");
  Rng g(mix_seed(seed, kShadowStream));
  std::vector<ShadowScores> out(static_cast<std::size_t>(dataset.size()));
  for (Index id = 0; id < dataset.size(); ++id) {
    ShadowScores& s = out[static_cast<std::size_t>(id)];
    const double base = dataset.scores()(id);
    for (int r = 0; r < kShadowRuns / 2; ++r)
      s.member.push_back(base + 0.25 + 0.1 * standard_normal(g));
    for (int r = 0; r < kShadowRuns / 2; ++r)
      s.nonmember.push_back(base - 0.25 + 0.1 * standard_normal(g));
  }
  return out;
}

void print_table(const std::vector<RocReport>& reports, std::ostream& out) {
  out << "surface  n_members  n_nonmembers       auc";
  if (!reports.empty())
    for (const auto& [level, value] : reports.front().tpr_at) {
      char head[32];
      std::snprintf(head, sizeof(head), "  tpr@%g", level);
      out << head;
    }
  out << "\n";
  for (const RocReport& r : reports) {
    char line[256];
    std::snprintf(line, sizeof(line), "%-7s  %9lld  %12lld  %8.6f", to_string(r.surface),
                  static_cast<long long>(r.n_members), static_cast<long long>(r.n_nonmembers),
                  r.auc);
    out << line;
    for (const auto& [level, value] : r.tpr_at) {
      char cell[32];
      std::snprintf(cell, sizeof(cell), "  %8.6f", value);
      out << cell;
    }
    out << "\n";
  }
}

std::string report_name(Surface s) { return std::string("report_") + to_string(s) + ".json"; }
std::string roc_name(Surface s) { return std::string("roc_") + to_string(s) + ".csv"; }

/// Compact value formatting for sweep rows and directory names (no trailing
/// zeros, round-trippable for the values we sweep).
std::string fmt_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

SimulationArtifacts build_simulation(const RunConfig& config) {
  validate_config(config);
  SimulationArtifacts artifacts;
  if (config.dataset.synthetic) {
    const SyntheticConfig& s = *config.dataset.synthetic;
    SyntheticResult drawn = generate_synthetic(config.seed, s.n_pool, s.n_outside, s.dim, s.shift);
    artifacts.dataset = std::move(drawn.dataset);
    artifacts.pool_size = drawn.pool_size;
  } else {
    artifacts.dataset = read_dataset_auto(*config.dataset.file);
    artifacts.pool_size = dataset_pool_size(config, artifacts.dataset);
  }

  std::vector<Index> pool_ids(static_cast<std::size_t>(artifacts.pool_size));
  std::iota(pool_ids.begin(), pool_ids.end(), Index{0});
  artifacts.truth =
      partition_supply_chain(artifacts.dataset, pool_ids, config.selector_spec(), config.ratio);

  if (artifacts.dataset.has_scores())
    artifacts.shadow_scores = synthesize_shadows(artifacts.dataset, config.seed);
  return artifacts;
}

WindowPlan build_attack_plan(const RunConfig& config, Index n_ids) {
  if (n_ids < 1) throw std::invalid_argument("cannot plan windows over an empty dataset");
  std::vector<Index> ids(static_cast<std::size_t>(n_ids));
  std::iota(ids.begin(), ids.end(), Index{0});

  std::optional<std::uint64_t> shuffle_seed;
  if (config.window.shuffle)
    shuffle_seed = config.window.shuffle_seed.value_or(mix_seed(config.seed, 2));

  const Index w = config.window.size;
  const Index interval = config.window.interval;
  const bool divisible = (n_ids % interval == 0) && (w <= n_ids);
  if (divisible || !config.pad_to_multiple)
    return build_window_plan(ids, w, interval, shuffle_seed);

  // explicit opt-in: shrink the schedule to the largest usable prefix of the
  // shuffled order; dropped ids keep zero evidence and score at the floor
  const Index usable = (n_ids / interval) * interval;
  if (usable < w)
    throw std::invalid_argument(
        "pad_to_multiple cannot help: largest interval multiple " + std::to_string(usable) +
        " is smaller than window size " + std::to_string(w));
  if (shuffle_seed) {
    Rng g(*shuffle_seed);
    shuffle_in_place(ids, g);
  }
  ids.resize(static_cast<std::size_t>(usable));
  std::fprintf(stderr,
               "warning: pad_to_multiple truncated the window order from %lld to %lld ids; "
               "%lld dropped ids carry zero evidence\n",
               static_cast<long long>(n_ids), static_cast<long long>(usable),
               static_cast<long long>(n_ids - usable));
  return build_window_plan(ids, w, interval, std::nullopt);
}

AttackArtifacts build_attack(const RunConfig& config, const Dataset& dataset,
                             const SimulationArtifacts* simulation) {
  validate_config(config);
  AttackArtifacts artifacts;

  switch (config.attack.mode) {
    case AttackMode::Side: {
      const WindowPlan plan = build_attack_plan(config, dataset.size());
      exposure_count(plan);  // integrity check before trusting the schedule
      SideAttackOptions options;
      options.scoring = config.attack.scoring;
      options.kappa = config.attack.kappa;
      SideAttackResult r =
          run_side_attack(dataset, plan, config.selector_spec(), config.ratio, options);
      artifacts.ledger = std::move(r.ledger);
      artifacts.scores = std::move(r.scores);
      return artifacts;
    }
    case AttackMode::Black: {
      const WindowPlan plan = build_attack_plan(config, dataset.size());
      exposure_count(plan);
      BlackAttackOptions options;
      options.k_clusters = config.attack.k_clusters;
      options.seed = config.attack.kmeans_seed.value_or(mix_seed(config.seed, 3));
      options.kmeans_iters = config.attack.kmeans_iters;
      options.kmeans_tol = config.attack.kmeans_tol;
      BlackAttackResult r = run_black_attack(dataset, plan, options);
      artifacts.ledger = std::move(r.ledger);
      artifacts.scores = std::move(r.scores);
      return artifacts;
    }
    case AttackMode::Loss: {
      std::vector<double> losses;
      if (config.attack.loss_file) {
        losses = read_loss_csv(*config.attack.loss_file, dataset.size());
      } else {
        if (!dataset.has_scores())
          throw std::invalid_argument(
              "loss baseline needs attack.loss_file or a dataset with model scores");
        losses.resize(static_cast<std::size_t>(dataset.size()));
        for (Index i = 0; i < dataset.size(); ++i)
          losses[static_cast<std::size_t>(i)] = -dataset.scores()(i);
      }
      artifacts.scores.mode = ScoreMode::Baseline;
      artifacts.scores.scores.resize(dataset.size());
      for (Index i = 0; i < dataset.size(); ++i)
        artifacts.scores.scores(i) = attack_loss(losses[static_cast<std::size_t>(i)]);
      return artifacts;
    }
    case AttackMode::Lira: {
      if (!dataset.has_scores())
        throw std::invalid_argument(
            "likelihood-ratio baseline needs a dataset with model scores as targets");
      std::vector<ShadowScores> shadows;
      if (config.attack.shadow_file)
        shadows = read_shadow_csv(*config.attack.shadow_file, dataset.size());
      else if (simulation && !simulation->shadow_scores.empty())
        shadows = simulation->shadow_scores;
      else
        shadows = read_shadow_csv(join(config.output_dir, "shadow_scores.csv"), dataset.size());
      artifacts.scores.mode = ScoreMode::Baseline;
      artifacts.scores.scores.resize(dataset.size());
      for (Index i = 0; i < dataset.size(); ++i)
        artifacts.scores.scores(i) =
            attack_gaussian_lr(dataset.scores()(i), shadows[static_cast<std::size_t>(i)]);
      return artifacts;
    }
  }
  throw std::invalid_argument("unknown attack mode value");
}

void cmd_simulate(const RunConfig& config) {
  validate_config(config);
  ensure_dir(config.output_dir);
  const SimulationArtifacts artifacts = build_simulation(config);
  write_dataset_binary(join(config.output_dir, "dataset.bin"), artifacts.dataset);
  write_dataset_csv(join(config.output_dir, "dataset.csv"), artifacts.dataset);
  write_groundtruth_csv(join(config.output_dir, "groundtruth.csv"), artifacts.truth);
  if (!artifacts.shadow_scores.empty())
    write_shadow_csv(join(config.output_dir, "shadow_scores.csv"), artifacts.shadow_scores);
  write_manifest(config);
}

void cmd_attack(const RunConfig& config) {
  validate_config(config);
  ensure_dir(config.output_dir);
  Dataset dataset;
  if (config.dataset.file) {
    dataset = read_dataset_auto(*config.dataset.file);
  } else {
    const std::string path = join(config.output_dir, "dataset.bin");
    if (!fs::exists(path))
      throw std::invalid_argument(path + " not found; run simulate first or set dataset.file");
    dataset = read_dataset_binary(path);
  }

  const AttackArtifacts artifacts = build_attack(config, dataset);
  write_scores_csv(join(config.output_dir, "scores.csv"), artifacts.scores);
  {
    std::ofstream out(join(config.output_dir, "scores.json"));
    if (!out) throw std::runtime_error("cannot write scores.json in " + config.output_dir);
    out << scores_to_json(artifacts.scores).dump(2) << "\n";
  }
  if (artifacts.ledger.size() > 0)
    write_ledger_csv(join(config.output_dir, "ledger.csv"), artifacts.ledger);
  write_manifest(config);
}

std::vector<RocReport> cmd_eval(const RunConfig& config, std::ostream& out) {
  validate_config(config);
  const ScoreTable table = read_scores_csv(join(config.output_dir, "scores.csv"));
  const GroundTruth truth = read_groundtruth_csv(join(config.output_dir, "groundtruth.csv"));
  const std::vector<RocReport> reports =
      assemble_report(table, truth, config.surfaces, config.fpr_levels);
  for (const RocReport& r : reports) {
    write_report_json(join(config.output_dir, report_name(r.surface)), r);
    write_roc_csv(join(config.output_dir, roc_name(r.surface)), r);
  }
  print_table(reports, out);
  return reports;
}

const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::Ratio: return "ratio";
    case SweepAxis::Interval: return "interval";
    case SweepAxis::KClusters: return "k_clusters";
    case SweepAxis::Shift: return "shift";
  }
  throw std::invalid_argument("unknown sweep axis value");
}

SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "ratio") return SweepAxis::Ratio;
  if (s == "interval") return SweepAxis::Interval;
  if (s == "k_clusters") return SweepAxis::KClusters;
  if (s == "shift") return SweepAxis::Shift;
  throw std::invalid_argument("unknown sweep axis: " + s +
                              " (expected ratio, interval, k_clusters, or shift)");
}

void cmd_sweep(const RunConfig& config, SweepAxis axis, const std::vector<double>& values,
               std::ostream& out) {
  validate_config(config);
  if (values.empty()) throw std::invalid_argument("sweep needs at least one axis value");
  if (axis == SweepAxis::KClusters &&
      config.attack.mode != AttackMode::Black)
    throw std::invalid_argument("sweep axis k_clusters requires attack mode black");
  if (axis == SweepAxis::Shift && !config.dataset.synthetic)
    throw std::invalid_argument("sweep axis shift requires a synthetic dataset");
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("sweep values must be finite");
    if ((axis == SweepAxis::Interval || axis == SweepAxis::KClusters) &&
        (v < 1 || v != std::floor(v)))
      throw std::invalid_argument(std::string("sweep axis ") + to_string(axis) +
                                  " needs positive integer values");
    if (axis == SweepAxis::Ratio && (!(v > 0.0) || v > 1.0))
      throw std::invalid_argument("sweep axis ratio needs values in (0, 1]");
    if (axis == SweepAxis::Shift && v < 0)
      throw std::invalid_argument("sweep axis shift needs values >= 0");
  }

  std::vector<double> ordered = values;
  std::sort(ordered.begin(), ordered.end());
  ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());

  ensure_dir(config.output_dir);
  struct Row {
    double value;
    RocReport report;
  };
  std::vector<Row> rows;

  for (double v : ordered) {
    RunConfig sub = config;
    switch (axis) {
      case SweepAxis::Ratio: sub.ratio = v; break;
      case SweepAxis::Interval: sub.window.interval = static_cast<Index>(v); break;
      case SweepAxis::KClusters: sub.attack.k_clusters = static_cast<Index>(v); break;
      case SweepAxis::Shift: sub.dataset.synthetic->shift = v; break;
    }
    sub.output_dir = join(join(config.output_dir, "sweep"),
                          std::string(to_string(axis)) + "_" + fmt_value(v));
    cmd_simulate(sub);
    cmd_attack(sub);
    std::ostringstream quiet;
    std::vector<RocReport> reports = cmd_eval(sub, quiet);
    out << to_string(axis) << "=" << fmt_value(v) << "\n";
    print_table(reports, out);
    for (RocReport& r : reports) rows.push_back({v, std::move(r)});
  }

  const std::string csv_path =
      join(config.output_dir, std::string("sweep_") + to_string(axis) + ".csv");
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot write " + csv_path);
  csv << "value,surface,auc";
  for (const auto& [level, tpr] : rows.front().report.tpr_at) csv << ",tpr_at_" << fmt_value(level);
  csv << "\n";
  for (const Row& row : rows) {
    csv << fmt_value(row.value) << "," << to_string(row.report.surface) << ","
        << row.report.auc;
    for (const auto& [level, tpr] : row.report.tpr_at) csv << "," << tpr;
    csv << "\n";
  }
  if (!csv) throw std::runtime_error("failed writing " + csv_path);
  out << "wrote " << csv_path << "\n";
}

void cmd_report(const RunConfig& config, std::ostream& out) {
  validate_config(config);
  std::vector<RocReport> reports;
  for (Surface s : config.surfaces) {
    const std::string path = join(config.output_dir, report_name(s));
    std::ifstream in(path);
    if (!in)
      throw std::invalid_argument(path + " not found; run eval first");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw std::runtime_error(path + " is corrupt: " + e.what());
    }
    reports.push_back(report_from_json(j));
    write_roc_csv(join(config.output_dir, roc_name(s)), reports.back());
  }
  print_table(reports, out);
}

}  // namespace choiceleak
