// choiceleak: simulate a subset-selection data supply chain, attack it via
// sliding-window inclusion evidence, and score the resulting membership
// leakage. Exit codes: 0 ok, 1 runtime failure, 2 invalid input.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "choiceleak/config.hpp"
#include "choiceleak/runner.hpp"

namespace {

using choiceleak::RunConfig;

struct FlagSet {
  std::string config_path;
  std::string out;
  std::uint64_t seed = 0;
  std::uint64_t selector_seed = 0;
  std::string selector;
  bool invert = false;
  double ratio = 0;
  // dataset
  std::int64_t pool = 0, outside = 0, dim = 0, pool_size = 0;
  double shift = 0;
  std::string dataset_file;
  // window / attack
  std::int64_t window = 0, interval = 0, k_clusters = 0, kmeans_iters = 0;
  double kappa = 0, kmeans_tol = 0;
  std::uint64_t shuffle_seed = 0, kmeans_seed = 0;
  bool no_shuffle = false;
  bool pad_to_multiple = false;
  std::string mode;
  std::string scoring;
  std::string loss_file, shadow_file;
  // eval
  std::vector<std::string> surfaces;
  std::vector<double> fpr;
  // sweep
  std::string axis;
  std::vector<double> values;
};

void add_common(CLI::App* cmd, FlagSet& f) {
  cmd->add_option("--config", f.config_path, "JSON config file (flags override it)");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--seed", f.seed, "master run seed");
}

void add_dataset(CLI::App* cmd, FlagSet& f) {
  cmd->add_option("--pool", f.pool, "synthetic selection-pool size");
  cmd->add_option("--outside", f.outside, "synthetic outside-sample count");
  cmd->add_option("--dim", f.dim, "synthetic feature dimension");
  cmd->add_option("--shift", f.shift, "synthetic outside-distribution shift");
  cmd->add_option("--dataset", f.dataset_file, "dataset file (.csv or binary)");
  cmd->add_option("--pool-size", f.pool_size, "pool boundary for file datasets");
}

void add_selection(CLI::App* cmd, FlagSet& f) {
  cmd->add_option("--selector", f.selector,
                  "selector kind: random, top_score, herding, k_center");
  cmd->add_option("--selector-seed", f.selector_seed, "selector seed (random kind)");
  cmd->add_flag("--invert", f.invert, "top_score: keep highest instead of lowest scores");
  cmd->add_option("--ratio", f.ratio, "selection intensity in (0, 1]");
}

void add_attack(CLI::App* cmd, FlagSet& f) {
  cmd->add_option("--mode", f.mode, "attack mode: side, black, loss, lira");
  cmd->add_option("--window", f.window, "window size W");
  cmd->add_option("--interval", f.interval, "window interval (stride)");
  cmd->add_option("--scoring", f.scoring, "side scoring: simplified or general");
  cmd->add_option("--kappa", f.kappa, "sharpness for general side scoring");
  cmd->add_option("--k", f.k_clusters, "black-box cluster count");
  cmd->add_option("--kmeans-seed", f.kmeans_seed, "black-box clustering seed");
  cmd->add_option("--kmeans-iters", f.kmeans_iters, "black-box clustering iteration cap");
  cmd->add_option("--kmeans-tol", f.kmeans_tol, "black-box clustering movement tolerance");
  cmd->add_option("--shuffle-seed", f.shuffle_seed, "window-order shuffle seed");
  cmd->add_flag("--no-shuffle", f.no_shuffle, "keep the natural id order for windows");
  cmd->add_flag("--pad-to-multiple", f.pad_to_multiple,
                "truncate the window order to the largest interval multiple when the "
                "id count is not divisible (dropped ids keep zero evidence)");
  cmd->add_option("--loss-file", f.loss_file, "loss baseline: id,score CSV of losses");
  cmd->add_option("--shadow-file", f.shadow_file, "lira baseline: id,score,side CSV");
}

void add_eval(CLI::App* cmd, FlagSet& f) {
  cmd->add_option("--surface", f.surfaces, "audit surfaces (tm, sp)")->delimiter(',');
  cmd->add_option("--fpr", f.fpr, "false-positive levels for TPR readout")->delimiter(',');
}

RunConfig assemble(const CLI::App* cmd, const FlagSet& f) {
  RunConfig c;
  if (cmd->count("--config")) c = choiceleak::load_config_file(f.config_path);
  auto set = [&](const char* name) { return cmd->get_option_no_throw(name) && cmd->count(name); };

  if (set("--out")) c.output_dir = f.out;
  if (set("--seed")) c.seed = f.seed;
  if (set("--dataset")) {
    c.dataset.file = f.dataset_file;
    c.dataset.synthetic.reset();
  }
  if (set("--pool-size")) c.dataset.pool_size = f.pool_size;
  auto synth = [&]() -> choiceleak::SyntheticConfig& {
    if (!c.dataset.synthetic)
      throw std::invalid_argument("synthetic flags conflict with a file dataset");
    return *c.dataset.synthetic;
  };
  if (set("--pool")) synth().n_pool = f.pool;
  if (set("--outside")) synth().n_outside = f.outside;
  if (set("--dim")) synth().dim = f.dim;
  if (set("--shift")) synth().shift = f.shift;
  if (set("--selector")) c.selector_kind = choiceleak::selector_kind_from_string(f.selector);
  if (set("--selector-seed")) c.selector_seed = f.selector_seed;
  if (set("--invert")) c.selector_invert = f.invert;
  if (set("--ratio")) c.ratio = f.ratio;
  if (set("--window")) c.window.size = f.window;
  if (set("--interval")) c.window.interval = f.interval;
  if (set("--shuffle-seed")) c.window.shuffle_seed = f.shuffle_seed;
  if (set("--no-shuffle")) c.window.shuffle = !f.no_shuffle;
  if (set("--pad-to-multiple")) c.pad_to_multiple = f.pad_to_multiple;
  if (set("--mode")) c.attack.mode = choiceleak::attack_mode_from_string(f.mode);
  if (set("--scoring")) {
    if (f.scoring == "simplified")
      c.attack.scoring = choiceleak::SideScoring::Simplified;
    else if (f.scoring == "general")
      c.attack.scoring = choiceleak::SideScoring::General;
    else
      throw std::invalid_argument("unknown --scoring: " + f.scoring);
  }
  if (set("--kappa")) c.attack.kappa = f.kappa;
  if (set("--k")) c.attack.k_clusters = f.k_clusters;
  if (set("--kmeans-seed")) c.attack.kmeans_seed = f.kmeans_seed;
  if (set("--kmeans-iters")) c.attack.kmeans_iters = f.kmeans_iters;
  if (set("--kmeans-tol")) c.attack.kmeans_tol = f.kmeans_tol;
  if (set("--loss-file")) c.attack.loss_file = f.loss_file;
  if (set("--shadow-file")) c.attack.shadow_file = f.shadow_file;
  if (set("--surface")) {
    c.surfaces.clear();
    for (const std::string& s : f.surfaces)
      c.surfaces.push_back(choiceleak::surface_from_string(s));
  }
  if (set("--fpr")) c.fpr_levels = f.fpr;

  c = choiceleak::resolve_config(std::move(c));
  choiceleak::validate_config(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"privacy audit for subset-selection data supply chains"};
  app.require_subcommand(1);
  FlagSet f;

  CLI::App* simulate = app.add_subcommand(
      "simulate", "draw a benchmark dataset and run the supply-chain selection once");
  add_common(simulate, f);
  add_dataset(simulate, f);
  add_selection(simulate, f);

  CLI::App* attack = app.add_subcommand(
      "attack", "run the inclusion-evidence attack (or a baseline) over the dataset");
  add_common(attack, f);
  add_dataset(attack, f);
  add_selection(attack, f);
  add_attack(attack, f);

  CLI::App* eval = app.add_subcommand("eval", "score attack output against ground truth");
  add_common(eval, f);
  add_eval(eval, f);

  CLI::App* sweep =
      app.add_subcommand("sweep", "rerun the full pipeline across one axis of settings");
  add_common(sweep, f);
  add_dataset(sweep, f);
  add_selection(sweep, f);
  add_attack(sweep, f);
  add_eval(sweep, f);
  sweep->add_option("--axis", f.axis, "sweep axis: ratio, interval, k_clusters, shift")
      ->required();
  sweep->add_option("--values", f.values, "axis values (comma separated)")
      ->required()
      ->delimiter(',');

  CLI::App* report =
      app.add_subcommand("report", "re-render tables and plot files from stored reports");
  add_common(report, f);
  add_eval(report, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (simulate->parsed()) {
      choiceleak::cmd_simulate(assemble(simulate, f));
    } else if (attack->parsed()) {
      choiceleak::cmd_attack(assemble(attack, f));
    } else if (eval->parsed()) {
      choiceleak::cmd_eval(assemble(eval, f), std::cout);
    } else if (sweep->parsed()) {
      choiceleak::cmd_sweep(assemble(sweep, f), choiceleak::sweep_axis_from_string(f.axis),
                            f.values, std::cout);
    } else if (report->parsed()) {
      choiceleak::cmd_report(assemble(report, f), std::cout);
    }
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
