#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "choiceleak/attack_side.hpp"
#include "choiceleak/io.hpp"
#include "choiceleak/runner.hpp"
#include "support/oracles.hpp"

using namespace choiceleak;
namespace fs = std::filesystem;

namespace {

std::string fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "choiceleak_runner_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Small, fast pipeline configuration: 100 samples, 10 windows of 20.
RunConfig small_config(const std::string& out_dir) {
  RunConfig c;
  c.seed = 7;
  c.dataset.synthetic = SyntheticConfig{60, 40, 4, 1.0};
  c.ratio = 0.4;
  c.window.size = 20;
  c.window.interval = 10;
  c.output_dir = out_dir;
  return resolve_config(c);
}

}  // namespace

TEST_CASE("simulation is deterministic and splits the pool at the ratio") {
  const RunConfig c = small_config("unused");
  const SimulationArtifacts a = build_simulation(c);
  const SimulationArtifacts b = build_simulation(c);

  CHECK(a.dataset.size() == 100);
  CHECK(a.pool_size == 60);
  CHECK((a.dataset.features().array() == b.dataset.features().array()).all());
  CHECK(a.truth.tags == b.truth.tags);

  CHECK(a.truth.count(Tag::Included) == 24);  // 0.4 of 60
  CHECK(a.truth.count(Tag::Excluded) == 36);
  CHECK(a.truth.count(Tag::Outside) == 40);
  for (Index id = 60; id < 100; ++id)
    CHECK(a.truth.tags[static_cast<std::size_t>(id)] == Tag::Outside);

  // shadow populations ride along for every id, balanced four per side
  REQUIRE(a.shadow_scores.size() == 100);
  CHECK(a.shadow_scores[0].member.size() == 4);
  CHECK(a.shadow_scores[0].nonmember.size() == 4);
  CHECK(a.shadow_scores[3].member == b.shadow_scores[3].member);
}

TEST_CASE("simulation can load a dataset file and a pool boundary") {
  const std::string dir = fresh_dir("sim_file");
  const Dataset d = oracles::random_dataset(11, 100, 3);
  const std::string path = dir + "/points.bin";
  write_dataset_binary(path, d);

  RunConfig c;
  c.dataset.synthetic.reset();
  c.dataset.file = path;
  c.dataset.pool_size = 60;
  c.output_dir = dir;
  c = resolve_config(c);

  const SimulationArtifacts a = build_simulation(c);
  CHECK(a.dataset.size() == 100);
  CHECK(a.pool_size == 60);
  CHECK(a.truth.count(Tag::Outside) == 40);
  CHECK(a.truth.count(Tag::Included) == 24);

  c.dataset.pool_size = 101;  // beyond the dataset
  CHECK_THROWS_AS(build_simulation(c), std::invalid_argument);
}

TEST_CASE("attack plans honor shuffle settings and the truncation opt-in") {
  RunConfig c = small_config("unused");
  const WindowPlan seeded = build_attack_plan(c, 100);
  const WindowPlan replay = build_attack_plan(c, 100);
  CHECK(std::equal(seeded.order().begin(), seeded.order().end(), replay.order().begin(),
                   replay.order().end()));
  CHECK(seeded.shuffle_seed() == c.window.shuffle_seed);

  c.window.shuffle = false;
  const WindowPlan plain = build_attack_plan(c, 100);
  for (Index i = 0; i < 100; ++i) CHECK(plain.order()[static_cast<std::size_t>(i)] == i);

  // 103 ids do not divide into intervals of 10: plain planning refuses,
  // truncation shrinks to the largest usable prefix
  c.window.shuffle = true;
  CHECK_THROWS_AS(build_attack_plan(c, 103), std::invalid_argument);
  c.pad_to_multiple = true;
  const WindowPlan trimmed = build_attack_plan(c, 103);
  CHECK(trimmed.size() == 100);
  std::vector<Index> sorted(trimmed.order().begin(), trimmed.order().end());
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  CHECK(sorted.back() < 103);

  c.window.size = 20;
  CHECK_THROWS_WITH_AS(build_attack_plan(c, 15), doctest::Contains("cannot help"),
                       std::invalid_argument);
}

TEST_CASE("side attack through the runner matches the naive replay") {
  const RunConfig c = small_config("unused");
  const SimulationArtifacts sim = build_simulation(c);
  const AttackArtifacts attack = build_attack(c, sim.dataset, &sim);

  const WindowPlan plan = build_attack_plan(c, sim.dataset.size());
  const std::vector<int> expect = oracles::naive_side_ledger(
      sim.dataset, plan.order(), c.window.size, c.window.interval, c.selector_spec(), c.ratio);
  REQUIRE(attack.ledger.t.size() == expect.size());
  for (std::size_t id = 0; id < expect.size(); ++id) CHECK(attack.ledger.t[id] == expect[id]);
  CHECK(attack.ledger.n == 2);
  for (Index id = 0; id < sim.dataset.size(); ++id)
    CHECK(attack.scores.scores(id) ==
          score_side(attack.ledger.t[static_cast<std::size_t>(id)], attack.ledger.n));
}

TEST_CASE("black attack through the runner is deterministic with default clusters") {
  RunConfig c = small_config("unused");
  c.attack.mode = AttackMode::Black;
  const SimulationArtifacts sim = build_simulation(c);
  const AttackArtifacts a = build_attack(c, sim.dataset, &sim);
  const AttackArtifacts b = build_attack(c, sim.dataset, &sim);
  CHECK(a.scores.mode == ScoreMode::Black);
  CHECK(a.ledger.has_distances());
  CHECK(a.ledger.t == b.ledger.t);
  CHECK((a.scores.scores.array() == b.scores.scores.array()).all());
  for (Index id = 0; id < sim.dataset.size(); ++id) CHECK(a.scores.scores(id) >= 0.0);
}

TEST_CASE("loss baseline defaults to the negated model-score loss") {
  const RunConfig base = small_config("unused");
  const SimulationArtifacts sim = build_simulation(base);

  RunConfig c = base;
  c.attack.mode = AttackMode::Loss;
  const AttackArtifacts attack = build_attack(c, sim.dataset, &sim);
  CHECK(attack.scores.mode == ScoreMode::Baseline);
  CHECK(attack.ledger.size() == 0);
  // default loss is the negated model score, so scoring negates it back
  for (Index id = 0; id < sim.dataset.size(); ++id)
    CHECK(attack.scores.scores(id) == sim.dataset.scores()(id));
}

TEST_CASE("likelihood-ratio baseline consumes simulation shadows") {
  RunConfig c = small_config("unused");
  c.attack.mode = AttackMode::Lira;
  const SimulationArtifacts sim = build_simulation(c);
  const AttackArtifacts attack = build_attack(c, sim.dataset, &sim);
  CHECK(attack.scores.mode == ScoreMode::Baseline);
  REQUIRE(attack.scores.scores.size() == sim.dataset.size());
  for (Index id = 0; id < sim.dataset.size(); ++id)
    CHECK(std::isfinite(attack.scores.scores(id)));

  // the calibration populations sit a fixed nudge apart on average
  double gap = 0.0;
  for (const ShadowScores& s : sim.shadow_scores) {
    double m = 0.0, nm = 0.0;
    for (double v : s.member) m += v / static_cast<double>(s.member.size());
    for (double v : s.nonmember) nm += v / static_cast<double>(s.nonmember.size());
    gap += (m - nm) / static_cast<double>(sim.shadow_scores.size());
  }
  CHECK(gap == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("simulate writes its artifact set and reruns byte-identically") {
  const std::string dir = fresh_dir("simulate");
  const RunConfig c = small_config(dir);
  cmd_simulate(c);
  for (const char* name :
       {"dataset.bin", "dataset.csv", "groundtruth.csv", "shadow_scores.csv", "manifest.json"})
    CHECK(fs::exists(fs::path(dir) / name));

  const std::string first = slurp(dir + "/dataset.bin");
  cmd_simulate(c);
  CHECK(slurp(dir + "/dataset.bin") == first);

  // the manifest echoes the exact resolved configuration
  std::ifstream in(dir + "/manifest.json");
  nlohmann::json manifest;
  in >> manifest;
  CHECK(manifest["format_version"] == 1);
  CHECK(config_from_json(manifest["config"]) == c);
}

TEST_CASE("attack requires a simulated dataset or an explicit file") {
  const std::string dir = fresh_dir("attack_missing");
  const RunConfig c = small_config(dir);
  CHECK_THROWS_WITH_AS(cmd_attack(c), doctest::Contains("run simulate first"),
                       std::invalid_argument);
}

TEST_CASE("the full pipeline round-trips through the filesystem") {
  const std::string dir = fresh_dir("pipeline");
  const RunConfig c = small_config(dir);
  cmd_simulate(c);
  cmd_attack(c);
  for (const char* name : {"scores.csv", "scores.json", "ledger.csv"})
    CHECK(fs::exists(fs::path(dir) / name));

  const ScoreTable table = read_scores_csv(dir + "/scores.csv");
  CHECK(table.size() == 100);

  // written scores match an in-memory run on the written dataset
  const Dataset stored = read_dataset_binary(dir + "/dataset.bin");
  const AttackArtifacts direct = build_attack(c, stored);
  CHECK((table.scores.array() == direct.scores.scores.array()).all());

  std::ostringstream out;
  const std::vector<RocReport> reports = cmd_eval(c, out);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].surface == Surface::TM);
  CHECK(reports[1].surface == Surface::SP);
  for (const char* name : {"report_tm.json", "roc_tm.csv", "report_sp.json", "roc_sp.csv"})
    CHECK(fs::exists(fs::path(dir) / name));
  CHECK(out.str().find("surface") != std::string::npos);
  CHECK(out.str().find("tpr@0.05") != std::string::npos);

  std::ostringstream rendered;
  cmd_report(c, rendered);
  CHECK(rendered.str() == out.str());
}

TEST_CASE("report without eval names the missing prerequisite") {
  const std::string dir = fresh_dir("report_missing");
  const RunConfig c = small_config(dir);
  std::ostringstream out;
  CHECK_THROWS_WITH_AS(cmd_report(c, out), doctest::Contains("run eval first"),
                       std::invalid_argument);
}

TEST_CASE("a single-value sweep reproduces the single run byte for byte") {
  const std::string sweep_dir = fresh_dir("sweep_single");
  const std::string solo_dir = fresh_dir("solo");

  RunConfig c = small_config(sweep_dir);
  std::ostringstream out;
  cmd_sweep(c, SweepAxis::Ratio, {0.4}, out);

  RunConfig solo = small_config(solo_dir);
  solo.ratio = 0.4;
  cmd_simulate(solo);
  cmd_attack(solo);

  const std::string sub = sweep_dir + "/sweep/ratio_0.4";
  CHECK(slurp(sub + "/scores.csv") == slurp(solo_dir + "/scores.csv"));
  CHECK(slurp(sub + "/dataset.bin") == slurp(solo_dir + "/dataset.bin"));
}

TEST_CASE("sweeps emit one row per value and surface") {
  const std::string dir = fresh_dir("sweep_rows");
  RunConfig c = small_config(dir);
  std::ostringstream out;
  cmd_sweep(c, SweepAxis::Ratio, {0.6, 0.2, 0.4, 0.6}, out);  // dup + unsorted on purpose

  std::ifstream csv(dir + "/sweep_ratio.csv");
  REQUIRE(csv);
  std::string line;
  std::getline(csv, line);
  CHECK(line == "value,surface,auc,tpr_at_0.05");
  std::vector<std::string> rows;
  while (std::getline(csv, line))
    if (!line.empty()) rows.push_back(line);
  REQUIRE(rows.size() == 6);  // 3 distinct values x 2 surfaces
  CHECK(rows[0].rfind("0.2,tm", 0) == 0);
  CHECK(rows[1].rfind("0.2,sp", 0) == 0);
  CHECK(rows[4].rfind("0.6,tm", 0) == 0);
}

TEST_CASE("sweep validation rejects mismatched axes") {
  const std::string dir = fresh_dir("sweep_bad");
  RunConfig c = small_config(dir);
  std::ostringstream out;
  CHECK_THROWS_WITH_AS(cmd_sweep(c, SweepAxis::KClusters, {2, 4}, out),
                       doctest::Contains("black"), std::invalid_argument);
  CHECK_THROWS_AS(cmd_sweep(c, SweepAxis::Interval, {2.5}, out), std::invalid_argument);
  CHECK_THROWS_AS(cmd_sweep(c, SweepAxis::Ratio, {}, out), std::invalid_argument);
  CHECK_THROWS_AS(cmd_sweep(c, SweepAxis::Ratio, {1.5}, out), std::invalid_argument);

  RunConfig file_based = c;
  file_based.dataset.synthetic.reset();
  file_based.dataset.file = dir + "/points.bin";
  file_based.dataset.pool_size = 60;
  const Dataset d = oracles::random_dataset(2, 100, 3);
  write_dataset_binary(*file_based.dataset.file, d);
  CHECK_THROWS_WITH_AS(cmd_sweep(file_based, SweepAxis::Shift, {0.0, 1.0}, out),
                       doctest::Contains("synthetic"), std::invalid_argument);

  CHECK_THROWS_AS(sweep_axis_from_string("slope"), std::invalid_argument);
  CHECK(sweep_axis_from_string("ratio") == SweepAxis::Ratio);
  CHECK(sweep_axis_from_string(to_string(SweepAxis::KClusters)) == SweepAxis::KClusters);
}
