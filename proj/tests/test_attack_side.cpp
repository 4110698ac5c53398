#include <doctest.h>

#include <cmath>
#include <numeric>

#include "choiceleak/attack_side.hpp"
#include "choiceleak/dataset.hpp"
#include "support/oracles.hpp"

using namespace choiceleak;

namespace {

Dataset scored_dataset(std::initializer_list<double> scores) {
  const Index n = static_cast<Index>(scores.size());
  RowMatrixXd f = RowMatrixXd::Zero(n, 1);
  Eigen::VectorXd s(n);
  Index i = 0;
  for (double v : scores) s(i++) = v;
  return Dataset(std::move(f), {}, std::move(s));
}

std::vector<Index> iota_ids(Index n) {
  std::vector<Index> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), Index{0});
  return ids;
}

}  // namespace

TEST_CASE("evidence bits mark selector survivors in window position order") {
  const Dataset d = scored_dataset({1.0, 9.0, 2.0, 8.0});
  SelectorSpec spec;  // TopScore, keep lowest
  const std::vector<Index> window{0, 1, 2, 3};
  CHECK(evidence_side(d, window, spec, 0.5) == std::vector<std::uint8_t>{1, 0, 1, 0});
  CHECK(evidence_side(d, window, spec, 1.0) == std::vector<std::uint8_t>{1, 1, 1, 1});

  // bit j follows the id at position j, not the id value
  const std::vector<Index> reversed{3, 2, 1, 0};
  CHECK(evidence_side(d, reversed, spec, 0.5) == std::vector<std::uint8_t>{0, 1, 0, 1});

  SelectorSpec rnd;
  rnd.kind = SelectorKind::Random;
  rnd.seed = 7;
  CHECK(evidence_side(d, window, rnd, 0.5) == evidence_side(d, window, rnd, 0.5));
}

TEST_CASE("accumulated counts match a from-scratch window walk") {
  const Dataset d = scored_dataset({0.3, 0.9, 0.1, 0.7, 0.5, 0.2});
  SelectorSpec spec;
  const WindowPlan plan = build_window_plan(iota_ids(6), 4, 2, std::nullopt);

  std::vector<std::vector<std::uint8_t>> bits;
  for (Index i = 0; i < plan.window_count(); ++i)
    bits.push_back(evidence_side(d, plan.window(i), spec, 0.5));
  const EvidenceLedger ledger = accumulate_counts(plan, bits);

  CHECK(ledger.n == 2);
  const std::vector<int> expect = oracles::naive_side_ledger(d, iota_ids(6), 4, 2, spec, 0.5);
  REQUIRE(ledger.t.size() == expect.size());
  for (std::size_t id = 0; id < expect.size(); ++id) CHECK(ledger.t[id] == expect[id]);
}

TEST_CASE("misaligned evidence is rejected as an integrity failure") {
  const WindowPlan plan = build_window_plan(iota_ids(6), 4, 2, std::nullopt);
  std::vector<std::vector<std::uint8_t>> short_bits(2, std::vector<std::uint8_t>(4, 1));
  CHECK_THROWS_AS(accumulate_counts(plan, short_bits), std::runtime_error);
  std::vector<std::vector<std::uint8_t>> ragged(3, std::vector<std::uint8_t>(4, 1));
  ragged[1].pop_back();
  CHECK_THROWS_AS(accumulate_counts(plan, ragged), std::runtime_error);
}

TEST_CASE("margin score hits its anchors exactly") {
  CHECK(score_side(5, 10) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(score_side(10, 10) == doctest::Approx(0.9933071490757153).epsilon(1e-12));
  CHECK(score_side(0, 10) == doctest::Approx(0.0066928509242848554).epsilon(1e-12));
  // logistic symmetry: counts mirrored about n/2 sum to one
  for (Index t = 0; t <= 12; ++t)
    CHECK(score_side(t, 12) + score_side(12 - t, 12) == doctest::Approx(1.0).epsilon(1e-12));
  for (Index t = 0; t < 12; ++t) CHECK(score_side(t, 12) < score_side(t + 1, 12));

  CHECK_THROWS_AS(score_side(0, 0), std::invalid_argument);
  CHECK_THROWS_AS(score_side(-1, 10), std::invalid_argument);
  CHECK_THROWS_AS(score_side(11, 10), std::invalid_argument);
}

TEST_CASE("general scoring reduces to the simplified form and centers at r*n") {
  CHECK(score_side_general(4, 10, 0.4, 2.5) == doctest::Approx(0.5).epsilon(1e-15));
  for (Index t = 0; t <= 10; ++t)
    CHECK(score_side_general(t, 10, 0.5, 1.0) ==
          doctest::Approx(score_side(t, 10)).epsilon(1e-15));
  CHECK(score_side_general(24, 24, 0.5, 1.0) == doctest::Approx(0.9999938558253978).epsilon(1e-9));

  // sharper kappa steepens but never reorders
  for (Index t = 0; t < 10; ++t)
    CHECK(score_side_general(t, 10, 0.3, 4.0) < score_side_general(t + 1, 10, 0.3, 4.0));

  CHECK_THROWS_AS(score_side_general(1, 10, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(score_side_general(1, 10, 1.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(score_side_general(1, 10, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(score_side_general(1, 10, 0.5, -2.0), std::invalid_argument);
}

TEST_CASE("dropping a constant normalizer cannot change any ranking") {
  const double z = 3.7;
  std::vector<double> raw, scaled;
  for (Index t = 0; t <= 20; ++t) {
    raw.push_back(score_side_general(t, 20, 0.4, 1.3));
    scaled.push_back(raw.back() / z);
  }
  for (std::size_t i = 0; i + 1 < raw.size(); ++i) {
    CHECK((raw[i] < raw[i + 1]) == (scaled[i] < scaled[i + 1]));
    CHECK((raw[i] == raw[i + 1]) == (scaled[i] == scaled[i + 1]));
  }
}

TEST_CASE("thresholding is inclusive at the boundary") {
  ScoreTable table;
  table.scores.resize(4);
  table.scores << 0.2, 0.5, 0.7, 0.5;
  CHECK(decide(table, 0.5) == std::vector<std::uint8_t>{0, 1, 1, 1});
  CHECK(decide(table, 0.0) == std::vector<std::uint8_t>{1, 1, 1, 1});
  CHECK(decide(table, 0.9) == std::vector<std::uint8_t>{0, 0, 0, 0});
  CHECK_THROWS_AS(decide(table, std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
}

TEST_CASE("full side-channel pass agrees with the naive replay") {
  const Dataset d = oracles::random_dataset(31, 12, 3);
  SelectorSpec spec;
  spec.kind = SelectorKind::TopScore;

  for (std::uint64_t shuffle_seed : {11ull, 12ull}) {
    const WindowPlan plan = build_window_plan(iota_ids(12), 6, 3, shuffle_seed);
    const SideAttackResult res = run_side_attack(d, plan, spec, 0.5);

    const std::vector<int> expect =
        oracles::naive_side_ledger(d, plan.order(), 6, 3, spec, 0.5);
    REQUIRE(res.ledger.t.size() == expect.size());
    for (std::size_t id = 0; id < expect.size(); ++id) CHECK(res.ledger.t[id] == expect[id]);

    CHECK(res.scores.mode == ScoreMode::Side);
    REQUIRE(res.scores.scores.size() == 12);
    for (Index id = 0; id < 12; ++id) {
      const double s = res.scores.scores(id);
      CHECK(s > 0.0);
      CHECK(s < 1.0);
      CHECK(s == doctest::Approx(score_side(res.ledger.t[static_cast<std::size_t>(id)],
                                            res.ledger.n)).epsilon(1e-15));
    }
  }
}

TEST_CASE("ids outside the plan carry zero evidence") {
  const Dataset d = oracles::random_dataset(57, 12, 2);
  SelectorSpec spec;
  const WindowPlan plan = build_window_plan(iota_ids(8), 4, 2, std::nullopt);
  const SideAttackResult res = run_side_attack(d, plan, spec, 0.5);
  REQUIRE(res.ledger.t.size() == 12);
  REQUIRE(res.scores.scores.size() == 12);
  for (Index id = 8; id < 12; ++id) {
    CHECK(res.ledger.t[static_cast<std::size_t>(id)] == 0);
    CHECK(res.scores.scores(id) == doctest::Approx(score_side(0, res.ledger.n)));
  }
}

TEST_CASE("general scoring flows through the full pass") {
  const Dataset d = oracles::random_dataset(3, 8, 2);
  SelectorSpec spec;
  SideAttackOptions opts;
  opts.scoring = SideScoring::General;
  opts.kappa = 2.0;
  const WindowPlan plan = build_window_plan(iota_ids(8), 4, 2, std::nullopt);
  const SideAttackResult res = run_side_attack(d, plan, spec, 0.25, opts);
  CHECK(res.scores.mode == ScoreMode::SideGeneral);
  for (Index id = 0; id < 8; ++id)
    CHECK(res.scores.scores(id) ==
          doctest::Approx(score_side_general(res.ledger.t[static_cast<std::size_t>(id)],
                                             res.ledger.n, 0.25, 2.0)).epsilon(1e-15));
}

TEST_CASE("plan ids beyond the dataset are rejected") {
  const Dataset d = oracles::random_dataset(5, 4, 2);
  const WindowPlan plan = build_window_plan(iota_ids(6), 2, 1, std::nullopt);
  CHECK_THROWS_AS(run_side_attack(d, plan, SelectorSpec{}, 0.5), std::invalid_argument);
}
