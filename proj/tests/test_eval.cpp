#include <doctest.h>

#include <cmath>

#include "choiceleak/eval.hpp"
#include "support/oracles.hpp"

using namespace choiceleak;

namespace {

SurfaceLabels make_labels(std::vector<std::uint8_t> bits, Surface s = Surface::TM) {
  SurfaceLabels out;
  out.labels = std::move(bits);
  out.surface = s;
  return out;
}

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("perfect separation and pure noise anchor the AUC") {
  const SurfaceLabels labels = make_labels({1, 1, 0, 0});
  CHECK(roc_auc(vec({0.9, 0.8, 0.2, 0.1}), labels).auc == 1.0);
  CHECK(roc_auc(vec({0.1, 0.2, 0.8, 0.9}), labels).auc == 0.0);
  CHECK(roc_auc(vec({0.5, 0.5, 0.5, 0.5}), labels).auc == 0.5);

  const RocReport perfect = roc_auc(vec({0.9, 0.8, 0.2, 0.1}), labels);
  CHECK(tpr_at_fpr(perfect, 0.01) == 1.0);
  CHECK(perfect.n_members == 2);
  CHECK(perfect.n_nonmembers == 2);
}

TEST_CASE("sweep AUC matches brute-force pair counting bit for bit") {
  // exhaustive: every non-degenerate labeling of 4 samples crossed with
  // score tuples drawn from a small grid with deliberate tie collisions
  const std::vector<double> grid{0.0, 0.25, 0.5, 1.0};
  for (int mask = 1; mask < 15; ++mask) {
    std::vector<std::uint8_t> bits(4);
    for (int b = 0; b < 4; ++b) bits[static_cast<std::size_t>(b)] = (mask >> b) & 1;
    const SurfaceLabels labels = make_labels(bits);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c)
          for (int d = 0; d < 4; ++d) {
            const Eigen::VectorXd scores = vec({grid[static_cast<std::size_t>(a)],
                                                grid[static_cast<std::size_t>(b)],
                                                grid[static_cast<std::size_t>(c)],
                                                grid[static_cast<std::size_t>(d)]});
            CHECK(roc_auc(scores, labels).auc == oracles::pairwise_auc(scores, labels.labels));
          }
  }
}

TEST_CASE("random instances also match the pairwise oracle exactly") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng g(seed);
    const Index n = 3 + static_cast<Index>(bounded(g, 60));
    Eigen::VectorXd scores(n);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
    bool any1 = false, any0 = false;
    for (Index i = 0; i < n; ++i) {
      // quantized scores force plenty of ties
      scores(i) = std::floor(uniform01(g) * 8.0) / 8.0;
      bits[static_cast<std::size_t>(i)] = uniform01(g) < 0.5 ? 1 : 0;
      (bits[static_cast<std::size_t>(i)] ? any1 : any0) = true;
    }
    if (!any1) bits[0] = 1;
    if (!any0) bits[1] = 0;
    const SurfaceLabels labels = make_labels(bits);
    CHECK(roc_auc(scores, labels).auc == oracles::pairwise_auc(scores, labels.labels));
  }
}

TEST_CASE("negating scores complements the AUC") {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    Rng g(seed);
    Eigen::VectorXd scores(20);
    std::vector<std::uint8_t> bits(20);
    for (Index i = 0; i < 20; ++i) {
      scores(i) = std::floor(uniform01(g) * 5.0);
      bits[static_cast<std::size_t>(i)] = i < 8 ? 1 : 0;
    }
    const SurfaceLabels labels = make_labels(bits);
    const double auc = roc_auc(scores, labels).auc;
    const double neg = roc_auc(-scores, labels).auc;
    CHECK(auc + neg == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("strictly increasing transforms leave the report unchanged") {
  Rng g(7);
  Eigen::VectorXd scores(30);
  std::vector<std::uint8_t> bits(30);
  for (Index i = 0; i < 30; ++i) {
    scores(i) = std::floor(uniform01(g) * 6.0) / 3.0;
    bits[static_cast<std::size_t>(i)] = uniform01(g) < 0.4 ? 1 : 0;
  }
  bits[0] = 1;
  bits[1] = 0;
  const SurfaceLabels labels = make_labels(bits);
  const RocReport base = roc_auc(scores, labels);

  const Eigen::VectorXd affine = (2.0 * scores.array() + 3.0).matrix();
  const Eigen::VectorXd expd = scores.array().exp().matrix();
  for (const Eigen::VectorXd& transformed : {affine, expd}) {
    const RocReport r = roc_auc(transformed, labels);
    CHECK(r.auc == base.auc);
    REQUIRE(r.curve.size() == base.curve.size());
    for (std::size_t i = 0; i < r.curve.size(); ++i) {
      CHECK(r.curve[i].fpr == base.curve[i].fpr);
      CHECK(r.curve[i].tpr == base.curve[i].tpr);
    }
    CHECK(tpr_at_fpr(r, 0.2) == tpr_at_fpr(base, 0.2));
  }
}

TEST_CASE("low-fpr rates step, never interpolate") {
  // top score belongs to a nonmember, so no operating point with fpr below
  // 1/4 has any true positives
  const Eigen::VectorXd scores = vec({0.9, 0.8, 0.7, 0.3, 0.2, 0.1});
  const SurfaceLabels labels = make_labels({0, 1, 1, 0, 0, 0});
  const RocReport r = roc_auc(scores, labels);
  CHECK(tpr_at_fpr(r, 0.2) == 0.0);
  CHECK(tpr_at_fpr(r, 0.25) == 1.0);  // fpr = 1/4 is achievable, tpr there = 1
  CHECK(tpr_at_fpr(scores, labels, 0.2) == 0.0);

  CHECK_THROWS_AS(tpr_at_fpr(r, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(tpr_at_fpr(r, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(tpr_at_fpr(r, -0.5), std::invalid_argument);
}

TEST_CASE("curve points are reachable threshold operating points") {
  Rng g(91);
  Eigen::VectorXd scores(20);
  std::vector<std::uint8_t> bits(20);
  for (Index i = 0; i < 20; ++i) {
    scores(i) = std::floor(uniform01(g) * 7.0) / 7.0;
    bits[static_cast<std::size_t>(i)] = i % 3 == 0 ? 1 : 0;
  }
  const SurfaceLabels labels = make_labels(bits);
  const RocReport r = roc_auc(scores, labels);

  REQUIRE(!r.curve.empty());
  CHECK(r.curve.front().fpr == 0.0);
  CHECK(r.curve.front().tpr == 0.0);
  CHECK(std::isinf(r.curve.front().threshold));
  CHECK(r.curve.back().fpr == 1.0);
  CHECK(r.curve.back().tpr == 1.0);

  double members = 0, nonmembers = 0;
  for (std::uint8_t b : bits) (b ? members : nonmembers) += 1.0;
  for (std::size_t i = 0; i < r.curve.size(); ++i) {
    if (i > 0) {
      CHECK(r.curve[i].fpr >= r.curve[i - 1].fpr);
      CHECK(r.curve[i].tpr >= r.curve[i - 1].tpr);
      CHECK(r.curve[i].threshold <= r.curve[i - 1].threshold);
    }
    // replay the threshold rule (member iff score >= threshold)
    double tp = 0, fp = 0;
    for (Index j = 0; j < 20; ++j) {
      if (scores(j) >= r.curve[i].threshold) (bits[static_cast<std::size_t>(j)] ? tp : fp) += 1.0;
    }
    CHECK(r.curve[i].tpr == doctest::Approx(tp / members).epsilon(1e-15));
    CHECK(r.curve[i].fpr == doctest::Approx(fp / nonmembers).epsilon(1e-15));
  }
}

TEST_CASE("degenerate surfaces are rejected by name") {
  const Eigen::VectorXd scores = vec({0.1, 0.2, 0.3});
  CHECK_THROWS_WITH_AS(roc_auc(scores, make_labels({1, 1, 1}, Surface::TM)),
                       doctest::Contains("tm"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(roc_auc(scores, make_labels({0, 0, 0}, Surface::SP)),
                       doctest::Contains("sp"), std::invalid_argument);
  CHECK_THROWS_AS(roc_auc(scores, make_labels({1, 0})), std::invalid_argument);
  const Eigen::VectorXd bad = vec({0.1, std::numeric_limits<double>::quiet_NaN(), 0.3});
  CHECK_THROWS_AS(roc_auc(bad, make_labels({1, 0, 1})), std::invalid_argument);
}

TEST_CASE("report assembly covers each requested surface with rate columns") {
  GroundTruth truth;
  truth.tags = {Tag::Included, Tag::Included, Tag::Excluded, Tag::Outside, Tag::Outside,
                Tag::Excluded};
  ScoreTable table;
  table.scores = vec({0.9, 0.8, 0.6, 0.2, 0.1, 0.4});

  const std::vector<Surface> surfaces{Surface::TM, Surface::SP};
  const std::vector<double> levels{0.05, 0.5};
  const std::vector<RocReport> reports = assemble_report(table, truth, surfaces, levels);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].surface == Surface::TM);
  CHECK(reports[1].surface == Surface::SP);
  CHECK(reports[0].n_members == 2);
  CHECK(reports[1].n_members == 4);
  for (const RocReport& r : reports) {
    REQUIRE(r.tpr_at.size() == 2);
    CHECK(r.tpr_at[0].first == 0.05);
    CHECK(r.tpr_at[1].first == 0.5);
    CHECK(r.tpr_at[0].second == tpr_at_fpr(r, 0.05));
  }
  // the included block scores highest, so both surfaces separate fully here
  CHECK(reports[0].auc == 1.0);
  CHECK(reports[1].auc == 1.0);

  ScoreTable shorter;
  shorter.scores = vec({0.9, 0.8, 0.6});
  CHECK_THROWS_WITH_AS(assemble_report(shorter, truth, surfaces, levels),
                       doctest::Contains("missing ids"), std::invalid_argument);
  CHECK_THROWS_AS(assemble_report(table, truth, {}, levels), std::invalid_argument);

  const std::vector<RocReport> no_levels = assemble_report(table, truth, surfaces, {});
  CHECK(no_levels[0].tpr_at.empty());
}
