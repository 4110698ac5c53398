#include "choiceleak/eval.hpp"

#include "choiceleak/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace choiceleak {

RocReport roc_auc(const Eigen::Ref<const Eigen::VectorXd>& scores, const SurfaceLabels& labels) {
  const Index n = scores.size();
  if (n != labels.size())
    throw std::invalid_argument("score count " + std::to_string(n) +
                                " does not match label count " + std::to_string(labels.size()));
  for (Index i = 0; i < n; ++i)
    if (!std::isfinite(scores(i)))
      throw std::invalid_argument("score for id " + std::to_string(i) + " is not finite");

  RocReport report;
  report.surface = labels.surface;
  report.n_members = labels.member_count();
  report.n_nonmembers = labels.nonmember_count();
  if (report.n_members == 0)
    throw std::invalid_argument(std::string(to_string(labels.surface)) +
                                " surface has no members");
  if (report.n_nonmembers == 0)
    throw std::invalid_argument(std::string(to_string(labels.surface)) +
                                " surface has no nonmembers");

  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::sort(idx.begin(), idx.end(), [&](Index a, Index b) {
    if (scores(a) != scores(b)) return scores(a) > scores(b);
    return a < b;
  });

  report.curve.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});

  // one pass over descending scores; a run of tied scores forms a single
  // step. AUC is the Mann-Whitney statistic with half credit for ties,
  // accumulated as the exact integer 2 * sum(TP_before * FP_g) +
  // sum(TP_g * FP_g), divided once at the end.
  long long acc2 = 0;
  Index tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    Index tp_g = 0, fp_g = 0;
    const double threshold = scores(idx[i]);
    while (j < idx.size() && scores(idx[j]) == threshold) {
      if (labels.labels[static_cast<std::size_t>(idx[j])])
        ++tp_g;
      else
        ++fp_g;
      ++j;
    }
    acc2 += 2ll * static_cast<long long>(tp) * static_cast<long long>(fp_g) +
            static_cast<long long>(tp_g) * static_cast<long long>(fp_g);
    tp += tp_g;
    fp += fp_g;
    report.curve.push_back({static_cast<double>(fp) / static_cast<double>(report.n_nonmembers),
                            static_cast<double>(tp) / static_cast<double>(report.n_members),
                            threshold});
    i = j;
  }

  report.auc = static_cast<double>(acc2) /
               (2.0 * static_cast<double>(report.n_members) *
                static_cast<double>(report.n_nonmembers));
  return report;
}

double tpr_at_fpr(const RocReport& report, double level) {
  if (!(level > 0.0) || !(level < 1.0))
    throw std::invalid_argument("false-positive level must lie in (0, 1), got " +
                                std::to_string(level));
  double best = 0.0;
  for (const RocPoint& p : report.curve)
    if (p.fpr <= level) best = std::max(best, p.tpr);
  return best;
}

double tpr_at_fpr(const Eigen::Ref<const Eigen::VectorXd>& scores, const SurfaceLabels& labels,
                  double level) {
  return tpr_at_fpr(roc_auc(scores, labels), level);
}

std::vector<RocReport> assemble_report(const ScoreTable& table, const GroundTruth& truth,
                                       std::span<const Surface> surfaces,
                                       std::span<const double> fpr_levels) {
  if (table.size() != truth.size()) {
    std::string missing;
    const Index lo = std::min(table.size(), truth.size());
    const Index hi = std::max(table.size(), truth.size());
    for (Index id = lo; id < hi && id < lo + 10; ++id) {
      if (!missing.empty()) missing += ", ";
      missing += std::to_string(id);
    }
    if (hi > lo + 10) missing += ", ...";
    throw std::invalid_argument(
        table.size() < truth.size()
            ? "scores do not cover all labeled ids; missing ids: " + missing
            : "scores cover unlabeled ids: " + missing);
  }
  if (surfaces.empty()) throw std::invalid_argument("no audit surfaces requested");

  std::vector<RocReport> reports;
  reports.reserve(surfaces.size());
  for (Surface s : surfaces) {
    RocReport r = roc_auc(table.scores, surface_labels(truth, s));
    for (double level : fpr_levels) r.tpr_at.emplace_back(level, tpr_at_fpr(r, level));
    reports.push_back(std::move(r));
  }
  return reports;
}

}  // namespace choiceleak
