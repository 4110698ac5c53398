#include "choiceleak/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "choiceleak/dataset.hpp"

namespace choiceleak {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'C', 'L', 'E', 'B'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kFlagLabels = 1u << 0;
constexpr std::uint32_t kFlagScores = 1u << 1;

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return in;
}

// full-precision round-trippable double formatting
std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_double(const std::string& s, const std::string& path, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                ": cannot parse number '" + s + "'");
  }
}

long long parse_int(const std::string& s, const std::string& path, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                ": cannot parse integer '" + s + "'");
  }
}

template <typename T>
void write_le(std::ofstream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  // this code targets little-endian hosts; the format is little-endian
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_le(std::ifstream& in, const std::string& path) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::invalid_argument(path + ": truncated binary dataset");
  return value;
}

}  // namespace

void write_dataset_csv(const std::string& path, const Dataset& dataset) {
  std::ofstream out = open_out(path);
  out << "id";
  for (Index j = 0; j < dataset.dim(); ++j) out << ",feat_" << j;
  if (dataset.has_labels()) out << ",label";
  if (dataset.has_scores()) out << ",score";
  out << "\n";
  for (Index i = 0; i < dataset.size(); ++i) {
    out << i;
    for (Index j = 0; j < dataset.dim(); ++j) out << "," << fmt(dataset.features()(i, j));
    if (dataset.has_labels()) out << "," << dataset.labels()(i);
    if (dataset.has_scores()) out << "," << fmt(dataset.scores()(i));
    out << "\n";
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument(path + ": empty dataset file");
  const std::vector<std::string> header = split_csv_line(line);
  if (header.empty() || header[0] != "id")
    throw std::invalid_argument(path + ": header must start with 'id'");

  Index dim = 0;
  bool has_labels = false, has_scores = false;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c] == "feat_" + std::to_string(dim)) {
      ++dim;
    } else if (header[c] == "label" && !has_labels && !has_scores) {
      has_labels = true;
    } else if (header[c] == "score" && !has_scores) {
      has_scores = true;
    } else {
      throw std::invalid_argument(path + ": unexpected header column '" + header[c] + "'");
    }
  }
  if (dim == 0) throw std::invalid_argument(path + ": no feature columns");

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::vector<double> scores;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(header.size()) + " cells, got " +
                                  std::to_string(cells.size()));
    const long long id = parse_int(cells[0], path, line_no);
    if (id != static_cast<long long>(rows.size()))
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": ids must be dense and ascending from 0; got " +
                                  cells[0]);
    std::vector<double> row(static_cast<std::size_t>(dim));
    for (Index j = 0; j < dim; ++j)
      row[static_cast<std::size_t>(j)] = parse_double(cells[static_cast<std::size_t>(1 + j)], path, line_no);
    rows.push_back(std::move(row));
    std::size_t c = static_cast<std::size_t>(1 + dim);
    if (has_labels) labels.push_back(static_cast<int>(parse_int(cells[c++], path, line_no)));
    if (has_scores) scores.push_back(parse_double(cells[c++], path, line_no));
  }
  if (rows.size() < 2) throw std::invalid_argument(path + ": dataset needs at least 2 samples");

  RowMatrixXd features(static_cast<Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Index j = 0; j < dim; ++j) features(static_cast<Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
  Eigen::VectorXi label_col;
  if (has_labels) label_col = Eigen::Map<Eigen::VectorXi>(labels.data(), static_cast<Index>(labels.size()));
  Eigen::VectorXd score_col;
  if (has_scores) score_col = Eigen::Map<Eigen::VectorXd>(scores.data(), static_cast<Index>(scores.size()));
  return Dataset(std::move(features), std::move(label_col), std::move(score_col));
}

void write_dataset_binary(const std::string& path, const Dataset& dataset) {
  std::ofstream out = open_out(path, std::ios::binary);
  out.write(kMagic, 4);
  write_le<std::uint32_t>(out, kVersion);
  write_le<std::uint64_t>(out, static_cast<std::uint64_t>(dataset.size()));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(dataset.dim()));
  std::uint32_t flags = 0;
  if (dataset.has_labels()) flags |= kFlagLabels;
  if (dataset.has_scores()) flags |= kFlagScores;
  write_le<std::uint32_t>(out, flags);
  for (Index i = 0; i < dataset.size(); ++i) {
    for (Index j = 0; j < dataset.dim(); ++j)
      write_le<float>(out, static_cast<float>(dataset.features()(i, j)));
    if (dataset.has_labels()) write_le<std::int32_t>(out, dataset.labels()(i));
    if (dataset.has_scores()) write_le<float>(out, static_cast<float>(dataset.scores()(i)));
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

Dataset read_dataset_binary(const std::string& path) {
  std::ifstream in = open_in(path, std::ios::binary);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::invalid_argument(path + ": bad magic, not a binary dataset");
  const std::uint32_t version = read_le<std::uint32_t>(in, path);
  if (version != kVersion)
    throw std::invalid_argument(path + ": unsupported dataset version " +
                                std::to_string(version));
  const std::uint64_t rows = read_le<std::uint64_t>(in, path);
  const std::uint32_t dim = read_le<std::uint32_t>(in, path);
  const std::uint32_t flags = read_le<std::uint32_t>(in, path);
  if (flags & ~(kFlagLabels | kFlagScores))
    throw std::invalid_argument(path + ": unknown dataset flags");
  if (rows < 2 || dim < 1)
    throw std::invalid_argument(path + ": invalid dataset dimensions");
  if (rows > (1ull << 31))
    throw std::invalid_argument(path + ": implausible row count");

  const bool has_labels = flags & kFlagLabels;
  const bool has_scores = flags & kFlagScores;
  RowMatrixXd features(static_cast<Index>(rows), static_cast<Index>(dim));
  Eigen::VectorXi labels;
  Eigen::VectorXd scores;
  if (has_labels) labels.resize(static_cast<Index>(rows));
  if (has_scores) scores.resize(static_cast<Index>(rows));
  for (std::uint64_t i = 0; i < rows; ++i) {
    for (std::uint32_t j = 0; j < dim; ++j)
      features(static_cast<Index>(i), static_cast<Index>(j)) = read_le<float>(in, path);
    if (has_labels) labels(static_cast<Index>(i)) = read_le<std::int32_t>(in, path);
    if (has_scores) scores(static_cast<Index>(i)) = read_le<float>(in, path);
  }
  char extra;
  if (in.read(&extra, 1))
    throw std::invalid_argument(path + ": trailing bytes after dataset payload");
  return Dataset(std::move(features), std::move(labels), std::move(scores));
}

Dataset read_dataset_auto(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") return read_dataset_csv(path);
  return read_dataset_binary(path);
}

void write_groundtruth_csv(const std::string& path, const GroundTruth& truth) {
  std::ofstream out = open_out(path);
  out << "id,tag\n";
  for (std::size_t i = 0; i < truth.tags.size(); ++i)
    out << i << "," << to_string(truth.tags[i]) << "\n";
  if (!out) throw std::runtime_error("failed writing " + path);
}

GroundTruth read_groundtruth_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != "id,tag")
    throw std::invalid_argument(path + ": expected header 'id,tag'");
  GroundTruth truth;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != 2)
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": expected id,tag");
    if (parse_int(cells[0], path, line_no) != static_cast<long long>(truth.tags.size()))
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": ids must be dense and ascending from 0");
    truth.tags.push_back(tag_from_string(cells[1]));
  }
  if (truth.tags.empty()) throw std::invalid_argument(path + ": no ground-truth rows");
  return truth;
}

void write_scores_csv(const std::string& path, const ScoreTable& table) {
  std::ofstream out = open_out(path);
  out << "id,score\n";
  for (Index i = 0; i < table.size(); ++i) out << i << "," << fmt(table.scores(i)) << "\n";
  if (!out) throw std::runtime_error("failed writing " + path);
}

ScoreTable read_scores_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != "id,score")
    throw std::invalid_argument(path + ": expected header 'id,score'");
  std::vector<std::pair<long long, double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != 2)
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": expected id,score");
    rows.emplace_back(parse_int(cells[0], path, line_no), parse_double(cells[1], path, line_no));
  }
  if (rows.empty()) throw std::invalid_argument(path + ": no score rows");
  std::sort(rows.begin(), rows.end());
  ScoreTable table;
  table.scores.resize(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].first != static_cast<long long>(i)) {
      std::string missing;
      long long expect = 0;
      for (const auto& [id, sc] : rows) {
        while (expect < id && missing.size() < 60) {
          if (!missing.empty()) missing += ", ";
          missing += std::to_string(expect);
          ++expect;
        }
        expect = id + 1;
      }
      throw std::invalid_argument(path + ": score ids must be dense 0..N-1; missing ids: " +
                                  (missing.empty() ? "(duplicates present)" : missing));
    }
    table.scores(static_cast<Index>(i)) = rows[i].second;
  }
  return table;
}

json scores_to_json(const ScoreTable& table) {
  json j;
  j["mode"] = to_string(table.mode);
  j["scores"] = std::vector<double>(table.scores.data(), table.scores.data() + table.size());
  return j;
}

ScoreTable scores_from_json(const json& j) {
  ScoreTable table;
  try {
    table.mode = score_mode_from_string(j.at("mode").get<std::string>());
    const std::vector<double> xs = j.at("scores").get<std::vector<double>>();
    table.scores = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Index>(xs.size()));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed score JSON: ") + e.what());
  }
  return table;
}

void write_ledger_csv(const std::string& path, const EvidenceLedger& ledger) {
  std::ofstream out = open_out(path);
  const bool black = ledger.has_distances();
  out << (black ? "id,t,n,dbar\n" : "id,t,n\n");
  for (std::size_t i = 0; i < ledger.t.size(); ++i) {
    out << i << "," << ledger.t[i] << "," << ledger.n;
    if (black) {
      out << ",";
      if (ledger.t[i] > 0) out << fmt(ledger.dist_sum[i] / static_cast<double>(ledger.t[i]));
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

EvidenceLedger read_ledger_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument(path + ": empty ledger file");
  bool black = false;
  if (line == "id,t,n,dbar")
    black = true;
  else if (line != "id,t,n")
    throw std::invalid_argument(path + ": expected header 'id,t,n' or 'id,t,n,dbar'");

  EvidenceLedger ledger;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != (black ? 4u : 3u))
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": wrong cell count for ledger row");
    if (parse_int(cells[0], path, line_no) != static_cast<long long>(ledger.t.size()))
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": ids must be dense and ascending from 0");
    const int t = static_cast<int>(parse_int(cells[1], path, line_no));
    const int n = static_cast<int>(parse_int(cells[2], path, line_no));
    if (ledger.t.empty())
      ledger.n = n;
    else if (n != ledger.n)
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": exposure column must be constant");
    ledger.t.push_back(t);
    if (black) {
      const double dbar = cells[3].empty() ? 0.0 : parse_double(cells[3], path, line_no);
      ledger.dist_sum.push_back(dbar * static_cast<double>(t));
    }
  }
  if (ledger.t.empty()) throw std::invalid_argument(path + ": no ledger rows");
  return ledger;
}

void write_shadow_csv(const std::string& path, const std::vector<ShadowScores>& per_id) {
  std::ofstream out = open_out(path);
  out << "id,score,side\n";
  for (std::size_t i = 0; i < per_id.size(); ++i) {
    for (double s : per_id[i].member) out << i << "," << fmt(s) << ",member\n";
    for (double s : per_id[i].nonmember) out << i << "," << fmt(s) << ",nonmember\n";
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

std::vector<ShadowScores> read_shadow_csv(const std::string& path, Index n_ids) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != "id,score,side")
    throw std::invalid_argument(path + ": expected header 'id,score,side'");
  std::vector<ShadowScores> per_id(static_cast<std::size_t>(n_ids));
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != 3)
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": expected id,score,side");
    const long long id = parse_int(cells[0], path, line_no);
    if (id < 0 || id >= n_ids)
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": id " + cells[0] +
                                  " out of range [0, " + std::to_string(n_ids) + ")");
    const double score = parse_double(cells[1], path, line_no);
    if (cells[2] == "member")
      per_id[static_cast<std::size_t>(id)].member.push_back(score);
    else if (cells[2] == "nonmember")
      per_id[static_cast<std::size_t>(id)].nonmember.push_back(score);
    else
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": side must be member or nonmember, got '" + cells[2] + "'");
  }
  return per_id;
}

std::vector<double> read_loss_csv(const std::string& path, Index n_ids) {
  const ScoreTable table = read_scores_csv(path);
  if (table.size() != n_ids)
    throw std::invalid_argument(path + ": loss file covers " + std::to_string(table.size()) +
                                " ids, dataset has " + std::to_string(n_ids));
  return std::vector<double>(table.scores.data(), table.scores.data() + table.size());
}

void write_loss_csv(const std::string& path, const std::vector<double>& losses) {
  ScoreTable table;
  table.scores = Eigen::Map<const Eigen::VectorXd>(losses.data(), static_cast<Index>(losses.size()));
  write_scores_csv(path, table);
}

json report_to_json(const RocReport& report) {
  json j;
  j["surface"] = to_string(report.surface);
  j["auc"] = report.auc;
  j["n_members"] = report.n_members;
  j["n_nonmembers"] = report.n_nonmembers;
  json tpr = json::object();
  for (const auto& [level, value] : report.tpr_at) tpr[fmt(level)] = value;
  j["tpr_at"] = tpr;
  json curve = json::array();
  for (const RocPoint& p : report.curve) {
    const double thr = std::isinf(p.threshold) ? std::numeric_limits<double>::max() : p.threshold;
    curve.push_back(json::array({p.fpr, p.tpr, thr}));
  }
  j["curve"] = curve;
  return j;
}

void write_report_json(const std::string& path, const RocReport& report) {
  std::ofstream out = open_out(path);
  out << report_to_json(report).dump(2) << "\n";
  if (!out) throw std::runtime_error("failed writing " + path);
}

RocReport report_from_json(const json& j) {
  RocReport report;
  try {
    report.surface = surface_from_string(j.at("surface").get<std::string>());
    report.auc = j.at("auc").get<double>();
    report.n_members = j.at("n_members").get<Index>();
    report.n_nonmembers = j.at("n_nonmembers").get<Index>();
    for (const auto& [key, value] : j.at("tpr_at").items())
      report.tpr_at.emplace_back(std::stod(key), value.get<double>());
    std::sort(report.tpr_at.begin(), report.tpr_at.end());
    for (const json& p : j.at("curve"))
      report.curve.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed report JSON: ") + e.what());
  }
  return report;
}

void write_roc_csv(const std::string& path, const RocReport& report) {
  std::ofstream out = open_out(path);
  out << "fpr,tpr\n";
  for (const RocPoint& p : report.curve) out << fmt(p.fpr) << "," << fmt(p.tpr) << "\n";
  if (!out) throw std::runtime_error("failed writing " + path);
}

json window_plan_summary(const WindowPlan& plan) {
  json j;
  j["N"] = plan.size();
  j["W"] = plan.window_size();
  j["interval"] = plan.interval();
  j["m"] = plan.window_count();
  j["exposure"] = plan.exposure();
  if (plan.shuffle_seed())
    j["shuffle_seed"] = *plan.shuffle_seed();
  else
    j["shuffle_seed"] = nullptr;
  return j;
}

}  // namespace choiceleak
