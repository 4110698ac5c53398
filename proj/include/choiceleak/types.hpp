#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace choiceleak {

using Index = Eigen::Index;

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using RowMatrixXd = RowMatrix<double>;

/// Supply-chain tag for one sample: retained for training, discarded by the
/// selector, or never part of the selection pool at all.
enum class Tag : std::uint8_t { Included, Excluded, Outside };

/// Membership surface under audit. TM treats only retained samples as
/// members; SP treats every sample that entered the selection pool as one.
enum class Surface : std::uint8_t { TM, SP };

const char* to_string(Tag t);
const char* to_string(Surface s);
Tag tag_from_string(const std::string& s);
Surface surface_from_string(const std::string& s);

/// Ordered, immutable sample store. Row i of the feature matrix is the sample
/// with id i; ids are dense 0..N-1. Labels and model scores are optional
/// per-dataset columns.
class Dataset {
 public:
  Dataset() = default;
  Dataset(RowMatrixXd features, Eigen::VectorXi labels = {}, Eigen::VectorXd scores = {});

  Index size() const { return features_.rows(); }
  Index dim() const { return features_.cols(); }
  bool has_labels() const { return labels_.size() > 0; }
  bool has_scores() const { return scores_.size() > 0; }

  const RowMatrixXd& features() const { return features_; }
  const Eigen::VectorXi& labels() const { return labels_; }
  const Eigen::VectorXd& scores() const { return scores_; }

  std::optional<int> label(Index id) const {
    return has_labels() ? std::optional<int>(labels_(id)) : std::nullopt;
  }
  std::optional<double> score(Index id) const {
    return has_scores() ? std::optional<double>(scores_(id)) : std::nullopt;
  }

 private:
  RowMatrixXd features_;
  Eigen::VectorXi labels_;
  Eigen::VectorXd scores_;
};

/// Per-sample supply-chain tags, aligned with dataset ids.
struct GroundTruth {
  std::vector<Tag> tags;

  Index size() const { return static_cast<Index>(tags.size()); }
  Index count(Tag t) const;
};

/// Binary membership labels for one surface (1 = member).
struct SurfaceLabels {
  std::vector<std::uint8_t> labels;
  Surface surface = Surface::TM;

  Index size() const { return static_cast<Index>(labels.size()); }
  Index member_count() const;
  Index nonmember_count() const { return size() - member_count(); }
};

enum class SelectorKind : std::uint8_t { Random, TopScore, Herding, KCenter };

const char* to_string(SelectorKind k);
SelectorKind selector_kind_from_string(const std::string& s);

/// Pluggable subset-selection strategy. `seed` is consumed by Random only.
/// For TopScore, invert=false keeps the lowest-scored (least confident)
/// samples; invert=true keeps the highest-scored ones.
struct SelectorSpec {
  SelectorKind kind = SelectorKind::TopScore;
  std::uint64_t seed = 0;
  bool invert = false;
};

enum class ScoreMode : std::uint8_t { Side, SideGeneral, Black, Baseline };

const char* to_string(ScoreMode m);
ScoreMode score_mode_from_string(const std::string& s);

/// Per-id membership scores, dense over ids 0..N-1.
struct ScoreTable {
  Eigen::VectorXd scores;
  ScoreMode mode = ScoreMode::Side;

  Index size() const { return scores.size(); }
};

/// Aggregated per-id evidence: inclusion count t, uniform exposure n, and
/// (black-box only) the sum of clustering distances over included windows.
struct EvidenceLedger {
  std::vector<int> t;
  int n = 0;
  std::vector<double> dist_sum;

  Index size() const { return static_cast<Index>(t.size()); }
  bool has_distances() const { return !dist_sum.empty(); }
};

}  // namespace choiceleak
