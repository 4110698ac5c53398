#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "choiceleak/attack_side.hpp"
#include "choiceleak/types.hpp"

namespace choiceleak {

struct SyntheticConfig {
  Index n_pool = 2000;
  Index n_outside = 1000;
  Index dim = 8;
  double shift = 0.0;

  bool operator==(const SyntheticConfig&) const = default;
};

/// Dataset source: a synthetic draw or a dataset file plus the pool boundary
/// (ids [0, pool_size) form the selection pool).
struct DatasetConfig {
  std::optional<SyntheticConfig> synthetic = SyntheticConfig{};
  std::optional<std::string> file;
  std::optional<Index> pool_size;  // required with file; implied by synthetic

  bool operator==(const DatasetConfig&) const = default;
};

struct WindowConfig {
  Index size = 1000;
  Index interval = 100;
  bool shuffle = true;  // seeded shuffle of the window order
  std::optional<std::uint64_t> shuffle_seed;  // derived from the run seed when unset

  bool operator==(const WindowConfig&) const = default;
};

enum class AttackMode : std::uint8_t { Side, Black, Loss, Lira };

const char* to_string(AttackMode m);
AttackMode attack_mode_from_string(const std::string& s);

struct AttackParams {
  AttackMode mode = AttackMode::Side;
  SideScoring scoring = SideScoring::Simplified;
  double kappa = 1.0;
  Index k_clusters = 5;
  std::optional<std::uint64_t> kmeans_seed;  // derived from the run seed when unset
  Index kmeans_iters = 100;
  double kmeans_tol = 1e-6;
  std::optional<std::string> loss_file;    // Loss mode: id,score CSV of losses
  std::optional<std::string> shadow_file;  // Lira mode: shadow-score CSV

  bool operator==(const AttackParams&) const = default;
};

/// Full run description. Precedence is CLI flag > config file > default;
/// the resolved form (all derived seeds filled in) is what lands in the run
/// manifest, so a rerun from the manifest reproduces the run byte for byte.
struct RunConfig {
  std::uint64_t seed = 42;
  DatasetConfig dataset;
  SelectorKind selector_kind = SelectorKind::TopScore;
  std::optional<std::uint64_t> selector_seed;  // derived from the run seed when unset
  bool selector_invert = false;
  double ratio = 0.4;
  WindowConfig window;
  AttackParams attack;
  std::vector<Surface> surfaces = {Surface::TM, Surface::SP};
  std::vector<double> fpr_levels = {0.05};
  std::string output_dir = "out";
  bool pad_to_multiple = false;

  bool operator==(const RunConfig&) const = default;

  SelectorSpec selector_spec() const;
};

/// Fills every derived field (selector seed, shuffle seed, kmeans seed) from
/// the run seed via independent stream derivation.
RunConfig resolve_config(RunConfig config);

/// Validates ranges and cross-field requirements; throws std::invalid_argument
/// naming the offending field.
void validate_config(const RunConfig& config);

nlohmann::json config_to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

/// Reads + parses a config file (strict: unknown keys are errors).
RunConfig load_config_file(const std::string& path);

}  // namespace choiceleak
