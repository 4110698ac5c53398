#include "choiceleak/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "choiceleak/rng.hpp"

namespace choiceleak {

using nlohmann::json;

namespace {

// fixed stream tags for derived seeds
constexpr std::uint64_t kSelectorStream = 1;
constexpr std::uint64_t kShuffleStream = 2;
constexpr std::uint64_t kKMeansStream = 3;

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw std::invalid_argument("unknown config key " + where + "." + it.key());
}

}  // namespace

const char* to_string(AttackMode m) {
  switch (m) {
    case AttackMode::Side: return "side";
    case AttackMode::Black: return "black";
    case AttackMode::Loss: return "loss";
    case AttackMode::Lira: return "lira";
  }
  throw std::invalid_argument("unknown attack mode value");
}

AttackMode attack_mode_from_string(const std::string& s) {
  if (s == "side") return AttackMode::Side;
  if (s == "black") return AttackMode::Black;
  if (s == "loss") return AttackMode::Loss;
  if (s == "lira") return AttackMode::Lira;
  throw std::invalid_argument("unknown attack mode: " + s +
                              " (expected side, black, loss, or lira)");
}

SelectorSpec RunConfig::selector_spec() const {
  SelectorSpec spec;
  spec.kind = selector_kind;
  spec.seed = selector_seed.value_or(0);
  spec.invert = selector_invert;
  return spec;
}

RunConfig resolve_config(RunConfig config) {
  if (!config.selector_seed) config.selector_seed = mix_seed(config.seed, kSelectorStream);
  if (!config.window.shuffle_seed)
    config.window.shuffle_seed = mix_seed(config.seed, kShuffleStream);
  if (!config.attack.kmeans_seed)
    config.attack.kmeans_seed = mix_seed(config.seed, kKMeansStream);
  return config;
}

void validate_config(const RunConfig& config) {
  const bool has_synth = config.dataset.synthetic.has_value();
  const bool has_file = config.dataset.file.has_value();
  if (has_synth == has_file)
    throw std::invalid_argument(
        "dataset must name exactly one source: dataset.synthetic or dataset.file");
  if (has_synth) {
    const SyntheticConfig& s = *config.dataset.synthetic;
    if (s.n_pool < 2) throw std::invalid_argument("dataset.synthetic.n_pool must be >= 2");
    if (s.n_outside < 0) throw std::invalid_argument("dataset.synthetic.n_outside must be >= 0");
    if (s.dim < 1) throw std::invalid_argument("dataset.synthetic.dim must be >= 1");
    if (!std::isfinite(s.shift) || s.shift < 0)
      throw std::invalid_argument("dataset.synthetic.shift must be finite and >= 0");
  } else {
    if (!config.dataset.pool_size)
      throw std::invalid_argument("dataset.pool_size is required with dataset.file");
    if (*config.dataset.pool_size < 1)
      throw std::invalid_argument("dataset.pool_size must be >= 1");
  }
  if (!(config.ratio > 0.0) || config.ratio > 1.0)
    throw std::invalid_argument("ratio must lie in (0, 1]");
  if (config.window.interval < 1) throw std::invalid_argument("window.interval must be >= 1");
  if (config.window.size < 1) throw std::invalid_argument("window.size must be >= 1");
  if (!(config.attack.kappa > 0.0) || !std::isfinite(config.attack.kappa))
    throw std::invalid_argument("attack.kappa must be positive and finite");
  if (config.attack.k_clusters < 1)
    throw std::invalid_argument("attack.k_clusters must be >= 1");
  if (config.attack.kmeans_iters < 1)
    throw std::invalid_argument("attack.kmeans_iters must be >= 1");
  if (config.attack.kmeans_tol < 0)
    throw std::invalid_argument("attack.kmeans_tol must be >= 0");
  if (config.surfaces.empty()) throw std::invalid_argument("surfaces must not be empty");
  for (double level : config.fpr_levels)
    if (!(level > 0.0) || !(level < 1.0))
      throw std::invalid_argument("fpr_levels entries must lie in (0, 1)");
  if (config.output_dir.empty()) throw std::invalid_argument("output_dir must not be empty");
}

json config_to_json(const RunConfig& config) {
  json j;
  j["seed"] = config.seed;
  json d;
  if (config.dataset.synthetic) {
    d["synthetic"] = {{"n_pool", config.dataset.synthetic->n_pool},
                      {"n_outside", config.dataset.synthetic->n_outside},
                      {"dim", config.dataset.synthetic->dim},
                      {"shift", config.dataset.synthetic->shift}};
  }
  if (config.dataset.file) d["file"] = *config.dataset.file;
  if (config.dataset.pool_size) d["pool_size"] = *config.dataset.pool_size;
  j["dataset"] = d;
  json sel;
  sel["kind"] = to_string(config.selector_kind);
  if (config.selector_seed) sel["seed"] = *config.selector_seed;
  sel["invert"] = config.selector_invert;
  j["selector"] = sel;
  j["ratio"] = config.ratio;
  json w;
  w["size"] = config.window.size;
  w["interval"] = config.window.interval;
  w["shuffle"] = config.window.shuffle;
  if (config.window.shuffle_seed) w["shuffle_seed"] = *config.window.shuffle_seed;
  j["window"] = w;
  json a;
  a["mode"] = to_string(config.attack.mode);
  a["scoring"] = config.attack.scoring == SideScoring::Simplified ? "simplified" : "general";
  a["kappa"] = config.attack.kappa;
  a["k_clusters"] = config.attack.k_clusters;
  if (config.attack.kmeans_seed) a["kmeans_seed"] = *config.attack.kmeans_seed;
  a["kmeans_iters"] = config.attack.kmeans_iters;
  a["kmeans_tol"] = config.attack.kmeans_tol;
  if (config.attack.loss_file) a["loss_file"] = *config.attack.loss_file;
  if (config.attack.shadow_file) a["shadow_file"] = *config.attack.shadow_file;
  j["attack"] = a;
  json surfaces = json::array();
  for (Surface s : config.surfaces) surfaces.push_back(to_string(s));
  j["surfaces"] = surfaces;
  j["fpr_levels"] = config.fpr_levels;
  j["output_dir"] = config.output_dir;
  j["pad_to_multiple"] = config.pad_to_multiple;
  return j;
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config root must be a JSON object");
  reject_unknown_keys(j,
                      {"seed", "dataset", "selector", "ratio", "window", "attack", "surfaces",
                       "fpr_levels", "output_dir", "pad_to_multiple"},
                      "config");
  RunConfig c;
  try {
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("dataset")) {
      const json& d = j.at("dataset");
      reject_unknown_keys(d, {"synthetic", "file", "pool_size"}, "dataset");
      c.dataset.synthetic.reset();
      if (d.contains("synthetic")) {
        const json& s = d.at("synthetic");
        reject_unknown_keys(s, {"n_pool", "n_outside", "dim", "shift"}, "dataset.synthetic");
        SyntheticConfig sc;
        if (s.contains("n_pool")) sc.n_pool = s.at("n_pool").get<Index>();
        if (s.contains("n_outside")) sc.n_outside = s.at("n_outside").get<Index>();
        if (s.contains("dim")) sc.dim = s.at("dim").get<Index>();
        if (s.contains("shift")) sc.shift = s.at("shift").get<double>();
        c.dataset.synthetic = sc;
      }
      if (d.contains("file")) c.dataset.file = d.at("file").get<std::string>();
      if (d.contains("pool_size")) c.dataset.pool_size = d.at("pool_size").get<Index>();
    }
    if (j.contains("selector")) {
      const json& s = j.at("selector");
      reject_unknown_keys(s, {"kind", "seed", "invert"}, "selector");
      if (s.contains("kind"))
        c.selector_kind = selector_kind_from_string(s.at("kind").get<std::string>());
      if (s.contains("seed")) c.selector_seed = s.at("seed").get<std::uint64_t>();
      if (s.contains("invert")) c.selector_invert = s.at("invert").get<bool>();
    }
    if (j.contains("ratio")) c.ratio = j.at("ratio").get<double>();
    if (j.contains("window")) {
      const json& w = j.at("window");
      reject_unknown_keys(w, {"size", "interval", "shuffle", "shuffle_seed"}, "window");
      if (w.contains("size")) c.window.size = w.at("size").get<Index>();
      if (w.contains("interval")) c.window.interval = w.at("interval").get<Index>();
      if (w.contains("shuffle")) c.window.shuffle = w.at("shuffle").get<bool>();
      if (w.contains("shuffle_seed"))
        c.window.shuffle_seed = w.at("shuffle_seed").get<std::uint64_t>();
    }
    if (j.contains("attack")) {
      const json& a = j.at("attack");
      reject_unknown_keys(a,
                          {"mode", "scoring", "kappa", "k_clusters", "kmeans_seed",
                           "kmeans_iters", "kmeans_tol", "loss_file", "shadow_file"},
                          "attack");
      if (a.contains("mode")) c.attack.mode = attack_mode_from_string(a.at("mode").get<std::string>());
      if (a.contains("scoring")) {
        const std::string s = a.at("scoring").get<std::string>();
        if (s == "simplified")
          c.attack.scoring = SideScoring::Simplified;
        else if (s == "general")
          c.attack.scoring = SideScoring::General;
        else
          throw std::invalid_argument("unknown attack.scoring: " + s);
      }
      if (a.contains("kappa")) c.attack.kappa = a.at("kappa").get<double>();
      if (a.contains("k_clusters")) c.attack.k_clusters = a.at("k_clusters").get<Index>();
      if (a.contains("kmeans_seed"))
        c.attack.kmeans_seed = a.at("kmeans_seed").get<std::uint64_t>();
      if (a.contains("kmeans_iters")) c.attack.kmeans_iters = a.at("kmeans_iters").get<Index>();
      if (a.contains("kmeans_tol")) c.attack.kmeans_tol = a.at("kmeans_tol").get<double>();
      if (a.contains("loss_file")) c.attack.loss_file = a.at("loss_file").get<std::string>();
      if (a.contains("shadow_file")) c.attack.shadow_file = a.at("shadow_file").get<std::string>();
    }
    if (j.contains("surfaces")) {
      c.surfaces.clear();
      for (const json& s : j.at("surfaces"))
        c.surfaces.push_back(surface_from_string(s.get<std::string>()));
    }
    if (j.contains("fpr_levels")) c.fpr_levels = j.at("fpr_levels").get<std::vector<double>>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("pad_to_multiple")) c.pad_to_multiple = j.at("pad_to_multiple").get<bool>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed config: ") + e.what());
  }
  return c;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("config file " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace choiceleak
