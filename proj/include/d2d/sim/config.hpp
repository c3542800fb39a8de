#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "d2d/channel.hpp"
#include "d2d/ortho_alloc.hpp"

namespace d2d::sim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string name = "single-shot";
  long trials = 100;
  std::uint64_t master_seed = 1;
  double orthogonal_probability = 0.5;
  int oracle_grid = 60;
  double lattice_step = 1e-3;
  std::string out_path;  // empty -> <name>.csv

  std::vector<double> drx_diag_sweep_m;       // MBS-DRx diagonal distances
  std::vector<double> pair_distance_sweep_m;  // DTx-DRx separations (fig6a, fig8)
  double pair_distance_m = 50.0;              // fixed separation (fig6b, fig7)
  double pair_distance_max_m = 100.0;         // fig5 draws d ~ U(0, max)

  CellularRateMins r_mins{};
  bool use_r_mins = false;

  // single-shot overrides
  std::optional<bool> orthogonal_override;
  std::optional<double> fading_all;                  // one |h|^2 for every link
  std::map<std::string, double> fading_links;        // per-link |h|^2, "DTX->DRX"
};

struct SimConfig {
  SystemParams system;
  Topology topology = Topology::defaults();
  ExperimentConfig experiment;
};

namespace detail {

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"fig5", "fig6a", "fig6b", "fig7", "fig8", "single-shot"};
  return names;
}

inline void require_keys(const nlohmann::json& obj, const std::vector<std::string>& allowed,
                         const std::string& where) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const auto& k : allowed)
      if (item.key() == k) ok = true;
    if (!ok) throw ConfigError("unknown key \"" + item.key() + "\" in " + where);
  }
}

inline double get_number(const nlohmann::json& obj, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ConfigError("\"" + key + "\" must be a number");
  return obj[key].get<double>();
}

inline PathlossModel get_model(const nlohmann::json& obj, const std::string& key,
                               PathlossModel fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& m = obj[key];
  require_keys(m, {"intercept_db", "slope_db_per_decade"}, "system." + key);
  PathlossModel model;
  model.intercept_db = get_number(m, "intercept_db", fallback.intercept_db);
  model.slope_db_per_decade = get_number(m, "slope_db_per_decade", fallback.slope_db_per_decade);
  if (!(model.slope_db_per_decade > 0.0))
    throw ConfigError("system." + key + ": slope_db_per_decade must be positive");
  return model;
}

inline Point get_point(const nlohmann::json& obj, const std::string& key, Point fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& p = obj[key];
  if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
    throw ConfigError("topology." + key + " must be [x, y] in meters");
  return {p[0].get<double>(), p[1].get<double>()};
}

inline std::vector<double> get_sweep(const nlohmann::json& obj, const std::string& key) {
  std::vector<double> out;
  if (!obj.contains(key)) return out;
  const auto& arr = obj[key];
  if (!arr.is_array() || arr.empty()) throw ConfigError("\"" + key + "\" must be a non-empty array");
  for (const auto& v : arr) {
    if (!v.is_number()) throw ConfigError("\"" + key + "\" must contain numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

inline std::vector<double> linspace_sweep(double lo, double hi, double step) {
  std::vector<double> out;
  for (double v = lo; v <= hi + 1e-9; v += step) out.push_back(v);
  return out;
}

inline void apply_experiment_defaults(ExperimentConfig& e) {
  if (e.name == "fig5") {
    if (e.drx_diag_sweep_m.empty()) e.drx_diag_sweep_m = linspace_sweep(100.0, 1000.0, 100.0);
  } else if (e.name == "fig6a") {
    if (e.drx_diag_sweep_m.empty()) e.drx_diag_sweep_m = {600.0};
    if (e.pair_distance_sweep_m.empty()) e.pair_distance_sweep_m = linspace_sweep(10.0, 150.0, 2.0);
  } else if (e.name == "fig6b" || e.name == "fig7") {
    if (e.drx_diag_sweep_m.empty()) e.drx_diag_sweep_m = linspace_sweep(200.0, 1000.0, 100.0);
  } else if (e.name == "fig8") {
    if (e.drx_diag_sweep_m.empty()) e.drx_diag_sweep_m = {300.0, 500.0, 700.0, 900.0};
    if (e.pair_distance_sweep_m.empty()) e.pair_distance_sweep_m = linspace_sweep(10.0, 60.0, 10.0);
  }
}

}  // namespace detail

inline SimConfig parse_config(const nlohmann::json& root) {
  using detail::get_model;
  using detail::get_number;
  using detail::get_point;
  using detail::get_sweep;
  using detail::require_keys;

  if (!root.is_object()) throw ConfigError("top level must be a JSON object");
  require_keys(root, {"system", "topology", "experiment"}, "top level");

  SimConfig cfg;
  SystemParams defaults;  // Table-II values
  if (root.contains("system")) {
    const auto& sys = root["system"];
    require_keys(sys,
                 {"bandwidth_hz", "noise_density_dbm_hz", "p_max_mbs_dbm", "p_max_fap_dbm",
                  "p_max_dtx_dbm", "p_max_cue_dbm", "sinr_min_cue_db", "sinr_min_fue_db",
                  "sinr_min_drx_db", "d_constant_m", "path_loss_exponent_n", "threshold_reference",
                  "pathloss_assignment", "pathloss_d2d", "pathloss_macro", "pathloss_femto"},
                 "system");
    auto& s = cfg.system;
    s.bandwidth_hz = get_number(sys, "bandwidth_hz", defaults.bandwidth_hz);
    s.noise_density_dbm_hz = get_number(sys, "noise_density_dbm_hz", defaults.noise_density_dbm_hz);
    s.p_max_mbs_mw = dbm_to_mw(get_number(sys, "p_max_mbs_dbm", mw_to_dbm(defaults.p_max_mbs_mw)));
    s.p_max_fap_mw = dbm_to_mw(get_number(sys, "p_max_fap_dbm", mw_to_dbm(defaults.p_max_fap_mw)));
    s.p_max_dtx_mw = dbm_to_mw(get_number(sys, "p_max_dtx_dbm", mw_to_dbm(defaults.p_max_dtx_mw)));
    s.p_max_cue_mw = dbm_to_mw(get_number(sys, "p_max_cue_dbm", mw_to_dbm(defaults.p_max_cue_mw)));
    s.sinr_min_cue = db_to_linear(get_number(sys, "sinr_min_cue_db", linear_to_db(defaults.sinr_min_cue)));
    s.sinr_min_fue = db_to_linear(get_number(sys, "sinr_min_fue_db", linear_to_db(defaults.sinr_min_fue)));
    s.sinr_min_drx = db_to_linear(get_number(sys, "sinr_min_drx_db", linear_to_db(defaults.sinr_min_drx)));
    s.d_constant_m = get_number(sys, "d_constant_m", defaults.d_constant_m);
    s.path_loss_exponent_n = get_number(sys, "path_loss_exponent_n", defaults.path_loss_exponent_n);
    if (sys.contains("threshold_reference")) {
      const std::string ref = sys["threshold_reference"].get<std::string>();
      if (ref == "two-hop-min")
        s.threshold_reference = ThresholdReference::TwoHopMin;
      else if (ref == "best-hop")
        s.threshold_reference = ThresholdReference::BestHop;
      else
        throw ConfigError("system.threshold_reference must be \"two-hop-min\" or \"best-hop\"");
    }
    if (sys.contains("pathloss_assignment")) {
      const std::string rule = sys["pathloss_assignment"].get<std::string>();
      if (rule == "endpoint")
        s.pathloss_assignment = PathlossAssignment::Endpoint;
      else if (rule == "transmitter")
        s.pathloss_assignment = PathlossAssignment::Transmitter;
      else
        throw ConfigError("system.pathloss_assignment must be \"endpoint\" or \"transmitter\"");
    }
    s.pl_d2d = get_model(sys, "pathloss_d2d", defaults.pl_d2d);
    s.pl_macro = get_model(sys, "pathloss_macro", defaults.pl_macro);
    s.pl_femto = get_model(sys, "pathloss_femto", defaults.pl_femto);
    if (!(s.bandwidth_hz > 0.0)) throw ConfigError("system.bandwidth_hz must be positive");
    if (!(s.d_constant_m >= 0.0)) throw ConfigError("system.d_constant_m must be non-negative");
    if (!(s.path_loss_exponent_n > 0.0)) throw ConfigError("system.path_loss_exponent_n must be positive");
  }

  if (root.contains("topology")) {
    const auto& topo = root["topology"];
    require_keys(topo, {"mbs", "fap", "cue", "fue", "dtx", "drx"}, "topology");
    cfg.topology.at(NodeId::Mbs) = get_point(topo, "mbs", cfg.topology.at(NodeId::Mbs));
    cfg.topology.at(NodeId::Fap) = get_point(topo, "fap", cfg.topology.at(NodeId::Fap));
    cfg.topology.at(NodeId::Cue) = get_point(topo, "cue", cfg.topology.at(NodeId::Cue));
    cfg.topology.at(NodeId::Fue) = get_point(topo, "fue", cfg.topology.at(NodeId::Fue));
    cfg.topology.at(NodeId::Dtx) = get_point(topo, "dtx", cfg.topology.at(NodeId::Dtx));
    cfg.topology.at(NodeId::Drx) = get_point(topo, "drx", cfg.topology.at(NodeId::Drx));
  }

  if (root.contains("experiment")) {
    const auto& exp = root["experiment"];
    require_keys(exp,
                 {"name", "trials", "seed", "orthogonal_probability", "oracle_grid", "lattice_step",
                  "out", "drx_diag_sweep_m", "pair_distance_sweep_m", "pair_distance_m",
                  "pair_distance_max_m", "r_min_cue", "r_min_d2d", "r_min_fue",
                  "orthogonal_available", "fading"},
                 "experiment");
    auto& e = cfg.experiment;
    if (exp.contains("name")) e.name = exp["name"].get<std::string>();
    bool known = false;
    for (const auto& n : detail::experiment_names()) known = known || n == e.name;
    if (!known) throw ConfigError("experiment.name \"" + e.name + "\" is not a known experiment");
    if (exp.contains("trials")) e.trials = exp["trials"].get<long>();
    if (exp.contains("seed")) e.master_seed = exp["seed"].get<std::uint64_t>();
    e.orthogonal_probability = get_number(exp, "orthogonal_probability", e.orthogonal_probability);
    if (exp.contains("oracle_grid")) e.oracle_grid = exp["oracle_grid"].get<int>();
    e.lattice_step = get_number(exp, "lattice_step", e.lattice_step);
    if (exp.contains("out")) e.out_path = exp["out"].get<std::string>();
    e.drx_diag_sweep_m = get_sweep(exp, "drx_diag_sweep_m");
    e.pair_distance_sweep_m = get_sweep(exp, "pair_distance_sweep_m");
    e.pair_distance_m = get_number(exp, "pair_distance_m", e.pair_distance_m);
    e.pair_distance_max_m = get_number(exp, "pair_distance_max_m", e.pair_distance_max_m);
    if (exp.contains("r_min_cue") || exp.contains("r_min_d2d") || exp.contains("r_min_fue")) {
      e.use_r_mins = true;
      e.r_mins.cue = get_number(exp, "r_min_cue", 0.0);
      e.r_mins.d2d = get_number(exp, "r_min_d2d", 0.0);
      e.r_mins.fue = get_number(exp, "r_min_fue", 0.0);
    }
    if (exp.contains("orthogonal_available"))
      e.orthogonal_override = exp["orthogonal_available"].get<bool>();
    if (exp.contains("fading")) {
      const auto& fading = exp["fading"];
      if (fading.is_number()) {
        e.fading_all = fading.get<double>();
      } else if (fading.is_object()) {
        for (const auto& item : fading.items()) {
          if (!item.value().is_number())
            throw ConfigError("experiment.fading values must be numbers");
          e.fading_links[item.key()] = item.value().get<double>();
        }
      } else {
        throw ConfigError("experiment.fading must be a number or a {\"TX->RX\": value} object");
      }
    }
    if (e.trials < 1) throw ConfigError("experiment.trials must be >= 1");
    if (e.orthogonal_probability < 0.0 || e.orthogonal_probability > 1.0)
      throw ConfigError("experiment.orthogonal_probability must be in [0, 1]");
    if (e.oracle_grid < 2) throw ConfigError("experiment.oracle_grid must be >= 2");
    if (!(e.lattice_step > 0.0) || e.lattice_step > 0.1)
      throw ConfigError("experiment.lattice_step must be in (0, 0.1]");
    if (!(e.pair_distance_m > 0.0)) throw ConfigError("experiment.pair_distance_m must be positive");
    if (!(e.pair_distance_max_m > 0.0))
      throw ConfigError("experiment.pair_distance_max_m must be positive");
  }

  detail::apply_experiment_defaults(cfg.experiment);
  if (cfg.experiment.out_path.empty()) cfg.experiment.out_path = cfg.experiment.name + ".csv";
  return cfg;
}

// CLI override: `d2d run <experiment>` wins over the config's name. Default
// sweeps and output path follow the new experiment.
inline void override_experiment_name(SimConfig& cfg, const std::string& name) {
  bool known = false;
  for (const auto& n : detail::experiment_names()) known = known || n == name;
  if (!known) throw ConfigError("unknown experiment \"" + name + "\"");
  if (cfg.experiment.out_path == cfg.experiment.name + ".csv") cfg.experiment.out_path = name + ".csv";
  cfg.experiment.name = name;
  detail::apply_experiment_defaults(cfg.experiment);
}

inline SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    // Convert the byte offset into a line/column diagnostic.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < err.byte; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " +
                      err.what());
  }
  try {
    return parse_config(root);
  } catch (const ConfigError& err) {
    throw ConfigError(path + ": " + err.what());
  }
}

}  // namespace d2d::sim
