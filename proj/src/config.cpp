#include "synccool/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "synccool/errors.hpp"

namespace synccool {

using nlohmann::json;

namespace {

// Reads keys from one JSON object and rejects anything it was not asked for.
class Section {
 public:
  Section(const json& doc, std::string path) : path_(std::move(path)) {
    if (!doc.is_object()) throw InvalidParameter(path_ + ": expected an object");
    doc_ = &doc;
  }

  bool has(const std::string& key) const { return doc_->contains(key) && !(*doc_)[key].is_null(); }

  template <class T>
  T get(const std::string& key, const T& fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    return as<T>(key);
  }

  template <class T>
  T require(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) throw InvalidParameter(path_ + "." + key + ": required");
    return as<T>(key);
  }

  const json* child(const std::string& key) {
    seen_.insert(key);
    return has(key) ? &(*doc_)[key] : nullptr;
  }

  void finish() const {
    for (auto it = doc_->begin(); it != doc_->end(); ++it) {
      if (!seen_.count(it.key())) throw InvalidParameter(path_ + "." + it.key() + ": unknown key");
    }
  }

 private:
  template <class T>
  T as(const std::string& key) const {
    const json& v = (*doc_)[key];
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw InvalidParameter("");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!v.is_number_integer()) throw InvalidParameter("");
        if constexpr (std::is_unsigned_v<T>) {
          if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
            throw InvalidParameter("");
          }
        }
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw InvalidParameter("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw InvalidParameter("");
      }
      return v.get<T>();
    } catch (const std::exception&) {
      throw InvalidParameter(path_ + "." + key + ": wrong type (" + v.dump() + ")");
    }
  }

  const json* doc_ = nullptr;
  std::string path_;
  std::set<std::string> seen_;
};

void parse_physics(const json& doc, RunConfig& cfg) {
  Section s(doc, "physics");
  const int n = s.require<int>("n_atoms");
  const double kappa = s.require<double>("kappa");
  const double delta = s.get<double>("delta", 0.0);
  const double w = s.require<double>("w_pump");
  std::optional<double> g, ngc;
  if (s.has("g")) g = s.get<double>("g", 0.0);
  if (s.has("n_gamma_c")) ngc = s.get<double>("n_gamma_c", 0.0);
  s.get<double>("g", 0.0);
  s.get<double>("n_gamma_c", 0.0);
  s.finish();
  cfg.physics = PhysicalParams::make(n, kappa, delta, w, g, ngc);
  cfg.coupling_given_as_g = g.has_value();
}

void parse_integration(const json& doc, RunConfig& cfg) {
  Section s(doc, "integration");
  IntegrationConfig& c = cfg.integration;
  c.dt = s.get<double>("dt", c.dt);
  c.t_end = s.get<double>("t_end", c.t_end);
  c.scheme = scheme_from_string(s.get<std::string>("scheme", to_string(c.scheme)));
  c.force_mode = force_mode_from_string(s.get<std::string>("force_mode", to_string(c.force_mode)));
  c.noise_enabled = s.get<bool>("noise", c.noise_enabled);
  c.sample_interval = s.get<double>("sample_interval", c.sample_interval);
  c.noise_refresh = s.get<double>("noise_refresh", c.noise_refresh);
  c.noise_factorization = noise_factorization_from_string(
      s.get<std::string>("noise_factorization", to_string(c.noise_factorization)));
  c.freeze_motion = s.get<bool>("freeze_motion", c.freeze_motion);
  c.snapshot_times = s.get<std::vector<double>>("snapshot_times", c.snapshot_times);
  s.finish();
}

void parse_initial(const json& doc, RunConfig& cfg) {
  Section s(doc, "initial");
  InitialCondition& ic = cfg.initial;
  ic.p2_initial = s.get<double>("p2_initial", ic.p2_initial);
  ic.dipole_seed = s.get<double>("dipole_seed", ic.dipole_seed);
  ic.positions = s.get<std::vector<double>>("positions", ic.positions);
  ic.momenta = s.get<std::vector<double>>("momenta", ic.momenta);
  s.finish();
}

void parse_steady(const json& doc, RunConfig& cfg) {
  Section s(doc, "steady_state");
  SteadyStateOptions& o = cfg.steady_state;
  o.regime = density_regime_from_string(s.get<std::string>("regime", to_string(o.regime)));
  o.delta_pin = s.get<double>("delta_pin", o.delta_pin);
  o.grid_points = s.get<std::size_t>("grid_points", o.grid_points);
  s.finish();
}

void parse_sweep(const json& doc, RunConfig& cfg) {
  Section s(doc, "sweep");
  SweepOptions& o = cfg.sweep;
  o.delta_over_half_kappa = s.require<std::vector<double>>("delta_over_half_kappa");
  o.w_over_n_gamma_c = s.require<std::vector<double>>("w_over_n_gamma_c");
  o.scan_delta_over_half_kappa = s.get<double>("scan_delta_over_half_kappa", o.scan_delta_over_half_kappa);
  s.finish();
}

void parse_spectrum(const json& doc, RunConfig& cfg) {
  Section s(doc, "spectrum");
  SpectrumOptions& o = cfg.spectrum;
  o.enabled = true;
  o.channel = s.get<std::string>("channel", o.channel);
  o.window_fraction = s.get<double>("window_fraction", o.window_fraction);
  o.omega_min = s.get<double>("omega_min", o.omega_min);
  o.omega_max = s.get<double>("omega_max", o.omega_max);
  o.omega_points = s.get<std::size_t>("omega_points", o.omega_points);
  o.threshold_factor = s.get<double>("threshold_factor", o.threshold_factor);
  s.finish();
}

void parse_histogram(const json& doc, RunConfig& cfg) {
  Section s(doc, "histogram");
  HistogramOptions& o = cfg.histogram;
  o.enabled = true;
  o.x_bins = s.get<int>("x_bins", o.x_bins);
  o.p_bins = s.get<int>("p_bins", o.p_bins);
  const bool lo = s.has("p_min"), hi = s.has("p_max");
  if (lo != hi) throw InvalidParameter("histogram: p_min and p_max go together");
  if (lo) o.p_range = std::make_pair(s.get<double>("p_min", 0.0), s.get<double>("p_max", 0.0));
  s.get<double>("p_min", 0.0);
  s.get<double>("p_max", 0.0);
  s.finish();
}

// Embedded presets, one per figure. Values follow the figure captions; the
// desk-scale trajectory counts are noted in the README.
const std::map<std::string, std::string>& preset_table() {
  static const std::map<std::string, std::string> table = {
      {"fig3a", R"({
  "schema_version": 1, "name": "fig3a", "command": "simulate-sc",
  "physics": {"n_atoms": 100, "kappa": 780, "delta": 390, "w_pump": 10, "n_gamma_c": 40},
  "integration": {"dt": 0.002, "t_end": 2000, "sample_interval": 1.0, "snapshot_times": [2000]},
  "initial": {"p2_initial": 500},
  "ensemble": {"n_traj": 1000},
  "seed": 1,
  "histogram": {"x_bins": 64, "p_bins": 200}
})"},
      {"fig3b", R"({
  "schema_version": 1, "name": "fig3b", "command": "simulate-sc",
  "physics": {"n_atoms": 100, "kappa": 780, "delta": 390, "w_pump": 10, "n_gamma_c": 40},
  "integration": {"dt": 0.002, "t_end": 2000, "sample_interval": 1.0},
  "initial": {"p2_initial": 50},
  "ensemble": {"n_traj": 1000},
  "seed": 1
})"},
      {"fig3c", R"({
  "schema_version": 1, "name": "fig3c", "command": "simulate-sc",
  "physics": {"n_atoms": 100, "kappa": 780, "delta": 390, "w_pump": 10, "n_gamma_c": 40},
  "integration": {"dt": 0.002, "t_end": 500, "sample_interval": 0.5},
  "initial": {"p2_initial": 5},
  "ensemble": {"n_traj": 200},
  "seed": 1
})"},
      {"fig4", R"({
  "schema_version": 1, "name": "fig4", "command": "simulate-mf",
  "physics": {"n_atoms": 100, "kappa": 780, "delta": 390, "w_pump": 10, "n_gamma_c": 40},
  "integration": {"dt": 0.002, "t_end": 200, "sample_interval": 0.05},
  "initial": {"p2_initial": 5, "dipole_seed": 0.001},
  "seed": 1
})"},
      {"fig5", R"({
  "schema_version": 1, "name": "fig5", "command": "simulate-mf",
  "physics": {"n_atoms": 1000, "kappa": 780, "delta": 390, "w_pump": 10, "n_gamma_c": 40},
  "integration": {"dt": 0.002, "t_end": 100, "sample_interval": 0.02},
  "initial": {"p2_initial": 5, "dipole_seed": 0.001},
  "seed": 1,
  "spectrum": {"channel": "xdagx_mf"}
})"},
      {"fig7", R"({
  "schema_version": 1, "name": "fig7", "command": "steady-state",
  "physics": {"n_atoms": 1000, "kappa": 780, "delta": 390, "w_pump": 10, "n_gamma_c": 40},
  "steady_state": {"regime": "uniform", "grid_points": 1024}
})"},
      {"fig8", R"({
  "schema_version": 1, "name": "fig8", "command": "simulate-mf",
  "physics": {"n_atoms": 1000, "kappa": 780, "delta": 390, "w_pump": 10, "n_gamma_c": 40},
  "integration": {"dt": 0.002, "t_end": 50, "sample_interval": 0.5, "snapshot_times": [50]},
  "initial": {"p2_initial": 5, "dipole_seed": 0.001},
  "seed": 1,
  "histogram": {"x_bins": 64, "p_bins": 64, "p_min": -4, "p_max": 4}
})"},
      {"fig10", R"({
  "schema_version": 1, "name": "fig10", "command": "sweep",
  "physics": {"n_atoms": 100, "kappa": 780, "delta": 390, "w_pump": 10, "n_gamma_c": 40},
  "sweep": {
    "delta_over_half_kappa": [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0],
    "w_over_n_gamma_c": "grid:0.005:0.6:120",
    "scan_delta_over_half_kappa": 1.0
  }
})"},
      {"fig11", R"({
  "schema_version": 1, "name": "fig11", "command": "simulate-mf",
  "physics": {"n_atoms": 1000, "kappa": 780, "delta": 390, "w_pump": 10, "n_gamma_c": 40},
  "integration": {"dt": 0.002, "t_end": 100, "sample_interval": 0.02},
  "initial": {"p2_initial": 5, "dipole_seed": 0.001},
  "seed": 1,
  "spectrum": {"channel": "cos_arg_x"}
})"},
  };
  return table;
}

// "grid:lo:hi:n" expands to n evenly spaced values from lo to hi inclusive.
void expand_grids(json& doc) {
  if (!doc.contains("sweep") || !doc["sweep"].is_object()) return;
  for (auto& [key, v] : doc["sweep"].items()) {
    if (!v.is_string()) continue;
    const std::string text = v.get<std::string>();
    if (text.rfind("grid:", 0) != 0) continue;
    std::istringstream is(text.substr(5));
    double lo = 0, hi = 0;
    std::size_t n = 0;
    char c1 = 0, c2 = 0;
    if (!(is >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 2) {
      throw InvalidParameter("sweep." + key + ": malformed grid '" + text + "'");
    }
    json arr = json::array();
    for (std::size_t i = 0; i < n; ++i) arr.push_back(lo + (hi - lo) * i / (n - 1));
    v = arr;
  }
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::simulate_sc: return "simulate-sc";
    case Command::simulate_mf: return "simulate-mf";
    case Command::steady_state: return "steady-state";
    case Command::sweep: return "sweep";
  }
  return "simulate-sc";
}

Command command_from_string(const std::string& s) {
  for (Command c : {Command::simulate_sc, Command::simulate_mf, Command::steady_state, Command::sweep}) {
    if (to_string(c) == s) return c;
  }
  throw InvalidParameter("unknown command '" + s + "'");
}

std::vector<std::string> RunConfig::validate() const {
  physics.validate();
  std::vector<std::string> warnings;
  switch (command) {
    case Command::simulate_sc:
      if (n_traj < 1) throw InvalidParameter("ensemble.n_traj must be at least 1");
      initial.validate(physics.n_atoms);
      warnings = integration.validate(physics);
      break;
    case Command::simulate_mf:
      initial.validate(physics.n_atoms);
      if (!(initial.dipole_seed >= 0.0 && initial.dipole_seed <= 0.5)) {
        throw InvalidParameter("initial.dipole_seed must lie in [0, 0.5]");
      }
      warnings = integration.validate(physics);
      break;
    case Command::steady_state:
      if (steady_state.grid_points < 2) throw InvalidParameter("steady_state.grid_points must be >= 2");
      if (steady_state.regime == DensityRegime::empirical && initial.positions.empty()) {
        throw InvalidParameter("steady_state: the empirical regime needs initial.positions");
      }
      break;
    case Command::sweep:
      if (sweep.delta_over_half_kappa.empty() || sweep.w_over_n_gamma_c.empty()) {
        throw InvalidParameter("sweep: both grids must be non-empty");
      }
      for (double v : sweep.w_over_n_gamma_c) {
        if (!(v > 0.0)) throw InvalidParameter("sweep.w_over_n_gamma_c must be positive");
      }
      break;
  }
  if (spectrum.enabled) {
    if (!(spectrum.window_fraction > 0.0 && spectrum.window_fraction < 1.0)) {
      throw InvalidParameter("spectrum.window_fraction must lie in (0, 1)");
    }
    if (spectrum.omega_points < 2 || !(spectrum.omega_max > spectrum.omega_min)) {
      throw InvalidParameter("spectrum: bad frequency grid");
    }
  }
  if (histogram.enabled && (histogram.x_bins < 2 || histogram.p_bins < 2)) {
    throw InvalidParameter("histogram: need at least two bins per axis");
  }
  return warnings;
}

RunConfig parse_config(const json& input) {
  json doc = input;
  expand_grids(doc);
  Section top(doc, "config");
  const int version = top.require<int>("schema_version");
  if (version != kSchemaVersion) {
    throw InvalidParameter("unsupported schema_version " + std::to_string(version));
  }
  RunConfig cfg;
  cfg.name = top.get<std::string>("name", "");
  cfg.command = command_from_string(top.require<std::string>("command"));
  const json* phys = top.child("physics");
  if (!phys) throw InvalidParameter("config.physics: required");
  parse_physics(*phys, cfg);
  if (const json* j = top.child("integration")) parse_integration(*j, cfg);
  if (const json* j = top.child("initial")) parse_initial(*j, cfg);
  if (const json* j = top.child("ensemble")) {
    Section s(*j, "ensemble");
    cfg.n_traj = s.get<std::size_t>("n_traj", cfg.n_traj);
    s.finish();
  }
  cfg.seed = top.get<std::uint64_t>("seed", cfg.seed);
  if (const json* j = top.child("steady_state")) parse_steady(*j, cfg);
  if (const json* j = top.child("sweep")) parse_sweep(*j, cfg);
  if (const json* j = top.child("spectrum")) parse_spectrum(*j, cfg);
  if (const json* j = top.child("histogram")) parse_histogram(*j, cfg);
  top.finish();
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidParameter("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

json to_json(const RunConfig& c) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["name"] = c.name;
  doc["command"] = to_string(c.command);
  json phys = {{"n_atoms", c.physics.n_atoms},
               {"kappa", c.physics.kappa},
               {"delta", c.physics.delta},
               {"w_pump", c.physics.w_pump}};
  if (c.coupling_given_as_g) {
    phys["g"] = c.physics.g;
  } else {
    phys["n_gamma_c"] = c.physics.n_gamma_c;
  }
  doc["physics"] = phys;
  const IntegrationConfig& i = c.integration;
  doc["integration"] = {{"dt", i.dt},
                        {"t_end", i.t_end},
                        {"scheme", to_string(i.scheme)},
                        {"force_mode", to_string(i.force_mode)},
                        {"noise", i.noise_enabled},
                        {"sample_interval", i.sample_interval},
                        {"noise_refresh", i.noise_refresh},
                        {"noise_factorization", to_string(i.noise_factorization)},
                        {"freeze_motion", i.freeze_motion},
                        {"snapshot_times", i.snapshot_times}};
  doc["initial"] = {{"p2_initial", c.initial.p2_initial},
                    {"dipole_seed", c.initial.dipole_seed},
                    {"positions", c.initial.positions},
                    {"momenta", c.initial.momenta}};
  doc["ensemble"] = {{"n_traj", c.n_traj}};
  doc["seed"] = c.seed;
  doc["steady_state"] = {{"regime", to_string(c.steady_state.regime)},
                         {"delta_pin", c.steady_state.delta_pin},
                         {"grid_points", c.steady_state.grid_points}};
  if (c.command == Command::sweep) {
    doc["sweep"] = {{"delta_over_half_kappa", c.sweep.delta_over_half_kappa},
                    {"w_over_n_gamma_c", c.sweep.w_over_n_gamma_c},
                    {"scan_delta_over_half_kappa", c.sweep.scan_delta_over_half_kappa}};
  }
  if (c.spectrum.enabled) {
    doc["spectrum"] = {{"channel", c.spectrum.channel},
                       {"window_fraction", c.spectrum.window_fraction},
                       {"omega_min", c.spectrum.omega_min},
                       {"omega_max", c.spectrum.omega_max},
                       {"omega_points", c.spectrum.omega_points},
                       {"threshold_factor", c.spectrum.threshold_factor}};
  }
  if (c.histogram.enabled) {
    json h = {{"x_bins", c.histogram.x_bins}, {"p_bins", c.histogram.p_bins}};
    if (c.histogram.p_range) {
      h["p_min"] = c.histogram.p_range->first;
      h["p_max"] = c.histogram.p_range->second;
    }
    doc["histogram"] = h;
  }
  return doc;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : preset_table()) names.push_back(k);
  return names;
}

RunConfig preset(const std::string& name) {
  const auto& table = preset_table();
  const auto it = table.find(name);
  if (it == table.end()) throw InvalidParameter("unknown preset '" + name + "'");
  return parse_config(json::parse(it->second));
}

}  // namespace synccool
