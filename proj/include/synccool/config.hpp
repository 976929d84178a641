#pragma once

// Run configuration: a versioned JSON document naming the command, the
// physical parameters and the per-command options. All quantities are in
// recoil units (hbar = k = omega_R = 1); there are no unit suffixes.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "synccool/model.hpp"
#include "synccool/semiclassical.hpp"
#include "synccool/steady_state.hpp"

namespace synccool {

inline constexpr int kSchemaVersion = 1;

enum class Command { simulate_sc, simulate_mf, steady_state, sweep };

std::string to_string(Command c);
Command command_from_string(const std::string& s);

struct SteadyStateOptions {
  DensityRegime regime = DensityRegime::uniform;
  double delta_pin = 1.0;
  std::size_t grid_points = 1024;
};

struct SweepOptions {
  std::vector<double> delta_over_half_kappa;
  std::vector<double> w_over_n_gamma_c;
  /// Detuning (in kappa/2) of the single w-scan written next to the tables.
  double scan_delta_over_half_kappa = 1.0;
};

struct SpectrumOptions {
  bool enabled = false;
  std::string channel = "xdagx_mean";
  double window_fraction = 0.2;
  double omega_min = -20.0;
  double omega_max = 20.0;
  std::size_t omega_points = 2048;
  double threshold_factor = 3.0;
};

struct HistogramOptions {
  bool enabled = false;
  int x_bins = 64;
  int p_bins = 64;
  std::optional<std::pair<double, double>> p_range;
};

struct RunConfig {
  std::string name;
  Command command = Command::simulate_sc;
  PhysicalParams physics;
  bool coupling_given_as_g = false;
  IntegrationConfig integration;
  InitialCondition initial;
  std::size_t n_traj = 1;
  std::uint64_t seed = 1;
  SteadyStateOptions steady_state;
  SweepOptions sweep;
  SpectrumOptions spectrum;
  HistogramOptions histogram;

  /// Re-checks cross-field constraints. Throws InvalidParameter; returns
  /// warnings from the integration stability guard.
  std::vector<std::string> validate() const;
};

/// Throws InvalidParameter on schema violations, unknown keys included.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

std::vector<std::string> preset_names();
/// Throws InvalidParameter for an unknown name.
RunConfig preset(const std::string& name);

}  // namespace synccool
