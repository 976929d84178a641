#include "synccool/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "synccool/errors.hpp"
#include "synccool/io.hpp"
#include "synccool/meanfield.hpp"
#include "synccool/steady_state.hpp"

#ifndef SYNCCOOL_VERSION
#define SYNCCOOL_VERSION "0.0.0"
#endif

namespace synccool {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  fs::path add(const std::string& name) {
    names_.push_back(name);
    return dir_ / name;
  }
  const std::vector<std::string>& names() const { return names_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

json noise_json(const NoiseStats& n) {
  return {{"factorizations", n.factorizations},
          {"eigen_factorizations", n.eigen_factorizations},
          {"clipped_eigenvalues", n.clipped},
          {"worst_relative_eigenvalue", n.worst_relative}};
}

std::string snapshot_suffix(std::size_t k) { return "_" + std::to_string(k); }

void write_spectrum_outputs(const TimeSeries& series, const SpectrumOptions& opt, Outputs& out,
                            json& summary) {
  if (!series.has(opt.channel)) {
    throw InvalidParameter("spectrum.channel '" + opt.channel + "' is not a channel of this run");
  }
  const std::vector<double> omega = frequency_grid(opt.omega_min, opt.omega_max, opt.omega_points);
  const Spectrum s = laplace_spectrum(series.times, series.channel(opt.channel),
                                      opt.window_fraction, omega);
  const std::vector<Peak> peaks = find_peaks(s, opt.threshold_factor);
  write_spectrum_csv(out.add("spectrum.csv"), s);
  write_peaks_csv(out.add("peaks.csv"), peaks);
  json jp = json::array();
  for (const auto& p : peaks) jp.push_back({{"omega", p.omega}, {"magnitude", p.magnitude}});
  summary["spectrum"] = {{"channel", opt.channel},
                         {"stationary_value", s.stationary_value},
                         {"peaks", jp}};
}

void write_snapshot_outputs(const std::vector<Snapshot>& snaps, const RunConfig& cfg,
                            Outputs& out) {
  if (snaps.empty()) return;
  write_snapshots_csv(out.add("snapshots.csv"), snaps, cfg.physics.n_atoms);
  if (!cfg.histogram.enabled) return;
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    const Snapshot& s = snaps[k];
    write_histogram2d(out.add("hist2d" + snapshot_suffix(k) + ".txt"),
                      histogram2d(s.x, s.p, cfg.histogram.x_bins, cfg.histogram.p_bins,
                                  HistNorm::counts, cfg.histogram.p_range));
    write_histogram1d_csv(out.add("hist_p" + snapshot_suffix(k) + ".csv"),
                          histogram1d(s.p, cfg.histogram.p_bins, HistNorm::counts,
                                      cfg.histogram.p_range),
                          "p");
  }
}

json run_semiclassical(const RunConfig& cfg, const RunOptions& opt, Outputs& out) {
  const EnsembleResult r = simulate_ensemble(cfg.physics, cfg.integration, cfg.initial,
                                             cfg.n_traj, cfg.seed, opt.threads);
  write_timeseries_csv(out.add("timeseries.csv"), r.series);
  write_snapshot_outputs(r.snapshots, cfg, out);
  json summary;
  if (cfg.spectrum.enabled) write_spectrum_outputs(r.series, cfg.spectrum, out, summary);
  json extra = {{"noise", noise_json(r.noise)}, {"trajectory_streams", r.stream_states}};
  if (!summary.is_null()) extra["summary"] = summary;
  return extra;
}

json run_meanfield(const RunConfig& cfg, Outputs& out) {
  const MeanFieldResult r = meanfield_simulate(cfg.physics, cfg.integration, cfg.initial, cfg.seed);
  write_timeseries_csv(out.add("timeseries.csv"), r.series);
  write_snapshot_outputs(r.snapshots, cfg, out);

  // Separatrix of the final state in the (x, p) plane: p^2/2m + V_eff(x) = E0.
  const PhysicalParams& p = cfg.physics;
  const double x2 = std::norm(r.final_state.order_param());
  json summary = {{"final_x_abs2", x2}, {"worst_bloch_excess", r.worst_bloch_excess}};
  try {
    const double e0 = separatrix_energy(x2, p.w_pump, p.delta, p.kappa, p.n_gamma_c);
    Table contour;
    contour.columns = {"x", "p"};
    const int n = 512;
    for (int i = 0; i < n; ++i) {
      const double x = kTwoPi * (i + 0.5) / n;
      const double kin = e0 - v_eff(x, x2, p);
      if (kin < 0) continue;
      const double pp = std::sqrt(2.0 * kMass * kin);
      contour.rows.push_back({x, pp});
      contour.rows.push_back({x, -pp});
    }
    write_csv(out.add("e0_contour.csv"), contour);
    const Eigen::VectorXd e = meanfield_energies(r.final_state, p);
    const BandMasses b =
        separatrix_band_masses(std::span<const double>(e.data(), e.size()), e0, p.w_pump / 8.0);
    summary["separatrix_energy"] = e0;
    summary["band_half_width"] = p.w_pump / 8.0;
    summary["band_mass"] = b.center;
    summary["lower_band_mass_max"] = b.lower_max;
  } catch (const NoSeparatrix&) {
    summary["separatrix_energy"] = nullptr;
  }
  if (cfg.spectrum.enabled) write_spectrum_outputs(r.series, cfg.spectrum, out, summary);
  return {{"summary", summary}, {"trajectory_streams", json::array({r.stream_state})}};
}

json run_steady(const RunConfig& cfg, Outputs& out) {
  const PhysicalParams& p = cfg.physics;
  const SteadyStateOptions& o = cfg.steady_state;
  const SteadyStateSolution s = solve_steady_state(p, o.regime, o.grid_points, o.delta_pin,
                                                   cfg.initial.positions);
  Table t;
  t.columns = {"x", "s0_re", "z0", "v_eff", "gamma", "diffusion"};
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    t.rows.push_back({s.x[i], s.s0[i], s.z0[i], s.v_eff[i], s.gamma[i], s.diffusion[i]});
  }
  write_csv(out.add("profiles.csv"), t);

  int flips = 0;
  for (std::size_t i = 1; i < s.s0.size(); ++i) flips += (s.s0[i - 1] > 0) != (s.s0[i] > 0);
  json summary = {{"x_abs2", s.x2},
                  {"omega0", s.omega0},
                  {"regime", to_string(s.regime)},
                  {"s0_sign_flips", flips},
                  {"z0_max", *std::max_element(s.z0.begin(), s.z0.end())},
                  {"friction_threshold", friction_threshold(p.delta, p.kappa)}};
  const double p2 = p2_infinity(p.w_pump, p.delta, p.kappa, p.n_gamma_c);
  summary["p2_infinity"] = std::isfinite(p2) ? json(p2) : json(nullptr);
  try {
    summary["separatrix_energy"] = separatrix_energy(s.x2, p.w_pump, p.delta, p.kappa, p.n_gamma_c);
  } catch (const NoSeparatrix&) {
    summary["separatrix_energy"] = nullptr;
  }
  write_json(out.add("summary.json"), summary);
  return {{"summary", summary}};
}

json run_sweep(const RunConfig& cfg, Outputs& out) {
  const PhysicalParams& p = cfg.physics;
  std::vector<double> deltas, ws;
  for (double r : cfg.sweep.delta_over_half_kappa) deltas.push_back(r * p.kappa / 2);
  for (double r : cfg.sweep.w_over_n_gamma_c) ws.push_back(r * p.n_gamma_c);
  const SweepResult s = sweep_optimal(deltas, ws, p.kappa, p.n_gamma_c);

  Table a, b, c, full;
  a.columns = {"delta_over_half_kappa", "w_min"};
  b.columns = {"delta_over_half_kappa", "p2_min"};
  for (std::size_t i = 0; i < s.deltas.size(); ++i) {
    a.rows.push_back({s.deltas[i] / (p.kappa / 2), s.w_min[i]});
    b.rows.push_back({s.deltas[i] / (p.kappa / 2), s.p2_min[i]});
  }
  c.columns = {"w_over_n_gamma_c", "p2_inf"};
  const double scan_delta = cfg.sweep.scan_delta_over_half_kappa * p.kappa / 2;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    c.rows.push_back({cfg.sweep.w_over_n_gamma_c[i],
                      p2_infinity(ws[i], scan_delta, p.kappa, p.n_gamma_c)});
  }
  full.columns = {"delta", "w", "p2_inf"};
  for (const auto& pt : s.table) full.rows.push_back({pt.delta, pt.w, pt.p2});
  write_csv(out.add("fig10a.csv"), a);
  write_csv(out.add("fig10b.csv"), b);
  write_csv(out.add("fig10c.csv"), c);
  write_csv(out.add("sweep_table.csv"), full);

  json summary = {{"delta_opt", s.delta_opt},
                  {"delta_opt_over_half_kappa", s.delta_opt / (p.kappa / 2)},
                  {"w_opt", s.w_opt},
                  {"w_opt_over_n_gamma_c", s.w_opt / p.n_gamma_c},
                  {"p2_opt", s.p2_opt}};
  write_json(out.add("summary.json"), summary);
  return {{"summary", summary}};
}

json base_metadata(const std::string& command, const RunOptions& opt) {
  return {{"schema_version", kSchemaVersion},
          {"tool", "synccool"},
          {"version", tool_version()},
          {"command", command},
          {"threads", opt.threads}};
}

}  // namespace

std::string tool_version() { return SYNCCOOL_VERSION; }

unsigned default_threads() {
  if (const char* env = std::getenv("SYNCCOOL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

RunReport run_command(const RunConfig& config, const RunOptions& options) {
  const std::vector<std::string> warnings = config.validate();
  const auto start = std::chrono::steady_clock::now();
  Outputs out(options.out_dir);

  json extra;
  switch (config.command) {
    case Command::simulate_sc: extra = run_semiclassical(config, options, out); break;
    case Command::simulate_mf: extra = run_meanfield(config, out); break;
    case Command::steady_state: extra = run_steady(config, out); break;
    case Command::sweep: extra = run_sweep(config, out); break;
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  RunReport report;
  report.metadata = base_metadata(to_string(config.command), options);
  report.metadata["config"] = to_json(config);
  report.metadata["master_seed"] = config.seed;
  report.metadata["n_traj"] = config.command == Command::simulate_sc ? config.n_traj : 1;
  for (auto& [k, v] : extra.items()) report.metadata[k] = v;
  report.metadata["wall_time_s"] = wall;
  report.metadata["status"] = "completed";
  report.metadata["warnings"] = warnings;
  out.add("metadata.json");
  report.outputs = out.names();
  report.metadata["outputs"] = report.outputs;
  write_json(out.dir() / "metadata.json", report.metadata);
  return report;
}

RunReport run_spectrum(const fs::path& series_file, const SpectrumOptions& spectrum,
                       const RunOptions& options) {
  SpectrumOptions opt = spectrum;
  opt.enabled = true;
  if (!(opt.window_fraction > 0.0 && opt.window_fraction < 1.0)) {
    throw InvalidParameter("spectrum window must lie in (0, 1)");
  }
  const TimeSeries series = read_timeseries_csv(series_file);
  const auto start = std::chrono::steady_clock::now();
  Outputs out(options.out_dir);
  json summary;
  write_spectrum_outputs(series, opt, out, summary);
  RunReport report;
  report.metadata = base_metadata("spectrum", options);
  report.metadata["series_file"] = series_file.string();
  report.metadata["spectrum"] = {{"channel", opt.channel},
                                 {"window_fraction", opt.window_fraction},
                                 {"omega_min", opt.omega_min},
                                 {"omega_max", opt.omega_max},
                                 {"omega_points", opt.omega_points},
                                 {"threshold_factor", opt.threshold_factor}};
  report.metadata["summary"] = summary;
  report.metadata["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.metadata["status"] = "completed";
  out.add("metadata.json");
  report.outputs = out.names();
  report.metadata["outputs"] = report.outputs;
  write_json(out.dir() / "metadata.json", report.metadata);
  return report;
}

BandMasses separatrix_band_masses(std::span<const double> energies, double e0, double half_width) {
  if (energies.empty()) throw InvalidParameter("band masses need at least one energy");
  if (!(half_width > 0.0)) throw InvalidParameter("band half width must be positive");
  const double n = static_cast<double>(energies.size());
  auto mass = [&](double lo, double hi) {
    return std::count_if(energies.begin(), energies.end(),
                         [&](double e) { return e >= lo && e <= hi; }) /
           n;
  };
  BandMasses b;
  b.center = mass(e0 - half_width, e0 + half_width);
  const double lowest = *std::min_element(energies.begin(), energies.end());
  // Bands [e0 - (2k+1) h, e0 - (2k-1) h) sit directly below the centre band.
  for (int k = 1; e0 - (2 * k - 1) * half_width > lowest; ++k) {
    const double hi = std::nextafter(e0 - (2 * k - 1) * half_width, -INFINITY);
    b.lower_max = std::max(b.lower_max, mass(e0 - (2 * k + 1) * half_width, hi));
  }
  return b;
}

json error_report(const std::string& kind, const std::string& message) {
  return {{"status", "failed"}, {"error", kind}, {"message", message}, {"version", tool_version()}};
}

}  // namespace synccool
