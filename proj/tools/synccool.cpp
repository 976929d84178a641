// synccool command-line front end.
//
// Exit codes: 0 success, 1 I/O or unexpected failure, 2 invalid config,
// 3 numerical blowup, 4 covariance not positive semidefinite, 5 internal
// consistency check failed.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "synccool/commands.hpp"
#include "synccool/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace synccool;

namespace {

struct Common {
  std::string config_path;
  std::string preset_name;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_traj;
  std::optional<double> t_end;
  unsigned threads = 0;
  std::string out = ".";
};

void add_common(CLI::App* cmd, Common& c, bool run_flags) {
  auto* cfg = cmd->add_option("--config", c.config_path, "JSON run configuration");
  auto* pre = cmd->add_option("--preset", c.preset_name, "Built-in configuration (see list-presets)");
  cfg->excludes(pre);
  cmd->add_option("--seed", c.seed, "Master seed (overrides the config)");
  cmd->add_option("--n-traj", c.n_traj, "Number of trajectories (overrides the config)");
  cmd->add_option("--t-end", c.t_end, "End time in 1/omega_R (overrides the config)");
  if (run_flags) {
    cmd->add_option("--threads", c.threads, "Worker threads; never changes results")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", c.out, "Output directory");
  }
}

RunConfig resolve(const Common& c) {
  RunConfig cfg;
  if (!c.config_path.empty()) {
    cfg = load_config(c.config_path);
  } else if (!c.preset_name.empty()) {
    cfg = preset(c.preset_name);
  } else {
    throw InvalidParameter("one of --config or --preset is required");
  }
  if (c.seed) cfg.seed = *c.seed;
  if (c.n_traj) cfg.n_traj = *c.n_traj;
  if (c.t_end) cfg.integration.t_end = *c.t_end;
  cfg.validate();
  return cfg;
}

int fail(const std::string& out, const std::string& kind, const std::string& message, int code,
         json extra = json::object()) {
  json report = error_report(kind, message);
  for (auto& [k, v] : extra.items()) report[k] = v;
  std::cerr << report.dump() << '\n';
  if (out.empty()) return code;
  std::error_code ec;
  fs::create_directories(out, ec);
  if (!ec) {
    std::ofstream f(fs::path(out) / "error.json");
    if (f) f << report.dump(2) << '\n';
  }
  return code;
}

template <class Fn>
int guarded(const std::string& out, Fn&& fn) {
  try {
    fn();
    return 0;
  } catch (const InvalidParameter& e) {
    return fail(out, "invalid_config", e.what(), 2);
  } catch (const NumericalBlowup& e) {
    json extra = {{"time", e.time()}, {"step", e.step()}};
    if (e.trajectory() != NumericalBlowup::kNoTrajectory) extra["trajectory"] = e.trajectory();
    return fail(out, "numerical_blowup", e.what(), 3, extra);
  } catch (const PsdViolation& e) {
    return fail(out, "psd_violation", e.what(), 4, {{"worst_eigenvalue", e.worst_eigenvalue()}});
  } catch (const ConsistencyError& e) {
    return fail(out, "consistency_error", e.what(), 5);
  } catch (const std::exception& e) {
    return fail(out, "failure", e.what(), 1);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synchronization-enhanced cavity cooling simulator"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  Common common;
  const std::pair<const char*, Command> runs[] = {
      {"simulate-sc", Command::simulate_sc},
      {"simulate-mf", Command::simulate_mf},
      {"steady-state", Command::steady_state},
      {"sweep", Command::sweep},
  };
  const char* help[] = {"Semiclassical trajectory ensemble", "Mean-field trajectory",
                        "Steady-state profiles, friction and diffusion",
                        "Optimal pump rate over a detuning grid"};
  std::vector<std::pair<CLI::App*, Command>> run_cmds;
  for (std::size_t i = 0; i < std::size(runs); ++i) {
    CLI::App* cmd = app.add_subcommand(runs[i].first, help[i]);
    add_common(cmd, common, true);
    run_cmds.emplace_back(cmd, runs[i].second);
  }

  std::string series;
  SpectrumOptions spec;
  CLI::App* spectrum = app.add_subcommand("spectrum", "Spectrum and peak table of a series channel");
  spectrum->add_option("--series", series, "timeseries.csv from a previous run")->required();
  spectrum->add_option("--channel", spec.channel, "Channel to transform");
  spectrum->add_option("--window", spec.window_fraction,
                       "Fraction of the span averaged for the stationary value");
  spectrum->add_option("--omega-min", spec.omega_min);
  spectrum->add_option("--omega-max", spec.omega_max);
  spectrum->add_option("--omega-points", spec.omega_points);
  spectrum->add_option("--threshold", spec.threshold_factor, "Peak threshold over the median");
  spectrum->add_option("--out", common.out, "Output directory");

  CLI::App* show = app.add_subcommand("show-config", "Print the resolved configuration");
  add_common(show, common, false);
  CLI::App* list = app.add_subcommand("list-presets", "List built-in configurations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    std::cerr << error_report("invalid_arguments", e.what()).dump() << '\n';
    return 2;
  }

  if (common.threads == 0) common.threads = default_threads();

  for (const auto& [cmd, command] : run_cmds) {
    if (!cmd->parsed()) continue;
    return guarded(common.out, [&, command = command] {
      RunConfig cfg = resolve(common);
      if (cfg.command != command) {
        throw InvalidParameter("config command is '" + to_string(cfg.command) +
                               "' but the subcommand is '" + to_string(command) + "'");
      }
      const RunReport r = run_command(cfg, {common.out, common.threads});
      for (const auto& w : r.metadata["warnings"]) std::cerr << "warning: " << w.get<std::string>() << '\n';
      std::cout << (fs::path(common.out) / "metadata.json").string() << '\n';
    });
  }
  if (spectrum->parsed()) {
    return guarded(common.out, [&] {
      run_spectrum(series, spec, {common.out, 1});
      std::cout << (fs::path(common.out) / "peaks.csv").string() << '\n';
    });
  }
  if (show->parsed()) {
    return guarded("", [&] { std::cout << to_json(resolve(common)).dump(2) << '\n'; });
  }
  if (list->parsed()) {
    for (const auto& name : preset_names()) {
      std::cout << name << '\t' << to_string(preset(name).command) << '\n';
    }
  }
  return 0;
}
