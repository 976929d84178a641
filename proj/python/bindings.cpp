#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "synccool/commands.hpp"
#include "synccool/errors.hpp"
#include "synccool/meanfield.hpp"
#include "synccool/steady_state.hpp"

namespace py = pybind11;
using namespace synccool;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::dict series_dict(const TimeSeries& ts) {
  py::dict d;
  d["t"] = to_array(ts.times);
  for (const auto& [name, values] : ts.channels) d[py::str(name)] = to_array(values);
  return d;
}

RunConfig config_from(const std::string& json_text) {
  return parse_config(nlohmann::json::parse(json_text));
}

}  // namespace

PYBIND11_MODULE(_synccool, m) {
  m.doc() = "Bindings to the synccool simulation library";

  py::register_exception<InvalidParameter>(m, "InvalidParameter", PyExc_ValueError);
  py::register_exception<ConsistencyError>(m, "ConsistencyError", PyExc_RuntimeError);
  py::register_exception<NumericalBlowup>(m, "NumericalBlowup", PyExc_ArithmeticError);
  py::register_exception<PsdViolation>(m, "PsdViolation", PyExc_ArithmeticError);
  py::register_exception<NoSeparatrix>(m, "NoSeparatrix", PyExc_ValueError);

  m.attr("__version__") = tool_version();

  m.def("solve_x2_uniform", &solve_x2_uniform, py::arg("w"), py::arg("n_gamma_c"));
  m.def("solve_x2_pinned", &solve_x2_pinned, py::arg("w"), py::arg("n_gamma_c"),
        py::arg("delta_pin"));
  m.def(
      "solve_x2_density",
      [](double w, double ngc, const std::vector<double>& x) { return solve_x2_density(w, ngc, x); },
      py::arg("w"), py::arg("n_gamma_c"), py::arg("positions"));
  m.def("friction_threshold", &friction_threshold, py::arg("delta"), py::arg("kappa"));
  m.def("p2_infinity", &p2_infinity, py::arg("w"), py::arg("delta"), py::arg("kappa"),
        py::arg("n_gamma_c"));
  m.def("separatrix_energy", &separatrix_energy, py::arg("x2"), py::arg("w"), py::arg("delta"),
        py::arg("kappa"), py::arg("n_gamma_c"));
  m.def("salzburger_zn", py::overload_cast<double, double, double>(&salzburger_zn), py::arg("w"),
        py::arg("kappa"), py::arg("n_gamma"));

  m.def(
      "steady_state",
      [](int n_atoms, double kappa, double delta, double w, double ngc, const std::string& regime,
         std::size_t grid_points, double delta_pin) {
        const PhysicalParams p = PhysicalParams::make(n_atoms, kappa, delta, w, std::nullopt, ngc);
        const SteadyStateSolution s =
            solve_steady_state(p, density_regime_from_string(regime), grid_points, delta_pin);
        py::dict d;
        d["x2"] = s.x2;
        d["omega0"] = s.omega0;
        d["x"] = to_array(s.x);
        d["s0"] = to_array(s.s0);
        d["z0"] = to_array(s.z0);
        d["v_eff"] = to_array(s.v_eff);
        d["gamma"] = to_array(s.gamma);
        d["diffusion"] = to_array(s.diffusion);
        return d;
      },
      py::arg("n_atoms"), py::arg("kappa"), py::arg("delta"), py::arg("w"), py::arg("n_gamma_c"),
      py::arg("regime") = "uniform", py::arg("grid_points") = 1024, py::arg("delta_pin") = 1.0);

  m.def(
      "sweep",
      [](const std::vector<double>& deltas, const std::vector<double>& ws, double kappa, double ngc) {
        const SweepResult s = sweep_optimal(deltas, ws, kappa, ngc);
        py::dict d;
        d["delta"] = to_array(s.deltas);
        d["w_min"] = to_array(s.w_min);
        d["p2_min"] = to_array(s.p2_min);
        d["delta_opt"] = s.delta_opt;
        d["w_opt"] = s.w_opt;
        d["p2_opt"] = s.p2_opt;
        return d;
      },
      py::arg("deltas"), py::arg("ws"), py::arg("kappa"), py::arg("n_gamma_c"));

  m.def("preset_names", &preset_names);
  m.def(
      "preset", [](const std::string& name) { return to_json(preset(name)).dump(); },
      py::arg("name"), "Preset configuration as a JSON string.");
  m.def(
      "normalize_config", [](const std::string& text) { return to_json(config_from(text)).dump(); },
      py::arg("config_json"), "Validates a configuration and returns its full echo.");

  m.def(
      "simulate",
      [](const std::string& text, unsigned threads) {
        const RunConfig cfg = config_from(text);
        if (cfg.command != Command::simulate_sc && cfg.command != Command::simulate_mf) {
          throw InvalidParameter("simulate needs a simulate-sc or simulate-mf configuration");
        }
        TimeSeries ts;
        {
          py::gil_scoped_release release;
          if (cfg.command == Command::simulate_sc) {
            ts = simulate_ensemble(cfg.physics, cfg.integration, cfg.initial, cfg.n_traj, cfg.seed,
                                   threads)
                     .series;
          } else {
            ts = meanfield_simulate(cfg.physics, cfg.integration, cfg.initial, cfg.seed).series;
          }
        }
        return series_dict(ts);
      },
      py::arg("config_json"), py::arg("threads") = 1,
      "Runs a simulation configuration; returns the time series as numpy arrays.");

  m.def(
      "run",
      [](const std::string& text, const std::string& out_dir, unsigned threads) {
        const RunConfig cfg = config_from(text);
        RunReport r;
        {
          py::gil_scoped_release release;
          r = run_command(cfg, {out_dir, threads});
        }
        return r.metadata.dump();
      },
      py::arg("config_json"), py::arg("out_dir"), py::arg("threads") = 1,
      "Runs any command and writes its files; returns metadata.json as a string.");
}
