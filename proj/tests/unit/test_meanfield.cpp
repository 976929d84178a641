#include <doctest.h>

#include <cmath>
#include <vector>

#include "synccool/errors.hpp"
#include "synccool/meanfield.hpp"
#include "synccool/steady_state.hpp"

using namespace synccool;

namespace {

PhysicalParams make_params(int n, double w = 10.0, double a = 1.0) {
  return PhysicalParams::make(n, 100.0, a * 50.0, w, std::nullopt, 40.0);
}

IntegrationConfig frozen_config(double dt, double t_end) {
  IntegrationConfig c;
  c.dt = dt;
  c.t_end = t_end;
  c.sample_interval = t_end;
  c.freeze_motion = true;
  return c;
}

// Stationary profile on an evenly spaced lattice of positions with X real.
MeanFieldState stationary(const PhysicalParams& p, std::vector<double>& pos) {
  const int n = p.n_atoms;
  pos.resize(n);
  for (int j = 0; j < n; ++j) pos[j] = kTwoPi * (j + 0.5) / n;
  const double x2 = solve_x2_density(p.w_pump, p.n_gamma_c, pos);
  const SpinProfile pr = profiles_s0_z0(pos, x2, p.w_pump, p.n_gamma_c);
  MeanFieldState st;
  st.x = Eigen::Map<Eigen::VectorXd>(pos.data(), n);
  st.p = Eigen::VectorXd::Zero(n);
  st.s.resize(n);
  st.z.resize(n);
  for (int j = 0; j < n; ++j) {
    st.s(j) = pr.s0[j];
    st.z(j) = pr.z0[j];
  }
  return st;
}

MeanFieldState run(const PhysicalParams& p, const IntegrationConfig& c, const MeanFieldState& s0) {
  MeanFieldPropagator prop(p, c);
  prop.load(s0);
  for (std::size_t k = 0; k < c.steps(); ++k) prop.advance();
  return prop.state();
}

}  // namespace

TEST_CASE("stationary profile rotates rigidly at -omega0") {
  const PhysicalParams p = make_params(64);
  std::vector<double> pos;
  const MeanFieldState st = stationary(p, pos);
  REQUIRE(std::norm(st.order_param()) > 0.01);
  const double w0 = omega0(p.w_pump, p.delta, p.kappa);

  // |X|^2 comes from a bisection with 1e-12 tolerance, scaled up by N Gamma_C here.
  const MeanFieldDerivative d = meanfield_derivatives(st, p, true);
  for (int j = 0; j < st.size(); ++j) {
    CHECK(std::abs(d.dz(j)) < 1e-9);
    CHECK(std::abs(d.ds(j) - cplx(0.0, -w0) * st.s(j)) < 1e-9);
  }

  const double t = 1.0;
  const MeanFieldState end = run(p, frozen_config(1e-3, t), st);
  const cplx phase = std::polar(1.0, -w0 * t);
  for (int j = 0; j < st.size(); ++j) {
    CHECK(std::abs(end.s(j) - st.s(j) * phase) < 1e-8);
    CHECK(std::abs(end.z(j) - st.z(j)) < 1e-8);
  }
  CHECK(std::norm(end.order_param()) == doctest::Approx(std::norm(st.order_param())).epsilon(1e-9));
}

TEST_CASE("adiabatic force is minus the gradient of the effective potential") {
  const PhysicalParams p = make_params(64, 10.0, 1.5);
  std::vector<double> pos;
  const MeanFieldState st = stationary(p, pos);
  const double x2 = std::norm(st.order_param());
  const MeanFieldDerivative d = meanfield_derivatives(st, p);
  for (int j = 0; j < st.size(); ++j) {
    const double h = 1e-6;
    const double grad = (v_eff(pos[j] + h, x2, p) - v_eff(pos[j] - h, x2, p)) / (2 * h);
    CHECK(d.dp(j) == doctest::Approx(-grad).epsilon(1e-6).scale(1e-6));
    CHECK(d.dx(j) == 0.0);
  }
}

TEST_CASE("RK4 converges at fourth order") {
  const PhysicalParams p = make_params(8, 10.0, 1.0);
  InitialCondition ic;
  ic.p2_initial = 20.0;
  ic.dipole_seed = 0.2;
  RngStream rng = rng_stream(7, 0);
  const MeanFieldState s0 = initial_meanfield_state(p, ic, rng);
  auto cfg = [](double dt) {
    IntegrationConfig c;
    c.dt = dt;
    c.t_end = 0.4;
    c.sample_interval = 0.4;
    return c;
  };
  const MeanFieldState ref = run(p, cfg(2.5e-4), s0);
  auto err = [&](double dt) {
    const MeanFieldState e = run(p, cfg(dt), s0);
    return std::max({(e.x - ref.x).cwiseAbs().maxCoeff(), (e.p - ref.p).cwiseAbs().maxCoeff(),
                     (e.s - ref.s).cwiseAbs().maxCoeff(), (e.z - ref.z).cwiseAbs().maxCoeff()});
  };
  const double ratio = err(8e-3) / err(4e-3);
  CHECK(ratio == doctest::Approx(16.0).epsilon(0.2));
}

TEST_CASE("global dipole phase does not change the motion") {
  const PhysicalParams p = make_params(16);
  InitialCondition ic;
  ic.dipole_seed = 0.05;
  RngStream rng = rng_stream(11, 0);
  MeanFieldState a = initial_meanfield_state(p, ic, rng);
  MeanFieldState b = a;
  const cplx rot = std::polar(1.0, 1.234);
  b.s *= rot;
  IntegrationConfig c;
  c.dt = 1e-3;
  c.t_end = 2.0;
  c.sample_interval = 2.0;
  const MeanFieldState ea = run(p, c, a), eb = run(p, c, b);
  CHECK((ea.x - eb.x).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((ea.p - eb.p).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((ea.z - eb.z).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((ea.s * rot - eb.s).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pinned atoms reach the pinned order parameter") {
  const int n = 20;
  const PhysicalParams p = make_params(n);
  InitialCondition ic;
  ic.dipole_seed = 1e-2;
  for (int j = 0; j < n; ++j) {
    ic.positions.push_back(j % 2 ? kPi : 0.0);
    ic.momenta.push_back(0.0);
  }
  IntegrationConfig c = frozen_config(1e-3, 20.0);
  c.sample_interval = 1.0;
  const MeanFieldResult r = meanfield_simulate(p, c, ic, 3);
  const double expected = solve_x2_pinned(p.w_pump, p.n_gamma_c, 1.0);
  CHECK(std::abs(r.series.channel("x_abs2").back() - expected) < 1e-4);
  CHECK(r.worst_bloch_excess <= 1e-6);
}

TEST_CASE("unseeded dipoles stay unsynchronized") {
  const PhysicalParams p = make_params(30);
  InitialCondition ic;
  ic.dipole_seed = 0.0;
  IntegrationConfig c;
  c.dt = 1e-3;
  c.t_end = 5.0;
  c.sample_interval = 0.5;
  const MeanFieldResult r = meanfield_simulate(p, c, ic, 5);
  for (double v : r.series.channel("x_abs2")) CHECK(v == 0.0);
}

TEST_CASE("initial state and Bloch containment") {
  const PhysicalParams p = make_params(50);
  InitialCondition ic;
  ic.dipole_seed = 0.1;
  RngStream rng = rng_stream(9, 0);
  const MeanFieldState s0 = initial_meanfield_state(p, ic, rng);
  CHECK(std::abs(s0.bloch_excess()) < 1e-14);
  for (int j = 0; j < s0.size(); ++j) CHECK(std::abs(s0.s(j)) == doctest::Approx(0.1));

  IntegrationConfig c;
  c.dt = 1e-3;
  c.t_end = 10.0;
  c.sample_interval = 0.5;
  const MeanFieldResult r = meanfield_simulate(p, c, ic, 9);
  CHECK(r.worst_bloch_excess <= 1e-6);
  for (double v : r.series.channel("bloch_excess")) CHECK(v <= 1e-6);

  MeanFieldState bad = s0;
  bad.z(0) = 1.1;
  CHECK_THROWS_AS(bad.validate(), ConsistencyError);
  bad = s0;
  bad.s(3) = 0.6;
  CHECK_THROWS_AS(bad.validate(), ConsistencyError);
}

TEST_CASE("photon correlation of a mean-field state") {
  MeanFieldState st;
  st.x = Eigen::VectorXd::Zero(2);
  st.x(1) = kPi / 2;
  st.p = Eigen::VectorXd::Zero(2);
  st.s = Eigen::VectorXcd::Constant(2, cplx(0.3, 0.1));
  st.z = Eigen::VectorXd::Constant(2, 0.2);
  // X = s/2 from the antinode atom; the node atom contributes nothing.
  const double single = 0.5 * (1 + 0.2) - std::norm(cplx(0.3, 0.1));
  CHECK(xdagx_meanfield(st) == doctest::Approx(std::norm(cplx(0.3, 0.1)) / 4 + single / 4));
}

TEST_CASE("simulation output and determinism") {
  const PhysicalParams p = make_params(40);
  InitialCondition ic;
  IntegrationConfig c;
  c.dt = 2e-3;
  c.t_end = 2.0;
  c.sample_interval = 0.25;
  c.snapshot_times = {0.0, 1.0};
  const MeanFieldResult a = meanfield_simulate(p, c, ic, 21);
  const MeanFieldResult b = meanfield_simulate(p, c, ic, 21);
  CHECK(a.series.times.size() == 9);
  for (const char* ch : {"p2_mean", "p4_mean", "kurtosis", "x_abs2", "xdagx_mf", "arg_x",
                         "cos_arg_x", "bloch_excess"}) {
    CHECK(a.series.channel(ch) == b.series.channel(ch));
  }
  REQUIRE(a.snapshots.size() == 2);
  CHECK(a.snapshots[1].t == doctest::Approx(1.0));
  CHECK(a.snapshots[1].x.size() == 40);
  const MeanFieldResult other = meanfield_simulate(p, c, ic, 22);
  CHECK(other.series.channel("p2_mean") != a.series.channel("p2_mean"));

  const Eigen::VectorXd e = meanfield_energies(a.final_state, p);
  CHECK(e.size() == 40);
}
