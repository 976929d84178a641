#include "synccool/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "synccool/errors.hpp"
#include "synccool/steady_state.hpp"

namespace synccool {

namespace {
constexpr double kBlochTolerance = 1e-6;
constexpr double kInversionTolerance = 1e-8;
}  // namespace

cplx MeanFieldState::order_param() const {
  return order_param_meanfield({x.data(), static_cast<std::size_t>(x.size())},
                               {s.data(), static_cast<std::size_t>(s.size())});
}

double MeanFieldState::bloch_excess() const {
  if (x.size() == 0) return -1.0;
  return (4.0 * s.array().abs2() + z.array().square()).maxCoeff() - 1.0;
}

void MeanFieldState::validate() const {
  const auto n = x.size();
  if (n == 0 || p.size() != n || s.size() != n || z.size() != n) {
    throw ConsistencyError("mean-field state: inconsistent dimensions");
  }
  const double excess = bloch_excess();
  if (excess > kBlochTolerance) {
    std::ostringstream os;
    os << "mean-field state leaves the Bloch ball by " << excess;
    throw ConsistencyError(os.str());
  }
  if (z.cwiseAbs().maxCoeff() > 1.0 + kInversionTolerance) {
    throw ConsistencyError("mean-field state: inversion outside [-1, 1]");
  }
}

MeanFieldDerivative meanfield_derivatives(const MeanFieldState& state,
                                          const PhysicalParams& params, bool freeze_motion) {
  const int n = state.size();
  const cplx a = alpha(params.delta, params.kappa);
  const cplx i_conj_a = cplx(0.0, 1.0) * std::conj(a);
  const double w = params.w_pump;
  const double ngc = params.n_gamma_c;
  const cplx X = state.order_param();

  MeanFieldDerivative d;
  d.dx.resize(n);
  d.dp.resize(n);
  d.ds.resize(n);
  d.dz.resize(n);
  for (int j = 0; j < n; ++j) {
    const double c = std::cos(state.x(j));
    const cplx axs = a * std::conj(X) * state.s(j);
    d.ds(j) = -0.5 * w * state.s(j) - 0.5 * ngc * i_conj_a * X * c * state.z(j);
    d.dz(j) = w * (1.0 - state.z(j)) + 2.0 * ngc * axs.imag() * c;
    if (freeze_motion) {
      d.dx(j) = 0.0;
      d.dp(j) = 0.0;
    } else {
      d.dx(j) = state.p(j) / kMass;
      d.dp(j) = -std::sin(state.x(j)) * ngc * axs.real();
    }
  }
  return d;
}

MeanFieldState initial_meanfield_state(const PhysicalParams& params, const InitialCondition& ic,
                                       RngStream& rng) {
  const SemiclassicalState sc = initial_state(params, ic, rng);
  const int n = params.n_atoms;
  MeanFieldState st;
  st.x = sc.x;
  st.p = sc.p;
  st.s.resize(n);
  st.z.resize(n);
  const double eps = ic.dipole_seed;
  const double z0 = std::sqrt(1.0 - 4.0 * eps * eps);
  for (int j = 0; j < n; ++j) {
    st.s(j) = std::polar(eps, kTwoPi * rng.uniform());
    st.z(j) = z0;
  }
  return st;
}

double xdagx_meanfield(const MeanFieldState& state) {
  const int n = state.size();
  const double x2 = std::norm(state.order_param());
  double single = 0.0;
  for (int j = 0; j < n; ++j) {
    const double c = std::cos(state.x(j));
    single += c * c * (0.5 * (1.0 + state.z(j)) - std::norm(state.s(j)));
  }
  return x2 + single / (static_cast<double>(n) * n);
}

Eigen::VectorXd meanfield_energies(const MeanFieldState& state, const PhysicalParams& params) {
  const double x2 = std::norm(state.order_param());
  Eigen::VectorXd e(state.size());
  for (int j = 0; j < state.size(); ++j) {
    e(j) = state.p(j) * state.p(j) / (2.0 * kMass) + v_eff(state.x(j), x2, params);
  }
  return e;
}

MeanFieldPropagator::MeanFieldPropagator(const PhysicalParams& params,
                                         const IntegrationConfig& config)
    : params_(params), config_(config) {
  params_.validate();
  config_.validate(params_);
}

void MeanFieldPropagator::load(const MeanFieldState& state) {
  if (state.size() != params_.n_atoms) {
    throw ConsistencyError("mean-field propagator: state size differs from n_atoms");
  }
  state.validate();
  state_ = state;
  stage_ = state;
  step_ = 0;
  worst_bloch_ = state.bloch_excess();
}

void MeanFieldPropagator::advance() {
  const double dt = config_.dt;
  const bool frozen = config_.freeze_motion;
  auto set_stage = [&](const MeanFieldDerivative& k, double h) {
    stage_.x = state_.x + h * k.dx;
    stage_.p = state_.p + h * k.dp;
    stage_.s = state_.s + h * k.ds;
    stage_.z = state_.z + h * k.dz;
  };
  k_[0] = meanfield_derivatives(state_, params_, frozen);
  set_stage(k_[0], 0.5 * dt);
  k_[1] = meanfield_derivatives(stage_, params_, frozen);
  set_stage(k_[1], 0.5 * dt);
  k_[2] = meanfield_derivatives(stage_, params_, frozen);
  set_stage(k_[2], dt);
  k_[3] = meanfield_derivatives(stage_, params_, frozen);

  const double h = dt / 6.0;
  state_.x += h * (k_[0].dx + 2.0 * k_[1].dx + 2.0 * k_[2].dx + k_[3].dx);
  state_.p += h * (k_[0].dp + 2.0 * k_[1].dp + 2.0 * k_[2].dp + k_[3].dp);
  state_.s += h * (k_[0].ds + 2.0 * k_[1].ds + 2.0 * k_[2].ds + k_[3].ds);
  state_.z += h * (k_[0].dz + 2.0 * k_[1].dz + 2.0 * k_[2].dz + k_[3].dz);
  ++step_;
  state_.t += dt;

  if (!state_.x.allFinite() || !state_.p.allFinite() || !state_.s.allFinite() ||
      !state_.z.allFinite()) {
    throw NumericalBlowup("non-finite state in mean-field step", state_.t, step_);
  }
  worst_bloch_ = std::max(worst_bloch_, state_.bloch_excess());
  if (worst_bloch_ > kBlochTolerance || state_.z.cwiseAbs().maxCoeff() > 1.0 + kInversionTolerance) {
    std::ostringstream os;
    os << "mean-field state left the Bloch ball at t = " << state_.t << " (excess "
       << worst_bloch_ << ")";
    throw ConsistencyError(os.str());
  }
}

MeanFieldResult meanfield_simulate(const PhysicalParams& params, const IntegrationConfig& config,
                                   const InitialCondition& ic, std::uint64_t seed) {
  ic.validate(params.n_atoms);
  RngStream rng = rng_stream(seed, 0);
  const std::string start = rng.serialize();
  MeanFieldResult r = meanfield_simulate(params, config, initial_meanfield_state(params, ic, rng));
  r.stream_state = start;
  r.series.meta.emplace_back("master_seed", std::to_string(seed));
  return r;
}

MeanFieldResult meanfield_simulate(const PhysicalParams& params, const IntegrationConfig& config,
                                   const MeanFieldState& initial) {
  params.validate();
  config.validate(params);
  MeanFieldPropagator prop(params, config);
  prop.load(initial);

  std::vector<double> times;
  const std::vector<std::size_t> samples = sample_step_indices(config, times);
  std::vector<std::size_t> snap_steps;
  for (double t : config.snapshot_times) {
    snap_steps.push_back(static_cast<std::size_t>(std::llround(t / config.dt)));
  }
  const std::size_t ns = times.size();
  std::vector<double> p2(ns), p4(ns), kurt(ns), x2(ns), xx(ns), arg(ns), cos_arg(ns), bloch(ns);

  MeanFieldResult result;
  result.snapshots.resize(snap_steps.size());
  std::size_t next = 0;
  const int n = params.n_atoms;
  auto observe = [&](std::size_t step) {
    const MeanFieldState& st = prop.state();
    while (next < ns && samples[next] == step) {
      std::vector<double> pv(st.p.data(), st.p.data() + n);
      std::vector<double> sq(n), q4(n);
      for (int j = 0; j < n; ++j) {
        sq[j] = pv[j] * pv[j];
        q4[j] = sq[j] * sq[j];
      }
      p2[next] = pairwise_mean(sq);
      p4[next] = pairwise_mean(q4);
      kurt[next] = p2[next] > 0.0 ? p4[next] / (p2[next] * p2[next]) : std::nan("");
      const cplx X = st.order_param();
      x2[next] = std::norm(X);
      xx[next] = xdagx_meanfield(st);
      arg[next] = std::arg(X);
      cos_arg[next] = std::cos(arg[next]);
      bloch[next] = st.bloch_excess();
      ++next;
    }
    for (std::size_t k = 0; k < snap_steps.size(); ++k) {
      if (snap_steps[k] != step) continue;
      result.snapshots[k].t = static_cast<double>(step) * config.dt;
      result.snapshots[k].x.assign(st.x.data(), st.x.data() + n);
      result.snapshots[k].p.assign(st.p.data(), st.p.data() + n);
    }
  };

  observe(0);
  const std::size_t total = config.steps();
  for (std::size_t step = 1; step <= total; ++step) {
    prop.advance();
    observe(step);
  }

  TimeSeries& ts = result.series;
  ts.times = times;
  ts.add_channel("p2_mean", std::move(p2));
  ts.add_channel("p4_mean", std::move(p4));
  ts.add_channel("kurtosis", std::move(kurt));
  ts.add_channel("x_abs2", std::move(x2));
  ts.add_channel("xdagx_mf", std::move(xx));
  ts.add_channel("arg_x", std::move(arg));
  ts.add_channel("cos_arg_x", std::move(cos_arg));
  ts.add_channel("bloch_excess", std::move(bloch));
  ts.meta = {{"engine", "meanfield"}};
  result.final_state = prop.state();
  result.worst_bloch_excess = prop.worst_bloch_excess();
  return result;
}

}  // namespace synccool
