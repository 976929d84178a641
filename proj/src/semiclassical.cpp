#include "synccool/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "synccool/errors.hpp"
#include "synccool/parallel.hpp"

namespace synccool {

std::string to_string(Scheme s) { return s == Scheme::heun ? "heun" : "euler-maruyama"; }

std::string to_string(ForceMode m) {
  switch (m) {
    case ForceMode::full: return "full";
    case ForceMode::adiabatic_only: return "adiabatic-only";
    case ForceMode::friction_only: return "friction-only";
  }
  return "full";
}

std::string to_string(NoiseFactorization f) {
  return f == NoiseFactorization::eigen ? "eigen" : "cholesky";
}

NoiseFactorization noise_factorization_from_string(const std::string& s) {
  if (s == "eigen") return NoiseFactorization::eigen;
  if (s == "cholesky") return NoiseFactorization::cholesky;
  throw InvalidParameter("unknown noise factorization '" + s + "' (expected eigen or cholesky)");
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "heun") return Scheme::heun;
  if (s == "euler-maruyama") return Scheme::euler_maruyama;
  throw InvalidParameter("unknown scheme '" + s + "' (expected heun or euler-maruyama)");
}

ForceMode force_mode_from_string(const std::string& s) {
  if (s == "full") return ForceMode::full;
  if (s == "adiabatic-only") return ForceMode::adiabatic_only;
  if (s == "friction-only") return ForceMode::friction_only;
  throw InvalidParameter("unknown force mode '" + s +
                         "' (expected full, adiabatic-only or friction-only)");
}

std::vector<std::string> IntegrationConfig::validate(const PhysicalParams& params) const {
  if (!(dt > 0.0)) throw InvalidParameter("dt must be positive");
  if (!(t_end > 0.0)) throw InvalidParameter("t_end must be positive");
  if (!(sample_interval > 0.0)) throw InvalidParameter("sample_interval must be positive");
  if (noise_refresh < 0.0) throw InvalidParameter("noise_refresh must be nonnegative");
  const double ratio = sample_interval / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
    throw InvalidParameter("sample_interval must be an integer multiple of dt");
  }
  for (double t : snapshot_times) {
    if (t < 0.0 || t > t_end) throw InvalidParameter("snapshot time outside [0, t_end]");
  }
  std::vector<std::string> warnings;
  const double stiffness = dt * std::max(params.w_pump, params.n_gamma_c);
  if (stiffness >= 0.1) {
    std::ostringstream os;
    os << "dt * max(w, N Gamma_C) = " << stiffness << " exceeds the stability guard 0.1";
    warnings.push_back(os.str());
  }
  return warnings;
}

std::size_t IntegrationConfig::steps() const {
  return static_cast<std::size_t>(std::llround(t_end / dt));
}

void InitialCondition::validate(int n_atoms) const {
  if (p2_initial < 0.0) throw InvalidParameter("p2_initial must be nonnegative");
  if (dipole_seed < 0.0 || dipole_seed > 0.5) {
    throw InvalidParameter("dipole_seed must lie in [0, 0.5]");
  }
  const auto n = static_cast<std::size_t>(n_atoms);
  if (!positions.empty() && positions.size() != n) {
    throw InvalidParameter("explicit positions must have one entry per atom");
  }
  if (!momenta.empty() && momenta.size() != n) {
    throw InvalidParameter("explicit momenta must have one entry per atom");
  }
}

void SemiclassicalState::validate() const {
  const auto n = x.size();
  if (p.size() != n || corr.rows() != n || corr.cols() != n || n == 0) {
    throw ConsistencyError("semiclassical state: inconsistent dimensions");
  }
  if ((corr - corr.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw ConsistencyError("semiclassical state: correlation matrix is not Hermitian");
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const double pop = corr(j, j).real();
    if (pop < -1e-8 || pop > 1.0 + 1e-8) {
      throw ConsistencyError("semiclassical state: population outside [0, 1]");
    }
  }
}

SemiclassicalState initial_state(const PhysicalParams& params, const InitialCondition& ic,
                                 RngStream& rng) {
  ic.validate(params.n_atoms);
  const int n = params.n_atoms;
  SemiclassicalState s;
  s.x.resize(n);
  s.p.resize(n);
  for (int j = 0; j < n; ++j) s.x(j) = kTwoPi * (1.0 - rng.uniform());
  std::vector<double> z(static_cast<std::size_t>(n));
  rng.fill_normals(z);
  const double width = std::sqrt(ic.p2_initial);
  for (int j = 0; j < n; ++j) s.p(j) = width * z[static_cast<std::size_t>(j)];
  if (!ic.positions.empty()) s.x = Eigen::Map<const Eigen::VectorXd>(ic.positions.data(), n);
  if (!ic.momenta.empty()) s.p = Eigen::Map<const Eigen::VectorXd>(ic.momenta.data(), n);
  s.corr = Eigen::MatrixXcd::Identity(n, n);
  return s;
}

namespace {

// <X^dag sigma_l> = (1/N) sum_m cos(kx_m) C_ml for every l.
Eigen::VectorXcd x_dag_sigma(const SemiclassicalState& s) {
  const double n = s.size();
  const Eigen::VectorXcd c = s.x.array().cos().cast<cplx>().matrix();
  return s.corr.transpose() * c / n;
}

double retarded_prefactor(const PhysicalParams& params) {
  return params.n_gamma_c * params.kappa /
         (params.delta * params.delta + params.kappa * params.kappa / 4.0);
}

}  // namespace

Eigen::MatrixXcd cumulant_derivatives(const SemiclassicalState& state,
                                      const PhysicalParams& params) {
  const int n = state.size();
  const cplx a = alpha(params.delta, params.kappa);
  const cplx ia = cplx(0.0, 1.0) * a;
  const double w = params.w_pump;
  const double ngc = params.n_gamma_c;
  const double gc = params.gamma_c();
  const Eigen::VectorXcd y = x_dag_sigma(state);

  Eigen::MatrixXcd d(n, n);
  for (int l = 0; l < n; ++l) {
    const double cl = std::cos(state.x(l));
    const double pl = state.corr(l, l).real();
    for (int j = 0; j < n; ++j) {
      const double cj = std::cos(state.x(j));
      const double pj = state.corr(j, j).real();
      if (j == l) {
        d(j, j) = w * (1.0 - pj) + ngc * std::imag(a * y(j)) * cj;
        continue;
      }
      const cplx rate = w + gc * ia * cj * cj * pj + gc * std::conj(ia) * cl * cl * pl;
      d(j, l) = -rate * state.corr(j, l) + 0.5 * ngc * ia * cj * (2.0 * pj - 1.0) * y(l) +
                0.5 * ngc * std::conj(ia) * cl * (2.0 * pl - 1.0) * std::conj(y(j));
    }
  }
  return d;
}

Eigen::VectorXd forces(const SemiclassicalState& state, const PhysicalParams& params,
                       ForceMode mode) {
  const int n = state.size();
  const cplx a = alpha(params.delta, params.kappa);
  const cplx i_a2 = cplx(0.0, 1.0) * a * a;
  const Eigen::VectorXcd y = x_dag_sigma(state);
  const Eigen::VectorXd sn = state.x.array().sin();
  const Eigen::VectorXcd weights = (sn.array() * state.p.array()).cast<cplx>().matrix();
  const Eigen::VectorXcd q = state.corr.transpose() * weights / static_cast<double>(n);
  const double ret = retarded_prefactor(params);

  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    if (mode != ForceMode::friction_only) {
      f(j) += -sn(j) * params.n_gamma_c * std::real(a * y(j));
    }
    if (mode != ForceMode::adiabatic_only) {
      f(j) += -ret * sn(j) * std::real(i_a2 * q(j));
    }
  }
  return f;
}

Eigen::MatrixXd diffusion_matrix(const SemiclassicalState& state, const PhysicalParams& params) {
  const Eigen::VectorXd sn = state.x.array().sin();
  // Re C_lj = Re C_jl for Hermitian C
  return params.gamma_c() * sn.asDiagonal() * state.corr.real() * sn.asDiagonal();
}

void CovarianceFactor::factor(const Eigen::MatrixXd& cov, NoiseFactorization method) {
  const auto n = cov.rows();
  if (cov.cols() != n) throw ConsistencyError("covariance must be square");
  ++factorizations_;
  if (n == 0) {
    factor_.resize(0, 0);
    return;
  }
  if (method == NoiseFactorization::cholesky) {
    llt_.compute(cov);
    if (llt_.info() == Eigen::Success) {
      factor_ = llt_.matrixL();
      return;
    }
  }
  ++eigen_factorizations_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success) {
    throw NumericalBlowup("covariance eigendecomposition failed", 0.0, 0);
  }
  Eigen::VectorXd ev = es.eigenvalues();
  const double top = ev.maxCoeff();
  const double bottom = ev.minCoeff();
  const double scale = std::max(top, 0.0);
  if (bottom < 0.0) {
    const double rel = scale > 0.0 ? bottom / scale : -1.0;
    if (rel < -kRelativeTolerance) {
      std::ostringstream os;
      os << "covariance is not positive semidefinite: eigenvalue " << bottom
         << " (largest " << top << ")";
      throw PsdViolation(os.str(), bottom);
    }
    worst_relative_ = std::min(worst_relative_, rel);
  }
  // Positive eigenvalues at round-off level are noise of the solver; zeroing
  // them keeps low-rank covariances exactly low rank.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * scale;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (ev(i) < 0.0) {
      ev(i) = 0.0;
      ++clipped_;
    } else if (ev(i) < floor) {
      ev(i) = 0.0;
    }
  }
  factor_ = es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
}

Eigen::VectorXd sample_noise(const Eigen::MatrixXd& D, double dt, RngStream& rng) {
  if (!(dt > 0.0)) throw InvalidParameter("sample_noise: dt must be positive");
  if ((D - D.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, D.cwiseAbs().maxCoeff())) {
    throw ConsistencyError("sample_noise: covariance is not symmetric");
  }
  CovarianceFactor f;
  f.factor(D);
  Eigen::VectorXd z(D.rows());
  rng.fill_normals({z.data(), static_cast<std::size_t>(z.size())});
  return f.matrix() * z * std::sqrt(dt);
}

SemiclassicalState step(const SemiclassicalState& state, const PhysicalParams& params,
                        const IntegrationConfig& config, RngStream& rng) {
  IntegrationConfig one = config;
  one.noise_refresh = 0.0;
  SemiclassicalPropagator prop(params, one);
  prop.load(state);
  prop.advance(rng);
  return prop.state();
}

SemiclassicalPropagator::SemiclassicalPropagator(const PhysicalParams& params,
                                                 const IntegrationConfig& config)
    : params_(params), config_(config), n_(params.n_atoms) {
  params_.validate();
  config_.validate(params_);
  if (config_.noise_refresh > 0.0) {
    refresh_every_ = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(config_.noise_refresh / config_.dt)));
  }
  const int n = n_;
  for (Drift* d : {&k1_, &k2_}) {
    d->dx.resize(n);
    d->dp.resize(n);
    d->dcr.resize(n, n);
    d->dci.resize(n, n);
  }
  xp_.resize(n);
  pp_.resize(n);
  crp_.resize(n, n);
  cip_.resize(n, n);
  for (Eigen::VectorXd* v : {&cos_, &sin_, &sp_, &pop_, &yr_, &yi_, &qr_, &qi_, &ar_, &ai_, &ur_,
                             &e_, &f_, &sin0_, &normals_, &kick_}) {
    v->resize(n);
  }

}

void SemiclassicalPropagator::load(const SemiclassicalState& state) {
  if (state.size() != n_) throw ConsistencyError("propagator: state size differs from n_atoms");
  state.validate();
  t_ = state.t;
  step_ = 0;
  x_ = state.x;
  p_ = state.p;
  cr_ = state.corr.real();
  ci_ = state.corr.imag();
}

SemiclassicalState SemiclassicalPropagator::state() const {
  SemiclassicalState s;
  s.t = t_;
  s.x = x_;
  s.p = p_;
  s.corr.resize(n_, n_);
  s.corr.real() = cr_;
  s.corr.imag() = ci_;
  return s;
}

double SemiclassicalPropagator::xdagx() const {
  const Eigen::VectorXd c = x_.array().cos();
  const double v = c.dot(cr_ * c) / (static_cast<double>(n_) * n_);
  return std::max(v, 0.0);
}

// Split real/imaginary evaluation of the drift. With C column-major, every
// contraction below runs down contiguous columns.
void SemiclassicalPropagator::drift(const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                                    const Eigen::MatrixXd& cr, const Eigen::MatrixXd& ci,
                                    Drift& out) {
  const int n = n_;
  const double inv_n = 1.0 / n;
  const double a = params_.detuning_ratio();
  const double w = params_.w_pump;
  const double ngc = params_.n_gamma_c;
  const double gc = params_.gamma_c();

  cos_ = x.array().cos();
  sin_ = x.array().sin();
  sp_ = sin_.cwiseProduct(p);
  pop_ = cr.diagonal();

  // y_l = <X^dag sigma_l>, q_l = (1/N) sum_m sin(kx_m) p_m C_ml
  for (int l = 0; l < n; ++l) {
    yr_(l) = cr.col(l).dot(cos_) * inv_n;
    yi_(l) = ci.col(l).dot(cos_) * inv_n;
    qr_(l) = cr.col(l).dot(sp_) * inv_n;
    qi_(l) = ci.col(l).dot(sp_) * inv_n;
  }

  // A_j = w/2 + Gamma_C (i alpha) cos^2 P_j and u_j = (N Gamma_C / 2)(i alpha) cos (2 P_j - 1),
  // with i alpha = 1 + i a, so Im u = a Re u.
  const Eigen::ArrayXd c2p = cos_.array().square() * pop_.array();
  ar_ = (0.5 * w + gc * c2p).matrix();
  ai_ = (gc * a * c2p).matrix();
  ur_ = (0.5 * ngc * cos_.array() * (2.0 * pop_.array() - 1.0)).matrix();
  // u_j y_l = ur_j (e_l + i f_l)
  e_ = yr_ - a * yi_;
  f_ = yi_ + a * yr_;

  // dC_jl = -(A_j + conj A_l) C_jl + u_j y_l + conj(u_l y_j)
  for (int l = 0; l < n; ++l) {
    const double arl = ar_(l), ail = ai_(l), url = ur_(l), el = e_(l), fl = f_(l);
    const auto crl = cr.col(l).array();
    const auto cil = ci.col(l).array();
    const auto br = ar_.array() + arl;
    const auto bi = ai_.array() - ail;
    out.dcr.col(l).array() = ur_.array() * el + url * e_.array() - (br * crl - bi * cil);
    out.dci.col(l).array() = ur_.array() * fl - url * f_.array() - (br * cil + bi * crl);
  }
  for (int j = 0; j < n; ++j) {
    out.dcr(j, j) = w * (1.0 - pop_(j)) + ngc * cos_(j) * (a * yi_(j) - yr_(j));
    out.dci(j, j) = 0.0;
  }

  if (config_.freeze_motion) {
    out.dx.setZero();
    out.dp.setZero();
    return;
  }
  out.dx = p / kMass;
  out.dp.setZero();
  if (config_.force_mode != ForceMode::friction_only) {
    out.dp.array() -= sin_.array() * ngc * (a * yr_.array() + yi_.array());
  }
  if (config_.force_mode != ForceMode::adiabatic_only) {
    // Re[i alpha^2 q] with i alpha^2 = 2a + i (a^2 - 1)
    const double ret = retarded_prefactor(params_);
    out.dp.array() -=
        ret * sin_.array() * (2.0 * a * qr_.array() - (a * a - 1.0) * qi_.array());
  }
}

void SemiclassicalPropagator::apply_noise(RngStream& rng) {
  rng.fill_normals({normals_.data(), static_cast<std::size_t>(n_)});
  kick_.noalias() = noise_.matrix() * normals_;
  const double amp = std::sqrt(params_.gamma_c() * config_.dt);
  p_.array() += amp * sin0_.array() * kick_.array();
}

void SemiclassicalPropagator::enforce_invariants() {
  // Hermitian part: Re C symmetric, Im C antisymmetric.
  for (int l = 0; l < n_; ++l) {
    for (int j = 0; j < l; ++j) {
      const double r = 0.5 * (cr_(j, l) + cr_(l, j));
      const double i = 0.5 * (ci_(j, l) - ci_(l, j));
      cr_(j, l) = r;
      cr_(l, j) = r;
      ci_(j, l) = i;
      ci_(l, j) = -i;
    }
    ci_(l, l) = 0.0;
    cr_(l, l) = std::clamp(cr_(l, l), 0.0, 1.0);
  }
}

void SemiclassicalPropagator::advance(RngStream& rng) {
  const double dt = config_.dt;
  const bool noisy = config_.noise_enabled && !config_.freeze_motion;
  if (noisy && (step_ % refresh_every_ == 0 || noise_.factorizations() == 0)) {
    noise_.factor(cr_, config_.noise_factorization);
  }
  drift(x_, p_, cr_, ci_, k1_);
  sin0_ = sin_;
  if (config_.scheme == Scheme::heun) {
    xp_ = x_ + dt * k1_.dx;
    pp_ = p_ + dt * k1_.dp;
    crp_ = cr_ + dt * k1_.dcr;
    cip_ = ci_ + dt * k1_.dci;
    drift(xp_, pp_, crp_, cip_, k2_);
    const double h = 0.5 * dt;
    x_ += h * (k1_.dx + k2_.dx);
    p_ += h * (k1_.dp + k2_.dp);
    cr_ += h * (k1_.dcr + k2_.dcr);
    ci_ += h * (k1_.dci + k2_.dci);
  } else {
    x_ += dt * k1_.dx;
    p_ += dt * k1_.dp;
    cr_ += dt * k1_.dcr;
    ci_ += dt * k1_.dci;
  }

  if (!x_.allFinite() || !p_.allFinite() || !cr_.diagonal().allFinite()) {
    throw NumericalBlowup("non-finite state in semiclassical step", t_, step_);
  }
  enforce_invariants();

  if (noisy) {
    // Ito increment: prefactors taken at the start of the step.
    apply_noise(rng);
  }
  ++step_;
  t_ += dt;
}

namespace {

struct TrajectoryRecord {
  std::vector<double> m2, m4, xdagx;
  std::vector<std::vector<double>> snap_x, snap_p;
  NoiseStats noise;
};

}  // namespace

std::vector<std::size_t> sample_step_indices(const IntegrationConfig& cfg, std::vector<double>& times) {
  const std::size_t total = cfg.steps();
  std::vector<std::size_t> idx;
  times.clear();
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * cfg.sample_interval;
    const auto s = static_cast<std::size_t>(std::llround(t / cfg.dt));
    if (s > total) break;
    idx.push_back(s);
    times.push_back(t);
  }
  return idx;
}

EnsembleResult simulate_ensemble(const PhysicalParams& params, const IntegrationConfig& config,
                                 const InitialCondition& ic, std::size_t n_traj,
                                 std::uint64_t master_seed, unsigned threads) {
  if (n_traj < 1) throw InvalidParameter("n_traj must be >= 1");
  params.validate();
  config.validate(params);
  ic.validate(params.n_atoms);

  std::vector<double> times;
  const std::vector<std::size_t> samples = sample_step_indices(config, times);
  std::vector<std::size_t> snap_steps;
  for (double t : config.snapshot_times) {
    snap_steps.push_back(static_cast<std::size_t>(std::llround(t / config.dt)));
  }
  const std::size_t total = config.steps();
  const int n = params.n_atoms;

  std::vector<TrajectoryRecord> records(n_traj);
  std::vector<std::string> streams(n_traj);

  parallel_for(n_traj, threads, [&](std::size_t traj) {
    RngStream rng = rng_stream(master_seed, traj);
    streams[traj] = rng.serialize();
    SemiclassicalPropagator prop(params, config);
    prop.load(initial_state(params, ic, rng));

    TrajectoryRecord& rec = records[traj];
    rec.snap_x.resize(snap_steps.size());
    rec.snap_p.resize(snap_steps.size());
    std::size_t next_sample = 0;
    auto observe = [&](std::size_t s) {
      while (next_sample < samples.size() && samples[next_sample] == s) {
        const auto& p = prop.momenta();
        rec.m2.push_back(p.squaredNorm() / n);
        rec.m4.push_back(p.array().square().square().sum() / n);
        rec.xdagx.push_back(prop.xdagx());
        ++next_sample;
      }
      for (std::size_t k = 0; k < snap_steps.size(); ++k) {
        if (snap_steps[k] != s) continue;
        const auto& x = prop.positions();
        const auto& p = prop.momenta();
        rec.snap_x[k].assign(x.data(), x.data() + n);
        rec.snap_p[k].assign(p.data(), p.data() + n);
      }
    };
    try {
      observe(0);
      for (std::size_t s = 1; s <= total; ++s) {
        prop.advance(rng);
        observe(s);
      }
    } catch (const NumericalBlowup& e) {
      std::ostringstream os;
      os << e.what() << " (trajectory " << traj << ", step " << e.step() << ", t = " << e.time()
         << ")";
      throw NumericalBlowup(os.str(), e.time(), e.step(), traj);
    }
    const auto& nf = prop.noise_factor();
    rec.noise = {nf.factorizations(), nf.eigen_factorizations(), nf.clipped(),
                 nf.worst_relative()};
  });

  EnsembleResult result;
  result.stream_states = std::move(streams);
  TimeSeries& ts = result.series;
  ts.times = times;
  const std::size_t ns = times.size();
  std::vector<double> p2_mean(ns), p2_err(ns), p4_mean(ns), kurt(ns), kurt_err(ns), xx_mean(ns),
      xx_err(ns), photons(ns);
  std::vector<double> g2(n_traj), g4(n_traj), gx(n_traj);
  for (std::size_t k = 0; k < ns; ++k) {
    for (std::size_t t = 0; t < n_traj; ++t) {
      g2[t] = records[t].m2[k];
      g4[t] = records[t].m4[k];
      gx[t] = records[t].xdagx[k];
    }
    const MeanError e2 = mean_and_stderr(g2);
    p2_mean[k] = e2.mean;
    p2_err[k] = e2.error;
    p4_mean[k] = pairwise_mean(g4);
    if (e2.mean > 0.0) {
      const Moments m = moments_from_group_means(g2, g4);
      kurt[k] = m.kurtosis;
      kurt_err[k] = m.kurtosis_stderr;
    } else {
      kurt[k] = std::nan("");
      kurt_err[k] = 0.0;
    }
    const MeanError ex = mean_and_stderr(gx);
    xx_mean[k] = ex.mean;
    xx_err[k] = ex.error;
    photons[k] = photon_number_estimate(params, ex.mean);
  }
  ts.add_channel("p2_mean", std::move(p2_mean));
  ts.add_channel("p2_stderr", std::move(p2_err));
  ts.add_channel("p4_mean", std::move(p4_mean));
  ts.add_channel("kurtosis", std::move(kurt));
  ts.add_channel("kurtosis_stderr", std::move(kurt_err));
  ts.add_channel("xdagx_mean", std::move(xx_mean));
  ts.add_channel("xdagx_stderr", std::move(xx_err));
  ts.add_channel("photon_number", std::move(photons));
  ts.meta = {{"engine", "semiclassical"},
             {"n_traj", std::to_string(n_traj)},
             {"master_seed", std::to_string(master_seed)}};

  for (std::size_t k = 0; k < snap_steps.size(); ++k) {
    Snapshot snap;
    snap.t = static_cast<double>(snap_steps[k]) * config.dt;
    for (const auto& rec : records) {
      snap.x.insert(snap.x.end(), rec.snap_x[k].begin(), rec.snap_x[k].end());
      snap.p.insert(snap.p.end(), rec.snap_p[k].begin(), rec.snap_p[k].end());
    }
    result.snapshots.push_back(std::move(snap));
  }
  for (const auto& rec : records) {
    result.noise.factorizations += rec.noise.factorizations;
    result.noise.eigen_factorizations += rec.noise.eigen_factorizations;
    result.noise.clipped += rec.noise.clipped;
    result.noise.worst_relative = std::min(result.noise.worst_relative, rec.noise.worst_relative);
  }
  return result;
}

}  // namespace synccool
