#pragma once

// Semiclassical engine: classical positions and momenta coupled to the
// second-order cumulant equations of the spin correlations
// C_jl = <sigma_j^dag sigma_l>, with correlated Gaussian momentum noise.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "synccool/model.hpp"
#include "synccool/observables.hpp"
#include "synccool/rng.hpp"

namespace synccool {

enum class Scheme { euler_maruyama, heun };
enum class ForceMode { full, adiabatic_only, friction_only };
/// eigen: symmetric eigendecomposition with clipping on every call.
/// cholesky: Cholesky factor when the covariance is positive definite, the
/// eigen path otherwise. Both give the same Gaussian distribution.
enum class NoiseFactorization { eigen, cholesky };

std::string to_string(Scheme s);
std::string to_string(ForceMode m);
std::string to_string(NoiseFactorization f);
Scheme scheme_from_string(const std::string& s);
ForceMode force_mode_from_string(const std::string& s);
NoiseFactorization noise_factorization_from_string(const std::string& s);

struct IntegrationConfig {
  double dt = 2e-3;
  double t_end = 10.0;
  Scheme scheme = Scheme::heun;
  ForceMode force_mode = ForceMode::full;
  bool noise_enabled = true;
  /// Observables are recorded every `sample_interval`, independent of dt.
  double sample_interval = 0.5;
  /// Interval between re-factorizations of the noise covariance inside an
  /// ensemble run; 0 factorizes every step. Momentum-dependent and
  /// position-dependent prefactors are always current.
  double noise_refresh = 0.0;
  NoiseFactorization noise_factorization = NoiseFactorization::cholesky;
  /// Positions and momenta held fixed; only the internal state evolves.
  bool freeze_motion = false;
  std::vector<double> snapshot_times;

  /// Throws InvalidParameter; returns human-readable warnings (stability guard).
  std::vector<std::string> validate(const PhysicalParams& params) const;
  std::size_t steps() const;
};

/// Step indices of the observable grid t_k = k * sample_interval <= t_end;
/// the times themselves are written to `times`.
std::vector<std::size_t> sample_step_indices(const IntegrationConfig& config,
                                             std::vector<double>& times);

struct InitialCondition {
  double p2_initial = 5.0;
  /// Magnitude of the random dipole seed (mean-field engine only).
  double dipole_seed = 1e-3;
  /// Optional explicit positions / momenta (length N) overriding sampling.
  std::vector<double> positions;
  std::vector<double> momenta;

  void validate(int n_atoms) const;
};

struct SemiclassicalState {
  double t = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd p;
  Eigen::MatrixXcd corr;  // corr(j, l) = <sigma_j^dag sigma_l>

  int size() const { return static_cast<int>(x.size()); }
  /// Throws ConsistencyError when shapes, Hermiticity (1e-10) or the
  /// population bounds (1e-8) are violated.
  void validate() const;
};

/// Uniform positions over one wavelength, Gaussian momenta with variance
/// p2_initial, every atom excited (corr = identity).
SemiclassicalState initial_state(const PhysicalParams& params, const InitialCondition& ic,
                                 RngStream& rng);

/// dC/dt of the cumulant equations. Hermitian whenever `state.corr` is.
Eigen::MatrixXcd cumulant_derivatives(const SemiclassicalState& state,
                                      const PhysicalParams& params);

/// Adiabatic and/or retarded cavity force on every atom, units hbar k omega_R.
Eigen::VectorXd forces(const SemiclassicalState& state, const PhysicalParams& params,
                       ForceMode mode);

/// D^{jl} = Gamma_C sin(kx_j) sin(kx_l) Re C_lj.
Eigen::MatrixXd diffusion_matrix(const SemiclassicalState& state, const PhysicalParams& params);

/// Symmetric eigendecomposition of a covariance with negative eigenvalues
/// clipped to zero. Eigenvalues below -1e-8 * max eigenvalue are a hard error.
class CovarianceFactor {
 public:
  static constexpr double kRelativeTolerance = 1e-8;

  /// Throws PsdViolation naming the worst eigenvalue.
  void factor(const Eigen::MatrixXd& cov,
              NoiseFactorization method = NoiseFactorization::eigen);
  /// L with cov ~= L L^T (after clipping).
  const Eigen::MatrixXd& matrix() const { return factor_; }

  std::size_t factorizations() const { return factorizations_; }
  /// Calls that went through the eigendecomposition (repair) path.
  std::size_t eigen_factorizations() const { return eigen_factorizations_; }
  /// Eigenvalues that were negative and clipped to zero, over all calls.
  std::size_t clipped() const { return clipped_; }
  /// Most negative eigenvalue relative to the largest, over all calls (<= 0).
  double worst_relative() const { return worst_relative_; }

 private:
  Eigen::MatrixXd factor_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  std::size_t factorizations_ = 0;
  std::size_t eigen_factorizations_ = 0;
  std::size_t clipped_ = 0;
  double worst_relative_ = 0.0;
};

/// Momentum kicks xi * sqrt(dt) with xi ~ N(0, D).
Eigen::VectorXd sample_noise(const Eigen::MatrixXd& D, double dt, RngStream& rng);

/// One integration step of the state; the noise covariance is factorized on
/// the spot.
SemiclassicalState step(const SemiclassicalState& state, const PhysicalParams& params,
                        const IntegrationConfig& config, RngStream& rng);

/// Single-trajectory integrator with preallocated split real/imaginary
/// storage. This is the path used by ensemble runs.
class SemiclassicalPropagator {
 public:
  SemiclassicalPropagator(const PhysicalParams& params, const IntegrationConfig& config);

  void load(const SemiclassicalState& state);
  SemiclassicalState state() const;

  /// Advances by one dt. Throws NumericalBlowup.
  void advance(RngStream& rng);

  double time() const { return t_; }
  std::size_t step_index() const { return step_; }
  const Eigen::VectorXd& positions() const { return x_; }
  const Eigen::VectorXd& momenta() const { return p_; }
  /// <X^dag X> of the current state.
  double xdagx() const;
  const CovarianceFactor& noise_factor() const { return noise_; }

 private:
  struct Drift {
    Eigen::VectorXd dx, dp;
    Eigen::MatrixXd dcr, dci;
  };

  void drift(const Eigen::VectorXd& x, const Eigen::VectorXd& p, const Eigen::MatrixXd& cr,
             const Eigen::MatrixXd& ci, Drift& out);
  void apply_noise(RngStream& rng);
  void enforce_invariants();

  PhysicalParams params_;
  IntegrationConfig config_;
  int n_ = 0;
  double t_ = 0.0;
  std::size_t step_ = 0;
  std::size_t refresh_every_ = 1;

  Eigen::VectorXd x_, p_;
  Eigen::MatrixXd cr_, ci_;
  Drift k1_, k2_;
  Eigen::VectorXd xp_, pp_;
  Eigen::MatrixXd crp_, cip_;

  // per-evaluation scratch
  Eigen::VectorXd cos_, sin_, sp_, pop_, yr_, yi_, qr_, qi_, ar_, ai_, ur_, e_, f_;
  Eigen::VectorXd sin0_, normals_, kick_;
  CovarianceFactor noise_;
};

struct Snapshot {
  double t = 0.0;
  /// Trajectory-major: entry i belongs to trajectory i / N, atom i % N.
  std::vector<double> x;
  std::vector<double> p;
};

struct NoiseStats {
  std::size_t factorizations = 0;
  std::size_t eigen_factorizations = 0;
  std::size_t clipped = 0;
  double worst_relative = 0.0;
};

struct EnsembleResult {
  TimeSeries series;
  std::vector<Snapshot> snapshots;
  NoiseStats noise;
  /// RNG state of every trajectory at the start of the run.
  std::vector<std::string> stream_states;
};

/// Runs `n_traj` independent trajectories on `threads` workers. Results are
/// bitwise identical for any worker count. Channels: p2_mean, p2_stderr,
/// p4_mean, kurtosis, kurtosis_stderr, xdagx_mean, xdagx_stderr,
/// photon_number. Rethrows the first NumericalBlowup by trajectory index.
EnsembleResult simulate_ensemble(const PhysicalParams& params, const IntegrationConfig& config,
                                 const InitialCondition& ic, std::size_t n_traj,
                                 std::uint64_t master_seed, unsigned threads = 1);

}  // namespace synccool
