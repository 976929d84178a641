#pragma once

// Mean-field engine: classical atoms carrying a dipole s_j and an inversion
// z_j, coupled only through the order parameter X. Deterministic once the
// initial state is drawn.

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "synccool/model.hpp"
#include "synccool/observables.hpp"
#include "synccool/rng.hpp"
#include "synccool/semiclassical.hpp"

namespace synccool {

struct MeanFieldState {
  double t = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd p;
  Eigen::VectorXcd s;
  Eigen::VectorXd z;

  int size() const { return static_cast<int>(x.size()); }
  cplx order_param() const;
  /// max_j (4|s_j|^2 + z_j^2) - 1; nonpositive inside the Bloch ball.
  double bloch_excess() const;
  /// Throws ConsistencyError on shape mismatch, Bloch excess above 1e-6 or
  /// |z| above 1 + 1e-8.
  void validate() const;
};

struct MeanFieldDerivative {
  Eigen::VectorXd dx, dp;
  Eigen::VectorXcd ds;
  Eigen::VectorXd dz;
};

/// Right-hand side of the mean-field equations. With `freeze_motion` the
/// positions and momenta are held fixed.
MeanFieldDerivative meanfield_derivatives(const MeanFieldState& state,
                                          const PhysicalParams& params,
                                          bool freeze_motion = false);

/// Positions and momenta drawn as in the semiclassical engine; dipoles
/// s_j = eps exp(i phi_j) with independent uniform phases and
/// z_j = sqrt(1 - 4 eps^2), i.e. on the Bloch sphere next to the excited pole.
MeanFieldState initial_meanfield_state(const PhysicalParams& params, const InitialCondition& ic,
                                       RngStream& rng);

/// <X^dag X> of the mean-field state: |X|^2 plus the single-atom part
/// (1/N^2) sum_j cos^2(kx_j) (P_j - |s_j|^2) with P_j = (1 + z_j)/2.
double xdagx_meanfield(const MeanFieldState& state);

/// Per-atom mean-field energy p^2/2m + V_eff(x) with the current |X|^2.
Eigen::VectorXd meanfield_energies(const MeanFieldState& state, const PhysicalParams& params);

/// Classical RK4 integrator with preallocated stages.
class MeanFieldPropagator {
 public:
  MeanFieldPropagator(const PhysicalParams& params, const IntegrationConfig& config);

  void load(const MeanFieldState& state);
  const MeanFieldState& state() const { return state_; }
  /// One RK4 step. Throws NumericalBlowup on non-finite values.
  void advance();
  /// Largest Bloch excess seen so far.
  double worst_bloch_excess() const { return worst_bloch_; }

 private:
  PhysicalParams params_;
  IntegrationConfig config_;
  MeanFieldState state_, stage_;
  MeanFieldDerivative k_[4];
  std::size_t step_ = 0;
  double worst_bloch_ = -1.0;
};

struct MeanFieldResult {
  /// Channels: p2_mean, p4_mean, kurtosis, x_abs2, xdagx_mf, arg_x,
  /// cos_arg_x, bloch_excess.
  TimeSeries series;
  std::vector<Snapshot> snapshots;
  MeanFieldState final_state;
  std::string stream_state;
  double worst_bloch_excess = -1.0;
};

/// Single mean-field trajectory. Throws ConsistencyError if the Bloch bound
/// is violated along the way.
MeanFieldResult meanfield_simulate(const PhysicalParams& params, const IntegrationConfig& config,
                                   const InitialCondition& ic, std::uint64_t seed);

/// Same, starting from an explicit state.
MeanFieldResult meanfield_simulate(const PhysicalParams& params, const IntegrationConfig& config,
                                   const MeanFieldState& initial);

}  // namespace synccool
