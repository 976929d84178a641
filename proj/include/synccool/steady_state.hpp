#pragma once

// Adiabatic steady-state theory of the mean-field model: self-consistent
// order parameter, stationary spin profiles, effective potential, friction,
// momentum diffusion and the resulting asymptotic momentum width.
//
// Gauge: X is taken real and positive, so xi(x) = (N Gamma_C / w) sqrt(|X|^2) cos(kx).

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "synccool/model.hpp"

namespace synccool {

/// |X|^2 for atoms spread uniformly over the wavelength; zero for w >= N Gamma_C / 2.
double solve_x2_uniform(double w, double n_gamma_c);

/// |X|^2 for atoms pinned at cos(kx) = +-delta_pin, delta_pin in [0, 1].
double solve_x2_pinned(double w, double n_gamma_c, double delta_pin);

/// Self-consistent |X|^2 for the given positions, by bisection. Returns 0
/// when only the trivial solution exists.
double solve_x2_density(double w, double n_gamma_c, std::span<const double> positions);

/// Relative rotation frequency of the stationary dipoles, w Delta / kappa.
double omega0(double w, double delta, double kappa);

/// xi(x) in the real gauge.
double xi_real(double x, double x2, double w, double n_gamma_c);

struct SpinProfile {
  std::vector<double> s0;
  std::vector<double> z0;
};

/// s0 = xi / (1 + 2 xi^2), z0 = 1 / (1 + 2 xi^2) on the given positions.
SpinProfile profiles_s0_z0(std::span<const double> x, double x2, double w, double n_gamma_c);

/// Single-particle effective potential -(w/4) (Delta/(kappa/2)) log(1 + 2 |xi|^2).
double v_eff(double x, double x2, double w, double delta, double kappa, double n_gamma_c);
double v_eff(double x, double x2, const PhysicalParams& params);

/// |xi|^2 at which the friction coefficient changes sign,
/// (sqrt(2|alpha|^2 + 1) - 1) / (2 |alpha|^2).
double friction_threshold(double delta, double kappa);

/// Positions in [0, pi] where |xi(x)|^2 equals the friction threshold,
/// sorted ascending. Empty when |xi|^2 never reaches it.
std::vector<double> x0_roots(double x2, double w, double delta, double kappa, double n_gamma_c);

/// Friction coefficient gamma(x); gamma > 0 damps. Finite everywhere.
double gamma_coeff(double x, double x2, const PhysicalParams& params);
/// Retarded force -gamma(x) p.
double friction(double x, double p, double x2, const PhysicalParams& params);

/// First-order retardation corrections with s = s0 + (p/m) s1, z = z0 + (p/m) z1.
struct Retardation {
  cplx s1;
  double z1;
};
Retardation s1_z1(double x, double x2, const PhysicalParams& params);

/// Closed-form momentum diffusion (the quantity 2D, units (hbar k)^2 omega_R).
double diffusion_closed(double x, double x2, const PhysicalParams& params);

/// The same quantity from the quantum-regression integral over the
/// single-spin Bloch dynamics in the stationary state. Throws
/// ConsistencyError if the drift matrix is singular.
double diffusion_oracle(double x, double x2, const PhysicalParams& params);

/// Asymptotic momentum width mean(2D) / mean(gamma) for a uniform density,
/// by 1024-point midpoint quadrature. At or above the uniform threshold the
/// small-xi limit w (1 + a^2) / (16 a) is returned. Returns +infinity when
/// the averaged friction does not damp (mean gamma <= 0 or Delta <= 0).
double p2_infinity(double w, double delta, double kappa, double n_gamma_c);

struct SweepPoint {
  double delta;
  double w;
  double p2;
};

struct SweepResult {
  std::vector<SweepPoint> table;  // every (delta, w) grid point
  std::vector<double> deltas;
  std::vector<double> w_min;
  std::vector<double> p2_min;
  // Overall optimum: parabolic vertex of p2_min over the delta grid, with
  // w optimized again at that delta. Falls back to the discrete best.
  double delta_opt = 0.0;
  double w_opt = 0.0;
  double p2_opt = 0.0;
};

/// Grid search over w for every delta, refined by a parabola through the
/// discrete minimum and its neighbours. The refined value is kept only if it
/// does not exceed the grid minimum.
SweepResult sweep_optimal(std::span<const double> deltas, std::span<const double> ws,
                          double kappa, double n_gamma_c);

/// Energy of the trajectory whose kinetic energy vanishes at the friction
/// roots, V_eff(x0). Throws NoSeparatrix when there are no roots.
double separatrix_energy(double x2, double w, double delta, double kappa, double n_gamma_c);

/// Emission rate Gamma = w g^2 / (w^2 + Delta^2).
double emission_rate(double w, double g, double delta);

/// Population inversion z_N of the comparison model for a given N Gamma.
double salzburger_zn(double w, double kappa, double n_gamma);
double salzburger_zn(double w, double kappa, int n_atoms, double g, double delta);

enum class DensityRegime { uniform, pinned, empirical };

std::string to_string(DensityRegime r);
DensityRegime density_regime_from_string(const std::string& s);

struct SteadyStateSolution {
  double x2 = 0.0;
  double omega0 = 0.0;
  DensityRegime regime = DensityRegime::uniform;
  double delta_pin = 1.0;
  std::vector<double> x;
  std::vector<double> s0, z0, v_eff, gamma, diffusion;
};

/// Solves |X|^2 for the chosen regime and tabulates the profiles on
/// `grid_points` midpoints of one wavelength. `positions` is only used for
/// the empirical regime.
SteadyStateSolution solve_steady_state(const PhysicalParams& params, DensityRegime regime,
                                       std::size_t grid_points = 1024, double delta_pin = 1.0,
                                       std::span<const double> positions = {});

}  // namespace synccool
