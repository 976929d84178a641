#pragma once

// Shared model constants and elementary quantities.
//
// Units: hbar = k = omega_R = 1 throughout. Hence the atomic mass is 1/2,
// momenta are in units of hbar*k, times in 1/omega_R and every frequency in
// omega_R.

#include <complex>
#include <optional>
#include <span>

#include <Eigen/Core>

namespace synccool {

using cplx = std::complex<double>;

inline constexpr double kMass = 0.5;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Model constants. Exactly one of `g` and `n_gamma_c` is set by the user;
/// `PhysicalParams::make` derives the other.
struct PhysicalParams {
  int n_atoms = 1;
  double kappa = 1.0;
  double delta = 0.0;
  double w_pump = 1.0;
  double g = 0.0;          // vacuum Rabi frequency
  double n_gamma_c = 0.0;  // collective linewidth N*Gamma_C

  /// Builds a validated parameter set from either the vacuum Rabi frequency
  /// or the collective linewidth. Throws InvalidParameter.
  static PhysicalParams make(int n_atoms, double kappa, double delta, double w_pump,
                             std::optional<double> g, std::optional<double> n_gamma_c);

  /// Re-validates invariants (e.g. after manual edits).
  void validate() const;

  double gamma_c() const { return n_gamma_c / n_atoms; }
  /// Delta / (kappa/2).
  double detuning_ratio() const { return delta / (0.5 * kappa); }

  /// Same N*g^2 (hence N*Gamma_C) with a different atom number.
  PhysicalParams with_atoms(int n) const;
};

/// Single-atom cavity-mediated linewidth (g^2/4) kappa / (Delta^2 + kappa^2/4).
double gamma_c(double g, double delta, double kappa);

/// Inverse of gamma_c for the collective linewidth: g such that
/// N * gamma_c(g) == n_gamma_c.
double coupling_from_collective(double n_gamma_c, int n_atoms, double delta, double kappa);

/// alpha = Delta/(kappa/2) - i.
cplx alpha(double delta, double kappa);

/// xi(x) = (N Gamma_C / w) X cos(kx).
cplx xi(double x, cplx order_param, double w, double n_gamma_c);

/// X = (1/N) sum_j s_j cos(k x_j).
cplx order_param_meanfield(std::span<const double> x, std::span<const cplx> s);

/// <X^dag X> = (1/N^2) sum_jl cos(kx_j) cos(kx_l) <sigma_j^dag sigma_l>.
/// Throws ConsistencyError when `corr` is not Hermitian within 1e-10.
double xdagx_from_correlations(std::span<const double> x, const Eigen::MatrixXcd& corr);

/// Intracavity photon number of the adiabatically eliminated field,
/// (N g/2)^2 / (kappa^2/4 + Delta^2) <X^dag X>.
double photon_number_estimate(const PhysicalParams& params, double xdagx);

}  // namespace synccool
