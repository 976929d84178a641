#include "synccool/model.hpp"

#include <cmath>
#include <string>

#include "synccool/errors.hpp"

namespace synccool {

namespace {

void require_positive_kappa(double kappa) {
  if (!(kappa > 0.0)) {
    throw InvalidParameter("kappa must be positive, got " + std::to_string(kappa));
  }
}

}  // namespace

PhysicalParams PhysicalParams::make(int n_atoms, double kappa, double delta, double w_pump,
                                    std::optional<double> g, std::optional<double> n_gamma_c) {
  if (g.has_value() == n_gamma_c.has_value()) {
    throw InvalidParameter("exactly one of g and n_gamma_c must be given");
  }
  if (n_atoms < 1) {
    throw InvalidParameter("n_atoms must be >= 1");
  }
  require_positive_kappa(kappa);

  PhysicalParams p;
  p.n_atoms = n_atoms;
  p.kappa = kappa;
  p.delta = delta;
  p.w_pump = w_pump;
  if (g) {
    p.g = *g;
    p.n_gamma_c = n_atoms * synccool::gamma_c(*g, delta, kappa);
  } else {
    p.n_gamma_c = *n_gamma_c;
    p.g = coupling_from_collective(*n_gamma_c, n_atoms, delta, kappa);
  }
  p.validate();
  return p;
}

void PhysicalParams::validate() const {
  if (n_atoms < 1) throw InvalidParameter("n_atoms must be >= 1");
  require_positive_kappa(kappa);
  if (!(w_pump > 0.0)) throw InvalidParameter("w_pump must be positive");
  if (!(n_gamma_c > 0.0) || !std::isfinite(n_gamma_c)) {
    throw InvalidParameter("derived Gamma_C must be positive");
  }
  if (!std::isfinite(delta)) throw InvalidParameter("delta must be finite");
}

PhysicalParams PhysicalParams::with_atoms(int n) const {
  return make(n, kappa, delta, w_pump, std::nullopt, n_gamma_c);
}

double gamma_c(double g, double delta, double kappa) {
  require_positive_kappa(kappa);
  return (g * g / 4.0) / (delta * delta + kappa * kappa / 4.0) * kappa;
}

double coupling_from_collective(double n_gamma_c, int n_atoms, double delta, double kappa) {
  require_positive_kappa(kappa);
  if (!(n_gamma_c > 0.0)) throw InvalidParameter("n_gamma_c must be positive");
  if (n_atoms < 1) throw InvalidParameter("n_atoms must be >= 1");
  const double n_g2 = 4.0 * n_gamma_c * (delta * delta + kappa * kappa / 4.0) / kappa;
  return std::sqrt(n_g2 / n_atoms);
}

cplx alpha(double delta, double kappa) {
  require_positive_kappa(kappa);
  return {delta / (0.5 * kappa), -1.0};
}

cplx xi(double x, cplx order_param, double w, double n_gamma_c) {
  if (w == 0.0) throw InvalidParameter("xi: pump rate must be nonzero");
  return (n_gamma_c / w) * order_param * std::cos(x);
}

cplx order_param_meanfield(std::span<const double> x, std::span<const cplx> s) {
  if (x.size() != s.size() || x.empty()) {
    throw ConsistencyError("order_param_meanfield: positions and dipoles differ in length");
  }
  cplx sum = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) sum += s[j] * std::cos(x[j]);
  return sum / static_cast<double>(x.size());
}

double xdagx_from_correlations(std::span<const double> x, const Eigen::MatrixXcd& corr) {
  const auto n = static_cast<Eigen::Index>(x.size());
  if (corr.rows() != n || corr.cols() != n || n == 0) {
    throw ConsistencyError("xdagx_from_correlations: matrix shape does not match positions");
  }
  if ((corr - corr.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw ConsistencyError("xdagx_from_correlations: correlation matrix is not Hermitian");
  }
  Eigen::VectorXd c(n);
  for (Eigen::Index j = 0; j < n; ++j) c(j) = std::cos(x[static_cast<std::size_t>(j)]);
  const double value = c.dot(corr.real() * c) / static_cast<double>(n * n);
  // Rounding can push a PSD quadratic form a hair below zero.
  return (value < 0.0 && value > -1e-12) ? 0.0 : value;
}

double photon_number_estimate(const PhysicalParams& params, double xdagx) {
  const double ng_half = params.n_atoms * params.g / 2.0;
  return ng_half * ng_half / (params.kappa * params.kappa / 4.0 + params.delta * params.delta) *
         xdagx;
}

}  // namespace synccool
