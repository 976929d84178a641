#include "synccool/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "synccool/errors.hpp"

namespace synccool {

namespace {

constexpr std::size_t kQuadraturePoints = 1024;
constexpr int kBisectionCap = 200;
constexpr double kBisectionTol = 1e-12;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidParameter(std::string(name) + " must be positive and finite");
  }
}

void require_x2(double x2) {
  if (!(x2 >= 0.0) || !std::isfinite(x2)) throw InvalidParameter("|X|^2 must be nonnegative");
}

double midpoint(std::size_t i, std::size_t n) {
  return kTwoPi * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
}

// Pieces of the adiabatic solution at one position, with the products
// tan(kx) xi and tan(kx) |xi|^2 kept finite at the nodes.
struct Local {
  double r;    // N Gamma_C / w
  double xi;   // real gauge
  double q;    // |xi|^2
  double txi;  // tan(kx) xi
  double tq;   // tan(kx) |xi|^2
  double qt2;  // tan^2(kx) |xi|^2
};

Local local(double x, double x2, double w, double ngc) {
  Local l;
  l.r = ngc / w;
  const double amp = l.r * std::sqrt(x2);
  const double c = std::cos(x), s = std::sin(x);
  l.xi = amp * c;
  l.q = l.xi * l.xi;
  l.txi = amp * s;
  l.tq = amp * amp * s * c;
  l.qt2 = l.txi * l.txi;
  return l;
}

// Abscissa of the vertex of the parabola through three points, or NaN.
double parabola_vertex(double x0, double x1, double x2, double y0, double y1, double y2) {
  const double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
  const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
  if (den == 0.0 || !std::isfinite(num) || !std::isfinite(den)) return std::nan("");
  return x1 - 0.5 * num / den;
}

struct Optimum {
  double w;
  double p2;
};

Optimum optimize_w(std::span<const double> ws, std::vector<double>& row, double delta, double kappa,
                   double ngc) {
  for (std::size_t i = 0; i < ws.size(); ++i) row[i] = p2_infinity(ws[i], delta, kappa, ngc);
  const std::size_t k =
      static_cast<std::size_t>(std::min_element(row.begin(), row.end()) - row.begin());
  Optimum best{ws[k], row[k]};
  if (k > 0 && k + 1 < ws.size()) {
    const double wv = parabola_vertex(ws[k - 1], ws[k], ws[k + 1], row[k - 1], row[k], row[k + 1]);
    if (wv > ws[k - 1] && wv < ws[k + 1]) {
      const double pv = p2_infinity(wv, delta, kappa, ngc);
      if (pv <= best.p2) best = {wv, pv};
    }
  }
  return best;
}

}  // namespace

double solve_x2_uniform(double w, double n_gamma_c) {
  require_positive(w, "w");
  require_positive(n_gamma_c, "N Gamma_C");
  const double r = w / n_gamma_c;
  const double x2 = 0.5 * r * (1.0 - r * (0.5 + std::sqrt(1.0 / r + 0.25)));
  return std::max(0.0, x2);
}

double solve_x2_pinned(double w, double n_gamma_c, double delta_pin) {
  require_positive(w, "w");
  require_positive(n_gamma_c, "N Gamma_C");
  if (!(delta_pin >= 0.0 && delta_pin <= 1.0)) {
    throw InvalidParameter("pinning overlap must lie in [0, 1]");
  }
  if (delta_pin == 0.0) return 0.0;
  const double r = w / n_gamma_c;
  return std::max(0.0, 0.5 * r * (1.0 - r / (delta_pin * delta_pin)));
}

double solve_x2_density(double w, double n_gamma_c, std::span<const double> positions) {
  require_positive(w, "w");
  require_positive(n_gamma_c, "N Gamma_C");
  if (positions.empty()) throw InvalidParameter("density solve needs at least one position");
  const double r = n_gamma_c / w;
  std::vector<double> c2(positions.size());
  double mean_c2 = 0.0;
  for (std::size_t j = 0; j < positions.size(); ++j) {
    const double c = std::cos(positions[j]);
    c2[j] = c * c;
    mean_c2 += c2[j];
  }
  mean_c2 /= static_cast<double>(positions.size());
  if (r * mean_c2 <= 1.0) return 0.0;

  // h is strictly decreasing in X2 and h(1/(2r)) <= 0.
  auto h = [&](double x2) {
    double acc = 0.0;
    for (double v : c2) acc += r * r * v / (1.0 + 2.0 * r * r * x2 * v);
    return acc / static_cast<double>(c2.size()) - r;
  };
  double lo = 0.0, hi = 0.5 / r;
  for (int it = 0; it < kBisectionCap && hi - lo > kBisectionTol; ++it) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double omega0(double w, double delta, double kappa) {
  require_positive(kappa, "kappa");
  return w * delta / kappa;
}

double xi_real(double x, double x2, double w, double n_gamma_c) {
  require_positive(w, "w");
  require_x2(x2);
  return n_gamma_c / w * std::sqrt(x2) * std::cos(x);
}

SpinProfile profiles_s0_z0(std::span<const double> x, double x2, double w, double n_gamma_c) {
  SpinProfile p;
  p.s0.resize(x.size());
  p.z0.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = xi_real(x[i], x2, w, n_gamma_c);
    const double den = 1.0 + 2.0 * xi * xi;
    p.s0[i] = xi / den;
    p.z0[i] = 1.0 / den;
  }
  return p;
}

double v_eff(double x, double x2, double w, double delta, double kappa, double n_gamma_c) {
  require_positive(kappa, "kappa");
  const double xi = xi_real(x, x2, w, n_gamma_c);
  const double a = delta / (0.5 * kappa);
  return -0.25 * w * a * std::log1p(2.0 * xi * xi);
}

double v_eff(double x, double x2, const PhysicalParams& params) {
  return v_eff(x, x2, params.w_pump, params.delta, params.kappa, params.n_gamma_c);
}

double friction_threshold(double delta, double kappa) {
  require_positive(kappa, "kappa");
  const double al2 = std::norm(alpha(delta, kappa));
  return (std::sqrt(2.0 * al2 + 1.0) - 1.0) / (2.0 * al2);
}

std::vector<double> x0_roots(double x2, double w, double delta, double kappa, double n_gamma_c) {
  require_positive(w, "w");
  require_x2(x2);
  if (x2 == 0.0) return {};
  const double r = n_gamma_c / w;
  const double c2 = friction_threshold(delta, kappa) / (r * r * x2);
  if (c2 > 1.0) return {};
  const double c = std::sqrt(c2);
  std::vector<double> roots{std::acos(c), std::acos(-c)};
  if (roots[0] == roots[1]) roots.pop_back();
  return roots;
}

double gamma_coeff(double x, double x2, const PhysicalParams& params) {
  require_x2(x2);
  const Local l = local(x, x2, params.w_pump, params.n_gamma_c);
  const double a = params.detuning_ratio();
  const double den = 1.0 + 2.0 * l.q;
  const double f = (1.0 - 2.0 * l.q) / (1.0 + a * a) - 2.0 * l.q * l.q;
  return 8.0 * l.qt2 * a * f / (den * den * den);
}

double friction(double x, double p, double x2, const PhysicalParams& params) {
  return -gamma_coeff(x, x2, params) * p;
}

Retardation s1_z1(double x, double x2, const PhysicalParams& params) {
  require_x2(x2);
  const double w = params.w_pump;
  const Local l = local(x, x2, w, params.n_gamma_c);
  const double a = params.detuning_ratio();
  const cplx al = alpha(params.delta, params.kappa);
  const double den = 1.0 + 2.0 * l.q;
  const double den3 = den * den * den;
  Retardation r;
  r.z1 = -4.0 * l.tq / (w * den3) +
         4.0 / w * (1.0 - a * a) / (1.0 + a * a) * l.tq * (2.0 * l.q - 1.0) / den3;
  r.s1 = l.xi * r.z1 +
         2.0 / w * l.txi * (2.0 * l.q - 1.0) / (den * den) / (cplx(0.0, 1.0) * std::conj(al));
  return r;
}

double diffusion_closed(double x, double x2, const PhysicalParams& params) {
  require_x2(x2);
  const Local l = local(x, x2, params.w_pump, params.n_gamma_c);
  const double a2 = params.detuning_ratio() * params.detuning_ratio();
  const double q = l.q;
  const double den = 1.0 + 2.0 * q;
  const double bracket = 1.0 + 2.0 * a2 * q / den -
                         2.0 * a2 / (1.0 + a2) * q / (den * den) *
                             (5.0 + a2 + 4.0 * (a2 + 1.0) * q) / den;
  return 0.5 * params.w_pump * l.qt2 * bracket;
}

double diffusion_oracle(double x, double x2, const PhysicalParams& params) {
  require_x2(x2);
  const double w = params.w_pump;
  const Local l = local(x, x2, w, params.n_gamma_c);
  const cplx I(0.0, 1.0);
  const cplx al = alpha(params.delta, params.kappa);
  const cplx alc = std::conj(al);
  const double xi = l.xi;

  // Linear Bloch dynamics d<v>/dt = Omega <v> + const for v = (sigma, sigma^dag, sigma_z).
  Eigen::Matrix3cd om;
  om << I * (w / 2) * alc, 0.0, -I * (w / 2) * alc * xi,
        0.0, -I * (w / 2) * al, I * (w / 2) * al * xi,
        -I * w * al * xi, I * w * alc * xi, -w;
  Eigen::FullPivLU<Eigen::Matrix3cd> lu(om);
  if (!lu.isInvertible()) throw ConsistencyError("diffusion oracle: singular drift matrix");

  // Stationary single-spin state in the (e, g) basis.
  const double z = 1.0 / (1.0 + 2.0 * l.q);
  const cplx s = xi * z;
  const double pe = 0.5 * (1.0 + z);
  Eigen::Matrix2cd rho;
  rho << pe, s, std::conj(s), 1.0 - pe;
  Eigen::Matrix2cd sm, sp, sz;
  sm << 0.0, 0.0, 1.0, 0.0;  // |g><e|
  sp = sm.adjoint();
  sz << 1.0, 0.0, 0.0, -1.0;
  const Eigen::Matrix2cd* ops[3] = {&sm, &sp, &sz};

  // Force fluctuation F = beta sigma + conj(beta) sigma^dag.
  const cplx beta = -0.5 * w * al * l.txi;
  const Eigen::Matrix2cd f = beta * sm + std::conj(beta) * sp;
  auto ex = [&](const Eigen::Matrix2cd& m) { return (m * rho).trace(); };
  const cplx fm = ex(f);
  Eigen::Vector3cd u0, u1;
  for (int k = 0; k < 3; ++k) {
    const cplx vm = ex(*ops[k]);
    u0(k) = ex(f * *ops[k]) - fm * vm;
    u1(k) = ex(*ops[k] * f) - fm * vm;
  }
  const Eigen::Vector3cd i0 = -lu.solve(u0);
  const Eigen::Vector3cd i1 = -lu.solve(u1);
  const Eigen::Vector3cd coef(beta, std::conj(beta), 0.0);
  const cplx val = 0.5 * (coef.cwiseProduct(i0).sum() + coef.cwiseProduct(i1).sum());
  return val.real();
}

double p2_infinity(double w, double delta, double kappa, double n_gamma_c) {
  require_positive(w, "w");
  require_positive(kappa, "kappa");
  require_positive(n_gamma_c, "N Gamma_C");
  const double a = delta / (0.5 * kappa);
  if (a <= 0.0) return std::numeric_limits<double>::infinity();
  const double x2 = solve_x2_uniform(w, n_gamma_c);
  if (x2 == 0.0) return w * (1.0 + a * a) / (16.0 * a);

  const PhysicalParams params{1, kappa, delta, w, 0.0, n_gamma_c};
  double dsum = 0.0, gsum = 0.0;
  for (std::size_t i = 0; i < kQuadraturePoints; ++i) {
    const double x = midpoint(i, kQuadraturePoints);
    dsum += diffusion_closed(x, x2, params);
    gsum += gamma_coeff(x, x2, params);
  }
  if (gsum <= 0.0) return std::numeric_limits<double>::infinity();
  return dsum / gsum;
}

SweepResult sweep_optimal(std::span<const double> deltas, std::span<const double> ws, double kappa,
                          double n_gamma_c) {
  if (ws.empty() || deltas.empty()) throw InvalidParameter("sweep grid must be non-empty");
  if (!std::is_sorted(ws.begin(), ws.end())) throw InvalidParameter("w grid must be ascending");
  if (!std::is_sorted(deltas.begin(), deltas.end())) {
    throw InvalidParameter("delta grid must be ascending");
  }
  SweepResult out;
  std::vector<double> row(ws.size());
  for (double d : deltas) {
    const Optimum o = optimize_w(ws, row, d, kappa, n_gamma_c);
    for (std::size_t i = 0; i < ws.size(); ++i) out.table.push_back({d, ws[i], row[i]});
    out.deltas.push_back(d);
    out.w_min.push_back(o.w);
    out.p2_min.push_back(o.p2);
  }

  const auto& pm = out.p2_min;
  const std::size_t k = static_cast<std::size_t>(std::min_element(pm.begin(), pm.end()) - pm.begin());
  out.delta_opt = deltas[k];
  out.w_opt = out.w_min[k];
  out.p2_opt = pm[k];
  if (k > 0 && k + 1 < deltas.size()) {
    const double dv = parabola_vertex(deltas[k - 1], deltas[k], deltas[k + 1], pm[k - 1], pm[k], pm[k + 1]);
    if (dv > deltas[k - 1] && dv < deltas[k + 1]) {
      const Optimum o = optimize_w(ws, row, dv, kappa, n_gamma_c);
      if (o.p2 <= out.p2_opt) {
        out.delta_opt = dv;
        out.w_opt = o.w;
        out.p2_opt = o.p2;
      }
    }
  }
  return out;
}

double separatrix_energy(double x2, double w, double delta, double kappa, double n_gamma_c) {
  const std::vector<double> roots = x0_roots(x2, w, delta, kappa, n_gamma_c);
  if (roots.empty()) {
    std::ostringstream os;
    os << "friction does not change sign for |X|^2 = " << x2;
    throw NoSeparatrix(os.str());
  }
  return v_eff(roots.front(), x2, w, delta, kappa, n_gamma_c);
}

double emission_rate(double w, double g, double delta) {
  require_positive(w, "w");
  return w * g * g / (w * w + delta * delta);
}

double salzburger_zn(double w, double kappa, double n_gamma) {
  require_positive(w, "w");
  require_positive(kappa, "kappa");
  require_positive(n_gamma, "N Gamma");
  const double disc = std::max(0.0, (kappa + n_gamma) * (kappa + n_gamma) - 4.0 * kappa * n_gamma);
  return (kappa * w + n_gamma * w - w * std::sqrt(disc)) / (2.0 * n_gamma * w);
}

double salzburger_zn(double w, double kappa, int n_atoms, double g, double delta) {
  if (n_atoms < 1) throw InvalidParameter("n_atoms must be at least 1");
  return salzburger_zn(w, kappa, n_atoms * emission_rate(w, g, delta));
}

std::string to_string(DensityRegime r) {
  switch (r) {
    case DensityRegime::uniform: return "uniform";
    case DensityRegime::pinned: return "pinned";
    case DensityRegime::empirical: return "empirical";
  }
  return "uniform";
}

DensityRegime density_regime_from_string(const std::string& s) {
  if (s == "uniform") return DensityRegime::uniform;
  if (s == "pinned") return DensityRegime::pinned;
  if (s == "empirical") return DensityRegime::empirical;
  throw InvalidParameter("unknown density regime '" + s + "'");
}

SteadyStateSolution solve_steady_state(const PhysicalParams& params, DensityRegime regime,
                                       std::size_t grid_points, double delta_pin,
                                       std::span<const double> positions) {
  params.validate();
  if (grid_points == 0) throw InvalidParameter("grid_points must be positive");
  SteadyStateSolution sol;
  sol.regime = regime;
  sol.delta_pin = delta_pin;
  switch (regime) {
    case DensityRegime::uniform:
      sol.x2 = solve_x2_uniform(params.w_pump, params.n_gamma_c);
      break;
    case DensityRegime::pinned:
      sol.x2 = solve_x2_pinned(params.w_pump, params.n_gamma_c, delta_pin);
      break;
    case DensityRegime::empirical:
      sol.x2 = solve_x2_density(params.w_pump, params.n_gamma_c, positions);
      break;
  }
  sol.omega0 = omega0(params.w_pump, params.delta, params.kappa);
  sol.x.resize(grid_points);
  for (std::size_t i = 0; i < grid_points; ++i) sol.x[i] = midpoint(i, grid_points);
  SpinProfile prof = profiles_s0_z0(sol.x, sol.x2, params.w_pump, params.n_gamma_c);
  sol.s0 = std::move(prof.s0);
  sol.z0 = std::move(prof.z0);
  sol.v_eff.resize(grid_points);
  sol.gamma.resize(grid_points);
  sol.diffusion.resize(grid_points);
  for (std::size_t i = 0; i < grid_points; ++i) {
    sol.v_eff[i] = v_eff(sol.x[i], sol.x2, params);
    sol.gamma[i] = gamma_coeff(sol.x[i], sol.x2, params);
    sol.diffusion[i] = diffusion_closed(sol.x[i], sol.x2, params);
  }
  return sol;
}

}  // namespace synccool
