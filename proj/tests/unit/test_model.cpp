#include <doctest.h>

#include <cmath>
#include <vector>

#include "synccool/errors.hpp"
#include "synccool/model.hpp"

using namespace synccool;

TEST_CASE("cavity-mediated linewidth") {
  CHECK(gamma_c(2.0, 0.0, 100.0) == doctest::Approx(0.04));
  CHECK(gamma_c(2.0, 50.0, 100.0) == doctest::Approx(0.02));
  CHECK_THROWS_AS(gamma_c(2.0, 0.0, 0.0), InvalidParameter);
  CHECK_THROWS_AS(gamma_c(2.0, 0.0, -1.0), InvalidParameter);
  for (double g : {0.1, 1.0, 7.3}) {
    for (double d : {-40.0, 0.0, 12.0}) {
      CHECK(gamma_c(2 * g, d, 30.0) == doctest::Approx(4 * gamma_c(g, d, 30.0)).epsilon(1e-14));
    }
  }
}

TEST_CASE("coupling from the collective linewidth") {
  // N g^2 = 4 N Gamma_C (Delta^2 + kappa^2/4) / kappa
  const double ng2 = 4.0 * 40.0 * (390.0 * 390.0 + 780.0 * 780.0 / 4) / 780.0;
  CHECK(ng2 == doctest::Approx(62400.0));
  const double g = coupling_from_collective(40.0, 100, 390.0, 780.0);
  CHECK(g == doctest::Approx(std::sqrt(624.0)));
  CHECK(g == doctest::Approx(24.98).epsilon(1e-3));
  for (int n : {1, 10, 1000}) {
    const double gn = coupling_from_collective(40.0, n, 390.0, 780.0);
    CHECK(std::abs(gamma_c(gn, 390.0, 780.0) / (40.0 / n) - 1.0) < 1e-12);
  }
}

TEST_CASE("parameter construction") {
  const PhysicalParams p = PhysicalParams::make(100, 780.0, 390.0, 10.0, std::nullopt, 40.0);
  CHECK(p.g == doctest::Approx(std::sqrt(624.0)));
  CHECK(p.gamma_c() == doctest::Approx(0.4));
  CHECK(p.detuning_ratio() == doctest::Approx(1.0));

  const PhysicalParams q = PhysicalParams::make(100, 780.0, 390.0, 10.0, p.g, std::nullopt);
  CHECK(q.n_gamma_c == doctest::Approx(40.0).epsilon(1e-12));

  // N g^2 held fixed
  const PhysicalParams r = p.with_atoms(400);
  CHECK(r.n_gamma_c == doctest::Approx(40.0).epsilon(1e-12));
  CHECK(r.g * r.g * 400 == doctest::Approx(p.g * p.g * 100));

  CHECK_THROWS_AS(PhysicalParams::make(0, 780.0, 0.0, 10.0, std::nullopt, 40.0), InvalidParameter);
  CHECK_THROWS_AS(PhysicalParams::make(10, 0.0, 0.0, 10.0, std::nullopt, 40.0), InvalidParameter);
  CHECK_THROWS_AS(PhysicalParams::make(10, 780.0, 0.0, 0.0, std::nullopt, 40.0), InvalidParameter);
  CHECK_THROWS_AS(PhysicalParams::make(10, 780.0, 0.0, 10.0, 1.0, 40.0), InvalidParameter);
  CHECK_THROWS_AS(PhysicalParams::make(10, 780.0, 0.0, 10.0, std::nullopt, std::nullopt),
                  InvalidParameter);
  CHECK_THROWS_AS(PhysicalParams::make(10, 780.0, 0.0, 10.0, std::nullopt, -1.0), InvalidParameter);
}

TEST_CASE("alpha") {
  CHECK(alpha(0.0, 100.0) == cplx(0.0, -1.0));
  CHECK(alpha(50.0, 100.0) == cplx(1.0, -1.0));
  CHECK(std::norm(alpha(50.0, 100.0)) == doctest::Approx(2.0));
  CHECK(alpha(-50.0, 100.0) == cplx(-1.0, -1.0));
  CHECK_THROWS_AS(alpha(1.0, 0.0), InvalidParameter);
  for (double d : {-300.0, -1.0, 0.5, 77.0}) {
    const cplx a = alpha(d, 20.0);
    CHECK(a.imag() == -1.0);
    CHECK(std::norm(a) == doctest::Approx(1.0 + (d / 10.0) * (d / 10.0)));
  }
}

TEST_CASE("xi") {
  CHECK(xi(0.0, 0.1, 10.0, 40.0) == cplx(0.4));
  CHECK(std::abs(xi(kPi / 2, cplx(0.3, 0.2), 10.0, 40.0)) < 1e-15);
  CHECK(xi(kPi, 0.1, 10.0, 40.0).real() == doctest::Approx(-0.4));
  CHECK_THROWS_AS(xi(0.0, 0.1, 0.0, 40.0), InvalidParameter);
}

TEST_CASE("mean-field order parameter") {
  const std::vector<double> x0{0.0, 0.0, 0.0};
  const std::vector<cplx> zero(3, 0.0), half(3, 0.5);
  CHECK(order_param_meanfield(x0, zero) == cplx(0.0));
  CHECK(order_param_meanfield(x0, half) == cplx(0.5));
  const std::vector<double> x2{0.0, kPi};
  const std::vector<cplx> h2(2, 0.5);
  CHECK(std::abs(order_param_meanfield(x2, h2)) < 1e-15);
  const std::vector<cplx> one(1, 0.5);
  CHECK_THROWS_AS(order_param_meanfield(x2, one), ConsistencyError);
}

TEST_CASE("photon correlation from spin correlations") {
  const int n = 5;
  const std::vector<double> antinodes(n, 0.0), nodes(n, kPi / 2);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd ones = Eigen::MatrixXcd::Ones(n, n);
  CHECK(xdagx_from_correlations(antinodes, id) == doctest::Approx(1.0 / n));
  CHECK(xdagx_from_correlations(antinodes, ones) == doctest::Approx(1.0));
  CHECK(std::abs(xdagx_from_correlations(nodes, id)) < 1e-15);

  Eigen::MatrixXcd bad = id;
  bad(0, 1) = cplx(0.1, 0.1);
  CHECK_THROWS_AS(xdagx_from_correlations(antinodes, bad), ConsistencyError);

  // any PSD matrix with unit-bounded diagonal lands in [0, 1]
  std::vector<double> x(n);
  for (int j = 0; j < n; ++j) x[j] = 0.7 * j;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Random(n, n);
    Eigen::MatrixXcd c = b * b.adjoint();
    const double dmax = c.diagonal().real().maxCoeff();
    c /= dmax;
    const double v = xdagx_from_correlations(x, c);
    CHECK(v >= -1e-12);
    CHECK(v <= 1.0 + 1e-12);
  }
}

TEST_CASE("photon number proxy") {
  const PhysicalParams p = PhysicalParams::make(100, 780.0, 390.0, 10.0, std::nullopt, 40.0);
  CHECK(photon_number_estimate(p, 0.0) == 0.0);
  CHECK(photon_number_estimate(p, 0.05) == doctest::Approx(6240000.0 / 4 / 304200.0 * 0.05));
  CHECK(photon_number_estimate(p, 0.05) == doctest::Approx(0.2564).epsilon(1e-3));

  PhysicalParams twice = p;
  twice.n_atoms = 200;
  twice.n_gamma_c = 2 * p.n_gamma_c;
  CHECK(photon_number_estimate(twice, 0.05) == doctest::Approx(4 * photon_number_estimate(p, 0.05)));
}
