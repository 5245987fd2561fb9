#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "prehyp/cauchy.hpp"
#include "prehyp/qft_dirac.hpp"

using namespace prehyp;
using namespace prehyp::cauchy;
using geometry::Topology;
using expr::Expr;

namespace {

const cplx I(0.0, 1.0);

CMatrix m2(cplx a, cplx b, cplx c, cplx d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

const CMatrix g0 = m2(0, 1, 1, 0);
const CMatrix g1 = m2(0, -1, 1, 0);

FirstOrderOperator scalar_op(double at, double ax, double b) {
  CMatrix a(1, 1), x(1, 1), z(1, 1);
  a << at;
  x << ax;
  z << b;
  return FirstOrderOperator(MatrixField::constant(a), MatrixField::constant(x), MatrixField::constant(z));
}

FirstOrderOperator dirac(cplx mass) {
  return FirstOrderOperator(MatrixField::constant(g0), MatrixField::constant(g1),
                            MatrixField::constant(mass * CMatrix::Identity(2, 2)));
}

DiagonalMetric line(double t1 = 1.5) { return DiagonalMetric::minkowski({0, t1, -5, 5, Topology::line}); }
DiagonalMetric circle(double t1 = 1.0) { return DiagonalMetric::minkowski({0, t1, 0, 2 * M_PI, Topology::circle}); }

CauchyData dirac_bump(const Grid1p1& grid) {
  return sample_cauchy_data({{Expr::parse("1"), Expr::parse("cos(x)")}, SmoothWindow{0, 2, 1}}, grid, 0.0);
}

double max_diff(const GridSection& a, const GridSection& b) { return (a - b).max_abs(); }

}  // namespace

TEST_CASE("normal derivative of transport data", "[cauchy]") {
  const DiagonalMetric g = circle();
  std::vector<double> err;
  for (int nx : {64, 128}) {
    const Grid1p1 grid = Grid1p1::make(g, nx);
    const CauchyData f = sample_cauchy_data({{Expr::parse("sin(x)")}, std::nullopt}, grid, 0.0);
    const CauchyData psi = normal_derivative_data(scalar_op(1, 1, 0), g, f, grid);
    double e = 0.0;
    for (int i = 0; i < nx; ++i) e = std::max(e, std::abs(psi.values[i] + std::cos(grid.x(i))));
    err.push_back(e);
  }
  CHECK(err[1] < 1e-5);
  CHECK(std::log2(err[0] / err[1]) >= 3.8);  // fourth-order x difference
}

TEST_CASE("normal derivative on a Dirac plateau", "[cauchy]") {
  const DiagonalMetric g = line();
  const Grid1p1 grid = Grid1p1::make(g, 201);
  const double m = 0.7;
  const CauchyData phi0 =
      sample_cauchy_data({{Expr::parse("2"), Expr::parse("-1")}, SmoothWindow{0, 2, 4}}, grid, 0.0);
  const CauchyData psi = normal_derivative_data(dirac(m), g, phi0, grid);
  CVector c(2);
  c << 2.0, -1.0;
  const CVector want = -g0.inverse() * (m * c);
  int plateau = 0;
  for (int i = 0; i < grid.nx; ++i) {
    if (std::abs(grid.x(i)) > 1.0) continue;  // plateau is |x| <= 1.5; keep the stencil inside
    ++plateau;
    CHECK(std::abs(psi.values[2 * i] - want(0)) <= 1e-12);
    CHECK(std::abs(psi.values[2 * i + 1] - want(1)) <= 1e-12);
  }
  CHECK(plateau > 10);
  CHECK(phi0.support.contains(psi.support));
}

TEST_CASE("singular leading coefficient is rejected", "[cauchy]") {
  const DiagonalMetric g = circle();
  const Grid1p1 grid = Grid1p1::make(g, 32);
  const CauchyData f = sample_cauchy_data({{Expr::parse("sin(x)")}, std::nullopt}, grid, 0.0);
  CHECK_THROWS_AS(normal_derivative_data(scalar_op(0, 1, 0), g, f, grid), HyperbolicityViolation);
}

TEST_CASE("zero data give the zero solution", "[cauchy]") {
  const DiagonalMetric g = line();
  const Grid1p1 grid = Grid1p1::make(g, 128);
  const CauchyData zero = sample_cauchy_data({{Expr::parse("0"), Expr::parse("0")}, SmoothWindow{0, 1, 1}}, grid, 0.0);
  const Solution s = solve_cauchy(dirac(1.0), dirac(-1.0), g, zero, grid);
  CHECK(s.phi.max_abs() == 0.0);
  CHECK(s.psi0.max_abs() == 0.0);
}

TEST_CASE("massless Dirac follows the characteristic shift", "[cauchy]") {
  const DiagonalMetric g = line();
  std::vector<double> err;
  for (int nx : {256, 512}) {
    const Grid1p1 grid = Grid1p1::make(g, nx);
    const CauchyData phi0 = dirac_bump(grid);
    const Solution s = solve_cauchy(dirac(0.0), dirac(0.0), g, phi0, grid);
    const SmoothWindow w{0, 2, 1};
    double e = 0.0;
    for (int n = 0; n < grid.nt; n += 4) {
      const double t = grid.t(n);
      for (int i = 0; i < grid.nx; ++i) {
        const double xr = grid.x(i) - t, xl = grid.x(i) + t;
        e = std::max(e, std::abs(s.phi(n, i, 0) - w(xr)));
        e = std::max(e, std::abs(s.phi(n, i, 1) - std::cos(xl) * w(xl)));
      }
    }
    err.push_back(e);
    CHECK(s.report.support_leak <= 1e-7);
  }
  CHECK(err[1] < 2e-3);
  CHECK(std::log2(err[0] / err[1]) >= 1.8);
}

TEST_CASE("zero-momentum massive Dirac on a circle", "[cauchy]") {
  // spatially constant data: only the time integrator contributes error
  const DiagonalMetric g = circle(1.0);
  const double m = 0.8;
  CVector c(2);
  c << 1.0, 0.5;
  std::vector<double> err, dts;
  for (int nx : {32, 128}) {
    const Grid1p1 grid = Grid1p1::make(g, nx);
    dts.push_back(grid.dt);
    const CauchyData phi0 = sample_cauchy_data({{Expr::parse("1"), Expr::parse("0.5")}, std::nullopt}, grid, 0.0);
    const Solution s = solve_cauchy(dirac(m), dirac(-m), g, phi0, grid);
    double e = 0.0;
    for (int n = 0; n < grid.nt; ++n) {
      // exp(-gamma0 m t) = cosh(m t) Id - sinh(m t) gamma0
      const double t = grid.t(n);
      const CVector want = (std::cosh(m * t) * CMatrix::Identity(2, 2) - std::sinh(m * t) * g0) * c;
      for (int i = 0; i < grid.nx; ++i)
        e = std::max({e, std::abs(s.phi(n, i, 0) - want(0)), std::abs(s.phi(n, i, 1) - want(1))});
    }
    err.push_back(e);
  }
  CHECK(err[0] < 1e-7);
  // step counts are rounded to multiples of 8, so measure the order against dt
  CHECK(std::log(err[0] / err[1]) / std::log(dts[0] / dts[1]) >= 3.5);
}

TEST_CASE("Klein-Gordon plane wave frequency", "[cauchy]") {
  const double m = 1.0, kappa = 2.0, omega = std::sqrt(kappa * kappa + m * m);
  // null vector of -i omega g0 + i kappa g1 + i m Id
  const CMatrix sym = -I * omega * g0 + I * kappa * g1 + I * m * CMatrix::Identity(2, 2);
  CVector v(2);
  v << -sym(0, 1), sym(0, 0);
  REQUIRE((sym * v).norm() <= 1e-13);
  const DiagonalMetric g = circle(1.0);
  std::vector<double> err;
  for (int nx : {64, 128}) {
    const Grid1p1 grid = Grid1p1::make(g, nx);
    CauchyData phi0;
    phi0.sigma = {0.0};
    phi0.rank = 2;
    phi0.support = geometry::IntervalSet(geometry::Interval{0, 2 * M_PI});
    for (int i = 0; i < nx; ++i) {
      const cplx e = std::exp(I * kappa * grid.x(i));
      phi0.values.push_back(e * v(0));
      phi0.values.push_back(e * v(1));
    }
    const Solution s = solve_cauchy(dirac(I * m), dirac(-I * m), g, phi0, grid);
    const int n = grid.nt - 1;
    double e = 0.0;
    for (int i = 0; i < nx; ++i)
      for (int c = 0; c < 2; ++c)
        e = std::max(e, std::abs(s.phi(n, i, c) - std::exp(-I * omega * grid.t(n)) * phi0.values[2 * i + c]));
    err.push_back(e);
  }
  CHECK(err[1] < 5e-3);
  CHECK(std::log2(err[0] / err[1]) >= 1.8);
}

TEST_CASE("reduced and direct solves agree at second order", "[cauchy][property]") {
  const DiagonalMetric g = line();
  std::vector<double> err;
  for (int nx : {256, 512}) {
    const Grid1p1 grid = Grid1p1::make(g, nx);
    const CauchyData phi0 = dirac_bump(grid);
    const Solution s = solve_cauchy(dirac(1.0), dirac(-1.0), g, phi0, grid);
    const GridSection d = solve_first_order_direct(dirac(1.0), g, phi0, grid);
    err.push_back(max_diff(s.phi, d));
  }
  CHECK(err[1] < 1e-2);
  CHECK(std::log2(err[0] / err[1]) >= 1.8);
}

TEST_CASE("solution does not depend on the partner", "[cauchy][property]") {
  // two partners of the same transport operator differing in their zeroth-order term
  const DiagonalMetric g = circle();
  const FirstOrderOperator p = scalar_op(1, 1, 0.3);
  std::vector<double> err;
  for (int nx : {64, 128, 256}) {
    const Grid1p1 grid = Grid1p1::make(g, nx);
    const CauchyData f = sample_cauchy_data({{Expr::parse("1 + 0.5*sin(x)")}, std::nullopt}, grid, 0.0);
    const Solution a = solve_cauchy(p, scalar_op(1, -1, 0), g, f, grid);
    const Solution b = solve_cauchy(p, scalar_op(1, -1, 0.9), g, f, grid);
    err.push_back(max_diff(a.phi, b.phi));
  }
  CHECK(err[2] < 1e-3);
  CHECK(std::log2(err[1] / err[2]) >= 1.8);
}

TEST_CASE("restriction and round trips", "[cauchy]") {
  const DiagonalMetric g = line();
  const Grid1p1 grid = Grid1p1::make(g, 256);
  const CauchyData phi0 = dirac_bump(grid);
  const Solution s = solve_cauchy(dirac(1.0), dirac(-1.0), g, phi0, grid);
  const CauchyData same = restrict(s.phi, grid, g, phi0, {0.0});
  CHECK(linf_distance(same, phi0) == 0.0);
  const CauchyData later = restrict(s.phi, grid, g, phi0, {0.75});
  CHECK(later.support.hull().lo == Catch::Approx(-2.75).margin(grid.dt));
  CHECK(later.support.hull().hi == Catch::Approx(2.75).margin(grid.dt));

  const RoundTripReport trivial = compatibility_round_trip(dirac(1.0), dirac(-1.0), g, phi0, {0.0}, grid);
  CHECK(trivial.round_trip_error <= 1e-14);
}

TEST_CASE("round trip through a later hypersurface converges", "[cauchy][property]") {
  const DiagonalMetric g = line();
  std::vector<double> err;
  for (int nx : {256, 512}) {
    const Grid1p1 grid = Grid1p1::make(g, nx);
    const RoundTripReport r = compatibility_round_trip(dirac(1.0), dirac(-1.0), g, dirac_bump(grid), {0.75}, grid);
    err.push_back(r.round_trip_error);
  }
  CHECK(err[1] < 1e-3);
  CHECK(std::log2(err[0] / err[1]) >= 1.8);
}

TEST_CASE("data too close to a line boundary are rejected", "[cauchy]") {
  const DiagonalMetric g = line();
  const Grid1p1 grid = Grid1p1::make(g, 128);
  const CauchyData edge =
      sample_cauchy_data({{Expr::parse("1"), Expr::parse("1")}, SmoothWindow{3.5, 1, 1}}, grid, 0.0);
  CHECK_THROWS_AS(solve_cauchy(dirac(1.0), dirac(-1.0), g, edge, grid), DomainError);
}

TEST_CASE("dissipation and executors", "[cauchy]") {
  const DiagonalMetric g = line();
  const Grid1p1 grid = Grid1p1::make(g, 128);
  const CauchyData phi0 = dirac_bump(grid);
  SolveOptions serial;
  serial.exec = kernels::Exec::serial;
  const Solution a = solve_cauchy(dirac(1.0), dirac(-1.0), g, phi0, grid, serial);
  const Solution b = solve_cauchy(dirac(1.0), dirac(-1.0), g, phi0, grid);
  CHECK(max_diff(a.phi, b.phi) == 0.0);
  SolveOptions damped;
  damped.dissipation = kDefaultDissipation;
  const Solution c = solve_cauchy(dirac(1.0), dirac(-1.0), g, phi0, grid, damped);
  const double d = max_diff(b.phi, c.phi);
  CHECK(d > 0.0);
  CHECK(d < 1e-2);
}
