#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "prehyp/bundle_ops.hpp"

using namespace prehyp;
using namespace prehyp::bundle_ops;
using geometry::Chart1p1;
using geometry::Topology;
using expr::Expr;

namespace {

const cplx I(0.0, 1.0);

CMatrix mat(std::initializer_list<std::initializer_list<cplx>> rows) {
  const int k = static_cast<int>(rows.size());
  CMatrix m(k, k);
  int i = 0;
  for (const auto& r : rows) {
    int j = 0;
    for (const cplx& v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

const CMatrix g0 = mat({{0, 1}, {1, 0}});
const CMatrix g1 = mat({{0, -1}, {1, 0}});

FirstOrderOperator dirac(const MatrixField& b) {
  return FirstOrderOperator(MatrixField::constant(g0), MatrixField::constant(g1), b);
}

FirstOrderOperator scalar_op(double at, double ax, double b) {
  return FirstOrderOperator(MatrixField::constant(mat({{at}})), MatrixField::constant(mat({{ax}})),
                            MatrixField::constant(mat({{b}})));
}

double dist(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

DiagonalMetric mink(double x0 = -1, double x1 = 1) { return DiagonalMetric::minkowski({0, 1, x0, x1, Topology::line}); }

// A random smooth 2x2 potential depending on x.
MatrixField random_potential(std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  CMatrix a(2, 2), c(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      a(i, j) = {d(rng), d(rng)};
      c(i, j) = {d(rng), d(rng)};
    }
  return MatrixField(2, Dependence::space, [a, c](double, double x) -> CMatrix { return a + std::sin(x) * c; });
}

}  // namespace

TEST_CASE("principal symbols", "[bundle_ops]") {
  const FirstOrderOperator d = dirac(MatrixField::zero(2));
  CHECK(dist(principal_symbol(d, {0, 0}, {1, 0}), g0) == 0.0);
  CHECK(dist(principal_symbol(d, {0, 0}, {1, 1}), g0 + g1) == 0.0);

  SecondOrderOperator wave;
  wave.c_tt = MatrixField::identity(1);
  wave.c_xx = -1.0 * MatrixField::identity(1);
  CHECK(std::abs(principal_symbol(wave, {0, 0}, {1, 1})(0, 0)) == 0.0);
  CHECK(principal_symbol(wave, {0, 0}, {1, 0})(0, 0) == cplx(1.0));
}

TEST_CASE("composition of constant operators", "[bundle_ops]") {
  const FirstOrderOperator dt = scalar_op(1, 0, 0);
  const SecondOrderOperator tt = compose(dt, dt, {});
  CHECK(tt.c_tt(0, 0)(0, 0) == cplx(1.0));
  CHECK(tt.c_tx.is_zero());
  CHECK(tt.c_xx.is_zero());
  CHECK(tt.e.is_zero());

  const double m = 1.7;
  const CMatrix mid = m * CMatrix::Identity(2, 2);
  const SecondOrderOperator l = compose(dirac(MatrixField::constant(mid)), dirac(MatrixField::constant(-mid)), {});
  CHECK(dist(l.e(0, 0), -m * m * CMatrix::Identity(2, 2)) <= 1e-15);
  CHECK(dist(l.c_tt(0, 0), CMatrix::Identity(2, 2)) == 0.0);
  CHECK(dist(l.c_xx(0, 0), -CMatrix::Identity(2, 2)) == 0.0);
  CHECK(l.c_tx(0, 0).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(compose(dt, dirac(MatrixField::zero(2)), {}), RankMismatch);
}

TEST_CASE("normal hyperbolicity predicate", "[bundle_ops]") {
  const DiagonalMetric g = mink();
  const Grid1p1 grid = Grid1p1::make(g, 33);
  const auto pts = default_sample_points(grid);

  SecondOrderOperator elliptic;
  elliptic.c_tt = MatrixField::identity(1);
  elliptic.c_xx = MatrixField::identity(1);
  const HyperbolicityReport bad = is_normally_hyperbolic(elliptic, g, pts, 1e-12);
  CHECK_FALSE(bad.pass);
  CHECK(bad.max_deviation == Catch::Approx(2.0));

  const PairReport transport = is_complementary_pair(scalar_op(1, 1, 0), scalar_op(1, -1, 0), g, pts, 1e-12);
  CHECK(transport.pass);
  CHECK(transport.pq.max_deviation == 0.0);

  const PairReport same = is_complementary_pair(scalar_op(1, 1, 0), scalar_op(1, 1, 0), g, pts, 1e-12);
  CHECK_FALSE(same.pass);
}

TEST_CASE("tolerance and sample points", "[bundle_ops]") {
  const Grid1p1 grid = Grid1p1::make(mink(), 33);
  const auto pts = default_sample_points(grid);
  CHECK(pts.back().t == grid.t_end());
  CHECK(pts.back().x == grid.x(grid.nx - 1));
  const FirstOrderOperator p = scalar_op(1, 3, 0);
  CHECK(default_tolerance(p, p, pts) == Catch::Approx(4e-12));
  FirstOrderOperator v = p;
  v.b = MatrixField::scalar(1, Dependence::space, [](double, double x) { return x; });
  CHECK(default_tolerance(v, p, pts) == 1e-8);
}

TEST_CASE("symbol invertibility", "[bundle_ops]") {
  const FirstOrderOperator d = dirac(MatrixField::zero(2));
  const InvertibilityReport timelike = symbol_invertibility(d, {0, 0}, {1, 0});
  CHECK(timelike.invertible);
  CHECK(timelike.abs_det == Catch::Approx(1.0));
  const InvertibilityReport null = symbol_invertibility(d, {0, 0}, {1, 1});
  CHECK_FALSE(null.invertible);
  CHECK(std::isinf(null.condition_estimate));
}

TEST_CASE("formal adjoints", "[bundle_ops]") {
  const DiagonalMetric g = mink();
  const FirstOrderOperator dx_star = formal_adjoint(scalar_op(0, 1, 0), g, {});
  CHECK(dx_star.a_x(0, 0)(0, 0) == cplx(-1.0));
  CHECK(dx_star.a_t(0, 0)(0, 0) == cplx(0.0));
  CHECK(std::abs(dx_star.b(0, 0)(0, 0)) == 0.0);

  // density rho = alpha beta = e^t
  const DiagonalMetric growing({0, 1, -1, 1, Topology::line}, Expr::parse("exp(t)"), Expr::parse("1"));
  const FirstOrderOperator dt_star = formal_adjoint(scalar_op(1, 0, 0), growing, {1e-4, 1e-4});
  CHECK(dt_star.a_t(0.3, 0)(0, 0) == cplx(-1.0));
  CHECK(dt_star.b(0.3, 0.2)(0, 0).real() == Catch::Approx(-1.0).epsilon(1e-7));

  FirstOrderOperator conn = scalar_op(1, 1, 0);
  conn.omega_x = MatrixField::identity(1);
  CHECK_THROWS_AS(formal_adjoint(conn, g, {}), UnsupportedFeature);
}

TEST_CASE("double adjoint is the identity for constant coefficients", "[bundle_ops][property]") {
  std::mt19937_64 rng(5);
  const DiagonalMetric g = mink();
  for (int k = 0; k < 20; ++k) {
    std::normal_distribution<double> d;
    auto rnd = [&] {
      CMatrix m(2, 2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m(i, j) = {d(rng), d(rng)};
      return m;
    };
    const FirstOrderOperator p(MatrixField::constant(rnd()), MatrixField::constant(rnd()), MatrixField::constant(rnd()));
    const FirstOrderOperator pp = formal_adjoint(formal_adjoint(p, g, {}), g, {});
    CHECK(dist(pp.a_t(0, 0), p.a_t(0, 0)) == 0.0);
    CHECK(dist(pp.a_x(0, 0), p.a_x(0, 0)) == 0.0);
    CHECK(dist(pp.b(0, 0), p.b(0, 0)) == 0.0);
  }
}

TEST_CASE("symbols multiply under composition", "[bundle_ops][property]") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  const MatrixField sx = MatrixField::scalar(2, Dependence::space, [](double, double x) { return 1.0 + 0.3 * std::sin(x); });
  const FirstOrderOperator p(sx * MatrixField::constant(g0), MatrixField::constant(g1), random_potential(rng));
  const FirstOrderOperator q(MatrixField::constant(g0), sx * MatrixField::constant(g1), random_potential(rng));
  const SecondOrderOperator l = compose(p, q, {1e-4, 1e-4});
  for (int k = 0; k < 100; ++k) {
    const SpacetimePoint pt{u(rng), u(rng)};
    const Covector xi{u(rng), u(rng)};
    const CMatrix want = principal_symbol(p, pt, xi) * principal_symbol(q, pt, xi);
    CHECK(dist(principal_symbol(l, pt, xi), want) <= 1e-14);
  }
}

TEST_CASE("any order-zero term keeps the Dirac pair complementary", "[bundle_ops][property]") {
  std::mt19937_64 rng(13);
  const DiagonalMetric g = mink(-3, 3);
  const Grid1p1 grid = Grid1p1::make(g, 65);
  const auto pts = default_sample_points(grid);
  for (int k = 0; k < 10; ++k) {
    const MatrixField a = random_potential(rng);
    const FirstOrderOperator p = dirac(a), q = dirac(-a);
    const PairReport r = is_complementary_pair(p, q, g, pts, default_tolerance(p, q, pts), DerivativeSteps::of(grid));
    CHECK(r.pass);
  }
}

TEST_CASE("PQ normally hyperbolic implies QP normally hyperbolic", "[bundle_ops][property]") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> sign(0, 1);
  const DiagonalMetric g = mink(-3, 3);
  const Grid1p1 grid = Grid1p1::make(g, 65);
  const auto pts = default_sample_points(grid);
  int passing = 0;
  for (int k = 0; k < 40; ++k) {
    // random sign flips of the Dirac gammas: some pairs are complementary, some not
    const double s0 = sign(rng) ? 1.0 : -1.0, s1 = sign(rng) ? 1.0 : -1.0;
    const FirstOrderOperator p = dirac(random_potential(rng));
    const FirstOrderOperator q(MatrixField::constant(s0 * g0), MatrixField::constant(s1 * g1), random_potential(rng));
    const double tol = default_tolerance(p, q, pts);
    const HyperbolicityReport pq = is_normally_hyperbolic(compose(p, q, DerivativeSteps::of(grid)), g, pts, tol);
    const HyperbolicityReport qp = is_normally_hyperbolic(compose(q, p, DerivativeSteps::of(grid)), g, pts, tol);
    if (pq.pass) {
      ++passing;
      CHECK(qp.pass);
    }
  }
  CHECK(passing > 0);
}

TEST_CASE("nonzero covectors have invertible symbols with the determinant bound", "[bundle_ops][property]") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-2, 2);
  const FirstOrderOperator p = dirac(random_potential(rng));
  const DiagonalMetric g = mink(-3, 3);
  int probes = 0;
  while (probes < 200) {
    const Covector xi{u(rng), u(rng)};
    const SpacetimePoint pt{u(rng) * 0.25 + 0.5, u(rng)};
    const double gxi = geometry::inverse_metric_on_covector(g, pt, xi);
    if (std::abs(gxi) < 1e-2) continue;
    ++probes;
    const InvertibilityReport r = symbol_invertibility(p, pt, xi);
    CHECK(r.invertible);
    CHECK(r.abs_det >= std::abs(gxi) - 1e-10);  // k = 2
  }
}

TEST_CASE("discrete apply", "[bundle_ops]") {
  const DiagonalMetric g = mink();
  const Grid1p1 grid = Grid1p1::make(g, 33);
  GridSection phi(grid.nt, grid.nx, 1);
  for (int n = 0; n < grid.nt; ++n)
    for (int i = 0; i < grid.nx; ++i) phi(n, i, 0) = grid.t(n);
  const GridSection out = apply(scalar_op(1, 0, 0), phi, grid);
  for (int n = 0; n < grid.nt; ++n)
    for (int i = 1; i + 1 < grid.nx; ++i) CHECK(std::abs(out(n, i, 0) - 1.0) <= 1e-12);

  const GridSection zero(grid.nt, grid.nx, 2);
  CHECK(apply(dirac(MatrixField::identity(2)), zero, grid).max_abs() == 0.0);
  CHECK_THROWS(apply(dirac(MatrixField::identity(2)), phi, grid));
}

TEST_CASE("serial and parallel apply agree", "[bundle_ops]") {
  const DiagonalMetric g = DiagonalMetric::minkowski({0, 1, 0, 2 * M_PI, Topology::circle});
  const Grid1p1 grid = Grid1p1::make(g, 64);
  GridSection phi(grid.nt, grid.nx, 2);
  for (int n = 0; n < grid.nt; ++n)
    for (int i = 0; i < grid.nx; ++i) {
      phi(n, i, 0) = std::sin(grid.x(i) + grid.t(n));
      phi(n, i, 1) = std::cos(2 * grid.x(i)) * grid.t(n);
    }
  std::mt19937_64 rng(1);
  const FirstOrderOperator p = dirac(random_potential(rng));
  const GridSection a = apply(p, phi, grid, kernels::Exec::serial);
  const GridSection b = apply(p, phi, grid, kernels::Exec::parallel);
  CHECK((a - b).max_abs() == 0.0);
}

TEST_CASE("discrete composition is consistent at second order", "[bundle_ops][property]") {
  std::mt19937_64 rng(23);
  const MatrixField a = random_potential(rng), c = random_potential(rng);
  const MatrixField sx = MatrixField::scalar(2, Dependence::space, [](double, double x) { return 1.0 + 0.3 * std::cos(x); });
  const FirstOrderOperator p(MatrixField::constant(g0), sx * MatrixField::constant(g1), a);
  const FirstOrderOperator q(MatrixField::constant(g0), MatrixField::constant(g1), c);
  const DiagonalMetric g = DiagonalMetric::minkowski({0, 1, 0, 2 * M_PI, Topology::circle});
  std::vector<double> err;
  for (int nx : {64, 128, 256}) {
    const Grid1p1 grid = Grid1p1::make(g, nx);
    GridSection phi(grid.nt, grid.nx, 2);
    for (int n = 0; n < grid.nt; ++n)
      for (int i = 0; i < grid.nx; ++i) {
        const double t = grid.t(n), x = grid.x(i);
        phi(n, i, 0) = std::sin(x - t) + 0.5 * std::cos(2 * x) * t;
        phi(n, i, 1) = std::exp(-t) * std::cos(x);
      }
    const GridSection direct = apply(compose(p, q, DerivativeSteps::of(grid)), phi, grid);
    const GridSection nested = apply(p, apply(q, phi, grid), grid);
    err.push_back(l2_norm(direct - nested, grid));
  }
  CHECK(err[2] < 1e-2);
  CHECK(std::log2(err[0] / err[1]) >= 1.8);
  CHECK(std::log2(err[1] / err[2]) >= 1.8);
}

TEST_CASE("pairing is bilinear", "[bundle_ops]") {
  const DiagonalMetric g({0, 1, 0, 2, Topology::line}, Expr::parse("2"), Expr::parse("3"));
  const Grid1p1 grid = Grid1p1::make(g, 21);
  GridSection one(grid.nt, grid.nx, 1);
  for (cplx& z : one.values()) z = 1.0;
  CHECK(pairing(one, one, g, grid).real() == Catch::Approx(12.0));  // area 2 times density 6
  const GridSection ione = cplx(0, 1) * one;
  CHECK(pairing(ione, ione, g, grid).real() == Catch::Approx(-12.0));
}
