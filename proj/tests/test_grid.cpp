#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "prehyp/grid.hpp"

using namespace prehyp;
using geometry::Chart1p1;
using geometry::DiagonalMetric;
using geometry::Topology;
using expr::Expr;

TEST_CASE("line and circle lattices", "[grid]") {
  const DiagonalMetric line = DiagonalMetric::minkowski({0, 1, -1, 1, Topology::line});
  const Grid1p1 g = Grid1p1::make(line, 101);
  CHECK(g.dx == Catch::Approx(0.02));
  CHECK(g.x(100) == Catch::Approx(1.0));
  CHECK(g.t_end() == Catch::Approx(1.0));
  CHECK((g.nt - 1) % 8 == 0);
  CHECK(g.dt <= 0.5 * g.dx / g.c_max + 1e-15);

  const DiagonalMetric circ = DiagonalMetric::minkowski({0, 1, 0, 2 * M_PI, Topology::circle});
  const Grid1p1 c = Grid1p1::make(circ, 64);
  CHECK(c.periodic());
  CHECK(c.dx == Catch::Approx(2 * M_PI / 64));
  CHECK(c.xs().size() == 64);
  CHECK(space_weight(c, 0) == 1.0);
  CHECK(space_weight(g, 0) == 0.5);
  CHECK(time_weight(g, g.nt - 1) == 0.5);
}

TEST_CASE("time step follows the largest light speed", "[grid][property]") {
  const DiagonalMetric m({0, 1, -2, 2, Topology::line}, Expr::parse("1 + 0.5*sin(x)"), Expr::parse("1"));
  for (int nx : {33, 64, 200}) {
    const Grid1p1 g = Grid1p1::make(m, nx, 0.4);
    CHECK(g.c_max >= 1.49);
    CHECK(g.dt <= 0.4 * g.dx / g.c_max + 1e-15);
    CHECK((g.nt - 1) % 8 == 0);
  }
}

TEST_CASE("level lookup", "[grid]") {
  const Grid1p1 g = Grid1p1::make(DiagonalMetric::minkowski({0, 1, -1, 1, Topology::line}), 65, 0.5, 0.0, 1.0);
  CHECK(g.level_of(0.0) == 0);
  CHECK(g.level_of(1.0) == g.nt - 1);
  CHECK(g.level_of(0.5) == (g.nt - 1) / 2);
  CHECK_THROWS_AS(g.level_of(1.5), DomainError);
}

TEST_CASE("sections and norms", "[grid]") {
  const Grid1p1 g = Grid1p1::make(DiagonalMetric::minkowski({0, 1, 0, 2, Topology::line}), 41);
  GridSection s(g.nt, g.nx, 2);
  for (int n = 0; n < g.nt; ++n)
    for (int i = 0; i < g.nx; ++i) s(n, i, 0) = 1.0;
  // trapezoid integrates constants exactly: area 2
  CHECK(l2_norm(s, g) == Catch::Approx(std::sqrt(2.0)).epsilon(1e-13));
  GridSection d = s + s;
  CHECK(d.max_abs() == 2.0);
  d -= s;
  d *= cplx(0, 3);
  CHECK(d(1, 2, 0) == cplx(0, 3));
  CHECK(d(1, 2, 1) == cplx(0, 0));
  CHECK(s.level(3).size() == static_cast<std::size_t>(g.nx * 2));
}

TEST_CASE("smooth window", "[grid][property]") {
  const SmoothWindow w{0.5, 1.5, 2.0};
  CHECK(w(0.5) == 1.0);
  CHECK(w(0.5 + 0.7) == 1.0);  // plateau covers |x - c| <= halfwidth (1 - 1/steepness)
  CHECK(w(-1.0) == 0.0);
  CHECK(w(2.0) == 0.0);
  CHECK(w(5.0) == 0.0);
  for (double x = -1.0; x <= 2.0; x += 0.01) {
    CHECK(w(x) >= 0.0);
    CHECK(w(x) <= 1.0);
    CHECK(w(x) == Catch::Approx(w(1.0 - x)).margin(1e-14));  // symmetric about the center
  }
  CHECK_THROWS_AS((SmoothWindow{0, -1, 1}.validate()), DomainError);
  CHECK_THROWS_AS((SmoothWindow{0, 1, 0.5}.validate()), DomainError);
}

TEST_CASE("sampled Cauchy data vanish off the declared support", "[grid]") {
  const Grid1p1 g = Grid1p1::make(DiagonalMetric::minkowski({0, 1, -4, 4, Topology::line}), 161);
  const DataSpec spec{{Expr::parse("1"), Expr::parse("cos(x)")}, SmoothWindow{0.3, 1.2, 1.0}};
  const CauchyData d = sample_cauchy_data(spec, g, 0.0);
  CHECK(d.rank == 2);
  CHECK(d.nx() == 161);
  CHECK(d.support.hull().lo == Catch::Approx(-0.9));
  CHECK(d.support.hull().hi == Catch::Approx(1.5));
  for (int i = 0; i < g.nx; ++i) {
    if (!d.support.contains(g.x(i))) {
      CHECK(std::abs(d.values[2 * i]) <= 1e-14);
      CHECK(std::abs(d.values[2 * i + 1]) <= 1e-14);
    }
  }
  CHECK(d.max_abs() == Catch::Approx(1.0).margin(1e-3));
  const DataSpec bare{{Expr::parse("1")}, std::nullopt};
  CHECK_THROWS(sample_cauchy_data(bare, g, 0.0));
}

TEST_CASE("unwindowed data are allowed on a circle", "[grid]") {
  const Grid1p1 g = Grid1p1::make(DiagonalMetric::minkowski({0, 1, 0, 2 * M_PI, Topology::circle}), 32);
  const CauchyData d = sample_cauchy_data({{Expr::parse("sin(x)")}, std::nullopt}, g, 0.0);
  CHECK(d.support.measure() == Catch::Approx(2 * M_PI));
  CHECK(d.values[8].real() == Catch::Approx(1.0));
}
