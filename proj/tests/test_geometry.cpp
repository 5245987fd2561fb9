#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "prehyp/geometry.hpp"

using namespace prehyp;
using namespace prehyp::geometry;
using expr::Expr;

namespace {

Chart1p1 box(double t0, double t1, double x0, double x1, Topology top = Topology::line) {
  return {t0, t1, x0, x1, top};
}

DiagonalMetric metric(const char* alpha, const char* beta, Chart1p1 c = box(0, 2, -5, 5)) {
  return DiagonalMetric(c, Expr::parse(alpha), Expr::parse(beta));
}

}  // namespace

TEST_CASE("chart validation and wrapping", "[geometry]") {
  CHECK_THROWS_AS(box(1, 0, -1, 1).validate(), DomainError);
  CHECK_THROWS_AS(box(0, 1, 1, 1).validate(), DomainError);
  CHECK_NOTHROW(box(0, 1, -1, 1).validate());
  const Chart1p1 circ = box(0, 1, 0, 2, Topology::circle);
  CHECK(circ.wrap(2.5) == Catch::Approx(0.5));
  CHECK(circ.wrap(-0.5) == Catch::Approx(1.5));
  CHECK(box(0, 1, 0, 2).wrap(2.5) == 2.5);
  CHECK(circ.contains({0.5, 1.0}));
  CHECK_FALSE(circ.contains({1.5, 1.0}));
}

TEST_CASE("metric samples must be positive", "[geometry]") {
  const DiagonalMetric m = metric("x", "1", box(0, 1, -1, 1));
  CHECK(m.alpha(0, 0.5) == 0.5);
  CHECK_THROWS_AS(m.alpha(0, -0.5), DomainError);
  CHECK_THROWS_AS(m.require_in_chart({2.0, 0.0}), DomainError);
  const DiagonalMetric k = metric("2", "4");
  CHECK(k.light_speed(0, 0) == 0.5);
  CHECK(k.volume_density(0, 0) == 8.0);
  CHECK(k.is_constant());
  CHECK(metric("1", "1 + t").is_static() == false);
}

TEST_CASE("inverse metric on covectors", "[geometry]") {
  const DiagonalMetric mink = DiagonalMetric::minkowski(box(0, 1, -1, 1));
  CHECK(inverse_metric_on_covector(mink, {0, 0}, {1, 0}) == 1.0);
  CHECK(inverse_metric_on_covector(mink, {0, 0}, {1, 1}) == 0.0);
  CHECK(inverse_metric_on_covector(metric("1", "2"), {0, 0}, {0, 1}) == -0.25);
}

TEST_CASE("unit normal has unit length", "[geometry][property]") {
  const DiagonalMetric m = metric("1 + 0.5*sin(x)", "2 + cos(x)");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> xs(-5, 5);
  for (int k = 0; k < 50; ++k) {
    const double x = xs(rng);
    const UnitNormal n = unit_normal(m, CauchyLine{0.5}, x);
    const double a = m.alpha(0.5, x);
    CHECK(n.vector.t == 1.0 / a);
    CHECK(n.vector.x == 0.0);
    CHECK(n.covector.t == a);
    // g(n, n) = alpha^2 (n^t)^2 - beta^2 (n^x)^2
    CHECK(a * a * n.vector.t * n.vector.t == Catch::Approx(1.0).epsilon(1e-15));
    CHECK(inverse_metric_on_covector(m, {0.5, x}, n.covector) == Catch::Approx(1.0).epsilon(1e-15));
  }
  const UnitNormal mk = unit_normal(DiagonalMetric::minkowski(box(0, 1, -1, 1)), CauchyLine{0}, 0);
  CHECK(mk.vector.t == 1.0);
  CHECK(mk.covector.t == 1.0);
}

TEST_CASE("hypersurface measure", "[geometry]") {
  CHECK(hypersurface_measure(DiagonalMetric::minkowski(box(0, 1, -1, 1)), {0}, 0.3) == 1.0);
  CHECK(hypersurface_measure(metric("1", "2"), {0}, 0.3) == 2.0);
  CHECK(hypersurface_measure(metric("1", "1 + x^2"), {0}, 1.0) == 2.0);
}

TEST_CASE("interval sets", "[geometry]") {
  const IntervalSet s({{2, 3}, {0, 1}, {0.5, 1.5}});
  REQUIRE(s.parts().size() == 2);
  CHECK(s.parts()[0].lo == 0.0);
  CHECK(s.parts()[0].hi == 1.5);
  CHECK(s.measure() == Catch::Approx(2.5));
  CHECK(s.contains(2.5));
  CHECK_FALSE(s.contains(1.7));
  CHECK(s.contains(IntervalSet(Interval{0.2, 1.0})));
  CHECK_FALSE(s.contains(IntervalSet(Interval{1.0, 2.5})));
  const IntervalSet grown = s.inflated(0.5, box(0, 1, -1, 3.2));
  REQUIRE(grown.parts().size() == 1);
  CHECK(grown.hull().lo == -0.5);
  CHECK(grown.hull().hi == 3.2);
  const IntervalSet cut = s.intersect(IntervalSet(Interval{1.0, 2.2}));
  CHECK(cut.measure() == Catch::Approx(0.7));
}

TEST_CASE("shadows in Minkowski and with a slower light speed", "[geometry]") {
  const CausalShadow mink =
      causal_shadow(DiagonalMetric::minkowski(box(0, 2, -5, 5)), {-0.1, 0.1}, 0.0, CausalDirection::future, 1.0, 0.01);
  const Interval h = mink.at(1.0).hull();
  CHECK(h.lo == Catch::Approx(-1.1).margin(1e-12));
  CHECK(h.hi == Catch::Approx(1.1).margin(1e-12));
  CHECK_FALSE(mink.truncated);

  const CausalShadow slow = causal_shadow(metric("1", "2"), {0, 0}, 0.0, CausalDirection::future, 1.0, 0.01);
  CHECK(slow.at(1.0).hull().lo == Catch::Approx(-0.5).margin(1e-12));
  CHECK(slow.at(1.0).hull().hi == Catch::Approx(0.5).margin(1e-12));

  const CausalShadow past = causal_shadow(metric("1", "1"), {0, 0}, 1.0, CausalDirection::past, 0.0, 0.01);
  CHECK(past.at(0.0).hull().hi == Catch::Approx(1.0).margin(1e-12));
  CHECK_THROWS_AS(past.at(1.7), DomainError);
}

TEST_CASE("shadows are conformally invariant", "[geometry][property]") {
  const DiagonalMetric conf = metric("exp(0.3*sin(x + t))", "exp(0.3*sin(x + t))");
  const DiagonalMetric mink = DiagonalMetric::minkowski(box(0, 2, -5, 5));
  const CausalShadow a = causal_shadow(conf, {-0.4, 0.2}, 0.0, CausalDirection::future, 1.5, 0.01);
  const CausalShadow b = causal_shadow(mink, {-0.4, 0.2}, 0.0, CausalDirection::future, 1.5, 0.01);
  REQUIRE(a.times.size() == b.times.size());
  for (std::size_t n = 0; n < a.times.size(); ++n) {
    CHECK(std::abs(a.sets[n].hull().lo - b.sets[n].hull().lo) <= 1e-10);
    CHECK(std::abs(a.sets[n].hull().hi - b.sets[n].hull().hi) <= 1e-10);
  }
}

TEST_CASE("curved shadow grows monotonically", "[geometry][property]") {
  const DiagonalMetric m = metric("1 + 0.2*sin(x)", "1.5 + 0.3*cos(0.5*x)");
  const double dt = 0.01;
  const CausalShadow full = causal_shadow(m, {-0.3, 0.4}, 0.0, CausalDirection::future, 1.6, dt);
  for (double t1 : {0.3, 0.8}) {
    const IntervalSet mid = full.at(t1);
    const CausalShadow again = causal_shadow(m, mid.hull(), t1, CausalDirection::future, 1.6, dt);
    const IntervalSet end = full.at(1.6);
    const IntervalSet prop = again.at(1.6);
    CHECK(end.hull().lo <= prop.hull().lo + 1e-10);
    CHECK(end.hull().hi >= prop.hull().hi - 1e-10);
  }
  for (std::size_t n = 1; n < full.times.size(); ++n) CHECK(full.sets[n].contains(full.sets[n - 1]));
}

TEST_CASE("future of one seed meets the past of a later seed in a bounded set", "[geometry][property]") {
  const DiagonalMetric m = metric("1 + 0.2*sin(x)", "1.5 + 0.3*cos(0.5*x)");
  const CausalShadow fut = causal_shadow(m, {-0.5, 0.5}, 0.0, CausalDirection::future, 2.0, 0.01);
  const CausalShadow pst = causal_shadow(m, {1.0, 1.5}, 2.0, CausalDirection::past, 0.0, 0.01);
  bool met = false;
  for (double t = 0.0; t <= 2.0; t += 0.25) {
    const IntervalSet both = fut.at(t).intersect(pst.at(t));
    if (!both.empty()) {
      met = true;
      CHECK(both.hull().lo > -5.0);
      CHECK(both.hull().hi < 5.0);
    }
  }
  CHECK(met);
}

TEST_CASE("circle shadows wrap and saturate", "[geometry]") {
  const DiagonalMetric m = DiagonalMetric::minkowski(box(0, 10, 0, 2 * M_PI, Topology::circle));
  const CausalShadow s = causal_shadow(m, {6.0, 6.2}, 0.0, CausalDirection::future, 0.5, 0.01);
  const IntervalSet at = s.at(0.5);
  CHECK(at.contains(0.1));
  CHECK(at.contains(5.6));
  CHECK_FALSE(at.contains(3.0));
  const CausalShadow full = causal_shadow(m, {1.0, 1.2}, 0.0, CausalDirection::future, 4.0, 0.01);
  CHECK(full.at(4.0).measure() == Catch::Approx(2 * M_PI));
}

TEST_CASE("shadows leaving a line chart are flagged", "[geometry]") {
  const CausalShadow s =
      causal_shadow(DiagonalMetric::minkowski(box(0, 2, -1, 1)), {0.5, 0.8}, 0.0, CausalDirection::future, 1.0, 0.01);
  CHECK(s.truncated);
}

TEST_CASE("shadow between two times", "[geometry]") {
  const CausalShadow s =
      causal_shadow_between(DiagonalMetric::minkowski(box(0, 2, -5, 5)), {0, 0}, 1.0, 0.0, 2.0, 0.01);
  CHECK(s.at(0.0).hull().lo == Catch::Approx(-1.0).margin(1e-12));
  CHECK(s.at(2.0).hull().hi == Catch::Approx(1.0).margin(1e-12));
  CHECK(s.at(1.0).measure() == Catch::Approx(0.0).margin(1e-12));
}
