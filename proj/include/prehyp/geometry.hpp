#pragma once

#include <vector>

#include "prehyp/error.hpp"
#include "prehyp/expr.hpp"

/// 1+1 model spacetimes: a single global chart with a diagonal Lorentzian metric
/// g = alpha^2 dt^2 - beta^2 dx^2 of signature (+,-). Every constant-t line is a
/// spacelike Cauchy hypersurface.
namespace prehyp::geometry {

enum class Topology { line, circle };

struct SpacetimePoint {
  double t = 0.0;
  double x = 0.0;
};

/// Covector components (xi_t, xi_x).
struct Covector {
  double t = 0.0;
  double x = 0.0;
};

/// Vector components (v^t, v^x).
struct Vector2 {
  double t = 0.0;
  double x = 0.0;
};

struct Chart1p1 {
  double t_min = 0.0;
  double t_max = 1.0;
  double x_min = -1.0;
  double x_max = 1.0;
  Topology topology = Topology::line;

  /// Throws DomainError unless t_min < t_max and x_min < x_max.
  void validate() const;
  bool contains(SpacetimePoint p) const noexcept;
  double period() const noexcept { return x_max - x_min; }
  /// Maps x into [x_min, x_max) on a circle; identity on a line.
  double wrap(double x) const noexcept;
};

class DiagonalMetric {
 public:
  DiagonalMetric(Chart1p1 chart, expr::Expr alpha, expr::Expr beta);
  static DiagonalMetric minkowski(Chart1p1 chart);

  const Chart1p1& chart() const noexcept { return chart_; }
  const expr::Expr& alpha_expr() const noexcept { return alpha_; }
  const expr::Expr& beta_expr() const noexcept { return beta_; }

  /// Lapse alpha(t,x); throws DomainError if it is not strictly positive.
  double alpha(double t, double x) const;
  double beta(double t, double x) const;
  /// Coordinate light speed alpha/beta.
  double light_speed(double t, double x) const { return alpha(t, x) / beta(t, x); }
  /// Spacetime volume density alpha*beta.
  double volume_density(double t, double x) const { return alpha(t, x) * beta(t, x); }

  bool is_constant() const noexcept { return alpha_.is_constant() && beta_.is_constant(); }
  bool is_static() const noexcept { return !alpha_.depends_on_t() && !beta_.depends_on_t(); }

  /// Throws DomainError if p is outside the chart.
  void require_in_chart(SpacetimePoint p) const;

 private:
  Chart1p1 chart_;
  expr::Expr alpha_;
  expr::Expr beta_;
};

/// The hypersurface {t = t0}.
struct CauchyLine {
  double t0 = 0.0;
};

/// g(xi, xi) = xi_t^2/alpha^2 - xi_x^2/beta^2.
double inverse_metric_on_covector(const DiagonalMetric& metric, SpacetimePoint p, Covector xi);

struct UnitNormal {
  Vector2 vector;      // (1/alpha, 0), future directed
  Covector covector;   // index-lowered: (alpha, 0)
};

UnitNormal unit_normal(const DiagonalMetric& metric, CauchyLine sigma, double x);

/// Induced line density beta(t0, x) on the hypersurface.
double hypersurface_measure(const DiagonalMetric& metric, CauchyLine sigma, double x);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const noexcept { return hi - lo; }
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
};

/// Sorted, disjoint union of closed intervals.
class IntervalSet {
 public:
  IntervalSet() = default;
  explicit IntervalSet(std::vector<Interval> parts);
  explicit IntervalSet(Interval single) : IntervalSet(std::vector<Interval>{single}) {}

  const std::vector<Interval>& parts() const noexcept { return parts_; }
  bool empty() const noexcept { return parts_.empty(); }
  bool contains(double x) const noexcept;
  /// True when every part of `other` lies inside this set.
  bool contains(const IntervalSet& other) const noexcept;
  /// Grows every part by `margin` on both sides, clipped to the chart (wrapping on a circle).
  IntervalSet inflated(double margin, const Chart1p1& chart) const;
  IntervalSet intersect(const IntervalSet& other) const;
  Interval hull() const;
  double measure() const noexcept;

 private:
  std::vector<Interval> parts_;
};

enum class CausalDirection { future, past, both };

/// Causal future/past of a spatial interval, sampled on time levels.
struct CausalShadow {
  std::vector<double> times;         // ascending
  std::vector<IntervalSet> sets;     // one per entry of `times`
  bool truncated = false;            // a characteristic left a line-topology chart
  double step = 0.0;

  /// Set at the stored level nearest t; throws DomainError if none lies within step/2.
  const IntervalSet& at(double t) const;
};

/// Integrates the null characteristics dx/dt = +-alpha/beta from the seed endpoints with
/// classical RK4 at step <= max_step. `future` stores t0..t_target, `past` t_target..t0,
/// `both` the symmetric window t0 -+ |t_target - t0|; all clipped to the chart.
CausalShadow causal_shadow(const DiagonalMetric& metric, Interval seed, double t0,
                           CausalDirection direction, double t_target, double max_step);

/// J(seed) over [t_begin, t_end]: past shadow below t0, future shadow above.
CausalShadow causal_shadow_between(const DiagonalMetric& metric, Interval seed, double t0,
                                   double t_begin, double t_end, double max_step);

}  // namespace prehyp::geometry
