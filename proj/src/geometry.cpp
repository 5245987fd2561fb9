#include "prehyp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace prehyp::geometry {

void Chart1p1::validate() const {
  if (!(t_min < t_max)) throw DomainError("chart requires t_min < t_max");
  if (!(x_min < x_max)) throw DomainError("chart requires x_min < x_max");
}

bool Chart1p1::contains(SpacetimePoint p) const noexcept {
  return p.t >= t_min && p.t <= t_max && p.x >= x_min && p.x <= x_max;
}

double Chart1p1::wrap(double x) const noexcept {
  if (topology == Topology::line) return x;
  const double L = period();
  double r = std::fmod(x - x_min, L);
  if (r < 0.0) r += L;
  return x_min + r;
}

DiagonalMetric::DiagonalMetric(Chart1p1 chart, expr::Expr alpha, expr::Expr beta)
    : chart_(chart), alpha_(std::move(alpha)), beta_(std::move(beta)) {
  chart_.validate();
}

DiagonalMetric DiagonalMetric::minkowski(Chart1p1 chart) {
  return DiagonalMetric(chart, expr::Expr::constant(1.0), expr::Expr::constant(1.0));
}

namespace {

double positive_sample(const expr::Expr& e, double t, double x, const char* name) {
  const double v = e.eval(t, x);
  if (!(v > 0.0)) {
    throw DomainError(std::string("metric component ") + name + " must be positive, got " +
                      std::to_string(v) + " at (t=" + std::to_string(t) +
                      ", x=" + std::to_string(x) + ")");
  }
  return v;
}

}  // namespace

double DiagonalMetric::alpha(double t, double x) const { return positive_sample(alpha_, t, x, "alpha"); }

double DiagonalMetric::beta(double t, double x) const { return positive_sample(beta_, t, x, "beta"); }

void DiagonalMetric::require_in_chart(SpacetimePoint p) const {
  if (!chart_.contains(p)) {
    throw DomainError("point (t=" + std::to_string(p.t) + ", x=" + std::to_string(p.x) +
                      ") lies outside the chart");
  }
}

double inverse_metric_on_covector(const DiagonalMetric& metric, SpacetimePoint p, Covector xi) {
  metric.require_in_chart(p);
  const double a = metric.alpha(p.t, p.x);
  const double b = metric.beta(p.t, p.x);
  return xi.t * xi.t / (a * a) - xi.x * xi.x / (b * b);
}

UnitNormal unit_normal(const DiagonalMetric& metric, CauchyLine sigma, double x) {
  metric.require_in_chart({sigma.t0, x});
  const double a = metric.alpha(sigma.t0, x);
  return UnitNormal{Vector2{1.0 / a, 0.0}, Covector{a, 0.0}};
}

double hypersurface_measure(const DiagonalMetric& metric, CauchyLine sigma, double x) {
  metric.require_in_chart({sigma.t0, x});
  return metric.beta(sigma.t0, x);
}

IntervalSet::IntervalSet(std::vector<Interval> parts) {
  std::erase_if(parts, [](const Interval& i) { return !(i.lo <= i.hi); });
  std::sort(parts.begin(), parts.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (const Interval& p : parts) {
    if (!parts_.empty() && p.lo <= parts_.back().hi) {
      parts_.back().hi = std::max(parts_.back().hi, p.hi);
    } else {
      parts_.push_back(p);
    }
  }
}

bool IntervalSet::contains(double x) const noexcept {
  return std::any_of(parts_.begin(), parts_.end(), [x](const Interval& i) { return i.contains(x); });
}

bool IntervalSet::contains(const IntervalSet& other) const noexcept {
  return std::all_of(other.parts_.begin(), other.parts_.end(), [this](const Interval& o) {
    return std::any_of(parts_.begin(), parts_.end(),
                       [&o](const Interval& i) { return i.lo <= o.lo && o.hi <= i.hi; });
  });
}

IntervalSet IntervalSet::inflated(double margin, const Chart1p1& chart) const {
  std::vector<Interval> grown;
  for (const Interval& p : parts_) {
    Interval g{p.lo - margin, p.hi + margin};
    if (chart.topology == Topology::line) {
      grown.push_back({std::max(g.lo, chart.x_min), std::min(g.hi, chart.x_max)});
      continue;
    }
    if (g.length() >= chart.period()) return IntervalSet(Interval{chart.x_min, chart.x_max});
    if (g.lo < chart.x_min) {
      grown.push_back({chart.x_min, g.hi});
      grown.push_back({g.lo + chart.period(), chart.x_max});
    } else if (g.hi > chart.x_max) {
      grown.push_back({g.lo, chart.x_max});
      grown.push_back({chart.x_min, g.hi - chart.period()});
    } else {
      grown.push_back(g);
    }
  }
  return IntervalSet(std::move(grown));
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
  std::vector<Interval> out;
  for (const Interval& a : parts_) {
    for (const Interval& b : other.parts_) {
      const double lo = std::max(a.lo, b.lo);
      const double hi = std::min(a.hi, b.hi);
      if (lo <= hi) out.push_back({lo, hi});
    }
  }
  return IntervalSet(std::move(out));
}

Interval IntervalSet::hull() const {
  if (parts_.empty()) return {0.0, -1.0};
  return {parts_.front().lo, parts_.back().hi};
}

double IntervalSet::measure() const noexcept {
  double m = 0.0;
  for (const Interval& p : parts_) m += p.length();
  return m;
}

const IntervalSet& CausalShadow::at(double t) const {
  if (times.empty()) throw DomainError("empty causal shadow");
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  std::size_t best = static_cast<std::size_t>(it - times.begin());
  if (best == times.size()) best = times.size() - 1;
  if (best > 0 && std::abs(times[best - 1] - t) < std::abs(times[best] - t)) --best;
  const double tol = 0.5 * step + 1e-12 * (1.0 + std::abs(t));
  if (std::abs(times[best] - t) > tol) {
    throw DomainError("no causal shadow level stored near t=" + std::to_string(t));
  }
  return sets[best];
}

namespace {

// One sweep of the two null endpoints from t0 towards t_end; records every level,
// including t0 itself.
struct Sweep {
  std::vector<double> times;
  std::vector<double> left;
  std::vector<double> right;
  bool truncated = false;
};

Sweep sweep(const DiagonalMetric& metric, Interval seed, double t0, double t_end, double max_step) {
  const Chart1p1& chart = metric.chart();
  Sweep s;
  const double span = t_end - t0;
  const int n = span == 0.0 ? 0 : static_cast<int>(std::ceil(std::abs(span) / max_step - 1e-9));
  const double h = n == 0 ? 0.0 : span / n;
  // Forward in time the right endpoint moves with +c; backward it moves with -c.
  const double sign = span >= 0.0 ? 1.0 : -1.0;
  auto speed = [&](double t, double x) { return metric.light_speed(t, chart.wrap(x)); };
  auto rk4 = [&](double t, double x, double dir) {
    auto f = [&](double tt, double xx) { return dir * speed(tt, xx); };
    const double k1 = f(t, x);
    const double k2 = f(t + 0.5 * h, x + 0.5 * h * k1);
    const double k3 = f(t + 0.5 * h, x + 0.5 * h * k2);
    const double k4 = f(t + h, x + h * k3);
    return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };
  double xl = seed.lo;
  double xr = seed.hi;
  bool left_pinned = false;
  bool right_pinned = false;
  s.times.push_back(t0);
  s.left.push_back(xl);
  s.right.push_back(xr);
  for (int k = 0; k < n; ++k) {
    const double t = t0 + k * h;
    if (!left_pinned) xl = rk4(t, xl, -sign);
    if (!right_pinned) xr = rk4(t, xr, sign);
    if (chart.topology == Topology::line) {
      if (xl < chart.x_min) {
        xl = chart.x_min;
        left_pinned = true;
        s.truncated = true;
      }
      if (xr > chart.x_max) {
        xr = chart.x_max;
        right_pinned = true;
        s.truncated = true;
      }
    }
    s.times.push_back(k + 1 == n ? t_end : t0 + (k + 1) * h);
    s.left.push_back(xl);
    s.right.push_back(xr);
  }
  return s;
}

IntervalSet to_set(const Chart1p1& chart, double xl, double xr) {
  if (chart.topology == Topology::line) return IntervalSet(Interval{xl, xr});
  if (xr - xl >= chart.period()) return IntervalSet(Interval{chart.x_min, chart.x_max});
  const double lo = chart.wrap(xl);
  const double hi = lo + (xr - xl);
  if (hi <= chart.x_max) return IntervalSet(Interval{lo, hi});
  return IntervalSet(std::vector<Interval>{{lo, chart.x_max}, {chart.x_min, hi - chart.period()}});
}

void validate_seed(const DiagonalMetric& metric, Interval seed, double t0, double max_step) {
  const Chart1p1& chart = metric.chart();
  if (!(seed.lo <= seed.hi)) throw DomainError("causal seed interval is empty");
  metric.require_in_chart({t0, seed.lo});
  metric.require_in_chart({t0, seed.hi});
  if (!(max_step > 0.0)) throw DomainError("causal shadow step must be positive");
  (void)chart;
}

}  // namespace

CausalShadow causal_shadow_between(const DiagonalMetric& metric, Interval seed, double t0,
                                   double t_begin, double t_end, double max_step) {
  validate_seed(metric, seed, t0, max_step);
  const Chart1p1& chart = metric.chart();
  const double eps = 1e-12 * (1.0 + std::abs(chart.t_max) + std::abs(chart.t_min));
  if (t_begin < chart.t_min - eps || t_end > chart.t_max + eps || t_begin > t0 || t_end < t0) {
    throw DomainError("causal shadow time range outside the chart or not bracketing t0");
  }
  CausalShadow out;
  out.step = max_step;
  const Sweep past = sweep(metric, seed, t0, t_begin, max_step);
  const Sweep future = sweep(metric, seed, t0, t_end, max_step);
  for (std::size_t k = past.times.size(); k-- > 1;) {
    out.times.push_back(past.times[k]);
    out.sets.push_back(to_set(chart, past.left[k], past.right[k]));
  }
  for (std::size_t k = 0; k < future.times.size(); ++k) {
    out.times.push_back(future.times[k]);
    out.sets.push_back(to_set(chart, future.left[k], future.right[k]));
  }
  out.truncated = past.truncated || future.truncated;
  return out;
}

CausalShadow causal_shadow(const DiagonalMetric& metric, Interval seed, double t0,
                           CausalDirection direction, double t_target, double max_step) {
  const Chart1p1& chart = metric.chart();
  metric.require_in_chart({t_target, seed.lo});
  switch (direction) {
    case CausalDirection::future:
      if (t_target < t0) throw DomainError("future shadow needs t_target >= t0");
      return causal_shadow_between(metric, seed, t0, t0, t_target, max_step);
    case CausalDirection::past:
      if (t_target > t0) throw DomainError("past shadow needs t_target <= t0");
      return causal_shadow_between(metric, seed, t0, t_target, t0, max_step);
    case CausalDirection::both: {
      const double d = std::abs(t_target - t0);
      return causal_shadow_between(metric, seed, t0, std::max(chart.t_min, t0 - d),
                                   std::min(chart.t_max, t0 + d), max_step);
    }
  }
  throw DomainError("unknown causal direction");
}

}  // namespace prehyp::geometry
