#include "prehyp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace prehyp {

using geometry::Topology;

Grid1p1 Grid1p1::make(const geometry::DiagonalMetric& metric, int nx, double cfl, double t_start,
                      double t_end) {
  const geometry::Chart1p1& chart = metric.chart();
  if (nx < 5) throw DomainError("grid needs at least 5 spatial nodes, got " + std::to_string(nx));
  if (!(cfl > 0.0)) throw DomainError("cfl must be positive");
  const double eps = 1e-12 * (1.0 + std::abs(chart.t_min) + std::abs(chart.t_max));
  if (!(t_start < t_end) || t_start < chart.t_min - eps || t_end > chart.t_max + eps) {
    throw DomainError("grid time span must be a nonempty subinterval of the chart");
  }
  Grid1p1 g;
  g.chart = chart;
  g.nx = nx;
  g.dx = chart.topology == Topology::circle ? chart.period() / nx : chart.period() / (nx - 1);
  g.cfl = cfl;
  g.t_start = t_start;

  // Light speed bound and positivity of alpha, beta: every x node on a coarse set of
  // time samples, refined to every level once dt is known for time-dependent metrics.
  const int time_samples = metric.is_static() ? 1 : 33;
  double c_max = 0.0;
  for (int s = 0; s < time_samples; ++s) {
    const double t = time_samples == 1 ? t_start : t_start + (t_end - t_start) * s / (time_samples - 1);
    for (int i = 0; i < nx; ++i) c_max = std::max(c_max, metric.light_speed(t, g.x(i)));
  }
  const double target = cfl * g.dx / c_max;
  int steps = static_cast<int>(std::ceil((t_end - t_start) / target - 1e-9));
  steps = std::max(8, (steps + 7) / 8 * 8);
  g.dt = (t_end - t_start) / steps;
  g.nt = steps + 1;
  if (!metric.is_static()) {
    for (int n = 0; n < g.nt; ++n) {
      for (int i = 0; i < nx; ++i) c_max = std::max(c_max, metric.light_speed(g.t(n), g.x(i)));
    }
    if (g.dt > cfl * g.dx / c_max) {
      throw NumericalError("CFL bound violated after sampling every level; reduce cfl");
    }
  }
  g.c_max = c_max;
  return g;
}

Grid1p1 Grid1p1::make(const geometry::DiagonalMetric& metric, int nx, double cfl) {
  return make(metric, nx, cfl, metric.chart().t_min, metric.chart().t_max);
}

std::vector<double> Grid1p1::xs() const {
  std::vector<double> out(static_cast<std::size_t>(nx));
  for (int i = 0; i < nx; ++i) out[i] = x(i);
  return out;
}

int Grid1p1::level_of(double t) const {
  const double r = (t - t_start) / dt;
  const long n = std::lround(r);
  if (n < 0 || n >= nt || std::abs(r - static_cast<double>(n)) > 0.5 + 1e-9) {
    throw DomainError("time " + std::to_string(t) + " is outside the grid levels");
  }
  return static_cast<int>(n);
}

GridSection::GridSection(int nt, int nx, int rank)
    : nt_(nt), nx_(nx), rank_(rank), data_(static_cast<std::size_t>(nt) * nx * rank) {}

double GridSection::max_abs() const noexcept {
  double m = 0.0;
  for (const cplx& v : data_) m = std::max(m, std::abs(v));
  return m;
}

GridSection& GridSection::operator+=(const GridSection& other) {
  if (other.nt_ != nt_ || other.nx_ != nx_ || other.rank_ != rank_) {
    throw RankMismatch("grid sections of different shape");
  }
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

GridSection& GridSection::operator-=(const GridSection& other) {
  if (other.nt_ != nt_ || other.nx_ != nx_ || other.rank_ != rank_) {
    throw RankMismatch("grid sections of different shape");
  }
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

GridSection& GridSection::operator*=(cplx s) {
  for (cplx& v : data_) v *= s;
  return *this;
}

double time_weight(const Grid1p1& grid, int n) noexcept {
  return (n == 0 || n == grid.nt - 1) ? 0.5 : 1.0;
}

double space_weight(const Grid1p1& grid, int i) noexcept {
  if (grid.periodic()) return 1.0;
  return (i == 0 || i == grid.nx - 1) ? 0.5 : 1.0;
}

double l2_norm(const GridSection& phi, const Grid1p1& grid) {
  double sum = 0.0;
  for (int n = 0; n < phi.nt(); ++n) {
    double level = 0.0;
    for (int i = 0; i < phi.nx(); ++i) {
      double node = 0.0;
      for (int c = 0; c < phi.rank(); ++c) node += std::norm(phi(n, i, c));
      level += space_weight(grid, i) * node;
    }
    sum += time_weight(grid, n) * level;
  }
  return std::sqrt(sum * grid.dt * grid.dx);
}

double CauchyData::max_abs() const noexcept {
  double m = 0.0;
  for (const cplx& v : values) m = std::max(m, std::abs(v));
  return m;
}

void SmoothWindow::validate() const {
  if (!(halfwidth > 0.0)) throw DomainError("window halfwidth must be positive");
  if (!(steepness >= 1.0)) throw DomainError("window steepness must be >= 1");
}

double SmoothWindow::operator()(double x) const noexcept {
  const double r = std::abs(x - center);
  if (r >= halfwidth) return 0.0;
  const double ramp = halfwidth / steepness;
  const double y = (halfwidth - r) / ramp;
  if (y >= 1.0) return 1.0;
  return 0.5 * (1.0 + std::tanh((2.0 * y - 1.0) / (2.0 * y * (1.0 - y))));
}

CauchyData sample_cauchy_data(const DataSpec& spec, const Grid1p1& grid, double t0) {
  const int k = static_cast<int>(spec.components.size());
  if (k < 1 || k > kMaxRank) throw RankMismatch("initial data needs 1..4 components");
  CauchyData d;
  d.sigma = {grid.t(grid.level_of(t0))};
  d.rank = k;
  d.values.assign(static_cast<std::size_t>(grid.nx) * k, cplx{});
  if (spec.window) {
    spec.window->validate();
    d.support = geometry::IntervalSet(spec.window->support());
  } else {
    if (!grid.periodic()) {
      throw DomainError("initial data on a line chart needs a compactly supported window");
    }
    d.support = geometry::IntervalSet(geometry::Interval{grid.chart.x_min, grid.chart.x_max});
  }
  for (int i = 0; i < grid.nx; ++i) {
    const double x = grid.x(i);
    const double w = spec.window ? (*spec.window)(x) : 1.0;
    if (w == 0.0) continue;
    for (int c = 0; c < k; ++c) d.values[static_cast<std::size_t>(i) * k + c] = w * spec.components[c].eval(d.sigma.t0, x);
  }
  return d;
}

}  // namespace prehyp
