#pragma once

#include <optional>
#include <span>
#include <vector>

#include "prehyp/field.hpp"
#include "prehyp/geometry.hpp"

namespace prehyp {

/// Uniform (t, x) lattice over the evolved part of a chart.
///
/// Line charts include both spatial endpoints (dx = L/(nx-1)); circle charts
/// omit x_max, which is identified with x_min (dx = L/nx).
struct Grid1p1 {
  geometry::Chart1p1 chart;
  int nx = 0;
  double dx = 0.0;
  int nt = 0;  // number of time levels
  double dt = 0.0;
  double t_start = 0.0;
  double cfl = 0.5;
  double c_max = 1.0;

  /// Builds the lattice on [t_start, t_end] with dt <= cfl*dx/c_max. The step count is
  /// rounded up to a multiple of 8 so that quarter/half/eighth points of the span land
  /// on levels.
  static Grid1p1 make(const geometry::DiagonalMetric& metric, int nx, double cfl, double t_start,
                      double t_end);
  /// Same, spanning the whole chart.
  static Grid1p1 make(const geometry::DiagonalMetric& metric, int nx, double cfl = 0.5);

  double x(int i) const noexcept { return chart.x_min + i * dx; }
  double t(int n) const noexcept { return t_start + n * dt; }
  double t_end() const noexcept { return t(nt - 1); }
  bool periodic() const noexcept { return chart.topology == geometry::Topology::circle; }
  std::vector<double> xs() const;
  /// Nearest level to t; throws DomainError when t is outside the lattice.
  int level_of(double t) const;
};

/// Complex k-vector per (time level, x node), stored level-major.
class GridSection {
 public:
  GridSection() = default;
  GridSection(int nt, int nx, int rank);

  int nt() const noexcept { return nt_; }
  int nx() const noexcept { return nx_; }
  int rank() const noexcept { return rank_; }

  cplx& operator()(int n, int i, int c) noexcept { return data_[index(n, i, c)]; }
  const cplx& operator()(int n, int i, int c) const noexcept { return data_[index(n, i, c)]; }

  std::span<cplx> level(int n) noexcept {
    return {data_.data() + index(n, 0, 0), static_cast<std::size_t>(nx_) * rank_};
  }
  std::span<const cplx> level(int n) const noexcept {
    return {data_.data() + index(n, 0, 0), static_cast<std::size_t>(nx_) * rank_};
  }
  std::span<cplx> values() noexcept { return data_; }
  std::span<const cplx> values() const noexcept { return data_; }

  double max_abs() const noexcept;

  GridSection& operator+=(const GridSection& other);
  GridSection& operator-=(const GridSection& other);
  GridSection& operator*=(cplx s);
  friend GridSection operator+(GridSection a, const GridSection& b) { return a += b; }
  friend GridSection operator-(GridSection a, const GridSection& b) { return a -= b; }
  friend GridSection operator*(cplx s, GridSection a) { return a *= s; }

 private:
  std::size_t index(int n, int i, int c) const noexcept {
    return (static_cast<std::size_t>(n) * nx_ + i) * rank_ + c;
  }
  int nt_ = 0;
  int nx_ = 0;
  int rank_ = 0;
  std::vector<cplx> data_;
};

/// Trapezoidal weight of level n (0.5 at the first/last level).
double time_weight(const Grid1p1& grid, int n) noexcept;
/// Trapezoidal weight of node i (0.5 at line ends, 1 on a circle).
double space_weight(const Grid1p1& grid, int i) noexcept;

/// sqrt of the trapezoidal integral of |phi|^2 dt dx.
double l2_norm(const GridSection& phi, const Grid1p1& grid);

/// Compactly supported data on a constant-t hypersurface, sampled on the grid's x nodes.
struct CauchyData {
  geometry::CauchyLine sigma;
  int rank = 0;
  std::vector<cplx> values;  // nx * rank, node-major
  geometry::IntervalSet support;

  int nx() const noexcept { return rank == 0 ? 0 : static_cast<int>(values.size()) / rank; }
  double max_abs() const noexcept;
};

/// C-infinity plateau window with exact compact support [center - halfwidth, center + halfwidth].
///
/// The two transition zones have length halfwidth/steepness (steepness >= 1; steepness 1
/// gives a single bump without plateau). Each transition is the tanh-mollified step
/// s(y) = (1 + tanh((2y - 1) / (2 y (1 - y)))) / 2 on y in (0, 1).
struct SmoothWindow {
  double center = 0.0;
  double halfwidth = 1.0;
  double steepness = 1.0;

  void validate() const;
  double operator()(double x) const noexcept;
  geometry::Interval support() const noexcept { return {center - halfwidth, center + halfwidth}; }
};

/// Components (expressions in t, x) times an optional spatial window.
struct DataSpec {
  std::vector<expr::Expr> components;
  std::optional<SmoothWindow> window;
};

/// Samples a DataSpec on the hypersurface {t = t0}; the declared support is the window
/// support (or the whole chart when there is no window, which is allowed only on a circle).
CauchyData sample_cauchy_data(const DataSpec& spec, const Grid1p1& grid, double t0);

}  // namespace prehyp
