#include "evolve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace prehyp::detail {

using bundle_ops::FirstOrderOperator;
using bundle_ops::RowSampler;
using bundle_ops::SecondOrderOperator;
using geometry::DiagonalMetric;

namespace {

std::string where(double t, double x) {
  return "(t=" + std::to_string(t) + ", x=" + std::to_string(x) + ")";
}

CMatrix block(std::span<const cplx> row, int i, int k) {
  CMatrix m(k, k);
  if (row.empty()) return CMatrix::Zero(k, k);
  const cplx* p = row.data() + static_cast<std::size_t>(i) * k * k;
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) m(r, c) = p[r * k + c];
  }
  return m;
}

void put(std::vector<cplx>& row, int i, int k, const CMatrix& m) {
  cplx* p = row.data() + static_cast<std::size_t>(i) * k * k;
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) p[r * k + c] = m(r, c);
  }
}

// Inverse of a leading coefficient, rejecting (near-)singular blocks.
CMatrix leading_inverse(const CMatrix& a, const char* name, double t, double x) {
  const Eigen::PartialPivLU<CMatrix> lu(a);
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  const double det = std::abs(lu.determinant());
  if (!(det > 1e-12 * std::max(1.0, std::pow(norm, static_cast<double>(a.rows()))))) {
    throw NumericalError(std::string("singular ") + name + " at " + where(t, x));
  }
  return lu.inverse();
}

// Premultiplied coefficient rows at one time, with a tiny cache for the RK4 stage times.
template <class Rows, class Build>
class RowCache {
 public:
  RowCache(bool time_independent, Build build) : frozen_(time_independent), build_(std::move(build)) {}

  const Rows& at(double t) {
    if (frozen_ && count_ > 0) return slots_[0].rows;
    for (int s = 0; s < count_; ++s) {
      if (slots_[s].t == t) return slots_[s].rows;
    }
    Slot& slot = slots_[next_];
    next_ = (next_ + 1) % kSlots;
    count_ = std::min(count_ + 1, kSlots);
    slot.t = t;
    build_(t, slot.rows);
    return slot.rows;
  }

 private:
  static constexpr int kSlots = 3;
  struct Slot {
    double t = 0.0;
    Rows rows;
  };
  bool frozen_;
  Build build_;
  std::array<Slot, kSlots> slots_{};
  int count_ = 0;
  int next_ = 0;
};

struct SystemRows {
  std::vector<cplx> k_tx, k_xx, k_t, k_x, k_e, m;
  kernels::SecondOrderSystemRow view() const { return {k_tx, k_xx, k_t, k_x, k_e, m}; }
};

struct FirstRows {
  std::vector<cplx> k1, k0;
};

// Source values at t_n + frac*dt for frac in {0, 1/2} given the step pair (n, n + dir).
void source_at(const GridSection& f, int n, int dir, bool half, std::vector<cplx>& out) {
  const auto lv = [&](int m) { return f.level(m); };
  if (!half) {
    std::copy(lv(n).begin(), lv(n).end(), out.begin());
    return;
  }
  const int a = std::min(n, n + dir);  // lower level of the pair
  const int b = a + 1;
  const int last = f.nt() - 1;
  const std::size_t len = out.size();
  if (last < 3) {
    for (std::size_t j = 0; j < len; ++j) out[j] = 0.5 * (lv(a)[j] + lv(b)[j]);
  } else if (a >= 1 && b + 1 <= last) {
    for (std::size_t j = 0; j < len; ++j) {
      out[j] = (-lv(a - 1)[j] + 9.0 * lv(a)[j] + 9.0 * lv(b)[j] - lv(b + 1)[j]) / 16.0;
    }
  } else if (a == 0) {
    for (std::size_t j = 0; j < len; ++j) {
      out[j] = (5.0 * lv(0)[j] + 15.0 * lv(1)[j] - 5.0 * lv(2)[j] + lv(3)[j]) / 16.0;
    }
  } else {
    for (std::size_t j = 0; j < len; ++j) {
      out[j] = (5.0 * lv(last)[j] + 15.0 * lv(last - 1)[j] - 5.0 * lv(last - 2)[j] + lv(last - 3)[j]) / 16.0;
    }
  }
}

void axpy(std::vector<cplx>& y, std::span<const cplx> x, std::span<const cplx> k, double h) {
  for (std::size_t j = 0; j < y.size(); ++j) y[j] = x[j] + h * k[j];
}

int sweep_dirs(Sweep sweep, std::array<int, 2>& dirs) {
  switch (sweep) {
    case Sweep::forward:
      dirs = {1, 0};
      return 1;
    case Sweep::backward:
      dirs = {-1, 0};
      return 1;
    case Sweep::both:
      dirs = {1, -1};
      return 2;
  }
  return 0;
}

}  // namespace

void evolve_second_order(const SecondOrderOperator& l, const Grid1p1& grid, int n0, std::span<const cplx> u0,
                         std::span<const cplx> v0, const GridSection* source, Sweep sweep,
                         const EvolveOptions& options, GridSection& out) {
  const int k = l.rank;
  const std::size_t len = static_cast<std::size_t>(grid.nx) * k;
  if (u0.size() != len || v0.size() != len) throw RankMismatch("initial rows do not match the grid");
  if (out.nt() != grid.nt || out.nx() != grid.nx || out.rank() != k) throw RankMismatch("output section shape");
  if (source && (source->nt() != grid.nt || source->nx() != grid.nx || source->rank() != k)) {
    throw RankMismatch("source section shape");
  }
  const std::vector<double> xs = grid.xs();
  RowSampler sampler({l.c_tt, l.c_tx, l.c_xx, l.d_t, l.d_x, l.e}, grid);
  auto build = [&](double t, SystemRows& r) {
    const auto& raw = sampler.at(t);
    const std::size_t kk = static_cast<std::size_t>(k) * k;
    for (auto* v : {&r.k_tx, &r.k_xx, &r.k_t, &r.k_x, &r.k_e, &r.m}) v->assign(xs.size() * kk, cplx{});
    for (int i = 0; i < grid.nx; ++i) {
      const CMatrix m = leading_inverse(block(raw[0], i, k), "C_tt", t, xs[i]);
      put(r.m, i, k, m);
      put(r.k_tx, i, k, -2.0 * m * block(raw[1], i, k));
      put(r.k_xx, i, k, -m * block(raw[2], i, k));
      put(r.k_t, i, k, -m * block(raw[3], i, k));
      put(r.k_x, i, k, -m * block(raw[4], i, k));
      put(r.k_e, i, k, -m * block(raw[5], i, k));
    }
  };
  RowCache<SystemRows, decltype(build)> cache(l.dependence() != Dependence::general, build);

  const kernels::Stencil st{grid.nx, k, grid.dx, grid.periodic()};
  std::vector<cplx> u(len), v(len), us(len), vs(len), f(source ? len : 0);
  std::array<std::vector<cplx>, 4> ku, kv;
  for (int s = 0; s < 4; ++s) {
    ku[s].resize(len);
    kv[s].resize(len);
  }
  std::copy(u0.begin(), u0.end(), out.level(n0).begin());

  std::array<int, 2> dirs{};
  const int ndirs = sweep_dirs(sweep, dirs);
  for (int d = 0; d < ndirs; ++d) {
    const int dir = dirs[d];
    const double h = dir * grid.dt;
    std::copy(u0.begin(), u0.end(), u.begin());
    std::copy(v0.begin(), v0.end(), v.begin());
    auto rhs = [&](double t, std::span<const cplx> uu, std::span<const cplx> vv, int n, bool half, int s) {
      if (source) source_at(*source, n, dir, half, f);
      kernels::second_order_rhs(options.exec, st, cache.at(t).view(), uu, vv, f, ku[s], kv[s]);
      if (options.dissipation > 0.0) {
        // Damping in the direction of integration.
        kernels::add_dissipation(options.exec, st, dir * options.dissipation, uu, ku[s]);
        kernels::add_dissipation(options.exec, st, dir * options.dissipation, vv, kv[s]);
      }
    };
    for (int n = n0; dir > 0 ? n < grid.nt - 1 : n > 0; n += dir) {
      const double t = grid.t(n);
      rhs(t, u, v, n, false, 0);
      axpy(us, u, ku[0], 0.5 * h);
      axpy(vs, v, kv[0], 0.5 * h);
      rhs(t + 0.5 * h, us, vs, n, true, 1);
      axpy(us, u, ku[1], 0.5 * h);
      axpy(vs, v, kv[1], 0.5 * h);
      rhs(t + 0.5 * h, us, vs, n, true, 2);
      axpy(us, u, ku[2], h);
      axpy(vs, v, kv[2], h);
      rhs(grid.t(n + dir), us, vs, n + dir, false, 3);
      for (std::size_t j = 0; j < len; ++j) {
        u[j] += h / 6.0 * (ku[0][j] + 2.0 * ku[1][j] + 2.0 * ku[2][j] + ku[3][j]);
        v[j] += h / 6.0 * (kv[0][j] + 2.0 * kv[1][j] + 2.0 * kv[2][j] + kv[3][j]);
      }
      std::copy(u.begin(), u.end(), out.level(n + dir).begin());
    }
  }
}

void evolve_first_order(const FirstOrderOperator& p, const Grid1p1& grid, int n0, std::span<const cplx> phi0,
                        Sweep sweep, const EvolveOptions& options, GridSection& out) {
  const int k = p.rank;
  const std::size_t len = static_cast<std::size_t>(grid.nx) * k;
  if (phi0.size() != len) throw RankMismatch("initial row does not match the grid");
  if (out.nt() != grid.nt || out.nx() != grid.nx || out.rank() != k) throw RankMismatch("output section shape");
  const std::vector<double> xs = grid.xs();
  RowSampler sampler({p.a_t, p.a_x, p.coordinate_zeroth()}, grid);
  auto build = [&](double t, FirstRows& r) {
    const auto& raw = sampler.at(t);
    const std::size_t kk = static_cast<std::size_t>(k) * k;
    r.k1.assign(xs.size() * kk, cplx{});
    r.k0.assign(xs.size() * kk, cplx{});
    for (int i = 0; i < grid.nx; ++i) {
      const CMatrix m = leading_inverse(block(raw[0], i, k), "A_t", t, xs[i]);
      put(r.k1, i, k, -m * block(raw[1], i, k));
      put(r.k0, i, k, -m * block(raw[2], i, k));
    }
  };
  RowCache<FirstRows, decltype(build)> cache(p.dependence() != Dependence::general, build);

  const kernels::Stencil st{grid.nx, k, grid.dx, grid.periodic()};
  std::vector<cplx> u(len), us(len);
  std::array<std::vector<cplx>, 4> ku;
  for (auto& s : ku) s.resize(len);
  std::copy(phi0.begin(), phi0.end(), out.level(n0).begin());

  std::array<int, 2> dirs{};
  const int ndirs = sweep_dirs(sweep, dirs);
  for (int d = 0; d < ndirs; ++d) {
    const int dir = dirs[d];
    const double h = dir * grid.dt;
    std::copy(phi0.begin(), phi0.end(), u.begin());
    auto rhs = [&](double t, std::span<const cplx> uu, int s) {
      const FirstRows& r = cache.at(t);
      kernels::first_order_rhs(options.exec, st, r.k1, r.k0, uu, ku[s]);
      if (options.dissipation > 0.0) kernels::add_dissipation(options.exec, st, dir * options.dissipation, uu, ku[s]);
    };
    for (int n = n0; dir > 0 ? n < grid.nt - 1 : n > 0; n += dir) {
      const double t = grid.t(n);
      rhs(t, u, 0);
      axpy(us, u, ku[0], 0.5 * h);
      rhs(t + 0.5 * h, us, 1);
      axpy(us, u, ku[1], 0.5 * h);
      rhs(t + 0.5 * h, us, 2);
      axpy(us, u, ku[2], h);
      rhs(grid.t(n + dir), us, 3);
      for (std::size_t j = 0; j < len; ++j) {
        u[j] += h / 6.0 * (ku[0][j] + 2.0 * ku[1][j] + 2.0 * ku[2][j] + ku[3][j]);
      }
      std::copy(u.begin(), u.end(), out.level(n + dir).begin());
    }
  }
}

void check_cfl(const DiagonalMetric& metric, const Grid1p1& grid) {
  // RK4 with centered differences is stable up to about cfl 1.4 for these systems.
  if (!(grid.cfl > 0.0) || grid.cfl > 1.0) {
    throw NumericalError("CFL violation: cfl must lie in (0, 1], got " + std::to_string(grid.cfl));
  }
  const int stride = metric.is_static() ? grid.nt : std::max(1, (grid.nt - 1) / 32);
  double c_max = 0.0;
  for (int n = 0; n < grid.nt; n += stride) {
    for (int i = 0; i < grid.nx; ++i) c_max = std::max(c_max, metric.light_speed(grid.t(n), grid.x(i)));
  }
  if (grid.dt * c_max > grid.cfl * grid.dx * (1.0 + 1e-9)) {
    throw NumericalError("CFL violation: dt=" + std::to_string(grid.dt) + " exceeds cfl*dx/c_max=" +
                         std::to_string(grid.cfl * grid.dx / c_max));
  }
}

geometry::CausalShadow shadow_of(const DiagonalMetric& metric, const Grid1p1& grid,
                                 const geometry::IntervalSet& seed, double t0) {
  geometry::CausalShadow total;
  bool first = true;
  for (const geometry::Interval& part : seed.parts()) {
    geometry::CausalShadow s =
        geometry::causal_shadow_between(metric, part, t0, grid.t_start, grid.t_end(), grid.dt);
    if (first) {
      total = std::move(s);
      first = false;
      continue;
    }
    total.truncated = total.truncated || s.truncated;
    for (std::size_t j = 0; j < total.sets.size(); ++j) {
      std::vector<geometry::Interval> parts = total.sets[j].parts();
      parts.insert(parts.end(), s.sets[j].parts().begin(), s.sets[j].parts().end());
      total.sets[j] = geometry::IntervalSet(std::move(parts));
    }
  }
  if (first) {
    // Empty seed: an empty shadow on every level.
    total.step = grid.dt;
    for (int n = 0; n < grid.nt; ++n) {
      total.times.push_back(grid.t(n));
      total.sets.emplace_back();
    }
  }
  return total;
}

void check_causal_margin(const DiagonalMetric& metric, const Grid1p1& grid, const geometry::IntervalSet& support,
                         double t0) {
  if (grid.periodic()) return;
  const geometry::CausalShadow s = shadow_of(metric, grid, support, t0);
  const double margin = 8.0 * grid.dx;
  for (std::size_t j = 0; j < s.sets.size(); ++j) {
    if (s.sets[j].empty()) continue;
    const geometry::Interval h = s.sets[j].hull();
    if (s.truncated || h.lo < grid.chart.x_min + margin || h.hi > grid.chart.x_max - margin) {
      throw DomainError("causal margin violated: J(supp) reaches [" + std::to_string(h.lo) + ", " +
                        std::to_string(h.hi) + "] at t=" + std::to_string(s.times[j]) +
                        ", closer than 8 nodes to the chart boundary");
    }
  }
}

}  // namespace prehyp::detail
