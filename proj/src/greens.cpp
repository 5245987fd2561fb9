#include "prehyp/greens.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "evolve.hpp"

namespace prehyp::greens {

namespace {

constexpr int kTemporalMargin = 8;
constexpr int kShadowLevels = 4;

// Allowed support of a Green's operator output, level by level (un-inflated).
struct BoxShadow {
  int first = 0;  // retarded: levels before `first` must vanish
  int last = 0;   // advanced: levels after `last` must vanish
  geometry::CausalShadow shadow;
};

BoxShadow box_shadow(const DiagonalMetric& metric, const Box& box, Direction direction, const Grid1p1& grid) {
  BoxShadow s;
  s.first = 0;
  s.last = grid.nt - 1;
  if (direction == Direction::retarded) {
    const int n = static_cast<int>(std::floor((box.t_lo - grid.t_start) / grid.dt + 1e-9));
    s.first = std::clamp(n - kShadowLevels, 0, grid.nt - 1);
    s.shadow = geometry::causal_shadow_between(metric, box.x, grid.t(s.first), grid.t(s.first), grid.t_end(),
                                               grid.dt);
  } else {
    const int n = static_cast<int>(std::ceil((box.t_hi - grid.t_start) / grid.dt - 1e-9));
    s.last = std::clamp(n + kShadowLevels, 0, grid.nt - 1);
    s.shadow = geometry::causal_shadow_between(metric, box.x, grid.t(s.last), grid.t_start, grid.t(s.last), grid.dt);
  }
  return s;
}

bool level_allowed(const BoxShadow& s, int n) { return n >= s.first && n <= s.last; }

double relative(double num, double den) { return den > 0.0 ? num / den : num; }

bundle_ops::SecondOrderOperator checked_composition(const FirstOrderOperator& p, const FirstOrderOperator& q,
                                                    const DiagonalMetric& metric, const Grid1p1& grid) {
  const bundle_ops::DerivativeSteps steps = bundle_ops::DerivativeSteps::of(grid);
  const std::vector<geometry::SpacetimePoint> points = bundle_ops::default_sample_points(grid);
  const bundle_ops::PairReport pair =
      bundle_ops::is_complementary_pair(p, q, metric, points, bundle_ops::default_tolerance(p, q, points), steps);
  if (!pair.pass) {
    throw NumericalError("(P, Q) is not a complementary pair (max deviation " +
                         std::to_string(std::max(pair.pq.max_deviation, pair.qp.max_deviation)) + ")");
  }
  return bundle_ops::compose(p, q, steps);
}

}  // namespace

TestSection TestSection::make(const std::vector<expr::Expr>& components, const SmoothWindow& time_window,
                              const SmoothWindow& space_window, const Grid1p1& grid) {
  const int k = static_cast<int>(components.size());
  if (k < 1 || k > kMaxRank) throw RankMismatch("test section needs 1..4 components");
  time_window.validate();
  space_window.validate();
  TestSection s;
  s.values = GridSection(grid.nt, grid.nx, k);
  const geometry::Interval ts = time_window.support();
  s.box = {ts.lo, ts.hi, space_window.support()};
  for (int n = 0; n < grid.nt; ++n) {
    const double t = grid.t(n);
    const double wt = time_window(t);
    if (wt == 0.0) continue;
    for (int i = 0; i < grid.nx; ++i) {
      const double x = grid.x(i);
      const double w = wt * space_window(x);
      if (w == 0.0) continue;
      for (int c = 0; c < k; ++c) s.values(n, i, c) = w * components[c].eval(t, x);
    }
  }
  return s;
}

TestSection TestSection::wrap(GridSection values, Box box, const Grid1p1& grid) {
  if (values.nt() != grid.nt || values.nx() != grid.nx) throw RankMismatch("test section is not on this grid");
  for (int n = 0; n < grid.nt; ++n) {
    const double t = grid.t(n);
    const bool in_t = t >= box.t_lo && t <= box.t_hi;
    for (int i = 0; i < grid.nx; ++i) {
      if (in_t && box.x.contains(grid.x(i))) continue;
      for (int c = 0; c < values.rank(); ++c) {
        if (std::abs(values(n, i, c)) > 1e-14) {
          throw DomainError("test section is nonzero outside its declared box at t=" + std::to_string(t) +
                            ", x=" + std::to_string(grid.x(i)));
        }
      }
    }
  }
  return TestSection{std::move(values), box};
}

GridSection solve_driven(const SecondOrderOperator& l, const DiagonalMetric& metric, const TestSection& source,
                         Direction direction, const Grid1p1& grid, const cauchy::SolveOptions& options) {
  const GridSection& f = source.values;
  if (f.rank() != l.rank) throw RankMismatch("source rank differs from operator rank");
  if (f.nt() != grid.nt || f.nx() != grid.nx) throw RankMismatch("source is not on this grid");
  detail::check_cfl(metric, grid);
  const std::vector<geometry::SpacetimePoint> points = bundle_ops::default_sample_points(grid);
  const bundle_ops::HyperbolicityReport hyp = bundle_ops::is_normally_hyperbolic(l, metric, points, 1e-8);
  if (!hyp.pass) throw NumericalError("driven operator is not normally hyperbolic");

  const double eps = 1e-9 * grid.dt;
  if (direction == Direction::retarded && source.box.t_lo < grid.t(kTemporalMargin) - eps) {
    throw DomainError("source box touches temporal boundary margin: t_lo=" + std::to_string(source.box.t_lo) +
                      " is within 8 levels of the first level");
  }
  if (direction == Direction::advanced && source.box.t_hi > grid.t(grid.nt - 1 - kTemporalMargin) + eps) {
    throw DomainError("source box touches temporal boundary margin: t_hi=" + std::to_string(source.box.t_hi) +
                      " is within 8 levels of the last level");
  }
  if (options.check_margin && !grid.periodic()) {
    const BoxShadow s = box_shadow(metric, source.box, direction, grid);
    const double margin = 8.0 * grid.dx;
    for (const geometry::IntervalSet& set : s.shadow.sets) {
      const geometry::Interval h = set.hull();
      if (s.shadow.truncated || h.lo < grid.chart.x_min + margin || h.hi > grid.chart.x_max - margin) {
        throw DomainError("causal margin violated: the shadow of the source box comes within 8 nodes of the "
                          "chart boundary");
      }
    }
  }

  GridSection out(grid.nt, grid.nx, l.rank);
  const std::vector<cplx> zero(static_cast<std::size_t>(grid.nx) * l.rank, cplx{});
  const bool ret = direction == Direction::retarded;
  detail::evolve_second_order(l, grid, ret ? 0 : grid.nt - 1, zero, zero, &f,
                              ret ? detail::Sweep::forward : detail::Sweep::backward,
                              {options.dissipation, options.exec}, out);
  return out;
}

GridSection greens_apply(const FirstOrderOperator& p, const FirstOrderOperator& q, const DiagonalMetric& metric,
                         const TestSection& phi, Direction direction, const Grid1p1& grid,
                         const cauchy::SolveOptions& options) {
  const SecondOrderOperator l = checked_composition(p, q, metric, grid);
  const GridSection u = solve_driven(l, metric, phi, direction, grid, options);
  return bundle_ops::apply(q, u, grid, options.exec);
}

double greens_support_leak(const DiagonalMetric& metric, const TestSection& phi, const GridSection& s,
                           Direction direction, const Grid1p1& grid) {
  const BoxShadow shadow = box_shadow(metric, phi.box, direction, grid);
  double leak = 0.0;
  for (int n = 0; n < grid.nt; ++n) {
    geometry::IntervalSet allowed;
    if (level_allowed(shadow, n)) allowed = shadow.shadow.at(grid.t(n)).inflated(4.0 * grid.dx, grid.chart);
    for (int i = 0; i < grid.nx; ++i) {
      if (allowed.contains(grid.x(i))) continue;
      for (int c = 0; c < s.rank(); ++c) leak = std::max(leak, std::abs(s(n, i, c)));
    }
  }
  return relative(leak, phi.values.max_abs());
}

PairingReport adjoint_pairing_check(const FirstOrderOperator& p, const FirstOrderOperator& q,
                                    const DiagonalMetric& metric, const TestSection& psi, const TestSection& f,
                                    Direction direction, const Grid1p1& grid, const cauchy::SolveOptions& options) {
  const bundle_ops::DerivativeSteps steps = bundle_ops::DerivativeSteps::of(grid);
  const FirstOrderOperator p_star = bundle_ops::formal_adjoint(p, metric, steps);
  const FirstOrderOperator q_star = bundle_ops::formal_adjoint(q, metric, steps);
  PairingReport r;
  const GridSection s_f = greens_apply(p, q, metric, f, direction, grid, options);
  const GridSection s_psi = greens_apply(p_star, q_star, metric, psi, opposite(direction), grid, options);
  const GridSection s_psi_same = greens_apply(p_star, q_star, metric, psi, direction, grid, options);
  r.rhs = bundle_ops::pairing(psi.values, s_f, metric, grid);
  r.lhs = bundle_ops::pairing(s_psi, f.values, metric, grid);
  r.control_lhs = bundle_ops::pairing(s_psi_same, f.values, metric, grid);
  r.defect = relative(std::abs(r.lhs - r.rhs), std::abs(r.rhs));
  r.control_defect = relative(std::abs(r.control_lhs - r.rhs), std::abs(r.rhs));
  return r;
}

double uniqueness_probe(const FirstOrderOperator& p, const FirstOrderOperator& q, const FirstOrderOperator& q_alt,
                        const DiagonalMetric& metric, const TestSection& phi, Direction direction,
                        const Grid1p1& grid, const cauchy::SolveOptions& options) {
  const GridSection a = greens_apply(p, q, metric, phi, direction, grid, options);
  const GridSection b = greens_apply(p, q_alt, metric, phi, direction, grid, options);
  return (a - b).max_abs();
}

GreensReport verify(const FirstOrderOperator& p, const FirstOrderOperator& q, const DiagonalMetric& metric,
                    const TestSection& phi, const TestSection& psi, const TestSection& f, const Grid1p1& grid,
                    const cauchy::SolveOptions& options) {
  GreensReport r;
  r.negative_control_defect = std::numeric_limits<double>::infinity();
  const double phi_norm = l2_norm(phi.values, grid);
  const double psi_norm = l2_norm(psi.values, grid);
  // The discrete P widens the support by one stencil point in t and x.
  const Box widened{psi.box.t_lo - grid.dt, psi.box.t_hi + grid.dt, {psi.box.x.lo - grid.dx, psi.box.x.hi + grid.dx}};
  const TestSection p_psi = TestSection::wrap(bundle_ops::apply(p, psi.values, grid, options.exec), widened, grid);
  for (Direction d : {Direction::retarded, Direction::advanced}) {
    const GridSection s_phi = greens_apply(p, q, metric, phi, d, grid, options);
    const GridSection back = bundle_ops::apply(p, s_phi, grid, options.exec) - phi.values;
    r.identity_i_residual = std::max(r.identity_i_residual, relative(l2_norm(back, grid), phi_norm));
    r.support_leak = std::max(r.support_leak, greens_support_leak(metric, phi, s_phi, d, grid));

    const GridSection round = greens_apply(p, q, metric, p_psi, d, grid, options) - psi.values;
    r.identity_ii_residual = std::max(r.identity_ii_residual, relative(l2_norm(round, grid), psi_norm));

    // The dual section has to sit in the direction in which S propagates f.
    const bool psi_later = psi.box.t_lo >= f.box.t_hi;
    const bool swap = (d == Direction::retarded) != psi_later;
    const PairingReport pr =
        swap ? adjoint_pairing_check(p, q, metric, f, psi, d, grid, options)
             : adjoint_pairing_check(p, q, metric, psi, f, d, grid, options);
    r.pairing_defect = std::max(r.pairing_defect, pr.defect);
    r.negative_control_defect = std::min(r.negative_control_defect, pr.control_defect);
  }
  return r;
}

}  // namespace prehyp::greens
