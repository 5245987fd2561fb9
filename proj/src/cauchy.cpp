#include "prehyp/cauchy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "evolve.hpp"

namespace prehyp::cauchy {

namespace {

void require_data_on_grid(const CauchyData& d, const Grid1p1& grid, int rank) {
  if (d.rank != rank) {
    throw RankMismatch("Cauchy data has rank " + std::to_string(d.rank) + ", operator rank is " +
                       std::to_string(rank));
  }
  if (d.nx() != grid.nx) throw RankMismatch("Cauchy data is not sampled on this grid");
  grid.level_of(d.sigma.t0);
}

// Fourth-order centered x derivative of node-major k-vectors (zero ghosts on a line).
std::vector<cplx> x_derivative(const std::vector<cplx>& v, int k, const Grid1p1& grid) {
  const int nx = grid.nx;
  std::vector<cplx> out(v.size());
  auto at = [&](int i, int c) -> cplx {
    if (grid.periodic()) {
      i = ((i % nx) + nx) % nx;
    } else if (i < 0 || i >= nx) {
      return 0.0;
    }
    return v[static_cast<std::size_t>(i) * k + c];
  };
  const double w = 1.0 / (12.0 * grid.dx);
  for (int i = 0; i < nx; ++i) {
    for (int c = 0; c < k; ++c) {
      out[static_cast<std::size_t>(i) * k + c] =
          w * (at(i - 2, c) - 8.0 * at(i - 1, c) + 8.0 * at(i + 1, c) - at(i + 2, c));
    }
  }
  return out;
}

CVector node_vector(const std::vector<cplx>& v, int i, int k) {
  CVector out(k);
  for (int c = 0; c < k; ++c) out(c) = v[static_cast<std::size_t>(i) * k + c];
  return out;
}

}  // namespace

CauchyData normal_derivative_data(const FirstOrderOperator& p, const DiagonalMetric& metric, const CauchyData& phi0,
                                  const Grid1p1& grid) {
  require_data_on_grid(phi0, grid, p.rank);
  const int k = p.rank;
  const double t0 = phi0.sigma.t0;
  const std::vector<cplx> dphi = x_derivative(phi0.values, k, grid);
  CauchyData psi;
  psi.sigma = phi0.sigma;
  psi.rank = k;
  psi.support = phi0.support;
  psi.values.assign(phi0.values.size(), cplx{});
  for (int i = 0; i < grid.nx; ++i) {
    const double x = grid.x(i);
    const double alpha = metric.alpha(t0, x);
    // sigma_P(n) with n the unit conormal alpha dt; sigma_P(e2) = beta A_x for e2 = beta dx.
    const bundle_ops::InvertibilityReport inv = bundle_ops::symbol_invertibility(p, {t0, x}, {alpha, 0.0});
    if (!inv.invertible) {
      throw HyperbolicityViolation("sigma_P of the unit normal is singular at (t=" + std::to_string(t0) +
                                   ", x=" + std::to_string(x) + "): P is not prenormally hyperbolic");
    }
    if (!phi0.support.contains(x)) continue;
    const CVector f = node_vector(phi0.values, i, k);
    CVector nabla_x = node_vector(dphi, i, k);
    if (p.omega_x) nabla_x += (*p.omega_x)(t0, x) * f;
    const CVector rhs = p.a_x(t0, x) * nabla_x + p.b(t0, x) * f;
    const CMatrix sigma_n = alpha * p.a_t(t0, x);
    const CVector out = -sigma_n.partialPivLu().solve(rhs);
    for (int c = 0; c < k; ++c) psi.values[static_cast<std::size_t>(i) * k + c] = out(c);
  }
  return psi;
}

GridSection solve_second_order(const SecondOrderOperator& l, const DiagonalMetric& metric, const CauchyData& phi0,
                               const CauchyData& psi0, const Grid1p1& grid, const SolveOptions& options) {
  require_data_on_grid(phi0, grid, l.rank);
  require_data_on_grid(psi0, grid, l.rank);
  if (psi0.sigma.t0 != phi0.sigma.t0) throw DomainError("phi0 and psi0 live on different hypersurfaces");
  detail::check_cfl(metric, grid);
  const std::vector<SpacetimePoint> points = bundle_ops::default_sample_points(grid);
  const bundle_ops::HyperbolicityReport hyp = bundle_ops::is_normally_hyperbolic(l, metric, points, 1e-8);
  if (!hyp.pass) {
    throw NumericalError("second-order operator is not normally hyperbolic (deviation " +
                         std::to_string(hyp.max_deviation) + ")");
  }
  if (options.check_margin) detail::check_causal_margin(metric, grid, phi0.support, phi0.sigma.t0);

  const int n0 = grid.level_of(phi0.sigma.t0);
  const double t0 = grid.t(n0);
  std::vector<cplx> v0(psi0.values.size());
  for (int i = 0; i < grid.nx; ++i) {
    const double alpha = metric.alpha(t0, grid.x(i));
    for (int c = 0; c < l.rank; ++c) {
      const std::size_t j = static_cast<std::size_t>(i) * l.rank + c;
      v0[j] = alpha * psi0.values[j];
    }
  }
  GridSection out(grid.nt, grid.nx, l.rank);
  detail::evolve_second_order(l, grid, n0, phi0.values, v0, nullptr, detail::Sweep::both,
                              {options.dissipation, options.exec}, out);
  return out;
}

GridSection solve_first_order_direct(const FirstOrderOperator& p, const DiagonalMetric& metric,
                                     const CauchyData& phi0, const Grid1p1& grid, const SolveOptions& options) {
  require_data_on_grid(phi0, grid, p.rank);
  detail::check_cfl(metric, grid);
  if (options.check_margin) detail::check_causal_margin(metric, grid, phi0.support, phi0.sigma.t0);
  const int n0 = grid.level_of(phi0.sigma.t0);
  GridSection out(grid.nt, grid.nx, p.rank);
  detail::evolve_first_order(p, grid, n0, phi0.values, detail::Sweep::both, {options.dissipation, options.exec},
                             out);
  return out;
}

double support_leak(const DiagonalMetric& metric, const CauchyData& phi0, const GridSection& phi,
                    const Grid1p1& grid) {
  const geometry::CausalShadow shadow = detail::shadow_of(metric, grid, phi0.support, phi0.sigma.t0);
  double leak = 0.0;
  for (int n = 0; n < grid.nt; ++n) {
    const geometry::IntervalSet allowed = shadow.at(grid.t(n)).inflated(4.0 * grid.dx, grid.chart);
    for (int i = 0; i < grid.nx; ++i) {
      if (allowed.contains(grid.x(i))) continue;
      for (int c = 0; c < phi.rank(); ++c) leak = std::max(leak, std::abs(phi(n, i, c)));
    }
  }
  const double scale = phi0.max_abs();
  return scale > 0.0 ? leak / scale : leak;
}

SolveReport measure(const FirstOrderOperator& p, const DiagonalMetric& metric, const CauchyData& phi0,
                    const GridSection& phi, const Grid1p1& grid, kernels::Exec exec) {
  SolveReport r;
  const GridSection res = bundle_ops::apply(p, phi, grid, exec);
  r.residual_l2 = l2_norm(res, grid);
  r.residual_linf = res.max_abs();
  const int n0 = grid.level_of(phi0.sigma.t0);
  for (const cplx& v : res.level(n0)) r.trace_defect = std::max(r.trace_defect, std::abs(v));
  r.support_leak = support_leak(metric, phi0, phi, grid);
  return r;
}

Solution solve_cauchy(const FirstOrderOperator& p, const FirstOrderOperator& q, const DiagonalMetric& metric,
                      const CauchyData& phi0, const Grid1p1& grid, const SolveOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const bundle_ops::DerivativeSteps steps = bundle_ops::DerivativeSteps::of(grid);
  const std::vector<SpacetimePoint> points = bundle_ops::default_sample_points(grid);
  const bundle_ops::PairReport pair =
      bundle_ops::is_complementary_pair(p, q, metric, points, bundle_ops::default_tolerance(p, q, points), steps);
  if (!pair.pass) {
    throw NumericalError("(P, Q) is not a complementary pair (max deviation " +
                         std::to_string(std::max(pair.pq.max_deviation, pair.qp.max_deviation)) + ")");
  }
  Solution sol;
  sol.psi0 = normal_derivative_data(p, metric, phi0, grid);
  // Frame data to the coordinate time derivative: d_t phi = alpha psi0 - omega_t phi0.
  CauchyData psi_coord = sol.psi0;
  if (p.omega_t && !p.omega_t->is_zero()) {
    const double t0 = phi0.sigma.t0;
    for (int i = 0; i < grid.nx; ++i) {
      const double x = grid.x(i);
      const CVector w = p.omega_t->operator()(t0, x) * node_vector(phi0.values, i, p.rank) / metric.alpha(t0, x);
      for (int c = 0; c < p.rank; ++c) psi_coord.values[static_cast<std::size_t>(i) * p.rank + c] -= w(c);
    }
  }
  sol.phi = solve_second_order(bundle_ops::compose(q, p, steps), metric, phi0, psi_coord, grid, options);
  sol.report = measure(p, metric, phi0, sol.phi, grid, options.exec);
  sol.report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

CauchyData restrict(const GridSection& phi, const Grid1p1& grid, const DiagonalMetric& metric,
                    const CauchyData& origin, CauchyLine sigma_prime) {
  metric.require_in_chart({sigma_prime.t0, grid.chart.x_min});
  const int n = grid.level_of(sigma_prime.t0);
  CauchyData d;
  d.sigma = {grid.t(n)};
  d.rank = phi.rank();
  const auto row = phi.level(n);
  d.values.assign(row.begin(), row.end());
  d.support = detail::shadow_of(metric, grid, origin.support, origin.sigma.t0).at(grid.t(n));
  return d;
}

double linf_distance(const CauchyData& a, const CauchyData& b) {
  if (a.values.size() != b.values.size()) throw RankMismatch("Cauchy data of different shape");
  double m = 0.0;
  for (std::size_t j = 0; j < a.values.size(); ++j) m = std::max(m, std::abs(a.values[j] - b.values[j]));
  return m;
}

RoundTripReport compatibility_round_trip(const FirstOrderOperator& p, const FirstOrderOperator& q,
                                         const DiagonalMetric& metric, const CauchyData& phi0,
                                         CauchyLine sigma_prime, const Grid1p1& grid, const SolveOptions& options) {
  RoundTripReport r;
  const Solution there = solve_cauchy(p, q, metric, phi0, grid, options);
  r.on_sigma_prime = restrict(there.phi, grid, metric, phi0, sigma_prime);
  const Solution back = solve_cauchy(p, q, metric, r.on_sigma_prime, grid, options);
  r.back_on_sigma = restrict(back.phi, grid, metric, r.on_sigma_prime, phi0.sigma);
  r.round_trip_error = linf_distance(r.back_on_sigma, phi0);
  return r;
}

}  // namespace prehyp::cauchy
