#pragma once

#include "prehyp/bundle_ops.hpp"
#include "prehyp/geometry.hpp"
#include "prehyp/grid.hpp"

/// Cauchy problems for complementary pairs, solved on a uniform grid.
namespace prehyp::cauchy {

using bundle_ops::FirstOrderOperator;
using bundle_ops::SecondOrderOperator;
using geometry::CauchyLine;
using geometry::DiagonalMetric;
using geometry::SpacetimePoint;

/// Kreiss-Oliger coefficient used when dissipation is switched on.
inline constexpr double kDefaultDissipation = 0.02;

struct SolveOptions {
  double dissipation = 0.0;  // 0 disables the fourth-difference term
  kernels::Exec exec = kernels::Exec::parallel;
  bool check_margin = true;  // reject data whose causal shadow nears a line boundary
};

struct SolveReport {
  double residual_l2 = 0.0;    // ||P phi||_L2 over the grid
  double residual_linf = 0.0;  // max |P phi|
  double support_leak = 0.0;   // max |phi| outside the 4dx-inflated shadow, over ||phi0||_inf
  double trace_defect = 0.0;   // max |P phi| on the initial hypersurface
  double seconds = 0.0;
};

struct Solution {
  GridSection phi;
  CauchyData psi0;
  SolveReport report;
};

/// Normal derivative of the solution of P phi = 0 on the hypersurface of phi0, in the
/// orthonormal frame (1/alpha d_t, 1/beta d_x). Throws HyperbolicityViolation when
/// sigma_P of the unit conormal is singular. The declared support equals that of phi0.
CauchyData normal_derivative_data(const FirstOrderOperator& p, const DiagonalMetric& metric,
                                  const CauchyData& phi0, const Grid1p1& grid);

/// L phi = 0 with phi = phi0 and d_t phi = alpha psi0 on the hypersurface of phi0,
/// evolved in both time directions over the grid.
GridSection solve_second_order(const SecondOrderOperator& l, const DiagonalMetric& metric, const CauchyData& phi0,
                               const CauchyData& psi0, const Grid1p1& grid, const SolveOptions& options = {});

/// P phi = 0 with phi = phi0, through the second-order problem for Q∘P.
Solution solve_cauchy(const FirstOrderOperator& p, const FirstOrderOperator& q, const DiagonalMetric& metric,
                      const CauchyData& phi0, const Grid1p1& grid, const SolveOptions& options = {});

/// P phi = 0 by direct first-order time stepping (independent check of solve_cauchy).
GridSection solve_first_order_direct(const FirstOrderOperator& p, const DiagonalMetric& metric,
                                     const CauchyData& phi0, const Grid1p1& grid, const SolveOptions& options = {});

/// Data of phi on another constant-t level. The declared support is the causal shadow of
/// `origin`'s support at that level.
CauchyData restrict(const GridSection& phi, const Grid1p1& grid, const DiagonalMetric& metric,
                    const CauchyData& origin, CauchyLine sigma_prime);

/// Residual norms, trace defect and support leak of an already computed solution.
SolveReport measure(const FirstOrderOperator& p, const DiagonalMetric& metric, const CauchyData& phi0,
                    const GridSection& phi, const Grid1p1& grid, kernels::Exec exec = kernels::Exec::parallel);

/// Largest |phi| outside the 4dx-inflated causal shadow of supp(phi0), relative to ||phi0||_inf.
double support_leak(const DiagonalMetric& metric, const CauchyData& phi0, const GridSection& phi,
                    const Grid1p1& grid);

struct RoundTripReport {
  double round_trip_error = 0.0;  // L-infinity distance between phi0 and its round trip
  CauchyData on_sigma_prime;
  CauchyData back_on_sigma;
};

/// Solve from Sigma, restrict to Sigma', solve again from there, restrict back.
RoundTripReport compatibility_round_trip(const FirstOrderOperator& p, const FirstOrderOperator& q,
                                         const DiagonalMetric& metric, const CauchyData& phi0,
                                         CauchyLine sigma_prime, const Grid1p1& grid,
                                         const SolveOptions& options = {});

/// Max |a - b| over two data on the same nodes.
double linf_distance(const CauchyData& a, const CauchyData& b);

}  // namespace prehyp::cauchy
