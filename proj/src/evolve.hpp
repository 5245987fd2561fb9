#pragma once

// Method-of-lines time stepping shared by the Cauchy and Green's solvers.

#include <span>

#include "prehyp/bundle_ops.hpp"
#include "prehyp/grid.hpp"
#include "prehyp/kernels.hpp"

namespace prehyp::detail {

enum class Sweep { forward, backward, both };

struct EvolveOptions {
  double dissipation = 0.0;
  kernels::Exec exec = kernels::Exec::parallel;
};

/// Classical RK4 for L u = f written as (u, v = d_t u). Level n0 of `out` receives u0;
/// the sweep fills the levels after and/or before it. `source` (may be null) lives on
/// the same grid and is interpolated to half steps with cubic weights.
void evolve_second_order(const bundle_ops::SecondOrderOperator& l, const Grid1p1& grid, int n0,
                         std::span<const cplx> u0, std::span<const cplx> v0, const GridSection* source,
                         Sweep sweep, const EvolveOptions& options, GridSection& out);

/// Classical RK4 for d_t phi = -(A_t)^-1 (A_x d_x phi + b phi).
void evolve_first_order(const bundle_ops::FirstOrderOperator& p, const Grid1p1& grid, int n0,
                        std::span<const cplx> phi0, Sweep sweep, const EvolveOptions& options, GridSection& out);

/// Throws NumericalError when dt exceeds cfl*dx/speed anywhere on the grid for the
/// metric light speed, or when cfl is outside the stable range of the scheme.
void check_cfl(const geometry::DiagonalMetric& metric, const Grid1p1& grid);

/// Throws DomainError("causal margin violated ...") when J(support) comes within
/// 8 nodes of a line boundary during [t_start, t_end] of the grid.
void check_causal_margin(const geometry::DiagonalMetric& metric, const Grid1p1& grid,
                         const geometry::IntervalSet& support, double t0);

/// Union over the parts of `seed` of J(part) across the whole grid time span.
geometry::CausalShadow shadow_of(const geometry::DiagonalMetric& metric, const Grid1p1& grid,
                                 const geometry::IntervalSet& seed, double t0);

}  // namespace prehyp::detail
