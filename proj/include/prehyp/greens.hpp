#pragma once

#include "prehyp/bundle_ops.hpp"
#include "prehyp/cauchy.hpp"
#include "prehyp/grid.hpp"

/// Advanced and retarded Green's operators realized as driven solves on test sections.
namespace prehyp::greens {

using bundle_ops::FirstOrderOperator;
using bundle_ops::SecondOrderOperator;
using geometry::DiagonalMetric;

enum class Direction { retarded, advanced };

inline Direction opposite(Direction d) noexcept {
  return d == Direction::retarded ? Direction::advanced : Direction::retarded;
}

/// Closed (t, x) box holding the support of a test section.
struct Box {
  double t_lo = 0.0;
  double t_hi = 0.0;
  geometry::Interval x;
};

/// A compactly supported section on the grid together with its support box.
struct TestSection {
  GridSection values;
  Box box;

  /// components(t, x) * time_window(t) * space_window(x); the box is the product of
  /// the two window supports.
  static TestSection make(const std::vector<expr::Expr>& components, const SmoothWindow& time_window,
                          const SmoothWindow& space_window, const Grid1p1& grid);
  /// Wraps an arbitrary section; throws DomainError if it exceeds 1e-14 outside the box.
  static TestSection wrap(GridSection values, Box box, const Grid1p1& grid);
};

/// L u = source with zero data at the first level (retarded, stepping forward) or at the
/// last level (advanced, stepping backward). The source box must keep 8 levels away from
/// that level and its causal shadow 8 nodes away from a line boundary.
GridSection solve_driven(const SecondOrderOperator& l, const DiagonalMetric& metric, const TestSection& source,
                         Direction direction, const Grid1p1& grid, const cauchy::SolveOptions& options = {});

/// S phi = Q G phi, where G is the Green's operator of P∘Q in the given direction.
GridSection greens_apply(const FirstOrderOperator& p, const FirstOrderOperator& q, const DiagonalMetric& metric,
                         const TestSection& phi, Direction direction, const Grid1p1& grid,
                         const cauchy::SolveOptions& options = {});

/// Largest |section| outside J(box) (future for retarded, past for advanced), with the
/// shadow inflated by 4dx in space and 4dt in time, relative to ||phi||_inf.
double greens_support_leak(const DiagonalMetric& metric, const TestSection& phi, const GridSection& s,
                           Direction direction, const Grid1p1& grid);

struct PairingReport {
  cplx lhs;                 // <S'(opposite) psi, f>
  cplx rhs;                 // <psi, S f>
  double defect = 0.0;      // |lhs - rhs| / |rhs|
  cplx control_lhs;         // <S'(same direction) psi, f>
  double control_defect = 0.0;
};

/// Compares <S'∓ psi, f> with <psi, S± f>, where S' belongs to the formal adjoint pair
/// (P*, Q*). The negative control uses S'± on the left instead.
PairingReport adjoint_pairing_check(const FirstOrderOperator& p, const FirstOrderOperator& q,
                                    const DiagonalMetric& metric, const TestSection& psi, const TestSection& f,
                                    Direction direction, const Grid1p1& grid,
                                    const cauchy::SolveOptions& options = {});

/// max |S phi - S_alt phi| for two complementary partners of the same P.
double uniqueness_probe(const FirstOrderOperator& p, const FirstOrderOperator& q, const FirstOrderOperator& q_alt,
                        const DiagonalMetric& metric, const TestSection& phi, Direction direction,
                        const Grid1p1& grid, const cauchy::SolveOptions& options = {});

struct GreensReport {
  double identity_i_residual = 0.0;   // ||P S phi - phi||_L2 / ||phi||_L2, worst direction
  double identity_ii_residual = 0.0;  // ||S P psi - psi||_L2 / ||psi||_L2, worst direction
  double support_leak = 0.0;          // worst direction
  double pairing_defect = 0.0;        // worst direction
  double negative_control_defect = 0.0;  // smallest over directions
};

/// Runs identities (i), (ii), the support check and the adjoint pairing in both directions.
/// `phi` drives identity (i) and the support check, `psi` identity (ii); the pairing uses
/// `psi` on the dual side against `f`.
GreensReport verify(const FirstOrderOperator& p, const FirstOrderOperator& q, const DiagonalMetric& metric,
                    const TestSection& phi, const TestSection& psi, const TestSection& f, const Grid1p1& grid,
                    const cauchy::SolveOptions& options = {});

}  // namespace prehyp::greens
