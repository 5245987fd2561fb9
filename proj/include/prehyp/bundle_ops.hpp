#pragma once

#include <optional>
#include <vector>

#include "prehyp/field.hpp"
#include "prehyp/geometry.hpp"
#include "prehyp/grid.hpp"
#include "prehyp/kernels.hpp"

/// Matrix-coefficient differential operators on the trivial rank-k bundle over a 1+1 chart.
namespace prehyp::bundle_ops {

using geometry::Covector;
using geometry::DiagonalMetric;
using geometry::SpacetimePoint;

/// P phi = A_t nabla_t phi + A_x nabla_x phi + B phi, with nabla = d + omega.
struct FirstOrderOperator {
  int rank = 1;
  MatrixField a_t = MatrixField::zero(1);
  MatrixField a_x = MatrixField::zero(1);
  MatrixField b = MatrixField::zero(1);
  std::optional<MatrixField> omega_t;
  std::optional<MatrixField> omega_x;

  FirstOrderOperator() = default;
  FirstOrderOperator(MatrixField a_t, MatrixField a_x, MatrixField b);

  bool has_connection() const noexcept;
  /// Zeroth-order coefficient in coordinate form: B + A_t omega_t + A_x omega_x.
  MatrixField coordinate_zeroth() const;
  Dependence dependence() const noexcept;
};

/// L phi = C_tt d_tt phi + 2 C_tx d_tx phi + C_xx d_xx phi + D_t d_t phi + D_x d_x phi + E phi.
struct SecondOrderOperator {
  int rank = 1;
  MatrixField c_tt = MatrixField::zero(1);
  MatrixField c_tx = MatrixField::zero(1);
  MatrixField c_xx = MatrixField::zero(1);
  MatrixField d_t = MatrixField::zero(1);
  MatrixField d_x = MatrixField::zero(1);
  MatrixField e = MatrixField::zero(1);

  Dependence dependence() const noexcept;
};

/// Finite-difference steps used for coefficient derivatives (grid resolution).
struct DerivativeSteps {
  double dt = 1e-3;
  double dx = 1e-3;
  static DerivativeSteps of(const Grid1p1& grid) { return {grid.dt, grid.dx}; }
};

CMatrix principal_symbol(const FirstOrderOperator& op, SpacetimePoint p, Covector xi);
CMatrix principal_symbol(const SecondOrderOperator& op, SpacetimePoint p, Covector xi);

/// The operator P∘Q, expanded by the product rule.
SecondOrderOperator compose(const FirstOrderOperator& p, const FirstOrderOperator& q,
                            DerivativeSteps steps);

/// The three covectors that determine a quadratic form in two dimensions.
inline constexpr Covector kPolarizationSet[3] = {{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};

struct HyperbolicityReport {
  bool pass = false;
  double max_deviation = 0.0;
  SpacetimePoint worst_point;
  Covector worst_covector;
  double tolerance = 0.0;
};

/// Checks sigma_L(xi) = g(xi,xi) Id on the polarization set at every sample point.
HyperbolicityReport is_normally_hyperbolic(const SecondOrderOperator& l, const DiagonalMetric& metric,
                                           std::span<const SpacetimePoint> points, double tol);

struct PairReport {
  bool pass = false;
  HyperbolicityReport pq;
  HyperbolicityReport qp;
};

/// Normal hyperbolicity of both PQ and QP.
PairReport is_complementary_pair(const FirstOrderOperator& p, const FirstOrderOperator& q,
                                 const DiagonalMetric& metric, std::span<const SpacetimePoint> points,
                                 double tol, DerivativeSteps steps = {});

/// Every 8th grid node in t and x (always including the last level and node).
std::vector<SpacetimePoint> default_sample_points(const Grid1p1& grid, int stride = 8);

/// 1e-12 (1 + max|coefficient|) when all coefficients are constant, 1e-8 otherwise.
double default_tolerance(const FirstOrderOperator& p, const FirstOrderOperator& q,
                         std::span<const SpacetimePoint> points);

struct InvertibilityReport {
  bool invertible = false;
  double abs_det = 0.0;
  double condition_estimate = 0.0;  // infinity-norm condition number; +inf when singular
};

InvertibilityReport symbol_invertibility(const FirstOrderOperator& p, SpacetimePoint point, Covector xi,
                                         double tol = 1e-12);

/// Formal adjoint for the bilinear pairing with density alpha*beta:
/// A*^mu = -A^mu^T,  B* = B^T - (1/rho) d_mu(rho A^mu^T).
FirstOrderOperator formal_adjoint(const FirstOrderOperator& p, const DiagonalMetric& metric,
                                  DerivativeSteps steps);

/// Trapezoidal quadrature of sum_i psi_i f_i alpha beta over the grid (bilinear).
cplx pairing(const GridSection& psi, const GridSection& f, const DiagonalMetric& metric, const Grid1p1& grid);

/// Discrete P phi: centered differences in the interior. At the first and last level the
/// time derivatives extrapolate the interior centered differences; line ends are held at 0.
GridSection apply(const FirstOrderOperator& p, const GridSection& phi, const Grid1p1& grid,
                  kernels::Exec exec = kernels::Exec::parallel);
GridSection apply(const SecondOrderOperator& l, const GridSection& phi, const Grid1p1& grid,
                  kernels::Exec exec = kernels::Exec::parallel);

/// Samples a set of fields on one level; caches when all are time independent.
class RowSampler {
 public:
  RowSampler(std::vector<MatrixField> fields, const Grid1p1& grid);
  /// Rows for time t, one flat buffer per field in construction order.
  const std::vector<std::vector<cplx>>& at(double t);

 private:
  std::vector<MatrixField> fields_;
  std::vector<double> xs_;
  bool cacheable_;
  bool filled_ = false;
  double last_t_ = 0.0;
  std::vector<std::vector<cplx>> rows_;
};

}  // namespace prehyp::bundle_ops
