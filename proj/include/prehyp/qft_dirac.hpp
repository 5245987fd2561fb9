#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "prehyp/bundle_ops.hpp"
#include "prehyp/cauchy.hpp"
#include "prehyp/grid.hpp"

/// The 1+1 Dirac field: Clifford representation, the pair (D + A, D - A), the Dirac
/// current and its hypersurface integral.
namespace prehyp::qft_dirac {

using bundle_ops::FirstOrderOperator;
using geometry::CauchyLine;
using geometry::DiagonalMetric;

/// Frame index of the current.
enum class Index { t, x };

struct CliffordRep {
  CMatrix gamma0;
  CMatrix gamma1;

  /// gamma0 = [[0, 1], [1, 0]], gamma1 = [[0, -1], [1, 0]].
  static CliffordRep standard();
  const CMatrix& gamma(Index a) const noexcept { return a == Index::t ? gamma0 : gamma1; }
  /// Largest entry of the violations of g0^2 = Id, g1^2 = -Id, {g0, g1} = 0, g0 = g0^dagger.
  double relation_defect() const;
};

struct DiracModel {
  CliffordRep rep = CliffordRep::standard();
  double mass = 0.0;
  /// Order-zero term A; defaults to mass * Id when empty.
  std::optional<MatrixField> potential;

  MatrixField potential_field() const;
};

/// (P, Q) = (D + A, D - A) with D = gamma0 d_t + gamma1 d_x (Minkowski).
std::pair<FirstOrderOperator, FirstOrderOperator> build_dirac_pair(const DiracModel& model);

/// Same on a diagonal metric, D = gamma0 (1/alpha) d_t + gamma1 (1/beta) d_x. Throws
/// NumericalError if the pair check fails on the sample points.
std::pair<FirstOrderOperator, FirstOrderOperator> build_dirac_pair(const DiracModel& model,
                                                                   const DiagonalMetric& metric,
                                                                   const Grid1p1& grid);

/// Phi^+ = Phi^dagger gamma0 per node, stored as a rank-2 section of row co-spinors.
GridSection dirac_adjoint(const GridSection& phi, const CliffordRep& rep);

/// j^a(Psi, Phi) = Psi^+ gamma^a Phi per node, as a rank-1 section.
GridSection dirac_current(const GridSection& psi, const GridSection& phi, const CliffordRep& rep, Index a);

/// Integral over the hypersurface of n_a j^a(Psi, Phi) with the induced measure beta dx
/// (trapezoid rule). Both sections must be stored at sigma's level.
cplx beta_sigma(const GridSection& psi, const GridSection& phi, CauchyLine sigma, const Grid1p1& grid,
                const DiagonalMetric& metric, const CliffordRep& rep);

/// beta on a single level of Cauchy data.
cplx beta_sigma(const CauchyData& psi, const CauchyData& phi, const Grid1p1& grid, const DiagonalMetric& metric,
                const CliffordRep& rep);

struct HermitianReport {
  cplx value;                     // beta at the first requested level
  double positivity_margin = 0.0; // min over levels of Re beta(Phi, Phi); > 0 means positive
  double hypersurface_drift = 0.0;
  double hermitian_defect = 0.0;  // |beta(Psi,Phi) - conj(beta(Phi,Psi))| / max(|beta|, tiny)
  std::vector<double> times;
  std::vector<cplx> values;
};

/// beta(Psi, Phi) on each listed level; drift is the largest pairwise difference over the
/// largest magnitude (0 when everything vanishes).
HermitianReport hypersurface_independence(const GridSection& phi, const GridSection& psi,
                                          const std::vector<double>& t_levels, const Grid1p1& grid,
                                          const DiagonalMetric& metric, const CliffordRep& rep);

struct IsometryReport {
  Eigen::MatrixXcd gram_sigma;
  Eigen::MatrixXcd gram_sigma_prime;
  double max_relative_mismatch = 0.0;  // max |G - G'| / max |G|
  double min_eigenvalue_sigma = 0.0;
  double min_eigenvalue_sigma_prime = 0.0;
};

/// Solves each datum with the model's pair and compares the Gram matrices of beta on the
/// initial hypersurface and on sigma_prime.
IsometryReport data_space_isometry_check(const std::vector<CauchyData>& data, CauchyLine sigma_prime,
                                         const DiagonalMetric& metric, const DiracModel& model, const Grid1p1& grid,
                                         const cauchy::SolveOptions& options = {});

}  // namespace prehyp::qft_dirac
