#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "prehyp/expr.hpp"

namespace prehyp {

using cplx = std::complex<double>;

/// Largest supported bundle rank; fixed-capacity matrices keep per-node evaluation heap-free.
inline constexpr int kMaxRank = 4;

using CMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxRank, kMaxRank>;
using CVector = Eigen::Matrix<cplx, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxRank, 1>;

/// How a coefficient field varies over the chart. Ordered: constant < space < general.
enum class Dependence { constant = 0, space = 1, general = 2 };

/// A k x k complex-matrix-valued field over (t, x).
///
/// Fields compose by closure; constant operands are folded eagerly so that
/// algebraic identities between constant-coefficient operators stay exact.
class MatrixField {
 public:
  using Fn = std::function<CMatrix(double t, double x)>;

  MatrixField(int rank, Dependence dependence, Fn fn);

  static MatrixField constant(const CMatrix& value);
  static MatrixField zero(int rank);
  static MatrixField identity(int rank);
  /// Entry (i,j) is scale * entries[i][j](t, x).
  static MatrixField from_expressions(const std::vector<std::vector<expr::Expr>>& entries,
                                      cplx scale = 1.0);
  /// f(t, x) * Id.
  static MatrixField scalar(int rank, Dependence dependence, std::function<double(double, double)> f);

  int rank() const noexcept { return rank_; }
  Dependence dependence() const noexcept { return dependence_; }
  bool is_constant() const noexcept { return dependence_ == Dependence::constant; }
  bool is_time_independent() const noexcept { return dependence_ != Dependence::general; }
  /// Exactly zero everywhere (known structurally, not by sampling).
  bool is_zero() const noexcept { return is_constant() && constant_.isZero(0.0); }

  CMatrix operator()(double t, double x) const;
  const CMatrix& constant_value() const noexcept { return constant_; }

  MatrixField transposed() const;
  /// Centered finite difference in t with step h. Zero when the field is time independent.
  MatrixField d_dt(double h) const;
  /// Centered finite difference in x with step h. Zero when the field is constant.
  MatrixField d_dx(double h) const;

  /// Writes the field at (t, xs[i]) row-major into out[i*k*k .. (i+1)*k*k).
  void sample_row(double t, std::span<const double> xs, std::span<cplx> out) const;

  /// Largest entry magnitude; exact for constants, sampled on `points` otherwise.
  double max_abs(std::span<const std::pair<double, double>> points) const;

  friend MatrixField operator+(const MatrixField& a, const MatrixField& b);
  friend MatrixField operator-(const MatrixField& a, const MatrixField& b);
  friend MatrixField operator*(const MatrixField& a, const MatrixField& b);
  friend MatrixField operator*(cplx s, const MatrixField& a);
  friend MatrixField operator-(const MatrixField& a);

 private:
  int rank_;
  Dependence dependence_;
  Fn fn_;
  CMatrix constant_;
};

}  // namespace prehyp
