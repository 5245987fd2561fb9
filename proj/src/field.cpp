#include "prehyp/field.hpp"

#include <algorithm>
#include <stdexcept>

#include "prehyp/error.hpp"

namespace prehyp {

namespace {

Dependence combine(Dependence a, Dependence b) { return std::max(a, b); }

void require_same_rank(const MatrixField& a, const MatrixField& b, const char* op) {
  if (a.rank() != b.rank()) {
    throw RankMismatch(std::string("matrix field rank mismatch in ") + op + ": " +
                       std::to_string(a.rank()) + " vs " + std::to_string(b.rank()));
  }
}

}  // namespace

MatrixField::MatrixField(int rank, Dependence dependence, Fn fn)
    : rank_(rank), dependence_(dependence), fn_(std::move(fn)) {
  if (rank < 1 || rank > kMaxRank) {
    throw RankMismatch("bundle rank must be in [1, " + std::to_string(kMaxRank) + "], got " +
                       std::to_string(rank));
  }
  if (dependence_ == Dependence::constant) {
    constant_ = fn_(0.0, 0.0);
    const CMatrix c = constant_;
    fn_ = [c](double, double) { return c; };
  }
}

MatrixField MatrixField::constant(const CMatrix& value) {
  if (value.rows() != value.cols()) throw RankMismatch("constant matrix field must be square");
  const CMatrix c = value;
  return MatrixField(static_cast<int>(value.rows()), Dependence::constant,
                     [c](double, double) { return c; });
}

MatrixField MatrixField::zero(int rank) {
  if (rank < 1 || rank > kMaxRank) throw RankMismatch("invalid rank");
  return constant(CMatrix::Zero(rank, rank));
}

MatrixField MatrixField::identity(int rank) {
  if (rank < 1 || rank > kMaxRank) throw RankMismatch("invalid rank");
  return constant(CMatrix::Identity(rank, rank));
}

MatrixField MatrixField::from_expressions(const std::vector<std::vector<expr::Expr>>& entries,
                                          cplx scale) {
  const int k = static_cast<int>(entries.size());
  for (const auto& row : entries) {
    if (static_cast<int>(row.size()) != k) throw RankMismatch("coefficient array must be square");
  }
  Dependence dep = Dependence::constant;
  for (const auto& row : entries) {
    for (const auto& e : row) {
      if (e.depends_on_t()) dep = Dependence::general;
      else if (e.depends_on_x()) dep = combine(dep, Dependence::space);
    }
  }
  return MatrixField(k, dep, [entries, scale, k](double t, double x) {
    CMatrix m(k, k);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) m(i, j) = scale * entries[i][j].eval(t, x);
    }
    return m;
  });
}

MatrixField MatrixField::scalar(int rank, Dependence dependence,
                                std::function<double(double, double)> f) {
  return MatrixField(rank, dependence, [rank, f = std::move(f)](double t, double x) {
    return CMatrix(f(t, x) * CMatrix::Identity(rank, rank));
  });
}

CMatrix MatrixField::operator()(double t, double x) const {
  if (is_constant()) return constant_;
  return fn_(t, x);
}

MatrixField MatrixField::transposed() const {
  if (is_constant()) return constant(constant_.transpose());
  return MatrixField(rank_, dependence_, [f = fn_](double t, double x) { return CMatrix(f(t, x).transpose()); });
}

MatrixField MatrixField::d_dt(double h) const {
  if (is_time_independent()) return zero(rank_);
  return MatrixField(rank_, Dependence::general, [f = fn_, h](double t, double x) {
    return CMatrix((f(t + h, x) - f(t - h, x)) / (2.0 * h));
  });
}

MatrixField MatrixField::d_dx(double h) const {
  if (is_constant()) return zero(rank_);
  return MatrixField(rank_, dependence_, [f = fn_, h](double t, double x) {
    return CMatrix((f(t, x + h) - f(t, x - h)) / (2.0 * h));
  });
}

void MatrixField::sample_row(double t, std::span<const double> xs, std::span<cplx> out) const {
  const std::size_t kk = static_cast<std::size_t>(rank_) * rank_;
  if (out.size() < xs.size() * kk) throw std::out_of_range("sample_row output too small");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const CMatrix m = (*this)(t, xs[i]);
    cplx* dst = out.data() + i * kk;
    for (int r = 0; r < rank_; ++r) {
      for (int c = 0; c < rank_; ++c) dst[r * rank_ + c] = m(r, c);
    }
  }
}

double MatrixField::max_abs(std::span<const std::pair<double, double>> points) const {
  if (is_constant()) return constant_.cwiseAbs().maxCoeff();
  double m = 0.0;
  for (const auto& [t, x] : points) m = std::max(m, (*this)(t, x).cwiseAbs().maxCoeff());
  return m;
}

MatrixField operator+(const MatrixField& a, const MatrixField& b) {
  require_same_rank(a, b, "+");
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.is_constant() && b.is_constant()) return MatrixField::constant(a.constant_ + b.constant_);
  return MatrixField(a.rank_, combine(a.dependence_, b.dependence_),
                     [fa = a, fb = b](double t, double x) { return CMatrix(fa(t, x) + fb(t, x)); });
}

MatrixField operator-(const MatrixField& a, const MatrixField& b) { return a + (-b); }

MatrixField operator*(const MatrixField& a, const MatrixField& b) {
  require_same_rank(a, b, "*");
  if (a.is_zero() || b.is_zero()) return MatrixField::zero(a.rank_);
  if (a.is_constant() && b.is_constant()) return MatrixField::constant(a.constant_ * b.constant_);
  return MatrixField(a.rank_, combine(a.dependence_, b.dependence_),
                     [fa = a, fb = b](double t, double x) { return CMatrix(fa(t, x) * fb(t, x)); });
}

MatrixField operator*(cplx s, const MatrixField& a) {
  if (a.is_constant()) return MatrixField::constant(s * a.constant_);
  return MatrixField(a.rank_, a.dependence_, [s, fa = a](double t, double x) { return CMatrix(s * fa(t, x)); });
}

MatrixField operator-(const MatrixField& a) { return cplx(-1.0) * a; }

}  // namespace prehyp
