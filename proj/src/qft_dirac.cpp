#include "prehyp/qft_dirac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

namespace prehyp::qft_dirac {

namespace {

void require_spinor(const GridSection& s, const char* what) {
  if (s.rank() != 2) throw RankMismatch(std::string(what) + " must be a rank-2 spinor section");
}

Dependence metric_dependence(const DiagonalMetric& metric) {
  if (metric.is_constant()) return Dependence::constant;
  return metric.is_static() ? Dependence::space : Dependence::general;
}

// sum_i w_i n_a j^a(psi_i, phi_i) beta_i dx over one row of node-major spinors.
cplx integrate_row(std::span<const cplx> psi, std::span<const cplx> phi, double t, const Grid1p1& grid,
                   const DiagonalMetric& metric, const CliffordRep& rep) {
  // n_a j^a = j^0 = Psi^dagger gamma0 gamma0 Phi.
  const CMatrix g = rep.gamma0 * rep.gamma0;
  cplx sum = 0.0;
  for (int i = 0; i < grid.nx; ++i) {
    const cplx* a = psi.data() + 2 * i;
    const cplx* b = phi.data() + 2 * i;
    cplx j0 = 0.0;
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) j0 += std::conj(a[r]) * g(r, c) * b[c];
    }
    if (j0 == cplx{}) continue;
    sum += space_weight(grid, i) * metric.beta(t, grid.x(i)) * j0;
  }
  return sum * grid.dx;
}

}  // namespace

CliffordRep CliffordRep::standard() {
  CliffordRep r;
  r.gamma0 = CMatrix(2, 2);
  r.gamma1 = CMatrix(2, 2);
  r.gamma0 << 0.0, 1.0, 1.0, 0.0;
  r.gamma1 << 0.0, -1.0, 1.0, 0.0;
  return r;
}

double CliffordRep::relation_defect() const {
  const CMatrix id = CMatrix::Identity(2, 2);
  double d = (gamma0 * gamma0 - id).cwiseAbs().maxCoeff();
  d = std::max(d, (gamma1 * gamma1 + id).cwiseAbs().maxCoeff());
  d = std::max(d, (gamma0 * gamma1 + gamma1 * gamma0).cwiseAbs().maxCoeff());
  d = std::max(d, (gamma0 - gamma0.adjoint()).cwiseAbs().maxCoeff());
  return d;
}

MatrixField DiracModel::potential_field() const {
  if (potential) {
    if (potential->rank() != 2) throw RankMismatch("Dirac potential must be 2x2");
    return *potential;
  }
  return cplx(mass) * MatrixField::identity(2);
}

std::pair<FirstOrderOperator, FirstOrderOperator> build_dirac_pair(const DiracModel& model) {
  const MatrixField g0 = MatrixField::constant(model.rep.gamma0);
  const MatrixField g1 = MatrixField::constant(model.rep.gamma1);
  const MatrixField a = model.potential_field();
  return {FirstOrderOperator(g0, g1, a), FirstOrderOperator(g0, g1, -a)};
}

std::pair<FirstOrderOperator, FirstOrderOperator> build_dirac_pair(const DiracModel& model,
                                                                   const DiagonalMetric& metric,
                                                                   const Grid1p1& grid) {
  const Dependence dep = metric_dependence(metric);
  const MatrixField inv_alpha =
      MatrixField::scalar(2, dep, [metric](double t, double x) { return 1.0 / metric.alpha(t, x); });
  const MatrixField inv_beta =
      MatrixField::scalar(2, dep, [metric](double t, double x) { return 1.0 / metric.beta(t, x); });
  const MatrixField a_t = inv_alpha * MatrixField::constant(model.rep.gamma0);
  const MatrixField a_x = inv_beta * MatrixField::constant(model.rep.gamma1);
  const MatrixField a = model.potential_field();
  std::pair<FirstOrderOperator, FirstOrderOperator> pq{FirstOrderOperator(a_t, a_x, a),
                                                       FirstOrderOperator(a_t, a_x, -a)};
  const std::vector<geometry::SpacetimePoint> points = bundle_ops::default_sample_points(grid);
  const bundle_ops::PairReport r =
      bundle_ops::is_complementary_pair(pq.first, pq.second, metric, points,
                                        bundle_ops::default_tolerance(pq.first, pq.second, points),
                                        bundle_ops::DerivativeSteps::of(grid));
  if (!r.pass) throw NumericalError("Dirac pair check failed; is the representation a Clifford one?");
  return pq;
}

GridSection dirac_adjoint(const GridSection& phi, const CliffordRep& rep) {
  require_spinor(phi, "phi");
  GridSection out(phi.nt(), phi.nx(), 2);
  for (int n = 0; n < phi.nt(); ++n) {
    for (int i = 0; i < phi.nx(); ++i) {
      for (int c = 0; c < 2; ++c) {
        cplx s = 0.0;
        for (int r = 0; r < 2; ++r) s += std::conj(phi(n, i, r)) * rep.gamma0(r, c);
        out(n, i, c) = s;
      }
    }
  }
  return out;
}

GridSection dirac_current(const GridSection& psi, const GridSection& phi, const CliffordRep& rep, Index a) {
  require_spinor(psi, "psi");
  require_spinor(phi, "phi");
  if (psi.nt() != phi.nt() || psi.nx() != phi.nx()) throw RankMismatch("current needs sections on one grid");
  const GridSection bar = dirac_adjoint(psi, rep);
  const CMatrix& g = rep.gamma(a);
  GridSection out(phi.nt(), phi.nx(), 1);
  for (int n = 0; n < phi.nt(); ++n) {
    for (int i = 0; i < phi.nx(); ++i) {
      cplx s = 0.0;
      for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) s += bar(n, i, r) * g(r, c) * phi(n, i, c);
      }
      out(n, i, 0) = s;
    }
  }
  return out;
}

cplx beta_sigma(const GridSection& psi, const GridSection& phi, CauchyLine sigma, const Grid1p1& grid,
                const DiagonalMetric& metric, const CliffordRep& rep) {
  require_spinor(psi, "psi");
  require_spinor(phi, "phi");
  if (psi.nt() != grid.nt || phi.nt() != grid.nt || psi.nx() != grid.nx || phi.nx() != grid.nx) {
    throw RankMismatch("beta needs sections on the given grid");
  }
  const int n = grid.level_of(sigma.t0);
  return integrate_row(psi.level(n), phi.level(n), grid.t(n), grid, metric, rep);
}

cplx beta_sigma(const CauchyData& psi, const CauchyData& phi, const Grid1p1& grid, const DiagonalMetric& metric,
                const CliffordRep& rep) {
  if (psi.rank != 2 || phi.rank != 2) throw RankMismatch("beta needs rank-2 spinor data");
  if (psi.nx() != grid.nx || phi.nx() != grid.nx) throw RankMismatch("data not sampled on this grid");
  if (psi.sigma.t0 != phi.sigma.t0) throw DomainError("beta needs data on one hypersurface");
  return integrate_row(psi.values, phi.values, psi.sigma.t0, grid, metric, rep);
}

HermitianReport hypersurface_independence(const GridSection& phi, const GridSection& psi,
                                          const std::vector<double>& t_levels, const Grid1p1& grid,
                                          const DiagonalMetric& metric, const CliffordRep& rep) {
  if (t_levels.empty()) throw DomainError("hypersurface_independence needs at least one level");
  HermitianReport r;
  double scale = 0.0;
  r.positivity_margin = std::numeric_limits<double>::infinity();
  double herm = 0.0;
  for (double t : t_levels) {
    const CauchyLine sigma{grid.t(grid.level_of(t))};
    const cplx v = beta_sigma(psi, phi, sigma, grid, metric, rep);
    r.times.push_back(sigma.t0);
    r.values.push_back(v);
    scale = std::max(scale, std::abs(v));
    r.positivity_margin = std::min(r.positivity_margin, beta_sigma(phi, phi, sigma, grid, metric, rep).real());
    herm = std::max(herm, std::abs(v - std::conj(beta_sigma(phi, psi, sigma, grid, metric, rep))));
  }
  r.value = r.values.front();
  for (std::size_t a = 0; a < r.values.size(); ++a) {
    for (std::size_t b = a + 1; b < r.values.size(); ++b) {
      r.hypersurface_drift = std::max(r.hypersurface_drift, std::abs(r.values[a] - r.values[b]));
    }
  }
  r.hypersurface_drift = scale > 0.0 ? r.hypersurface_drift / scale : 0.0;
  r.hermitian_defect = scale > 0.0 ? herm / scale : herm;
  return r;
}

IsometryReport data_space_isometry_check(const std::vector<CauchyData>& data, CauchyLine sigma_prime,
                                         const DiagonalMetric& metric, const DiracModel& model, const Grid1p1& grid,
                                         const cauchy::SolveOptions& options) {
  if (data.empty()) throw DomainError("isometry check needs at least one datum");
  const auto [p, q] = build_dirac_pair(model, metric, grid);
  std::vector<CauchyData> moved;
  moved.reserve(data.size());
  for (const CauchyData& d : data) {
    if (d.sigma.t0 != data.front().sigma.t0) throw DomainError("isometry data must share one hypersurface");
    const cauchy::Solution s = cauchy::solve_cauchy(p, q, metric, d, grid, options);
    moved.push_back(cauchy::restrict(s.phi, grid, metric, d, sigma_prime));
  }
  const auto m = static_cast<Eigen::Index>(data.size());
  IsometryReport r;
  r.gram_sigma.resize(m, m);
  r.gram_sigma_prime.resize(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      r.gram_sigma(a, b) = beta_sigma(data[a], data[b], grid, metric, model.rep);
      r.gram_sigma_prime(a, b) = beta_sigma(moved[a], moved[b], grid, metric, model.rep);
    }
  }
  const double scale = r.gram_sigma.cwiseAbs().maxCoeff();
  const double diff = (r.gram_sigma - r.gram_sigma_prime).cwiseAbs().maxCoeff();
  r.max_relative_mismatch = scale > 0.0 ? diff / scale : diff;
  const auto min_eig = [](const Eigen::MatrixXcd& g) {
    const Eigen::MatrixXcd h = 0.5 * (g + g.adjoint());
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  };
  r.min_eigenvalue_sigma = min_eig(r.gram_sigma);
  r.min_eigenvalue_sigma_prime = min_eig(r.gram_sigma_prime);
  return r;
}

}  // namespace prehyp::qft_dirac
