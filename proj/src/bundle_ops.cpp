#include "prehyp/bundle_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace prehyp::bundle_ops {

namespace {

void require_rank(const MatrixField& f, int k, const char* name) {
  if (f.rank() != k) {
    throw RankMismatch(std::string("coefficient ") + name + " has rank " + std::to_string(f.rank()) +
                       ", operator rank is " + std::to_string(k));
  }
}

Dependence max_dep(std::initializer_list<Dependence> deps) { return std::max(deps); }

}  // namespace

FirstOrderOperator::FirstOrderOperator(MatrixField a_t_, MatrixField a_x_, MatrixField b_)
    : rank(a_t_.rank()), a_t(std::move(a_t_)), a_x(std::move(a_x_)), b(std::move(b_)) {
  require_rank(a_x, rank, "A_x");
  require_rank(b, rank, "B");
}

bool FirstOrderOperator::has_connection() const noexcept {
  return (omega_t && !omega_t->is_zero()) || (omega_x && !omega_x->is_zero());
}

MatrixField FirstOrderOperator::coordinate_zeroth() const {
  MatrixField out = b;
  if (omega_t) out = out + a_t * *omega_t;
  if (omega_x) out = out + a_x * *omega_x;
  return out;
}

Dependence FirstOrderOperator::dependence() const noexcept {
  Dependence d = max_dep({a_t.dependence(), a_x.dependence(), b.dependence()});
  if (omega_t) d = std::max(d, omega_t->dependence());
  if (omega_x) d = std::max(d, omega_x->dependence());
  return d;
}

Dependence SecondOrderOperator::dependence() const noexcept {
  return max_dep({c_tt.dependence(), c_tx.dependence(), c_xx.dependence(), d_t.dependence(),
                  d_x.dependence(), e.dependence()});
}

CMatrix principal_symbol(const FirstOrderOperator& op, SpacetimePoint p, Covector xi) {
  return op.a_t(p.t, p.x) * xi.t + op.a_x(p.t, p.x) * xi.x;
}

CMatrix principal_symbol(const SecondOrderOperator& op, SpacetimePoint p, Covector xi) {
  return op.c_tt(p.t, p.x) * (xi.t * xi.t) + op.c_tx(p.t, p.x) * (2.0 * xi.t * xi.x) +
         op.c_xx(p.t, p.x) * (xi.x * xi.x);
}

SecondOrderOperator compose(const FirstOrderOperator& p, const FirstOrderOperator& q, DerivativeSteps steps) {
  if (p.rank != q.rank) {
    throw RankMismatch("cannot compose operators of rank " + std::to_string(p.rank) + " and " +
                       std::to_string(q.rank));
  }
  const MatrixField bp = p.coordinate_zeroth();
  const MatrixField bq = q.coordinate_zeroth();
  // P(Q phi) = A_P^mu A_Q^nu d_mu d_nu phi + (A_P^mu d_mu A_Q^nu + A_P^nu b_Q + b_P A_Q^nu) d_nu phi
  //          + (A_P^mu d_mu b_Q + b_P b_Q) phi
  SecondOrderOperator l;
  l.rank = p.rank;
  l.c_tt = p.a_t * q.a_t;
  l.c_xx = p.a_x * q.a_x;
  l.c_tx = cplx(0.5) * (p.a_t * q.a_x + p.a_x * q.a_t);
  l.d_t = p.a_t * q.a_t.d_dt(steps.dt) + p.a_x * q.a_t.d_dx(steps.dx) + p.a_t * bq + bp * q.a_t;
  l.d_x = p.a_t * q.a_x.d_dt(steps.dt) + p.a_x * q.a_x.d_dx(steps.dx) + p.a_x * bq + bp * q.a_x;
  l.e = p.a_t * bq.d_dt(steps.dt) + p.a_x * bq.d_dx(steps.dx) + bp * bq;
  return l;
}

HyperbolicityReport is_normally_hyperbolic(const SecondOrderOperator& l, const DiagonalMetric& metric,
                                           std::span<const SpacetimePoint> points, double tol) {
  HyperbolicityReport r;
  r.tolerance = tol;
  if (points.empty()) throw DomainError("normal hyperbolicity check needs at least one sample point");
  const CMatrix id = CMatrix::Identity(l.rank, l.rank);
  for (const SpacetimePoint& p : points) {
    for (const Covector& xi : kPolarizationSet) {
      const double g = geometry::inverse_metric_on_covector(metric, p, xi);
      const double dev = (principal_symbol(l, p, xi) - g * id).cwiseAbs().maxCoeff();
      if (dev > r.max_deviation || (&p == points.data() && &xi == kPolarizationSet)) {
        r.max_deviation = std::max(r.max_deviation, dev);
        r.worst_point = p;
        r.worst_covector = xi;
      }
    }
  }
  r.pass = r.max_deviation < tol;
  return r;
}

PairReport is_complementary_pair(const FirstOrderOperator& p, const FirstOrderOperator& q,
                                 const DiagonalMetric& metric, std::span<const SpacetimePoint> points,
                                 double tol, DerivativeSteps steps) {
  PairReport r;
  r.pq = is_normally_hyperbolic(compose(p, q, steps), metric, points, tol);
  r.qp = is_normally_hyperbolic(compose(q, p, steps), metric, points, tol);
  r.pass = r.pq.pass && r.qp.pass;
  return r;
}

std::vector<SpacetimePoint> default_sample_points(const Grid1p1& grid, int stride) {
  std::vector<int> levels;
  for (int n = 0; n < grid.nt; n += stride) levels.push_back(n);
  if (levels.back() != grid.nt - 1) levels.push_back(grid.nt - 1);
  std::vector<int> nodes;
  for (int i = 0; i < grid.nx; i += stride) nodes.push_back(i);
  if (nodes.back() != grid.nx - 1) nodes.push_back(grid.nx - 1);
  std::vector<SpacetimePoint> out;
  out.reserve(levels.size() * nodes.size());
  for (int n : levels) {
    for (int i : nodes) out.push_back({grid.t(n), grid.x(i)});
  }
  return out;
}

double default_tolerance(const FirstOrderOperator& p, const FirstOrderOperator& q,
                         std::span<const SpacetimePoint> points) {
  const bool constant = p.dependence() == Dependence::constant && q.dependence() == Dependence::constant;
  if (!constant) return 1e-8;
  std::vector<std::pair<double, double>> pts;
  for (const auto& sp : points) pts.emplace_back(sp.t, sp.x);
  double m = 0.0;
  for (const MatrixField* f : {&p.a_t, &p.a_x, &p.b, &q.a_t, &q.a_x, &q.b}) m = std::max(m, f->max_abs(pts));
  return 1e-12 * (1.0 + m);
}

InvertibilityReport symbol_invertibility(const FirstOrderOperator& p, SpacetimePoint point, Covector xi,
                                         double tol) {
  const CMatrix s = principal_symbol(p, point, xi);
  InvertibilityReport r;
  const Eigen::PartialPivLU<CMatrix> lu(s);
  r.abs_det = std::abs(lu.determinant());
  const double norm = s.cwiseAbs().rowwise().sum().maxCoeff();
  const double scale = std::max(1.0, std::pow(norm, p.rank));
  r.invertible = r.abs_det > tol * scale;
  if (r.invertible) {
    const CMatrix inv = lu.inverse();
    r.condition_estimate = norm * inv.cwiseAbs().rowwise().sum().maxCoeff();
  } else {
    r.condition_estimate = std::numeric_limits<double>::infinity();
  }
  return r;
}

FirstOrderOperator formal_adjoint(const FirstOrderOperator& p, const DiagonalMetric& metric,
                                  DerivativeSteps steps) {
  if (p.has_connection()) {
    throw UnsupportedFeature("formal_adjoint does not support connection matrices");
  }
  const Dependence rho_dep = metric.is_constant() ? Dependence::constant
                             : metric.is_static() ? Dependence::space
                                                  : Dependence::general;
  const MatrixField rho = MatrixField::scalar(
      p.rank, rho_dep, [metric](double t, double x) { return metric.volume_density(t, x); });
  const MatrixField inv_rho = MatrixField::scalar(
      p.rank, rho_dep, [metric](double t, double x) { return 1.0 / metric.volume_density(t, x); });
  const MatrixField at_T = p.a_t.transposed();
  const MatrixField ax_T = p.a_x.transposed();
  const MatrixField flux = (rho * at_T).d_dt(steps.dt) + (rho * ax_T).d_dx(steps.dx);
  FirstOrderOperator adj(-at_T, -ax_T, p.b.transposed() - inv_rho * flux);
  return adj;
}

cplx pairing(const GridSection& psi, const GridSection& f, const DiagonalMetric& metric, const Grid1p1& grid) {
  if (psi.nt() != f.nt() || psi.nx() != f.nx() || psi.rank() != f.rank()) {
    throw RankMismatch("pairing needs sections on the same grid and bundle rank");
  }
  cplx sum = 0.0;
  for (int n = 0; n < f.nt(); ++n) {
    const double t = grid.t(n);
    cplx level = 0.0;
    for (int i = 0; i < f.nx(); ++i) {
      cplx node = 0.0;
      for (int c = 0; c < f.rank(); ++c) node += psi(n, i, c) * f(n, i, c);
      if (node != cplx{}) level += space_weight(grid, i) * metric.volume_density(t, grid.x(i)) * node;
    }
    sum += time_weight(grid, n) * level;
  }
  return sum * grid.dt * grid.dx;
}

RowSampler::RowSampler(std::vector<MatrixField> fields, const Grid1p1& grid)
    : fields_(std::move(fields)), xs_(grid.xs()) {
  cacheable_ = std::all_of(fields_.begin(), fields_.end(), [](const MatrixField& f) { return f.is_time_independent(); });
  rows_.resize(fields_.size());
}

const std::vector<std::vector<cplx>>& RowSampler::at(double t) {
  if (filled_ && (cacheable_ || t == last_t_)) return rows_;
  for (std::size_t f = 0; f < fields_.size(); ++f) {
    const MatrixField& field = fields_[f];
    if (field.is_zero()) {
      rows_[f].clear();
      continue;
    }
    const std::size_t kk = static_cast<std::size_t>(field.rank()) * field.rank();
    rows_[f].resize(xs_.size() * kk);
    field.sample_row(t, xs_, rows_[f]);
  }
  filled_ = true;
  last_t_ = t;
  return rows_;
}

namespace {

void require_shape(const GridSection& phi, const Grid1p1& grid, int rank, int min_levels) {
  if (phi.nt() != grid.nt || phi.nx() != grid.nx) throw RankMismatch("section does not live on this grid");
  if (phi.rank() != rank) throw RankMismatch("section rank differs from operator rank");
  if (grid.nt < min_levels || grid.nx < 4) throw DomainError("grid too small for the difference stencil");
}

// Row of d_t phi at level n. At the first and last level the value is the quadratic
// extrapolation of the neighbouring centered differences, so the truncation error stays a
// smooth function of t and composing two operators keeps second order up to the ends.
void time_derivative_row(const GridSection& phi, int n, double dt, std::span<cplx> out) {
  const int last = phi.nt() - 1;
  const auto r = [&](int m) { return phi.level(m); };
  const double w = 1.0 / (2.0 * dt);
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (n == 0) {
      out[j] = w * (-3.0 * r(0)[j] + 3.0 * r(1)[j] + 2.0 * r(2)[j] - 3.0 * r(3)[j] + r(4)[j]);
    } else if (n == last) {
      out[j] = w * (3.0 * r(last)[j] - 3.0 * r(last - 1)[j] - 2.0 * r(last - 2)[j] + 3.0 * r(last - 3)[j] -
                    r(last - 4)[j]);
    } else {
      out[j] = w * (r(n + 1)[j] - r(n - 1)[j]);
    }
  }
}

void second_time_derivative_row(const GridSection& phi, int n, double dt, std::span<cplx> out) {
  const int last = phi.nt() - 1;
  const auto r = [&](int m) { return phi.level(m); };
  const double w = 1.0 / (dt * dt);
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (n == 0) {
      out[j] = w * (3.0 * r(0)[j] - 9.0 * r(1)[j] + 10.0 * r(2)[j] - 5.0 * r(3)[j] + r(4)[j]);
    } else if (n == last) {
      out[j] = w * (3.0 * r(last)[j] - 9.0 * r(last - 1)[j] + 10.0 * r(last - 2)[j] - 5.0 * r(last - 3)[j] +
                    r(last - 4)[j]);
    } else {
      out[j] = w * (r(n + 1)[j] - 2.0 * r(n)[j] + r(n - 1)[j]);
    }
  }
}

}  // namespace

GridSection apply(const FirstOrderOperator& p, const GridSection& phi, const Grid1p1& grid, kernels::Exec exec) {
  require_shape(phi, grid, p.rank, 5);
  GridSection out(grid.nt, grid.nx, p.rank);
  RowSampler sampler({p.a_t, p.a_x, p.coordinate_zeroth()}, grid);
  const kernels::Stencil st{grid.nx, p.rank, grid.dx, grid.periodic()};
  std::vector<cplx> ut(static_cast<std::size_t>(grid.nx) * p.rank);
  for (int n = 0; n < grid.nt; ++n) {
    const auto& rows = sampler.at(grid.t(n));
    time_derivative_row(phi, n, grid.dt, ut);
    kernels::apply_first_order(exec, st, rows[0], rows[1], rows[2], phi.level(n), ut, out.level(n));
  }
  return out;
}

GridSection apply(const SecondOrderOperator& l, const GridSection& phi, const Grid1p1& grid, kernels::Exec exec) {
  require_shape(phi, grid, l.rank, 5);
  GridSection out(grid.nt, grid.nx, l.rank);
  RowSampler sampler({l.c_tt, l.c_tx, l.c_xx, l.d_t, l.d_x, l.e}, grid);
  const kernels::Stencil st{grid.nx, l.rank, grid.dx, grid.periodic()};
  std::vector<cplx> ut(static_cast<std::size_t>(grid.nx) * l.rank);
  std::vector<cplx> utt(ut.size());
  for (int n = 0; n < grid.nt; ++n) {
    const auto& rows = sampler.at(grid.t(n));
    time_derivative_row(phi, n, grid.dt, ut);
    second_time_derivative_row(phi, n, grid.dt, utt);
    const kernels::SecondOrderOperatorRow c{rows[0], rows[1], rows[2], rows[3], rows[4], rows[5]};
    kernels::apply_second_order(exec, st, c, phi.level(n), ut, utt, out.level(n));
  }
  return out;
}

}  // namespace prehyp::bundle_ops
