#include "prehyp/cli/scenario.hpp"

#include <algorithm>
#include <cmath>

namespace prehyp::cli {

namespace {

using ExprMatrix = std::vector<std::vector<expr::Expr>>;

ExprMatrix parse_matrix(const std::vector<std::vector<std::string>>& m) {
  ExprMatrix out;
  for (const auto& row : m) {
    std::vector<expr::Expr> r;
    for (const std::string& e : row) r.push_back(expr::Expr::parse(e));
    out.push_back(std::move(r));
  }
  return out;
}

MatrixField complex_field(const std::vector<std::vector<std::string>>& re,
                          const std::vector<std::vector<std::string>>& im, int rank) {
  MatrixField f = re.empty() ? MatrixField::zero(rank) : MatrixField::from_expressions(parse_matrix(re));
  if (!im.empty()) f = f + MatrixField::from_expressions(parse_matrix(im), cplx(0.0, 1.0));
  return f;
}

std::vector<expr::Expr> parse_components(const DataConfig& d) {
  std::vector<expr::Expr> out;
  for (const std::string& c : d.components) out.push_back(expr::Expr::parse(c));
  return out;
}

}  // namespace

bundle_ops::FirstOrderOperator build_operator(const OperatorConfig& op, int rank) {
  bundle_ops::FirstOrderOperator p(complex_field(op.a_t, op.a_t_im, rank), complex_field(op.a_x, op.a_x_im, rank),
                                   complex_field(op.b, op.b_im, rank));
  if (!op.omega_t.empty()) p.omega_t = MatrixField::from_expressions(parse_matrix(op.omega_t));
  if (!op.omega_x.empty()) p.omega_x = MatrixField::from_expressions(parse_matrix(op.omega_x));
  return p;
}

Scenario Scenario::build(const ScenarioConfig& config, int nx) {
  const geometry::DiagonalMetric metric(config.chart(), expr::Expr::parse(config.alpha),
                                        expr::Expr::parse(config.beta));
  Scenario s{config, metric, Grid1p1::make(metric, nx, config.cfl, config.t_start, config.t_end),
             build_operator(config.p, config.rank), build_operator(config.q, config.rank), std::nullopt};
  if (config.q_alt) s.q_alt = build_operator(*config.q_alt, config.rank);
  return s;
}

cauchy::SolveOptions Scenario::solve_options() const {
  cauchy::SolveOptions o;
  o.dissipation = config.dissipation ? cauchy::kDefaultDissipation : 0.0;
  return o;
}

CauchyData Scenario::sample(const DataConfig& d) const {
  DataSpec spec{parse_components(d), std::nullopt};
  if (d.window) spec.window = d.window->window();
  return sample_cauchy_data(spec, grid, d.t0.value_or(config.t_start));
}

CauchyData Scenario::initial() const {
  if (!config.initial) throw ConfigError("initial_data required");
  return sample(*config.initial);
}

std::vector<CauchyData> Scenario::corpus() const {
  std::vector<CauchyData> out;
  if (config.initial) out.push_back(sample(*config.initial));
  for (const DataConfig& d : config.extra_data) out.push_back(sample(d));
  if (out.empty()) throw ConfigError("initial_data required");
  return out;
}

greens::TestSection Scenario::section(const DataConfig& d) const {
  return greens::TestSection::make(parse_components(d), d.t_window->window(), d.window->window(), grid);
}

bool Scenario::is_dirac() const {
  return config.preset == "dirac_massive" || config.preset == "dirac_massless" ||
         config.preset == "klein_gordon_factorized";
}

bool Scenario::has_conserved_current() const {
  return config.preset == "dirac_massless" || config.preset == "klein_gordon_factorized";
}

qft_dirac::DiracModel Scenario::dirac_model() const {
  if (!is_dirac()) throw ConfigError("operator_P.preset must name a Dirac preset for this subcommand");
  qft_dirac::DiracModel m;
  m.mass = config.preset_mass;
  m.potential = p.b;
  return m;
}

bool Scenario::has_oracle() const {
  return metric.is_constant() && (config.preset == "dirac_massless" || config.preset == "scalar_transport_pair");
}

double Scenario::oracle_error(const GridSection& phi) const {
  if (!has_oracle()) throw UnsupportedFeature("no exact solution for this scenario");
  const DataConfig& d = *config.initial;
  const std::vector<expr::Expr> comps = parse_components(d);
  const std::optional<SmoothWindow> w = d.window ? std::optional(d.window->window()) : std::nullopt;
  const CauchyData phi0 = initial();
  const double t0 = phi0.sigma.t0;
  const double c = metric.light_speed(t0, grid.x(0));
  // Component 0 moves right; for Dirac component 1 moves left.
  const int k = config.rank;
  double err = 0.0;
  for (int n = 0; n < grid.nt; ++n) {
    const double s = c * (grid.t(n) - t0);
    for (int i = 0; i < grid.nx; ++i) {
      for (int j = 0; j < k; ++j) {
        double x = grid.x(i) + (j == 0 ? -s : s);
        if (grid.periodic()) x = grid.chart.wrap(x);
        const double wx = w ? (*w)(x) : 1.0;
        const cplx exact = wx == 0.0 ? cplx{} : wx * comps[j].eval(t0, x);
        err = std::max(err, std::abs(phi(n, i, j) - exact));
      }
    }
  }
  return err;
}

double Scenario::sigma_prime() const { return config.sigma_prime.value_or(grid.t_end()); }

std::vector<double> Scenario::beta_levels() const {
  if (!config.beta_levels.empty()) return config.beta_levels;
  std::vector<double> out;
  for (int j = 0; j <= 4; ++j) out.push_back(grid.t((grid.nt - 1) * j / 4));
  return out;
}

}  // namespace prehyp::cli
