#include "prehyp/cli/runner.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <random>

#include "prehyp/cli/scenario.hpp"

namespace prehyp::cli {

namespace {

using Clock = std::chrono::steady_clock;

Json complex_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Json matrix_json(const Eigen::MatrixXcd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

struct Context {
  Context(const ScenarioConfig& c, std::uint64_t s) : cfg(c), seed(s) {}

  const ScenarioConfig& cfg;
  std::uint64_t seed;
  Json timings = Json::object();
  std::map<std::string, std::string> csv;
  bool want_csv = false;

  template <class F>
  auto timed(const std::string& label, F&& f) {
    const auto start = Clock::now();
    auto out = f();
    timings[label] = std::chrono::duration<double>(Clock::now() - start).count();
    return out;
  }
};

std::string label(const char* what, const Scenario& sc) { return std::string(what) + "@" + std::to_string(sc.grid.nx); }

Json grid_json(const Scenario& sc) {
  return {{"nx", sc.grid.nx}, {"nt", sc.grid.nt}, {"dx", sc.grid.dx}, {"dt", sc.grid.dt}};
}

void require_sources(const ScenarioConfig& cfg, const char* sub) {
  for (const auto& [d, name] : {std::pair{&cfg.source, "source"}, std::pair{&cfg.dual_source, "dual_source"},
                                std::pair{&cfg.pairing_source, "pairing_source"}}) {
    if (!*d) throw ConfigError(std::string(name) + " required for " + sub);
  }
}

// --- check-pair ---------------------------------------------------------------------------

Json hyperbolicity_json(const bundle_ops::HyperbolicityReport& r) {
  return {{"pass", r.pass},
          {"max_deviation", r.max_deviation},
          {"worst_point", {r.worst_point.t, r.worst_point.x}},
          {"worst_covector", {r.worst_covector.t, r.worst_covector.x}}};
}

Json pair_json(const bundle_ops::FirstOrderOperator& p, const bundle_ops::FirstOrderOperator& q, const Scenario& sc) {
  const auto points = bundle_ops::default_sample_points(sc.grid);
  const double tol = bundle_ops::default_tolerance(p, q, points);
  const bundle_ops::PairReport r =
      bundle_ops::is_complementary_pair(p, q, sc.metric, points, tol, bundle_ops::DerivativeSteps::of(sc.grid));
  return {{"pass", r.pass}, {"tolerance", tol}, {"pq", hyperbolicity_json(r.pq)}, {"qp", hyperbolicity_json(r.qp)}};
}

// Random non-null covectors at random points: sigma_P must be invertible, and when P and Q
// share their principal part |det sigma_P| >= |g|^(k/2).
Json symbol_probe(const Scenario& sc, Context& ctx) {
  std::mt19937_64 rng(ctx.seed);
  std::uniform_real_distribution<double> ut(sc.grid.t_start, sc.grid.t_end());
  std::uniform_real_distribution<double> ux(sc.grid.chart.x_min, sc.grid.chart.x_max);
  std::uniform_real_distribution<double> uxi(-1.0, 1.0);
  const int k = sc.p.rank;
  int accepted = 0;
  int singular = 0;
  bool shared = true;
  double min_margin = std::numeric_limits<double>::infinity();
  double max_condition = 0.0;
  for (int attempt = 0; accepted < ctx.cfg.probe_count && attempt < 100 * ctx.cfg.probe_count; ++attempt) {
    const geometry::SpacetimePoint pt{ut(rng), ux(rng)};
    const geometry::Covector xi{uxi(rng), uxi(rng)};
    const double g = geometry::inverse_metric_on_covector(sc.metric, pt, xi);
    if (std::abs(g) < 1e-2) continue;
    ++accepted;
    const bundle_ops::InvertibilityReport inv = bundle_ops::symbol_invertibility(sc.p, pt, xi);
    if (!inv.invertible) ++singular;
    max_condition = std::max(max_condition, inv.condition_estimate);
    const CMatrix sp = bundle_ops::principal_symbol(sc.p, pt, xi);
    const CMatrix sq = bundle_ops::principal_symbol(sc.q, pt, xi);
    if ((sp - sq).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + sp.cwiseAbs().maxCoeff())) shared = false;
    min_margin = std::min(min_margin, inv.abs_det - std::pow(std::abs(g), 0.5 * k));
  }
  const bool det_checked = shared;
  const bool pass = accepted == ctx.cfg.probe_count && singular == 0 &&
                    (!det_checked || min_margin >= -ctx.cfg.tol.symbol_bound);
  return {{"pass", pass},
          {"seed", ctx.seed},
          {"probes", accepted},
          {"singular", singular},
          {"determinant_bound_checked", det_checked},
          {"min_determinant_margin", min_margin},
          {"max_condition_estimate", max_condition},
          {"tolerance", ctx.cfg.tol.symbol_bound}};
}

Json run_check_pair(const Scenario& sc, Context& ctx) {
  return ctx.timed(label("check-pair", sc), [&] {
    Json out = {{"grid", grid_json(sc)}};
    out["pair"] = pair_json(sc.p, sc.q, sc);
    out["symbol_probe"] = symbol_probe(sc, ctx);
    bool pass = out["pair"]["pass"].get<bool>() && out["symbol_probe"]["pass"].get<bool>();
    if (sc.q_alt) {
      out["alternate_pair"] = pair_json(sc.p, *sc.q_alt, sc);
      pass = pass && out["alternate_pair"]["pass"].get<bool>();
    }
    out["pass"] = pass;
    return out;
  });
}

// --- solve / direct-vs-reduced / round-trip --------------------------------------------------

std::string solution_csv(const GridSection& phi, const Grid1p1& grid) {
  std::string s = "t,x";
  for (int c = 0; c < phi.rank(); ++c) s += ",re_" + std::to_string(c) + ",im_" + std::to_string(c);
  s += '\n';
  for (int n = 0; n < grid.nt; ++n) {
    for (int i = 0; i < grid.nx; ++i) {
      s += num(grid.t(n)) + ',' + num(grid.x(i));
      for (int c = 0; c < phi.rank(); ++c) s += ',' + num(phi(n, i, c).real()) + ',' + num(phi(n, i, c).imag());
      s += '\n';
    }
  }
  return s;
}

Json run_solve(const Scenario& sc, Context& ctx) {
  const CauchyData phi0 = sc.initial();
  const cauchy::Solution sol =
      ctx.timed(label("solve", sc), [&] { return cauchy::solve_cauchy(sc.p, sc.q, sc.metric, phi0, sc.grid, sc.solve_options()); });
  const cauchy::SolveReport& r = sol.report;
  Json out = {{"grid", grid_json(sc)},
              {"residual_l2", r.residual_l2},
              {"residual_linf", r.residual_linf},
              {"support_leak", r.support_leak},
              {"trace_defect", r.trace_defect}};
  bool pass = r.support_leak <= ctx.cfg.tol.leak;
  if (sc.has_oracle()) {
    const double e = sc.oracle_error(sol.phi);
    out["oracle_error"] = e;
    pass = pass && e <= ctx.cfg.tol.oracle;
  }
  out["pass"] = pass;
  if (ctx.want_csv) ctx.csv["solution_" + std::to_string(sc.grid.nx) + ".csv"] = solution_csv(sol.phi, sc.grid);
  return out;
}

Json run_direct_vs_reduced(const Scenario& sc, Context& ctx) {
  const CauchyData phi0 = sc.initial();
  const auto opts = sc.solve_options();
  const GridSection reduced = ctx.timed(label("reduced", sc), [&] {
    return cauchy::solve_cauchy(sc.p, sc.q, sc.metric, phi0, sc.grid, opts).phi;
  });
  const GridSection direct = ctx.timed(label("direct", sc), [&] {
    return cauchy::solve_first_order_direct(sc.p, sc.metric, phi0, sc.grid, opts);
  });
  const double scale = direct.max_abs();
  const double diff = (reduced - direct).max_abs();
  const double rel = scale > 0.0 ? diff / scale : diff;
  return {{"grid", grid_json(sc)},
          {"max_difference", diff},
          {"relative_difference", rel},
          {"tolerance", ctx.cfg.tol.reduction},
          {"pass", rel <= ctx.cfg.tol.reduction}};
}

CauchyData combine(cplx a, const CauchyData& x, cplx b, const CauchyData& y) {
  CauchyData out = x;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = a * x.values[i] + b * y.values[i];
  std::vector<geometry::Interval> parts = x.support.parts();
  parts.insert(parts.end(), y.support.parts().begin(), y.support.parts().end());
  out.support = geometry::IntervalSet(parts);
  return out;
}

Json run_round_trip(const Scenario& sc, Context& ctx) {
  const std::vector<CauchyData> corpus = sc.corpus();
  const CauchyData& phi0 = corpus.front();
  const geometry::CauchyLine sp{sc.sigma_prime()};
  const auto opts = sc.solve_options();
  const auto trip = [&](const CauchyData& d) {
    return cauchy::compatibility_round_trip(sc.p, sc.q, sc.metric, d, sp, sc.grid, opts);
  };
  const cauchy::RoundTripReport r0 = ctx.timed(label("round-trip", sc), [&] { return trip(phi0); });
  const double scale = phi0.max_abs();
  const double rel = scale > 0.0 ? r0.round_trip_error / scale : r0.round_trip_error;

  // Second datum for the linearity check: the next corpus entry on the same line, else
  // phi0 modulated by cos(x).
  CauchyData phi1 = phi0;
  if (corpus.size() > 1 && corpus[1].sigma.t0 == phi0.sigma.t0) {
    phi1 = corpus[1];
  } else {
    for (int i = 0; i < sc.grid.nx; ++i) {
      for (int c = 0; c < phi1.rank; ++c) phi1.values[static_cast<std::size_t>(i) * phi1.rank + c] *= std::cos(sc.grid.x(i));
    }
  }
  // The round trip masks by the declared support, so linearity is checked on one common support.
  const CauchyData both = combine(1.0, phi0, 1.0, phi1);
  CauchyData u = phi0;
  u.support = both.support;
  phi1.support = both.support;
  const cplx a(0.75, 0.0);
  const cplx b(-1.25, 0.5);
  const cauchy::RoundTripReport r0u = trip(u);
  const cauchy::RoundTripReport r1 = trip(phi1);
  const cauchy::RoundTripReport rc = trip(combine(a, u, b, phi1));
  const CauchyData expected = combine(a, r0u.back_on_sigma, b, r1.back_on_sigma);
  const double lin_scale = std::max(rc.back_on_sigma.max_abs(), std::numeric_limits<double>::min());
  const double linearity = cauchy::linf_distance(rc.back_on_sigma, expected) / lin_scale;

  return {{"grid", grid_json(sc)},
          {"sigma", phi0.sigma.t0},
          {"sigma_prime", sp.t0},
          {"round_trip_error", rel},
          {"absolute_error", r0.round_trip_error},
          {"linearity_defect", linearity},
          {"tolerance", ctx.cfg.tol.round_trip},
          {"linearity_tolerance", ctx.cfg.tol.linearity},
          {"pass", rel <= ctx.cfg.tol.round_trip && linearity <= ctx.cfg.tol.linearity}};
}

// --- greens / adjoint-check ------------------------------------------------------------------

Json run_greens(const Scenario& sc, Context& ctx) {
  require_sources(ctx.cfg, "greens");
  const greens::TestSection phi = sc.section(*ctx.cfg.source);
  const greens::TestSection psi = sc.section(*ctx.cfg.dual_source);
  const greens::TestSection f = sc.section(*ctx.cfg.pairing_source);
  const auto opts = sc.solve_options();
  const greens::GreensReport r =
      ctx.timed(label("greens", sc), [&] { return greens::verify(sc.p, sc.q, sc.metric, phi, psi, f, sc.grid, opts); });
  const Tolerances& tol = ctx.cfg.tol;
  Json out = {{"grid", grid_json(sc)},
              {"identity_i_residual", r.identity_i_residual},
              {"identity_ii_residual", r.identity_ii_residual},
              {"support_leak", r.support_leak},
              {"pairing_defect", r.pairing_defect},
              {"negative_control_defect", r.negative_control_defect}};
  bool pass = r.support_leak <= tol.leak && r.pairing_defect <= tol.pairing &&
              r.negative_control_defect >= tol.greens_control;
  if (sc.q_alt) {
    const double d = greens::uniqueness_probe(sc.p, sc.q, *sc.q_alt, sc.metric, phi, greens::Direction::retarded,
                                              sc.grid, opts);
    const double s = greens::greens_apply(sc.p, sc.q, sc.metric, phi, greens::Direction::retarded, sc.grid, opts)
                         .max_abs();
    const double rel = s > 0.0 ? d / s : d;
    out["uniqueness_difference"] = rel;
    pass = pass && rel <= tol.reduction;
  }
  out["pass"] = pass;
  return out;
}

Json run_adjoint_check(const Scenario& sc, Context& ctx) {
  require_sources(ctx.cfg, "adjoint-check");
  const greens::TestSection psi = sc.section(*ctx.cfg.dual_source);
  const greens::TestSection f = sc.section(*ctx.cfg.pairing_source);
  const auto opts = sc.solve_options();
  Json out = {{"grid", grid_json(sc)}};
  Json dirs = Json::object();
  double defect = 0.0;
  double control = std::numeric_limits<double>::infinity();
  const bool psi_later = psi.box.t_lo >= f.box.t_hi;
  for (greens::Direction d : {greens::Direction::retarded, greens::Direction::advanced}) {
    const bool ret = d == greens::Direction::retarded;
    // The dual section must lie where S propagates the other one.
    const bool swap = ret != psi_later;
    const greens::PairingReport r = ctx.timed(label(ret ? "adjoint-retarded" : "adjoint-advanced", sc), [&] {
      return swap ? greens::adjoint_pairing_check(sc.p, sc.q, sc.metric, f, psi, d, sc.grid, opts)
                  : greens::adjoint_pairing_check(sc.p, sc.q, sc.metric, psi, f, d, sc.grid, opts);
    });
    dirs[ret ? "retarded" : "advanced"] = {{"lhs", complex_json(r.lhs)},
                                           {"rhs", complex_json(r.rhs)},
                                           {"defect", r.defect},
                                           {"control_lhs", complex_json(r.control_lhs)},
                                           {"control_defect", r.control_defect}};
    defect = std::max(defect, r.defect);
    control = std::min(control, r.control_defect);
  }
  out["directions"] = dirs;
  out["pairing_defect"] = defect;
  out["negative_control_defect"] = control;
  out["pass"] = defect <= ctx.cfg.tol.pairing && control >= ctx.cfg.tol.greens_control;
  return out;
}

// --- beta / isometry ---------------------------------------------------------------------------

Json run_beta(const Scenario& sc, Context& ctx) {
  const qft_dirac::DiracModel model = sc.dirac_model();
  const std::vector<CauchyData> corpus = sc.corpus();
  const auto opts = sc.solve_options();
  std::vector<GridSection> sols;
  ctx.timed(label("beta-solves", sc), [&] {
    for (const CauchyData& d : corpus) sols.push_back(cauchy::solve_cauchy(sc.p, sc.q, sc.metric, d, sc.grid, opts).phi);
    return 0;
  });
  const Tolerances& tol = ctx.cfg.tol;

  // Positivity and Hermitian symmetry on the data themselves.
  double min_norm = std::numeric_limits<double>::infinity();
  double herm = 0.0;
  double scale = 0.0;
  Json norms = Json::array();
  for (std::size_t a = 0; a < corpus.size(); ++a) {
    const cplx v = qft_dirac::beta_sigma(corpus[a], corpus[a], sc.grid, sc.metric, model.rep);
    norms.push_back(v.real());
    min_norm = std::min(min_norm, v.real());
    for (std::size_t b = 0; b < corpus.size(); ++b) {
      if (corpus[a].sigma.t0 != corpus[b].sigma.t0) continue;
      const cplx ab = qft_dirac::beta_sigma(corpus[a], corpus[b], sc.grid, sc.metric, model.rep);
      const cplx ba = qft_dirac::beta_sigma(corpus[b], corpus[a], sc.grid, sc.metric, model.rep);
      herm = std::max(herm, std::abs(ab - std::conj(ba)));
      scale = std::max(scale, std::abs(ab));
    }
  }
  const double herm_rel = scale > 0.0 ? herm / scale : herm;

  // Independence of the hypersurface along solutions, and an off-shell control where
  // Phi0 is frozen in time.
  const std::vector<double> levels = sc.beta_levels();
  double drift = 0.0;
  Json per_level = Json::array();
  for (std::size_t a = 0; a < sols.size(); ++a) {
    const std::size_t b = std::min(a + 1, sols.size() - 1);
    const qft_dirac::HermitianReport h =
        qft_dirac::hypersurface_independence(sols[a], sols[b], levels, sc.grid, sc.metric, model.rep);
    drift = std::max(drift, h.hypersurface_drift);
    herm = std::max(herm, h.hermitian_defect);
    if (a == 0) {
      for (std::size_t j = 0; j < h.times.size(); ++j) {
        per_level.push_back({{"t", h.times[j]}, {"value", complex_json(h.values[j])}});
      }
    }
  }
  GridSection frozen(sc.grid.nt, sc.grid.nx, 2);
  const int n0 = sc.grid.level_of(corpus.front().sigma.t0);
  for (int n = 0; n < sc.grid.nt; ++n) {
    std::copy(sols[0].level(n0).begin(), sols[0].level(n0).end(), frozen.level(n).begin());
  }
  const double control =
      qft_dirac::hypersurface_independence(frozen, sols[0], levels, sc.grid, sc.metric, model.rep).hypersurface_drift;

  if (ctx.want_csv) {
    const GridSection j0 = qft_dirac::dirac_current(sols[0], sols[0], model.rep, qft_dirac::Index::t);
    std::string s = "t,x,re_j0,im_j0\n";
    for (double t : levels) {
      const int n = sc.grid.level_of(t);
      for (int i = 0; i < sc.grid.nx; ++i) {
        s += num(sc.grid.t(n)) + ',' + num(sc.grid.x(i)) + ',' + num(j0(n, i, 0).real()) + ',' +
             num(j0(n, i, 0).imag()) + '\n';
      }
    }
    ctx.csv["current_density_" + std::to_string(sc.grid.nx) + ".csv"] = s;
  }

  return {{"grid", grid_json(sc)},
          {"norms", norms},
          {"positivity_margin", min_norm},
          {"hermitian_defect", herm_rel},
          {"levels", per_level},
          {"hypersurface_drift", drift},
          {"negative_control_drift", control},
          {"pass", min_norm > 0.0 && herm_rel <= tol.hermitian && control >= tol.beta_control}};
}

Json run_isometry(const Scenario& sc, Context& ctx) {
  const qft_dirac::DiracModel model = sc.dirac_model();
  const std::vector<CauchyData> corpus = sc.corpus();
  const qft_dirac::IsometryReport r = ctx.timed(label("isometry", sc), [&] {
    return qft_dirac::data_space_isometry_check(corpus, {sc.sigma_prime()}, sc.metric, model, sc.grid,
                                                sc.solve_options());
  });
  return {{"grid", grid_json(sc)},
          {"sigma", corpus.front().sigma.t0},
          {"sigma_prime", sc.sigma_prime()},
          {"gram_sigma", matrix_json(r.gram_sigma)},
          {"gram_sigma_prime", matrix_json(r.gram_sigma_prime)},
          {"max_relative_mismatch", r.max_relative_mismatch},
          {"min_eigenvalue_sigma", r.min_eigenvalue_sigma},
          {"min_eigenvalue_sigma_prime", r.min_eigenvalue_sigma_prime},
          {"tolerance", ctx.cfg.tol.gram},
          {"pass", r.max_relative_mismatch <= ctx.cfg.tol.gram && r.min_eigenvalue_sigma > 0.0 &&
                       r.min_eigenvalue_sigma_prime > 0.0}};
}

// --- convergence -------------------------------------------------------------------------------

using SingleRun = std::function<Json(const Scenario&, Context&)>;

struct Target {
  std::string name;
  SingleRun run;
  std::vector<std::string> metrics;  // error quantities that must shrink at second order
};

const std::vector<Target>& targets() {
  static const std::vector<Target> t = {
      {"solve", run_solve, {"residual_l2", "oracle_error"}},
      {"direct-vs-reduced", run_direct_vs_reduced, {"relative_difference"}},
      {"round-trip", run_round_trip, {"round_trip_error"}},
      {"greens", run_greens, {"identity_i_residual", "identity_ii_residual", "pairing_defect"}},
      {"adjoint-check", run_adjoint_check, {"pairing_defect"}},
      {"beta", run_beta, {"hypersurface_drift"}}};
  return t;
}

const Target& target_named(const std::string& name) {
  for (const Target& t : targets()) {
    if (t.name == name) return t;
  }
  throw ConfigError("convergence: unknown target '" + name + "'");
}

// Ladder nx/4, nx/2, nx. Returns the convergence table and the finest single-run result.
std::pair<Json, Json> ladder(const Target& target, Context& ctx) {
  const int nx = ctx.cfg.nx;
  if (nx / 4 < 16) throw ConfigError("grid.nx too small for a convergence ladder");
  Json levels = Json::array();
  std::vector<Json> runs;
  for (int m : {nx / 4, nx / 2, nx}) {
    const Scenario sc = Scenario::build(ctx.cfg, m);
    runs.push_back(target.run(sc, ctx));
    Json errors = Json::object();
    for (const std::string& key : target.metrics) {
      if (runs.back().contains(key)) errors[key] = runs.back()[key];
    }
    levels.push_back({{"nx", m}, {"dx", sc.grid.dx}, {"errors", errors}});
  }
  Json orders = Json::array();
  Json min_order = Json::object();
  bool pass = true;
  for (std::size_t j = 0; j + 1 < runs.size(); ++j) {
    Json row = {{"from_nx", levels[j]["nx"]}, {"to_nx", levels[j + 1]["nx"]}};
    for (const auto& [key, value] : levels[j]["errors"].items()) {
      const std::optional<double> p =
          observed_order(value.get<double>(), levels[j + 1]["errors"][key].get<double>(), ctx.cfg.tol.roundoff);
      if (p) {
        row[key] = *p;
        pass = pass && *p >= ctx.cfg.tol.order;
        if (!min_order.contains(key) || *p < min_order[key].get<double>()) min_order[key] = *p;
      } else {
        row[key] = "converged";
      }
    }
    orders.push_back(row);
  }
  Json table = {{"target", target.name},
                {"levels", levels},
                {"orders", orders},
                {"min_order", min_order},
                {"order_tolerance", ctx.cfg.tol.order},
                {"pass", pass}};
  if (ctx.want_csv) {
    std::string s = "target,nx,dx,metric,error\n";
    for (const Json& lv : levels) {
      for (const auto& [key, value] : lv["errors"].items()) {
        s += target.name + ',' + std::to_string(lv["nx"].get<int>()) + ',' + num(lv["dx"].get<double>()) + ',' +
             key + ',' + num(value.get<double>()) + '\n';
      }
    }
    ctx.csv["convergence_" + target.name + ".csv"] = s;
  }
  return {table, runs.back()};
}

// --- verify-all --------------------------------------------------------------------------------

Json run_verify_all(Context& ctx, bool& pass) {
  Json results = Json::object();
  const Scenario sc = Scenario::build(ctx.cfg, ctx.cfg.nx);
  const auto record = [&](const std::string& name, Json r) {
    pass = pass && r["pass"].get<bool>();
    results[name] = std::move(r);
  };
  record("check-pair", run_check_pair(sc, ctx));
  Json convergence = Json::object();
  std::vector<std::string> subjects = {"solve", "direct-vs-reduced", "round-trip"};
  if (ctx.cfg.source && ctx.cfg.dual_source && ctx.cfg.pairing_source) {
    subjects.push_back("greens");
    subjects.push_back("adjoint-check");
  } else {
    results["greens"] = {{"skipped", "no source, dual_source and pairing_source sections"}};
  }
  const bool dirac = sc.is_dirac() && sc.has_conserved_current();
  if (dirac) subjects.push_back("beta");
  for (const std::string& s : subjects) {
    auto [table, finest] = ladder(target_named(s), ctx);
    record(s, std::move(finest));
    pass = pass && table["pass"].get<bool>();
    convergence[s] = std::move(table);
  }
  if (dirac) {
    record("isometry", run_isometry(sc, ctx));
  } else {
    const char* why = sc.is_dirac() ? "real mass term: the Dirac current is not conserved"
                                    : "not a Dirac scenario";
    results["beta"] = {{"skipped", why}};
    results["isometry"] = {{"skipped", why}};
  }
  results["convergence"] = std::move(convergence);
  return results;
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names = {"check-pair", "solve",    "direct-vs-reduced", "round-trip",
                                                 "greens",     "adjoint-check", "beta",       "isometry",
                                                 "convergence", "verify-all"};
  return names;
}

const std::vector<std::string>& convergence_targets() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const Target& t : targets()) n.push_back(t.name);
    return n;
  }();
  return names;
}

std::optional<double> observed_order(double coarse, double fine, double roundoff) {
  if (coarse <= roundoff && fine <= roundoff) return std::nullopt;
  return std::log2(coarse / std::max(fine, std::numeric_limits<double>::min()));
}

Json echo(const ScenarioConfig& c) {
  const auto op = [](const OperatorConfig& o) {
    Json j = Json::object();
    j["A_t"] = o.a_t;
    j["A_x"] = o.a_x;
    j["B"] = o.b;
    if (!o.a_t_im.empty()) j["A_t.im"] = o.a_t_im;
    if (!o.a_x_im.empty()) j["A_x.im"] = o.a_x_im;
    if (!o.b_im.empty()) j["B.im"] = o.b_im;
    if (!o.omega_t.empty()) j["omega_t"] = o.omega_t;
    if (!o.omega_x.empty()) j["omega_x"] = o.omega_x;
    return j;
  };
  const auto window = [](const WindowConfig& w) {
    return Json{{"center", w.center}, {"halfwidth", w.halfwidth}, {"steepness", w.steepness}};
  };
  const auto data = [&](const DataConfig& d) {
    Json j = {{"name", d.name}, {"components", d.components}};
    if (d.window) j["window"] = window(*d.window);
    if (d.t_window) j["t_window"] = window(*d.t_window);
    if (d.t0) j["t0"] = *d.t0;
    return j;
  };
  Json j = Json::object();
  j["spacetime"] = {{"alpha", c.alpha},
                    {"beta", c.beta},
                    {"t_range", {c.t_min, c.t_max}},
                    {"x_range", {c.x_min, c.x_max}},
                    {"topology", c.topology == geometry::Topology::line ? "line" : "circle"}};
  j["bundle"] = {{"rank", c.rank}};
  if (!c.preset.empty()) j["preset"] = {{"name", c.preset}, {"mass", c.preset_mass}};
  j["operator_P"] = op(c.p);
  j["operator_Q"] = op(c.q);
  if (c.q_alt) j["operator_Q_alt"] = op(*c.q_alt);
  j["grid"] = {{"nx", c.nx}, {"cfl", c.cfl}, {"t_span", {c.t_start, c.t_end}}, {"dissipation", c.dissipation}};
  Json data_list = Json::array();
  if (c.initial) data_list.push_back(data(*c.initial));
  for (const DataConfig& d : c.extra_data) data_list.push_back(data(d));
  j["initial_data"] = data_list;
  for (const auto& [d, name] : {std::pair{&c.source, "source"}, std::pair{&c.dual_source, "dual_source"},
                                std::pair{&c.pairing_source, "pairing_source"}}) {
    if (*d) j[name] = data(**d);
  }
  Json checks = {{"probe_count", c.probe_count}, {"seed", c.seed}};
  if (c.sigma_prime) checks["sigma_prime"] = *c.sigma_prime;
  if (!c.beta_levels.empty()) checks["beta_levels"] = c.beta_levels;
  j["checks"] = checks;
  const Tolerances& t = c.tol;
  j["tolerances"] = {{"leak", t.leak},
                     {"oracle", t.oracle},
                     {"reduction", t.reduction},
                     {"round_trip", t.round_trip},
                     {"linearity", t.linearity},
                     {"pairing", t.pairing},
                     {"greens_control", t.greens_control},
                     {"beta_control", t.beta_control},
                     {"hermitian", t.hermitian},
                     {"gram", t.gram},
                     {"order", t.order},
                     {"symbol_bound", t.symbol_bound},
                     {"roundoff", t.roundoff}};
  j["output"] = {{"formats", c.formats}};
  return j;
}

RunResult run(const std::string& subcommand, const std::optional<std::string>& target, const ScenarioConfig& config,
              std::optional<std::uint64_t> seed) {
  const auto& names = subcommand_names();
  if (std::find(names.begin(), names.end(), subcommand) == names.end()) {
    throw ConfigError("unknown subcommand '" + subcommand + "'");
  }
  if (subcommand == "convergence" && !target) throw ConfigError("convergence needs a target subcommand");
  if (subcommand != "convergence" && target) throw ConfigError(subcommand + " takes no target");

  Context ctx{config, seed.value_or(config.seed)};
  ctx.want_csv = std::find(config.formats.begin(), config.formats.end(), "csv") != config.formats.end();
  RunResult out;
  Json results;
  bool pass = true;
  const auto start = Clock::now();
  if (subcommand == "verify-all") {
    results = run_verify_all(ctx, pass);
  } else if (subcommand == "convergence") {
    auto [table, finest] = ladder(target_named(*target), ctx);
    pass = table["pass"].get<bool>();
    results = std::move(table);
  } else {
    const Scenario sc = Scenario::build(config, config.nx);
    if (subcommand == "check-pair") {
      results = run_check_pair(sc, ctx);
    } else if (subcommand == "isometry") {
      results = run_isometry(sc, ctx);
    } else {
      results = target_named(subcommand).run(sc, ctx);
    }
    pass = results["pass"].get<bool>();
  }
  ctx.timings["total"] = std::chrono::duration<double>(Clock::now() - start).count();

  out.report = Json::object();
  out.report["schema"] = "prehyp.report/1";
  out.report["subcommand"] = subcommand;
  if (target) out.report["target"] = *target;
  out.report["seed"] = ctx.seed;
  out.report["scenario"] = echo(config);
  out.report["results"] = std::move(results);
  out.report["pass"] = pass;
  out.timings = std::move(ctx.timings);
  out.csv = std::move(ctx.csv);
  out.pass = pass;
  return out;
}

void write_outputs(const RunResult& result, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  const auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream f(directory / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (directory / name).string());
    f << text;
  };
  write("report.json", result.report.dump(2) + "\n");
  write("timings.json", result.timings.dump(2) + "\n");
  for (const auto& [name, text] : result.csv) write(name, text);
}

}  // namespace prehyp::cli
