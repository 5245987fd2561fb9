// Acceptance suite: one line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "prehyp/cli/config.hpp"
#include "prehyp/cli/runner.hpp"
#include "prehyp/cli/scenario.hpp"
#include "prehyp/qft_dirac.hpp"

using namespace prehyp;
using cli::Json;

namespace {

std::string data_path(const std::string& name) { return std::string(PREHYP_DATA_DIR) + "/" + name; }

cli::ScenarioConfig load(const std::string& name, int nx = 1024) {
  cli::ScenarioConfig c = cli::load_config(data_path(name));
  c.nx = nx;
  return c;
}

Json results(const std::string& sub, const std::optional<std::string>& target, const cli::ScenarioConfig& c) {
  return cli::run(sub, target, c).report["results"];
}

double min_order(const Json& table, const std::string& key) { return table["min_order"][key].get<double>(); }

// Either every ladder value sits below round-off or the smallest adjacent order is large enough.
bool order_ok(const Json& table, const std::string& key, double order) {
  if (!table["min_order"].contains(key)) return true;
  return min_order(table, key) >= order;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Line {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

Line criterion1() {
  Line l;
  const geometry::Chart1p1 chart{0.0, 1.0, -1.0, 1.0, geometry::Topology::line};
  const geometry::DiagonalMetric metric = geometry::DiagonalMetric::minkowski(chart);
  qft_dirac::DiracModel model;
  model.mass = 1.0;
  const auto [p, q] = qft_dirac::build_dirac_pair(model);
  const Grid1p1 grid = Grid1p1::make(metric, 64);
  const auto points = bundle_ops::default_sample_points(grid);
  const bundle_ops::PairReport r = bundle_ops::is_complementary_pair(p, q, metric, points, 1e-12);
  const double dev = std::max(r.pq.max_deviation, r.qp.max_deviation);
  l.check(r.pass && dev <= 1e-12, "max deviation " + fmt(dev) + " <= 1e-12");
  return l;
}

Line criterion2() {
  Line l;
  cli::ScenarioConfig c = load("dirac_massive.cfg", 256);
  c.probe_count = 200;
  const Json r = results("check-pair", std::nullopt, c)["symbol_probe"];
  l.check(r["probes"].get<int>() == 200 && r["singular"].get<int>() == 0, "200 probes, 0 singular");
  l.check(r["determinant_bound_checked"].get<bool>() && r["min_determinant_margin"].get<double>() >= -1e-10,
          "min |det| - |g| = " + fmt(r["min_determinant_margin"].get<double>()) + " >= -1e-10");
  return l;
}

Line criterion3() {
  Line l;
  const Json massless = results("convergence", "solve", load("dirac_massless.cfg"));
  const Json massive = results("convergence", "solve", load("dirac_massive.cfg"));
  l.check(order_ok(massless, "residual_l2", 1.8), "massless residual order " + fmt(min_order(massless, "residual_l2")));
  l.check(order_ok(massive, "residual_l2", 1.8), "massive residual order " + fmt(min_order(massive, "residual_l2")));
  const double oracle = massless["levels"][2]["errors"]["oracle_error"].get<double>();
  l.check(oracle <= 5e-4, "oracle error " + fmt(oracle) + " <= 5e-4");
  return l;
}

Line criterion4() {
  Line l;
  for (const char* name : {"dirac_massless.cfg", "dirac_massive.cfg", "klein_gordon.cfg", "scalar_transport.cfg"}) {
    const Json t = results("convergence", "direct-vs-reduced", load(name));
    const double rel = t["levels"][2]["errors"]["relative_difference"].get<double>();
    const std::string preset = cli::load_config(data_path(name)).preset;
    l.check(rel <= 1e-3 && order_ok(t, "relative_difference", 1.8),
            preset + " " + fmt(rel) + " order " + fmt(min_order(t, "relative_difference")));
  }
  return l;
}

Line criterion5() {
  Line l;
  for (const char* name : {"dirac_massive.cfg", "dirac_slow.cfg"}) {
    const Json r = results("solve", std::nullopt, load(name));
    const double leak = r["support_leak"].get<double>();
    l.check(leak <= 1e-7, std::string(name) + " leak " + fmt(leak));
  }
  return l;
}

Line criterion6() {
  Line l;
  // Constant coefficients make the discrete pairing exact to rounding; the potential case
  // exercises the order of the pairing defect.
  for (const char* name : {"dirac_massless.cfg", "dirac_potential.cfg"}) {
    const Json t = results("convergence", "greens", load(name));
    const Json fine = t["levels"][2]["errors"];
    l.check(order_ok(t, "identity_i_residual", 1.8) && order_ok(t, "identity_ii_residual", 1.8),
            std::string(name) + " identity orders " + fmt(min_order(t, "identity_i_residual")) + "/" +
                fmt(min_order(t, "identity_ii_residual")));
    const double pairing = fine["pairing_defect"].get<double>();
    l.check(pairing <= 1e-3 && order_ok(t, "pairing_defect", 1.8), "pairing " + fmt(pairing));
  }
  const Json g = results("greens", std::nullopt, load("dirac_potential.cfg"));
  l.check(g["support_leak"].get<double>() <= 1e-7, "leak " + fmt(g["support_leak"].get<double>()));
  l.check(g["negative_control_defect"].get<double>() >= 1e-1,
          "control " + fmt(g["negative_control_defect"].get<double>()));
  return l;
}

Line criterion7() {
  Line l;
  const Json t = results("convergence", "round-trip", load("dirac_massive.cfg"));
  const double e = t["levels"][2]["errors"]["round_trip_error"].get<double>();
  l.check(e <= 1e-3, "round trip " + fmt(e) + " <= 1e-3");
  l.check(order_ok(t, "round_trip_error", 1.8), "order " + fmt(min_order(t, "round_trip_error")));
  const Json r = results("round-trip", std::nullopt, load("dirac_massive.cfg"));
  const double lin = r["linearity_defect"].get<double>();
  l.check(lin <= 1e-12, "linearity " + fmt(lin) + " <= 1e-12");
  return l;
}

Line criterion8() {
  Line l;
  for (const char* name : {"dirac_massless.cfg", "klein_gordon.cfg"}) {
    const cli::ScenarioConfig c = load(name);
    const Json b = results("beta", std::nullopt, c);
    l.check(b["positivity_margin"].get<double>() > 0.0, std::string(name) + " beta(Phi,Phi) min " +
                                                            fmt(b["positivity_margin"].get<double>()));
    l.check(b["hermitian_defect"].get<double>() <= 1e-12, "hermitian " + fmt(b["hermitian_defect"].get<double>()));
    l.check(b["negative_control_drift"].get<double>() >= 1e-2,
            "control drift " + fmt(b["negative_control_drift"].get<double>()));
    const Json t = results("convergence", "beta", c);
    l.check(order_ok(t, "hypersurface_drift", 1.8), "drift order " + fmt(min_order(t, "hypersurface_drift")));
    const Json iso = results("isometry", std::nullopt, c);
    l.check(iso["max_relative_mismatch"].get<double>() <= 1e-3,
            "Gram mismatch " + fmt(iso["max_relative_mismatch"].get<double>()));
  }
  return l;
}

Line criterion9() {
  Line l;
  const cli::ScenarioConfig c = load("scalar_transport.cfg", 512);
  const std::string a = cli::run("verify-all", std::nullopt, c).report.dump(2);
  const std::string b = cli::run("verify-all", std::nullopt, c).report.dump(2);
  l.check(a == b, "verify-all report.json identical across two runs (" + std::to_string(a.size()) + " bytes)");
  return l;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Line()>>> criteria = {
      {"complementary pair predicate", criterion1},
      {"principal symbol probe", criterion2},
      {"Cauchy solve convergence", criterion3},
      {"reduction equivalence", criterion4},
      {"finite propagation", criterion5},
      {"Green's operators", criterion6},
      {"round trip", criterion7},
      {"Dirac inner product", criterion8},
      {"determinism", criterion9}};
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Line l;
    try {
      l = criteria[i].second();
    } catch (const std::exception& e) {
      l.pass = false;
      l.detail = std::string("error: ") + e.what();
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %zu %s: %s (%s) [%.1f s]\n", i + 1, l.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                l.detail.c_str(), s);
    std::fflush(stdout);
    all = all && l.pass;
  }
  return all ? 0 : 1;
}
