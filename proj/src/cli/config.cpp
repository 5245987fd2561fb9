#include "prehyp/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "evolve.hpp"
#include "prehyp/expr.hpp"

namespace prehyp::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail_line(int line, const std::string& msg) {
  throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

// Parses a scalar or bracketed list starting at text[pos].
Value parse_value(std::string_view text, std::size_t& pos, int line) {
  while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  Value v;
  v.line = line;
  if (pos < text.size() && text[pos] == '[') {
    v.is_list = true;
    ++pos;
    while (true) {
      while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
      if (pos >= text.size()) fail_line(line, "unterminated list");
      if (text[pos] == ']' && v.items.empty()) {
        ++pos;
        break;
      }
      v.items.push_back(parse_value(text, pos, line));
      while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
      if (pos >= text.size()) fail_line(line, "unterminated list");
      if (text[pos] == ',') {
        ++pos;
        continue;
      }
      if (text[pos] == ']') {
        ++pos;
        break;
      }
      fail_line(line, std::string("unexpected '") + text[pos] + "' in list");
    }
    return v;
  }
  if (pos < text.size() && text[pos] == '"') {
    const auto close = text.find('"', pos + 1);
    if (close == std::string_view::npos) fail_line(line, "unterminated string");
    v.text = std::string(text.substr(pos + 1, close - pos - 1));
    pos = close + 1;
    return v;
  }
  // Bare scalar: up to a comma or bracket at parenthesis depth 0.
  const std::size_t start = pos;
  int depth = 0;
  while (pos < text.size()) {
    const char c = text[pos];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (depth == 0 && (c == ',' || c == ']' || c == '[')) break;
    ++pos;
  }
  v.text = trim(text.substr(start, pos - start));
  if (v.text.empty()) fail_line(line, "empty value");
  return v;
}

double to_double(const Value& v, const std::string& key) {
  if (v.is_list) fail_line(v.line, key + " must be a number");
  double out = 0.0;
  const char* b = v.text.data();
  const char* e = b + v.text.size();
  const auto r = std::from_chars(b, e, out);
  if (r.ec != std::errc{} || r.ptr != e || !std::isfinite(out)) {
    // Allow constant expressions such as "2*pi".
    try {
      const expr::Expr ex = expr::Expr::parse(v.text);
      if (!ex.is_constant()) fail_line(v.line, key + " must be a constant");
      return ex.eval(0.0, 0.0);
    } catch (const expr::ParseError&) {
      fail_line(v.line, key + " must be a number, got '" + v.text + "'");
    }
  }
  return out;
}

int to_int(const Value& v, const std::string& key) {
  if (v.is_list) fail_line(v.line, key + " must be an integer");
  int out = 0;
  const char* b = v.text.data();
  const char* e = b + v.text.size();
  const auto r = std::from_chars(b, e, out);
  if (r.ec != std::errc{} || r.ptr != e) fail_line(v.line, key + " must be an integer, got '" + v.text + "'");
  return out;
}

std::string to_string_value(const Value& v, const std::string& key) {
  if (v.is_list) fail_line(v.line, key + " must be a scalar");
  return v.text;
}

std::vector<double> to_doubles(const Value& v, const std::string& key) {
  if (!v.is_list) fail_line(v.line, key + " must be a list");
  std::vector<double> out;
  for (const Value& item : v.items) out.push_back(to_double(item, key));
  return out;
}

std::pair<double, double> to_range(const Value& v, const std::string& key) {
  const std::vector<double> r = to_doubles(v, key);
  if (r.size() != 2 || !(r[0] < r[1])) fail_line(v.line, key + " must be [lo, hi] with lo < hi");
  return {r[0], r[1]};
}

std::vector<std::string> to_strings(const Value& v, const std::string& key) {
  if (!v.is_list) fail_line(v.line, key + " must be a list");
  std::vector<std::string> out;
  for (const Value& item : v.items) out.push_back(to_string_value(item, key));
  return out;
}

std::vector<std::vector<std::string>> to_matrix(const Value& v, const std::string& key, int rank) {
  if (!v.is_list || static_cast<int>(v.items.size()) != rank) {
    fail_line(v.line, key + " must be a " + std::to_string(rank) + "x" + std::to_string(rank) + " array");
  }
  std::vector<std::vector<std::string>> out;
  for (const Value& row : v.items) {
    if (!row.is_list || static_cast<int>(row.items.size()) != rank) {
      fail_line(v.line, key + " must be a " + std::to_string(rank) + "x" + std::to_string(rank) + " array");
    }
    out.push_back(to_strings(row, key));
  }
  return out;
}

void require_expression(const std::string& text, const std::string& key) {
  try {
    (void)expr::Expr::parse(text);
  } catch (const expr::ParseError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

std::string format_number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// Rejects keys not in `allowed`; names ending in '.' allow any suffix.
void check_keys(const Section& s, const std::set<std::string>& allowed) {
  for (const Entry& e : s.entries) {
    if (allowed.count(e.key)) continue;
    throw ConfigError("line " + std::to_string(e.value.line) + ": unknown key " + s.name + "." + e.key);
  }
}

const std::set<std::string> kWindowKeys = {"window.center", "window.halfwidth", "window.steepness"};
const std::set<std::string> kTimeWindowKeys = {"t_window.center", "t_window.halfwidth", "t_window.steepness"};

std::optional<WindowConfig> read_window(const Section& s, const std::string& prefix) {
  const Value* c = s.find(prefix + ".center");
  const Value* h = s.find(prefix + ".halfwidth");
  const Value* st = s.find(prefix + ".steepness");
  if (!c && !h && !st) return std::nullopt;
  const std::string base = s.name + "." + prefix;
  if (!c) throw ConfigError(base + ".center required");
  if (!h) throw ConfigError(base + ".halfwidth required");
  WindowConfig w;
  w.center = to_double(*c, base + ".center");
  w.halfwidth = to_double(*h, base + ".halfwidth");
  if (st) w.steepness = to_double(*st, base + ".steepness");
  if (!(w.halfwidth > 0.0)) throw ConfigError(base + ".halfwidth must be positive");
  if (!(w.steepness >= 1.0)) throw ConfigError(base + ".steepness must be >= 1");
  return w;
}

DataConfig read_data(const Section& s, bool is_source) {
  std::set<std::string> keys = kWindowKeys;
  keys.insert("components");
  if (is_source) {
    keys.insert(kTimeWindowKeys.begin(), kTimeWindowKeys.end());
  } else {
    keys.insert("t0");
  }
  check_keys(s, keys);
  DataConfig d;
  d.name = s.name;
  const Value* comps = s.find("components");
  if (!comps) throw ConfigError(s.name + ".components required");
  d.components = to_strings(*comps, s.name + ".components");
  for (const std::string& c : d.components) require_expression(c, s.name + ".components");
  d.window = read_window(s, "window");
  if (is_source) {
    d.t_window = read_window(s, "t_window");
    if (!d.window) throw ConfigError(s.name + ".window required");
    if (!d.t_window) throw ConfigError(s.name + ".t_window required");
  } else if (const Value* t0 = s.find("t0")) {
    d.t0 = to_double(*t0, s.name + ".t0");
  }
  return d;
}

OperatorConfig read_operator(const Section& s, int rank) {
  check_keys(s, {"preset", "mass", "potential", "A_t", "A_x", "B", "A_t.im", "A_x.im", "B.im", "omega_t", "omega_x"});
  OperatorConfig op;
  op.present = true;
  const bool explicit_coeffs = s.find("A_t") || s.find("A_x") || s.find("B") || s.find("A_t.im") ||
                               s.find("A_x.im") || s.find("B.im") || s.find("omega_t") || s.find("omega_x");
  if (const Value* p = s.find("preset")) {
    if (explicit_coeffs) throw ConfigError(s.name + ": preset and explicit coefficients are mutually exclusive");
    op.preset = to_string_value(*p, s.name + ".preset");
    if (const Value* m = s.find("mass")) op.mass = to_double(*m, s.name + ".mass");
    if (const Value* a = s.find("potential")) {
      op.potential = to_string_value(*a, s.name + ".potential");
      require_expression(*op.potential, s.name + ".potential");
    }
    return op;
  }
  if (s.find("mass") || s.find("potential")) throw ConfigError(s.name + ": mass and potential need a preset");
  const auto matrix = [&](const char* key, bool required) {
    const Value* v = s.find(key);
    if (!v) {
      if (required) throw ConfigError(s.name + "." + key + " required");
      return std::vector<std::vector<std::string>>{};
    }
    auto m = to_matrix(*v, s.name + "." + key, rank);
    for (const auto& row : m) {
      for (const auto& e : row) require_expression(e, s.name + "." + key);
    }
    return m;
  };
  op.a_t = matrix("A_t", true);
  op.a_x = matrix("A_x", true);
  op.b = matrix("B", false);
  op.a_t_im = matrix("A_t.im", false);
  op.a_x_im = matrix("A_x.im", false);
  op.b_im = matrix("B.im", false);
  op.omega_t = matrix("omega_t", false);
  op.omega_x = matrix("omega_x", false);
  if (op.b.empty()) op.b.assign(rank, std::vector<std::string>(rank, "0"));
  return op;
}

std::string reciprocal(const std::string& e) {
  if (trim(e) == "1") return "1";
  return "1/(" + e + ")";
}

std::string negated(const std::string& e) {
  const std::string t = trim(e);
  if (t == "0") return "0";
  double v = 0.0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (r.ec == std::errc{} && r.ptr == t.data() + t.size()) return t.front() == '-' ? t.substr(1) : "-" + t;
  return "-(" + e + ")";
}

using Matrix = std::vector<std::vector<std::string>>;

Matrix diag2(const std::string& a) { return {{a, "0"}, {"0", a}}; }

// Resolves the preset in cfg.p into explicit coefficients for P and Q.
void resolve_preset(ScenarioConfig& cfg) {
  const std::string name = *cfg.p.preset;
  const auto& names = preset_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw ConfigError("operator_P.preset: unknown preset '" + name + "'");
  }
  cfg.preset = name;
  cfg.preset_mass = cfg.p.mass;
  const std::string ia = reciprocal(cfg.alpha);
  const std::string ib = reciprocal(cfg.beta);
  OperatorConfig p;
  OperatorConfig q;
  p.present = q.present = true;
  if (name == "scalar_transport_pair") {
    if (cfg.rank != 1) throw ConfigError("bundle.rank must be 1 for preset scalar_transport_pair");
    if (cfg.p.potential) throw ConfigError("operator_P.potential is not used by scalar_transport_pair");
    p.a_t = q.a_t = {{ia}};
    p.a_x = {{ib}};
    q.a_x = {{negated(ib)}};
    p.b = q.b = {{"0"}};
  } else {
    if (cfg.rank != 2) throw ConfigError("bundle.rank must be 2 for preset " + name);
    p.a_t = q.a_t = {{"0", ia}, {ia, "0"}};
    p.a_x = q.a_x = {{"0", negated(ib)}, {ib, "0"}};
    const std::string m = cfg.p.potential ? *cfg.p.potential : format_number(cfg.p.mass);
    if (!cfg.p.potential && cfg.p.mass < 0.0) throw ConfigError("operator_P.mass must be >= 0");
    if (name == "dirac_massless") {
      if (cfg.p.potential) throw ConfigError("operator_P.potential is not used by dirac_massless");
      p.b = q.b = diag2("0");
    } else if (name == "dirac_massive") {
      p.b = diag2(m);
      q.b = diag2(negated(m));
    } else {  // klein_gordon_factorized: D + i m, D - i m
      p.b = q.b = diag2("0");
      p.b_im = diag2(m);
      q.b_im = diag2(negated(m));
    }
  }
  cfg.p = p;
  if (!cfg.q.present) cfg.q = q;
}

void validate_windows(const ScenarioConfig& cfg) {
  const geometry::Chart1p1 chart = cfg.chart();
  const geometry::DiagonalMetric metric(chart, expr::Expr::parse(cfg.alpha), expr::Expr::parse(cfg.beta));
  Grid1p1 grid;
  try {
    grid = Grid1p1::make(metric, cfg.nx, cfg.cfl, cfg.t_start, cfg.t_end);
  } catch (const Error& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
  const auto check_data = [&](const DataConfig& d) {
    if (!d.window) {
      if (chart.topology == geometry::Topology::line) {
        throw ConfigError(d.name + ".window required on a line chart");
      }
      return;
    }
    const geometry::Interval sup = d.window->window().support();
    if (chart.topology == geometry::Topology::line && (sup.lo <= chart.x_min || sup.hi >= chart.x_max)) {
      throw ConfigError(d.name + ".window: causal margin violated (support touches the chart boundary)");
    }
    if (chart.topology == geometry::Topology::circle && sup.length() >= chart.period()) {
      throw ConfigError(d.name + ".window: support wider than the circle");
    }
  };
  const auto check_cauchy = [&](const DataConfig& d) {
    check_data(d);
    const double t0 = d.t0.value_or(cfg.t_start);
    if (t0 < cfg.t_start || t0 > cfg.t_end) throw ConfigError(d.name + ".t0 must lie in grid.t_span");
    if (!d.window) return;
    try {
      detail::check_causal_margin(metric, grid, geometry::IntervalSet(d.window->window().support()), t0);
    } catch (const DomainError&) {
      throw ConfigError(d.name + ".window: causal margin violated");
    }
  };
  const auto check_source = [&](const DataConfig& d) {
    check_data(d);
    const geometry::Interval ts = d.t_window->window().support();
    if (ts.lo < grid.t(8) || ts.hi > grid.t(grid.nt - 9)) {
      throw ConfigError(d.name + ".t_window: source box touches temporal boundary margin");
    }
    if (chart.topology == geometry::Topology::circle) return;
    const geometry::Interval xs = d.window->window().support();
    const auto fut = geometry::causal_shadow_between(metric, xs, ts.lo, ts.lo, grid.t_end(), grid.dt);
    const auto past = geometry::causal_shadow_between(metric, xs, ts.hi, grid.t_start, ts.hi, grid.dt);
    for (const auto* s : {&fut, &past}) {
      for (const auto& set : s->sets) {
        const geometry::Interval h = set.hull();
        if (s->truncated || h.lo < chart.x_min + 8 * grid.dx || h.hi > chart.x_max - 8 * grid.dx) {
          throw ConfigError(d.name + ".window: causal margin violated");
        }
      }
    }
  };
  if (cfg.initial) check_cauchy(*cfg.initial);
  for (const DataConfig& d : cfg.extra_data) check_cauchy(d);
  for (const auto* s : {&cfg.source, &cfg.dual_source, &cfg.pairing_source}) {
    if (*s) check_source(**s);
  }
  if (cfg.sigma_prime && (*cfg.sigma_prime < cfg.t_start || *cfg.sigma_prime > cfg.t_end)) {
    throw ConfigError("checks.sigma_prime must lie in grid.t_span");
  }
  for (double t : cfg.beta_levels) {
    if (t < cfg.t_start || t > cfg.t_end) throw ConfigError("checks.beta_levels must lie in grid.t_span");
  }
}

void validate_metric(const ScenarioConfig& cfg) {
  const expr::Expr a = expr::Expr::parse(cfg.alpha);
  const expr::Expr b = expr::Expr::parse(cfg.beta);
  for (int s = 0; s <= 32; ++s) {
    const double t = cfg.t_min + (cfg.t_max - cfg.t_min) * s / 32.0;
    for (int i = 0; i <= 64; ++i) {
      const double x = cfg.x_min + (cfg.x_max - cfg.x_min) * i / 64.0;
      double av = 0.0, bv = 0.0;
      try {
        av = a.eval(t, x);
        bv = b.eval(t, x);
      } catch (const expr::EvalError& e) {
        throw ConfigError(std::string("spacetime: ") + e.what());
      }
      if (!(av > 0.0)) throw ConfigError("spacetime.alpha must be positive on the chart");
      if (!(bv > 0.0)) throw ConfigError("spacetime.beta must be positive on the chart");
    }
  }
}

}  // namespace

const Value* Section::find(std::string_view key) const {
  for (const Entry& e : entries) {
    if (e.key == key) return &e.value;
  }
  return nullptr;
}

std::vector<Section> parse_sections(std::string_view text) {
  std::vector<Section> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail_line(line, "malformed section header");
      const std::string name = trim(std::string_view(s).substr(1, s.size() - 2));
      if (!valid_name(name)) fail_line(line, "invalid section name '" + name + "'");
      for (const Section& prev : out) {
        if (prev.name == name) fail_line(line, "duplicate section [" + name + "]");
      }
      out.push_back({name, line, {}});
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail_line(line, "expected 'key = value'");
    if (out.empty()) fail_line(line, "key outside of a section");
    const std::string key = trim(std::string_view(s).substr(0, eq));
    if (!valid_name(key)) fail_line(line, "invalid key '" + key + "'");
    if (out.back().find(key)) fail_line(line, "duplicate key " + out.back().name + "." + key);
    std::size_t pos = eq + 1;
    Value v = parse_value(s, pos, line);
    if (trim(std::string_view(s).substr(pos)).size() != 0) fail_line(line, "trailing characters after value");
    out.back().entries.push_back({key, std::move(v)});
  }
  return out;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"dirac_massive", "dirac_massless", "scalar_transport_pair",
                                                 "klein_gordon_factorized"};
  return names;
}

ScenarioConfig parse_config(std::string_view text) {
  const std::vector<Section> sections = parse_sections(text);
  const auto get = [&](std::string_view name) -> const Section* {
    for (const Section& s : sections) {
      if (s.name == name) return &s;
    }
    return nullptr;
  };
  for (const Section& s : sections) {
    static const std::set<std::string> known = {"spacetime", "bundle",  "operator_P", "operator_Q",
                                                "operator_Q_alt", "grid", "initial_data", "source",
                                                "dual_source", "pairing_source", "checks", "tolerances",
                                                "output"};
    if (known.count(s.name) || s.name.rfind("initial_data.", 0) == 0) continue;
    throw ConfigError("line " + std::to_string(s.line) + ": unknown section [" + s.name + "]");
  }

  ScenarioConfig cfg;
  const Section* st = get("spacetime");
  if (!st) throw ConfigError("spacetime.alpha required");
  check_keys(*st, {"alpha", "beta", "t_range", "x_range", "topology"});
  const Value* v = st->find("alpha");
  if (!v) throw ConfigError("spacetime.alpha required");
  cfg.alpha = to_string_value(*v, "spacetime.alpha");
  require_expression(cfg.alpha, "spacetime.alpha");
  if (!(v = st->find("beta"))) throw ConfigError("spacetime.beta required");
  cfg.beta = to_string_value(*v, "spacetime.beta");
  require_expression(cfg.beta, "spacetime.beta");
  if (!(v = st->find("t_range"))) throw ConfigError("spacetime.t_range required");
  std::tie(cfg.t_min, cfg.t_max) = to_range(*v, "spacetime.t_range");
  if (!(v = st->find("x_range"))) throw ConfigError("spacetime.x_range required");
  std::tie(cfg.x_min, cfg.x_max) = to_range(*v, "spacetime.x_range");
  if ((v = st->find("topology"))) {
    const std::string t = to_string_value(*v, "spacetime.topology");
    if (t == "line") {
      cfg.topology = geometry::Topology::line;
    } else if (t == "circle") {
      cfg.topology = geometry::Topology::circle;
    } else {
      throw ConfigError("spacetime.topology must be line or circle");
    }
  }
  validate_metric(cfg);

  const Section* bundle = get("bundle");
  if (!bundle || !bundle->find("rank")) throw ConfigError("bundle.rank required");
  check_keys(*bundle, {"rank"});
  cfg.rank = to_int(*bundle->find("rank"), "bundle.rank");
  if (cfg.rank < 1 || cfg.rank > kMaxRank) throw ConfigError("bundle.rank must be in 1..4");

  const Section* op_p = get("operator_P");
  if (!op_p) throw ConfigError("operator_P required");
  cfg.p = read_operator(*op_p, cfg.rank);
  if (const Section* op_q = get("operator_Q")) {
    cfg.q = read_operator(*op_q, cfg.rank);
    if (cfg.q.preset) throw ConfigError("operator_Q: presets are set on operator_P only");
  }
  if (const Section* alt = get("operator_Q_alt")) {
    cfg.q_alt = read_operator(*alt, cfg.rank);
    if (cfg.q_alt->preset) throw ConfigError("operator_Q_alt: presets are set on operator_P only");
  }
  if (cfg.p.preset) {
    resolve_preset(cfg);
  } else if (!cfg.q.present) {
    throw ConfigError("operator_Q required when operator_P has explicit coefficients");
  }

  const Section* grid = get("grid");
  if (!grid || !grid->find("nx")) throw ConfigError("grid.nx required");
  check_keys(*grid, {"nx", "cfl", "t_span", "dissipation"});
  cfg.nx = to_int(*grid->find("nx"), "grid.nx");
  if (cfg.nx < 16) throw ConfigError("grid.nx must be >= 16");
  if ((v = grid->find("cfl"))) cfg.cfl = to_double(*v, "grid.cfl");
  if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0)) throw ConfigError("grid.cfl must lie in (0, 1]");
  cfg.t_start = cfg.t_min;
  cfg.t_end = cfg.t_max;
  if ((v = grid->find("t_span"))) {
    std::tie(cfg.t_start, cfg.t_end) = to_range(*v, "grid.t_span");
    if (cfg.t_start < cfg.t_min || cfg.t_end > cfg.t_max) {
      throw ConfigError("grid.t_span must lie inside spacetime.t_range");
    }
  }
  if ((v = grid->find("dissipation"))) {
    const std::string d = to_string_value(*v, "grid.dissipation");
    if (d != "on" && d != "off") throw ConfigError("grid.dissipation must be on or off");
    cfg.dissipation = d == "on";
  }

  if (const Section* s = get("initial_data")) cfg.initial = read_data(*s, false);
  for (const Section& s : sections) {
    if (s.name.rfind("initial_data.", 0) == 0) cfg.extra_data.push_back(read_data(s, false));
  }
  if (const Section* s = get("source")) cfg.source = read_data(*s, true);
  if (const Section* s = get("dual_source")) cfg.dual_source = read_data(*s, true);
  if (const Section* s = get("pairing_source")) cfg.pairing_source = read_data(*s, true);
  for (const DataConfig* d : {cfg.initial ? &*cfg.initial : nullptr, cfg.source ? &*cfg.source : nullptr,
                              cfg.dual_source ? &*cfg.dual_source : nullptr,
                              cfg.pairing_source ? &*cfg.pairing_source : nullptr}) {
    if (d && static_cast<int>(d->components.size()) != cfg.rank) {
      throw ConfigError(d->name + ".components must have bundle.rank entries");
    }
  }
  for (const DataConfig& d : cfg.extra_data) {
    if (static_cast<int>(d.components.size()) != cfg.rank) {
      throw ConfigError(d.name + ".components must have bundle.rank entries");
    }
  }

  if (const Section* s = get("checks")) {
    check_keys(*s, {"sigma_prime", "beta_levels", "probe_count", "seed"});
    if ((v = s->find("sigma_prime"))) cfg.sigma_prime = to_double(*v, "checks.sigma_prime");
    if ((v = s->find("beta_levels"))) cfg.beta_levels = to_doubles(*v, "checks.beta_levels");
    if ((v = s->find("probe_count"))) cfg.probe_count = to_int(*v, "checks.probe_count");
    if (cfg.probe_count < 1) throw ConfigError("checks.probe_count must be positive");
    if ((v = s->find("seed"))) {
      const int seed = to_int(*v, "checks.seed");
      if (seed < 0) throw ConfigError("checks.seed must be >= 0");
      cfg.seed = static_cast<std::uint64_t>(seed);
    }
  }

  if (const Section* s = get("tolerances")) {
    Tolerances& t = cfg.tol;
    const std::vector<std::pair<const char*, double*>> fields = {
        {"leak", &t.leak},           {"oracle", &t.oracle},       {"reduction", &t.reduction},
        {"round_trip", &t.round_trip}, {"linearity", &t.linearity}, {"pairing", &t.pairing},
        {"greens_control", &t.greens_control}, {"beta_control", &t.beta_control},
        {"hermitian", &t.hermitian}, {"gram", &t.gram},           {"order", &t.order},
        {"symbol_bound", &t.symbol_bound},       {"roundoff", &t.roundoff}};
    std::set<std::string> keys;
    for (const auto& f : fields) keys.insert(f.first);
    check_keys(*s, keys);
    for (const auto& [key, dst] : fields) {
      if ((v = s->find(key))) *dst = to_double(*v, std::string("tolerances.") + key);
    }
  }

  if (const Section* s = get("output")) {
    check_keys(*s, {"directory", "formats"});
    if ((v = s->find("directory"))) cfg.output_directory = to_string_value(*v, "output.directory");
    if ((v = s->find("formats"))) {
      cfg.formats = to_strings(*v, "output.formats");
      for (const std::string& f : cfg.formats) {
        if (f != "json" && f != "csv") throw ConfigError("output.formats accepts json and csv");
      }
    }
  }

  validate_windows(cfg);
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace prehyp::cli
