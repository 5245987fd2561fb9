#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prehyp/error.hpp"
#include "prehyp/geometry.hpp"
#include "prehyp/grid.hpp"

/// Scenario configuration files.
///
/// A file is a list of `[section]` headers followed by `key = value` lines. Comments start
/// with '#'. A value is a scalar (number, word or expression) or a bracketed, comma
/// separated list, possibly nested: `A_t = [[0, 1], [1, 0]]`. Scalars may be quoted.
namespace prehyp::cli {

/// One parsed value with the line it came from.
struct Value {
  std::string text;           // scalar text (empty for lists)
  std::vector<Value> items;   // list items
  bool is_list = false;
  int line = 0;
};

struct Entry {
  std::string key;
  Value value;
};

struct Section {
  std::string name;
  int line = 0;
  std::vector<Entry> entries;

  const Value* find(std::string_view key) const;
};

/// Syntax-level parse; throws ConfigError("line N: ...").
std::vector<Section> parse_sections(std::string_view text);

/// Coefficients of one first-order operator as k x k expression arrays.
struct OperatorConfig {
  std::optional<std::string> preset;  // before resolution
  double mass = 1.0;
  std::optional<std::string> potential;
  std::vector<std::vector<std::string>> a_t, a_x, b;
  std::vector<std::vector<std::string>> a_t_im, a_x_im, b_im;  // imaginary parts, may be empty
  std::vector<std::vector<std::string>> omega_t, omega_x;      // connection, may be empty
  bool present = false;
};

struct WindowConfig {
  double center = 0.0;
  double halfwidth = 1.0;
  double steepness = 1.0;

  SmoothWindow window() const { return {center, halfwidth, steepness}; }
};

struct DataConfig {
  std::string name;
  std::vector<std::string> components;
  std::optional<WindowConfig> window;    // spatial
  std::optional<WindowConfig> t_window;  // sources only
  std::optional<double> t0;              // Cauchy data only; defaults to the start of grid.t_span
};

struct Tolerances {
  double leak = 1e-7;
  double oracle = 5e-4;
  double reduction = 1e-3;
  double round_trip = 1e-3;
  double linearity = 1e-12;
  double pairing = 1e-3;
  double greens_control = 1e-1;
  double beta_control = 1e-2;
  double hermitian = 1e-12;
  double gram = 1e-3;
  double order = 1.8;
  double symbol_bound = 1e-10;
  double roundoff = 1e-12;  // ladder values below this count as converged
};

struct ScenarioConfig {
  std::string alpha;
  std::string beta;
  double t_min = 0.0, t_max = 1.0;
  double x_min = -1.0, x_max = 1.0;
  geometry::Topology topology = geometry::Topology::line;
  int rank = 1;

  OperatorConfig p, q;
  std::optional<OperatorConfig> q_alt;
  std::string preset;  // name of the preset P/Q were resolved from, empty if explicit
  double preset_mass = 0.0;

  int nx = 256;
  double cfl = 0.5;
  double t_start = 0.0, t_end = 1.0;

  std::optional<DataConfig> initial;
  std::vector<DataConfig> extra_data;
  std::optional<DataConfig> source, dual_source, pairing_source;

  std::optional<double> sigma_prime;
  std::vector<double> beta_levels;
  int probe_count = 200;
  std::uint64_t seed = 0;  // randomized probes; --seed overrides
  bool dissipation = false;

  Tolerances tol;
  std::string output_directory = ".";
  std::vector<std::string> formats = {"json"};

  geometry::Chart1p1 chart() const { return {t_min, t_max, x_min, x_max, topology}; }
};

/// Parses, resolves presets and validates. Errors are ConfigError naming the key.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Names accepted in `preset = ...`.
const std::vector<std::string>& preset_names();

}  // namespace prehyp::cli
