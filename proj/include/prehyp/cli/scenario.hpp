#pragma once

#include <optional>
#include <vector>

#include "prehyp/bundle_ops.hpp"
#include "prehyp/cli/config.hpp"
#include "prehyp/greens.hpp"
#include "prehyp/qft_dirac.hpp"

namespace prehyp::cli {

/// Builds a first-order operator from its expression arrays (real + i * imaginary parts).
bundle_ops::FirstOrderOperator build_operator(const OperatorConfig& op, int rank);

/// A resolved configuration instantiated on one grid resolution.
struct Scenario {
  ScenarioConfig config;
  geometry::DiagonalMetric metric;
  Grid1p1 grid;
  bundle_ops::FirstOrderOperator p, q;
  std::optional<bundle_ops::FirstOrderOperator> q_alt;

  static Scenario build(const ScenarioConfig& config, int nx);

  cauchy::SolveOptions solve_options() const;

  /// The [initial_data] datum; throws ConfigError when absent.
  CauchyData initial() const;
  /// [initial_data] followed by every [initial_data.NAME], in file order.
  std::vector<CauchyData> corpus() const;
  CauchyData sample(const DataConfig& d) const;
  greens::TestSection section(const DataConfig& d) const;

  /// Dirac presets only: the model whose (P, Q) this scenario uses.
  bool is_dirac() const;
  /// Dirac presets whose current is conserved (massless, or the imaginary-mass pair).
  bool has_conserved_current() const;
  qft_dirac::DiracModel dirac_model() const;

  /// Exact solution for constant-metric massless presets (characteristic shift).
  bool has_oracle() const;
  /// max over the grid of |phi - exact| for the [initial_data] datum.
  double oracle_error(const GridSection& phi) const;

  /// Default second hypersurface: the end of the evolved span.
  double sigma_prime() const;
  /// Default beta levels: the quarter points of the evolved span.
  std::vector<double> beta_levels() const;
};

}  // namespace prehyp::cli
