#pragma once

#include <optional>
#include <string>

#include "hlab/metric.hpp"
#include "hlab/solver.hpp"
#include "json.hpp"

namespace hlab {

struct Tolerances {
  double main_inequality = 1e-6;
  double identities = 1e-2;
  double lemmas = 1e-3;
  double conditions = 1e-10;
  double reference = 1e-3;

  void scale(double factor);
};

struct CheckSwitches {
  /// Off for scenarios whose u is prescribed rather than solved: the
  /// inequality is then reported but does not decide the exit status.
  bool main_inequality = true;
  bool identities = true;
  bool dirichlet_lemma = true;
  bool neumann_lemma = true;
  bool conditions = true;
};

struct VerificationConfig {
  int n_levels = 64;
  /// Absolute threshold; when absent, epsilon_reg_relative * max |grad u|.
  std::optional<double> epsilon_reg;
  double epsilon_reg_relative = 1e-3;
  std::optional<std::array<double, 2>> level_range;
  std::optional<double> eps_neq0;
  double h_term_weight = 1.0;
  /// Mollifier width for the C0 estimate.
  double c0_delta = 1e-2;
  int identity_layers = 2;
  /// Fraction of each face skipped next to its edges in the Dirichlet lemma.
  double lemma_edge_fraction = 0.0;
  /// Largest |du(eta)| accepted on zero-flux faces.
  double neumann_flux_tol = 1e-6;
  Tolerances tolerances;
  CheckSwitches checks;
  /// Closed form of the solution, when known.
  std::optional<Expr> reference;
};

struct ScenarioConfig {
  enum class PFamily { Zero, ScaledMetric, Components };
  enum class UMode { Solve, Analytic };

  std::string name;
  std::string description;
  std::array<int, 3> dims{33, 33, 33};
  Vec3 lower{0, 0, 0};
  Vec3 upper{1, 1, 1};

  MetricSpec metric;
  /// Sidecar of a six-component dump; replaces `metric` when set.
  std::optional<std::string> metric_file;

  PFamily p_family = PFamily::Zero;
  double p_scale = 0.0;
  std::array<Expr, 6> p_components{};
  Expr h{0.0};

  UMode u_mode = UMode::Solve;
  Expr u_expr{0.0};
  BoundaryCondition boundary;
  SolverConfig solver;
  VerificationConfig verification;
  std::string output_dir;

  /// The validated input, used for hashing and echoed into reports.
  nlohmann::json source;

  Grid grid() const;
  /// Same scenario with `cells` cells per axis.
  ScenarioConfig at_resolution(int cells) const;
};

/// Throws ConfigError with the offending key path.
ScenarioConfig parse_scenario(const nlohmann::json& j);
ScenarioConfig load_scenario(const std::string& path);

Expr parse_expr(const nlohmann::json& j, const std::string& path);

struct CatalogEntry {
  std::string name;
  std::string description;
  nlohmann::json config;
};

const std::vector<CatalogEntry>& builtin_catalog();
/// Throws ConfigError for unknown names.
const CatalogEntry& builtin(const std::string& name);

/// A path to a JSON file, or "builtin:<name>".
ScenarioConfig resolve_scenario(const std::string& ref);

}  // namespace hlab
