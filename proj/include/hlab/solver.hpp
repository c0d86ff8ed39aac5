#pragma once

#include <functional>
#include <optional>

#include <Eigen/Sparse>

#include "hlab/differential.hpp"
#include "hlab/errors.hpp"

namespace hlab {

struct FaceCondition {
  enum class Kind { Dirichlet, Neumann };
  Kind kind = Kind::Dirichlet;
  /// Boundary values for Dirichlet faces; unused for zero-flux faces.
  Expr value{0.0};

  static FaceCondition dirichlet(Expr v) { return {Kind::Dirichlet, std::move(v)}; }
  static FaceCondition neumann() { return {Kind::Neumann, Expr(0.0)}; }
};

struct BoundaryCondition {
  std::array<FaceCondition, 6> faces{};
  /// Gauge fix for pure zero-flux problems.
  std::optional<Index3> pin;
  double pin_value = 0.0;

  static BoundaryCondition all_dirichlet(const Expr& v);
  const FaceCondition& face(Face f) const { return faces[static_cast<int>(f)]; }
  FaceCondition& face(Face f) { return faces[static_cast<int>(f)]; }
  bool any_dirichlet() const;
  /// Tags the grid faces to match.
  void tag(Grid& g) const;
};

struct SolverConfig {
  std::vector<double> delta_schedule{1e-2, 1e-3, 1e-4, 1e-6};
  double picard_tol = 1e-8;
  int picard_max_iters = 200;
  double linear_tol = 1e-11;
  int linear_max_iters = 20000;
  double damping = 0.8;
  /// Re-solve from a perturbed start and report the difference.
  bool sensitivity_probe = false;

  void validate() const;
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Discrete Laplace-Beltrami operator with boundary rows folded in.
struct LaplaceOperator {
  enum class Row : unsigned char { Interior, Dirichlet, Neumann, Pinned };
  SparseMatrix matrix;
  std::vector<Row> rows;
  /// Right-hand side contribution of the boundary rows.
  Eigen::VectorXd boundary_rhs;
  Grid grid;
};

LaplaceOperator assemble_laplacian(const MetricData& m, const BoundaryCondition& bc);

/// Divergence-form (1/sqrt g) d_i (sqrt g g^{ij} d_j u) at one interior node,
/// as (flat index, coefficient) pairs. Shared by assembly and residuals.
std::vector<std::pair<std::size_t, double>> laplacian_stencil(const MetricData& m, Index3 node);

/// Applies the interior stencil; boundary nodes are left at zero.
ScalarField apply_laplacian(const ScalarField& u, const MetricData& m);

class LinearSolveError : public SolverError {
 public:
  LinearSolveError(const std::string& what, double residual, Eigen::VectorXd best)
      : SolverError(what, {}, residual), best_(std::move(best)) {}
  const Eigen::VectorXd& best_iterate() const { return best_; }

 private:
  Eigen::VectorXd best_;
};

struct LinearSolveResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// BiCGSTAB with a diagonal preconditioner. Deterministic for fixed input.
LinearSolveResult linear_solve(const LaplaceOperator& op, const Eigen::VectorXd& rhs, double tol,
                               int max_iters = 20000,
                               const Eigen::VectorXd* guess = nullptr);

struct DeltaStage {
  double delta = 0.0;
  int iterations = 0;
  std::vector<double> updates;
};

struct SolveResult {
  ScalarField u;
  /// Delta u + (P - h) |grad u| after the closing unregularized stage; zero on boundary nodes.
  ScalarField residual_field;
  int iterations = 0;
  bool converged = false;
  /// Last entry of the schedule; the closing stage always runs at zero.
  double delta_final = 0.0;
  double residual_max = 0.0;
  std::vector<DeltaStage> stages;
  int linear_iterations = 0;
  /// Weighted integral of the right-hand side; only meaningful for pure zero-flux problems.
  std::optional<double> neumann_compatibility;
  std::optional<double> initial_iterate_sensitivity;
};

/// Called after every delta stage (including the closing zero stage) with the converged iterate.
using StageObserver = std::function<void(double delta, const ScalarField& u)>;

SolveResult solve(const MetricData& m, const InitialDataFields& idf, const BoundaryCondition& bc,
                  const SolverConfig& cfg, const StageObserver& observer = {});

/// Delta u + P |grad u| - h |grad u| at interior nodes with the solver's stencils.
ScalarField residual(const ScalarField& u, const MetricData& m, const InitialDataFields& idf);

}  // namespace hlab
