#pragma once

#include <string>

#include "hlab/boundary.hpp"
#include "hlab/levelset.hpp"

namespace hlab {

struct VerificationReport {
  enum class Kind { Inequality, Identity, Lemma, Condition };
  std::string name;
  Kind kind = Kind::Identity;
  double lhs = 0.0;
  double rhs = 0.0;
  /// lhs - rhs for inequalities and conditions; max |residual| otherwise.
  double margin = 0.0;
  double tolerance = 0.0;
  double error_bar = 0.0;
  bool pass = false;
  /// The check had nothing to evaluate.
  bool vacuous = false;
  std::vector<std::pair<std::string, double>> breakdown;
  std::string note;

  double value(const std::string& key) const;
};

const char* kind_name(VerificationReport::Kind k);

/// pass iff margin >= -tolerance - error_bar.
void finish_inequality(VerificationReport& r);
/// pass iff |residual| <= tolerance.
void finish_identity(VerificationReport& r);

/// d_eta |grad u| through the Hessian; zero where the gradient vanishes.
double normal_derivative_of_grad_norm(const FieldBundle& fb, const FaceNodeGeometry& fn);

/// 1e-6 times the largest |grad u| on the boundary.
double default_eps_neq0(const FieldBundle& fb);

struct BoundaryIntegral {
  double value = 0.0;
  /// Boundary area with |grad u| <= eps_neq0, left out of `value`.
  double excluded_area = 0.0;
  std::array<double, 6> per_face{};
  /// `value` with d_eta |grad u| differenced from the node field instead;
  /// the gap is a discretization estimate.
  double value_node_route = 0.0;
};

/// Integral of d_eta |grad u| + p(grad u, eta) over the boundary where |grad u| > eps_neq0.
BoundaryIntegral boundary_integral_lhs(const FieldBundle& fb, const BoundaryGeometry& bg,
                                       double eps_neq0);

struct BulkIntegral {
  /// Slice-sum evaluation, with the h-terms scaled by h_term_weight.
  double value = 0.0;
  /// Volume-side evaluation of the same integrand.
  double volume = 0.0;
  /// Totals with the h-terms weighted one half.
  double halved_value = 0.0;
  double halved_volume = 0.0;
  /// Slice sums of the five terms, h-terms unweighted.
  double spacetime_hessian = 0.0, mu = 0.0, J_nu = 0.0, h_terms = 0.0, gauss = 0.0;
  double h_term_weight = 1.0;
};

/// Integrand: |spacetime hess|^2 / (2 |grad u|^2) + mu + J(nu)
///            + w (h^2 - 2 h P + 2 <nu, grad h>) - K.
BulkIntegral bulk_integral_rhs(const FieldBundle& fb, const RegularValueSplit& split,
                               double h_term_weight = 1.0);

/// Max over regular nodes of (-Laplacian phi_delta) / |grad u|, clipped at zero.
double estimate_C0(const FieldBundle& fb, const RegularValueSplit& split, double delta);

/// Error bar: C0 times the excluded area-time integral plus two discretization
/// estimates, the slice/volume gap and the gap between the boundary routes.
VerificationReport verify_main_inequality(const BoundaryIntegral& lhs, const BulkIntegral& rhs,
                                          const RegularValueSplit& split, double C0,
                                          double tolerance);

/// Throws PreconditionError when u varies by more than 1e-10 on the face.
/// Handles both orientations of grad u against eta. Nodes closer to a face
/// edge than edge_fraction of its extent are skipped; data that disagree
/// where two faces meet leave u without two derivatives along the edge.
VerificationReport check_dirichlet_lemma(const FieldBundle& fb, const BoundaryGeometry& bg,
                                         Face face, double tolerance, double eps_neq0 = 0.0,
                                         double edge_fraction = 0.0);

/// Compares d_eta |grad u| with +B(grad u, grad u)/|grad u| and with the
/// opposite sign over the given zero-flux faces. Breakdown carries both
/// residuals and the matching sign (+1, -1, 0 for both, NaN for neither).
/// Throws PreconditionError when the flux exceeds flux_tol.
VerificationReport check_neumann_gradient_lemma(const FieldBundle& fb, const BoundaryGeometry& bg,
                                                const std::vector<Face>& faces, double tolerance,
                                                double flux_tol = 1e-6);

/// At points where regular level sets meet the zero-flux faces. Returns the
/// boundary-term comparison and the B(nu, nu) = H_S - kappa sub-check.
std::array<VerificationReport, 2> check_neumann_boundary_term(const FieldBundle& fb,
                                                              const BoundaryGeometry& bg,
                                                              const std::vector<Face>& faces,
                                                              const RegularValueSplit& split,
                                                              double tolerance);

struct IdentityOptions {
  double tolerance = 1e-2;
  /// Nodes closer than this many layers to the boundary are skipped.
  int layers = 2;
  /// Also skip nodes within this fraction of the box extent from any face,
  /// so that refinement studies compare the same physical region.
  double margin_fraction = 0.125;
  double epsilon_reg = 0.0;
  /// Faces on which u is constant, for the Laplacian decomposition.
  std::vector<Face> constant_faces;
};

/// Bochner, <grad u, grad |grad u|>, |A|^2, level-set mean curvature, Gauss
/// trace and (when faces are given) the face Laplacian decomposition. Each
/// pair of sides is built along different discrete routes, so the residuals
/// measure discretization error.
std::vector<VerificationReport> check_proof_identities(const FieldBundle& fb,
                                                       const BoundaryGeometry& bg,
                                                       const IdentityOptions& opt);

/// Conditions (1)-(5): worst-case bulk energy, bulk energy along the
/// solution's normal, boundary mean-convexity against |tr_S p - h|, against
/// |p(eta, .)|, and the Riemannian scalar condition.
std::vector<VerificationReport> evaluate_conditions(const FieldBundle& fb,
                                                    const BoundaryGeometry& bg, double tolerance,
                                                    double epsilon_reg);

}  // namespace hlab
