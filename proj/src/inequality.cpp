#include "hlab/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "hlab/errors.hpp"
#include "hlab/solver.hpp"
#include "hlab/stencil.hpp"

namespace hlab {

double VerificationReport::value(const std::string& key) const {
  for (const auto& [k, v] : breakdown)
    if (k == key) return v;
  throw std::out_of_range("no breakdown entry " + key + " in " + name);
}

const char* kind_name(VerificationReport::Kind k) {
  switch (k) {
    case VerificationReport::Kind::Inequality: return "inequality";
    case VerificationReport::Kind::Identity: return "identity";
    case VerificationReport::Kind::Lemma: return "lemma";
    case VerificationReport::Kind::Condition: return "condition";
  }
  return "?";
}

void finish_inequality(VerificationReport& r) {
  r.pass = r.margin >= -r.tolerance - r.error_bar;
}

void finish_identity(VerificationReport& r) { r.pass = std::abs(r.margin) <= r.tolerance; }

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double lower_norm(const Sym3& g_inv, const Vec3& covector) {
  return std::sqrt(std::max(0.0, dot(covector, mul(g_inv, covector))));
}

/// p(a, .) as a covector.
Vec3 p_row(const Sym3& p, const Vec3& a) { return mul(p, a); }

/// Per-face array of d_eta |grad u| at the face nodes.
std::vector<double> normal_derivatives(const FieldBundle& fb, const FaceGeometry& fg) {
  std::vector<double> out(fg.nodes.size());
  for (std::size_t i = 0; i < fg.nodes.size(); ++i)
    out[i] = normal_derivative_of_grad_norm(fb, fg.nodes[i]);
  return out;
}

double bilinear(const std::vector<double>& v, const FaceGeometry& fg, double c1, double c2) {
  const int b1 = std::clamp(static_cast<int>(std::floor(c1)), 0, fg.dims[0] - 2);
  const int b2 = std::clamp(static_cast<int>(std::floor(c2)), 0, fg.dims[1] - 2);
  const double f1 = c1 - b1, f2 = c2 - b2;
  auto at = [&](int i, int j) { return v[i + fg.dims[0] * j]; };
  return (1 - f1) * (1 - f2) * at(b1, b2) + f1 * (1 - f2) * at(b1 + 1, b2) +
         (1 - f1) * f2 * at(b1, b2 + 1) + f1 * f2 * at(b1 + 1, b2 + 1);
}

/// g-cross product, contravariant: (X x Y)^i = sqrt(g) g^il eps_ljk X^j Y^k.
Vec3 cross_g(const PointSample& s, const Vec3& x, const Vec3& y) {
  const Vec3 c = cross(x, y);
  return s.sqrt_det * mul(s.g_inv, c);
}

}  // namespace

double normal_derivative_of_grad_norm(const FieldBundle& fb, const FaceNodeGeometry& fn) {
  // d_k |grad u| = hess(grad u, e_k) / |grad u|. Differencing the node field
  // |grad u| instead stacks two one-sided stencils and loses an order.
  const SolutionFields& sol = fb.solution();
  const double gn = sol.grad_norm.at(fn.node);
  if (gn == 0.0) return 0.0;
  return contract(value_at(sol.hess, fn.node), value_at(sol.grad, fn.node), fn.eta) / gn;
}

namespace {

/// Same derivative from one-sided differences of the node field |grad u|.
double differenced_normal_derivative(const FieldBundle& fb, const FaceNodeGeometry& fn) {
  const Grid& g = fb.grid();
  const Index3 id = g.unflatten(fn.node);
  double acc = 0.0;
  for (int i = 0; i < 3; ++i)
    if (fn.eta[i] != 0.0) acc += fn.eta[i] * fd::d1(fb.solution().grad_norm, 0, id, i);
  return acc;
}

}  // namespace

double default_eps_neq0(const FieldBundle& fb) {
  const Grid& g = fb.grid();
  double m = 0.0;
  for (std::size_t n = 0; n < g.node_count(); ++n)
    if (g.on_boundary(g.unflatten(n))) m = std::max(m, fb.solution().grad_norm.at(n));
  return 1e-6 * m;
}

BoundaryIntegral boundary_integral_lhs(const FieldBundle& fb, const BoundaryGeometry& bg,
                                       double eps_neq0) {
  BoundaryIntegral out;
  const SolutionFields& sol = fb.solution();
  for (const FaceGeometry& fg : bg.faces) {
    double face_sum = 0.0;
    for (const FaceNodeGeometry& fn : fg.nodes) {
      const double gn = sol.grad_norm.at(fn.node);
      if (gn <= eps_neq0) {
        out.excluded_area += fn.area_weight;
        continue;
      }
      const Sym3 p = value_at(fb.data().p, fn.node);
      const Vec3 grad = value_at(sol.grad, fn.node);
      const double flux = contract(p, grad, fn.eta);
      face_sum += (normal_derivative_of_grad_norm(fb, fn) + flux) * fn.area_weight;
      out.value_node_route += (differenced_normal_derivative(fb, fn) + flux) * fn.area_weight;
    }
    out.per_face[static_cast<int>(fg.face)] = face_sum;
    out.value += face_sum;
  }
  return out;
}

BulkIntegral bulk_integral_rhs(const FieldBundle& fb, const RegularValueSplit& split,
                               double h_term_weight) {
  const std::vector<PointIntegrand> terms{
      [](const PointSample& s, const LocalGeometry&) {
        const Sym3 st = s.spacetime_hess();
        return 0.5 * inner(s.g_inv, st, st) / (s.grad_norm * s.grad_norm);
      },
      [](const PointSample& s, const LocalGeometry&) { return s.mu; },
      [](const PointSample& s, const LocalGeometry& lg) { return contract(s.g, s.J, lg.normal); },
      [](const PointSample& s, const LocalGeometry& lg) {
        return s.h * s.h - 2.0 * s.h * s.P + 2.0 * dot(s.dh, lg.normal);
      },
      [](const PointSample&, const LocalGeometry& lg) { return -lg.K; },
  };
  const CoareaResult c = coarea_integrate(terms, fb, split);
  BulkIntegral out;
  out.h_term_weight = h_term_weight;
  out.spacetime_hessian = c.slice[0];
  out.mu = c.slice[1];
  out.J_nu = c.slice[2];
  out.h_terms = c.slice[3];
  out.gauss = c.slice[4];
  auto total = [&](const std::vector<double>& v, double w) {
    return v[0] + v[1] + v[2] + w * v[3] + v[4];
  };
  out.value = total(c.slice, h_term_weight);
  out.volume = total(c.volume, h_term_weight);
  out.halved_value = total(c.slice, 0.5);
  out.halved_volume = total(c.volume, 0.5);
  return out;
}

double estimate_C0(const FieldBundle& fb, const RegularValueSplit& split, double delta) {
  const Grid& g = fb.grid();
  const SolutionFields& sol = fb.solution();
  ScalarField phi(g);
  for (std::size_t n = 0; n < g.node_count(); ++n)
    phi.at(n) = std::sqrt(sol.grad_norm.at(n) * sol.grad_norm.at(n) + delta);
  const ScalarField lap = apply_laplacian(phi, fb.metric());
  const double dt = split.levels.front().dt;
  double c0 = 0.0;
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    if (g.on_boundary(g.unflatten(n))) continue;
    const double u = sol.u.at(n), gn = sol.grad_norm.at(n);
    if (u < split.t_lo || u > split.t_hi || gn < split.epsilon_reg || gn == 0.0) continue;
    const auto k = std::min<std::size_t>(static_cast<std::size_t>((u - split.t_lo) / dt),
                                         split.levels.size() - 1);
    if (!split.levels[k].regular) continue;
    c0 = std::max(c0, -lap.at(n) / gn);
  }
  return c0;
}

VerificationReport verify_main_inequality(const BoundaryIntegral& lhs, const BulkIntegral& rhs,
                                          const RegularValueSplit& split, double C0,
                                          double tolerance) {
  VerificationReport r;
  r.name = "main_inequality";
  r.kind = VerificationReport::Kind::Inequality;
  r.lhs = lhs.value;
  r.rhs = rhs.value;
  r.margin = lhs.value - rhs.value;
  r.tolerance = tolerance;
  const double discrepancy = std::abs(rhs.value - rhs.volume);
  const double boundary_discrepancy = std::abs(lhs.value - lhs.value_node_route);
  r.error_bar = C0 * split.area_integral_over_A + discrepancy + boundary_discrepancy;
  r.breakdown = {{"rhs_spacetime_hessian", rhs.spacetime_hessian},
                 {"rhs_mu", rhs.mu},
                 {"rhs_J_nu", rhs.J_nu},
                 {"rhs_h_terms", rhs.h_terms},
                 {"rhs_gauss", rhs.gauss},
                 {"rhs_volume_side", rhs.volume},
                 {"coarea_discrepancy", discrepancy},
                 {"boundary_route_discrepancy", boundary_discrepancy},
                 {"h_term_weight", rhs.h_term_weight},
                 {"rhs_halved_h_terms", rhs.halved_value},
                 {"margin_halved_h_terms", lhs.value - rhs.halved_value},
                 {"C0", C0},
                 {"A_measure", split.A_measure},
                 {"area_integral_over_A", split.area_integral_over_A},
                 {"boundary_excluded_area", lhs.excluded_area}};
  finish_inequality(r);
  return r;
}

VerificationReport check_dirichlet_lemma(const FieldBundle& fb, const BoundaryGeometry& bg,
                                         Face face, double tolerance, double eps_neq0,
                                         double edge_fraction) {
  const FaceGeometry& fg = bg.face(face);
  const SolutionFields& sol = fb.solution();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& fn : fg.nodes) lo = std::min(lo, sol.u.at(fn.node)), hi = std::max(hi, sol.u.at(fn.node));
  if (hi - lo > 1e-10 * std::max(1.0, std::abs(hi)))
    throw PreconditionError("u is not constant on face " + face_name(face), hi - lo);

  VerificationReport r;
  r.name = "dirichlet_lemma_" + face_name(face);
  r.kind = VerificationReport::Kind::Lemma;
  r.tolerance = tolerance;
  int used = 0, outward = 0;
  auto near_edge = [&](int i, int d) {
    return std::min(i, d - 1 - i) < edge_fraction * (d - 1) - 1e-9;
  };
  for (int i2 = 0; i2 < fg.dims[1]; ++i2) {
    for (int i1 = 0; i1 < fg.dims[0]; ++i1) {
      if (near_edge(i1, fg.dims[0]) || near_edge(i2, fg.dims[1])) continue;
      const FaceNodeGeometry& fn = fg.at(i1, i2);
      const double gn = sol.grad_norm.at(fn.node);
      if (gn <= eps_neq0 || gn == 0.0) continue;
      const Vec3 du = value_at(sol.du, fn.node);
      const Vec3 grad = value_at(sol.grad, fn.node);
      const double sigma = dot(du, fn.eta) >= 0.0 ? 1.0 : -1.0;
      const double h = fb.data().h.at(fn.node);
      const double lhs = normal_derivative_of_grad_norm(fb, fn) +
                         contract(value_at(fb.data().p, fn.node), grad, fn.eta);
      const double rhs = (-fn.H_S - sigma * (fn.trS_p - h)) * gn;
      if (std::abs(lhs - rhs) >= r.margin) r.margin = std::abs(lhs - rhs), r.lhs = lhs, r.rhs = rhs;
      ++used;
      outward += sigma > 0;
    }
  }
  r.vacuous = used == 0;
  r.breakdown = {{"nodes", static_cast<double>(used)},
                 {"outward_nodes", static_cast<double>(outward)},
                 {"edge_fraction", edge_fraction}};
  finish_identity(r);
  return r;
}

VerificationReport check_neumann_gradient_lemma(const FieldBundle& fb, const BoundaryGeometry& bg,
                                                const std::vector<Face>& faces, double tolerance,
                                                double flux_tol) {
  const SolutionFields& sol = fb.solution();
  double scale = 1.0;
  for (double v : sol.grad_norm.raw()) scale = std::max(scale, v);

  VerificationReport r;
  r.name = "neumann_gradient_lemma";
  r.kind = VerificationReport::Kind::Lemma;
  r.tolerance = tolerance;
  double res_plus = 0.0, res_minus = 0.0, max_flux = 0.0, max_term = 0.0;
  int used = 0;
  for (Face f : faces) {
    const FaceGeometry& fg = bg.face(f);
    for (int i2 = 1; i2 + 1 < fg.dims[1]; ++i2) {
      for (int i1 = 1; i1 + 1 < fg.dims[0]; ++i1) {
        const FaceNodeGeometry& fn = fg.at(i1, i2);
        const double gn = sol.grad_norm.at(fn.node);
        max_flux = std::max(max_flux, std::abs(dot(value_at(sol.du, fn.node), fn.eta)));
        if (gn < 1e-12) continue;
        const Vec3 grad = value_at(sol.grad, fn.node);
        const double d = normal_derivative_of_grad_norm(fb, fn);
        const double q = contract(fn.B, grad, grad) / gn;
        res_plus = std::max(res_plus, std::abs(d - q));
        res_minus = std::max(res_minus, std::abs(d + q));
        max_term = std::max(max_term, std::abs(q));
        ++used;
      }
    }
  }
  if (max_flux > flux_tol * scale)
    throw PreconditionError("normal derivative of u is not zero on the faces", max_flux);

  const bool plus = res_plus <= tolerance, minus = res_minus <= tolerance;
  const double sign = plus && minus ? 0.0 : plus ? 1.0 : minus ? -1.0 : kNaN;
  r.margin = std::min(res_plus, res_minus);
  r.vacuous = used == 0;
  r.breakdown = {{"residual_plus", res_plus},   {"residual_minus", res_minus},
                 {"matching_sign", sign},       {"max_flux", max_flux},
                 {"max_B_term", max_term},      {"nodes", static_cast<double>(used)}};
  r.note = plus && minus   ? "both signs match (B vanishes to tolerance)"
           : plus          ? "matches +B(grad u, grad u)/|grad u|"
           : minus         ? "matches -B(grad u, grad u)/|grad u|"
                           : "neither sign matches";
  r.pass = (plus || minus) && !r.vacuous;
  return r;
}

std::array<VerificationReport, 2> check_neumann_boundary_term(const FieldBundle& fb,
                                                              const BoundaryGeometry& bg,
                                                              const std::vector<Face>& faces,
                                                              const RegularValueSplit& split,
                                                              double tolerance) {
  const Grid& g = fb.grid();
  std::array<VerificationReport, 2> out;
  out[0].name = "neumann_boundary_term";
  out[1].name = "neumann_curvature_split";
  for (auto& r : out) r.kind = VerificationReport::Kind::Lemma, r.tolerance = tolerance;

  std::vector<std::vector<double>> d_eta(6);
  for (Face f : faces) d_eta[static_cast<int>(f)] = normal_derivatives(fb, bg.face(f));

  auto on_plane = [&](const Vec3& x, Face f) {
    const int a = face_axis(f);
    Index3 n{0, 0, 0};
    n[a] = face_sign(f) < 0 ? 0 : g.dims()[a] - 1;
    return x[a] == g.position(n)[a];
  };

  int points = 0;
  for_each_regular_level(fb, split, [&](const LevelSetSurface& s, const LevelInfo&) {
    std::set<VertexKey> seen;
    for (const auto& tr : s.triangles) {
      for (int v = 0; v < 3; ++v) {
        const Vec3& x = tr.vertices[v];
        for (Face f : faces) {
          if (!on_plane(x, f)) continue;
          // Skip points on an edge of the box, where two faces meet.
          bool edge = false;
          for (Face o : kAllFaces)
            if (o != f && on_plane(x, o)) edge = true;
          if (edge || !seen.insert(tr.keys[v]).second) continue;

          const FaceGeometry& fg = bg.face(f);
          const Vec3 gc = fb.to_grid(x);
          const double c1 = gc[fg.tangential[0]], c2 = gc[fg.tangential[1]];
          const FaceNodeGeometry fs = fg.sample(c1, c2);
          const PointSample ps = fb.at(gc);
          if (ps.grad_norm < split.epsilon_reg || ps.grad_norm == 0.0) continue;
          const Vec3 nu = ps.normal();

          Vec3 e1 = cross_g(ps, fs.eta, nu);
          e1 = (1.0 / norm_g(ps.g, e1)) * e1;
          Vec3 de{};
          for (int t = 0; t < 2; ++t)
            de = de + e1[fg.tangential[t]] * fs.d_eta[t];
          const double kappa = contract(ps.g, de, e1);

          const double dn = bilinear(d_eta[static_cast<int>(f)], fg, c1, c2);
          const double lhs = dn + contract(ps.p, ps.grad, fs.eta);
          const double rhs = (-fs.H_S + contract(ps.p, nu, fs.eta) + kappa) * ps.grad_norm;
          const double bnn = contract(fs.B, nu, nu);
          if (std::abs(lhs - rhs) >= out[0].margin)
            out[0].margin = std::abs(lhs - rhs), out[0].lhs = lhs, out[0].rhs = rhs;
          if (std::abs(bnn - (fs.H_S - kappa)) >= out[1].margin)
            out[1].margin = std::abs(bnn - (fs.H_S - kappa)), out[1].lhs = bnn,
            out[1].rhs = fs.H_S - kappa;
          ++points;
        }
      }
    }
  });
  for (auto& r : out) {
    r.breakdown = {{"points", static_cast<double>(points)}};
    r.vacuous = points == 0;
    if (r.vacuous) r.note = "no level set meets the zero-flux faces";
    finish_identity(r);
  }
  return out;
}

std::vector<VerificationReport> check_proof_identities(const FieldBundle& fb,
                                                       const BoundaryGeometry& bg,
                                                       const IdentityOptions& opt) {
  const MetricData& m = fb.metric();
  const Grid& g = fb.grid();
  const SolutionFields& sol = fb.solution();

  ScalarField gn2(g);
  VectorField nu(g);
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    const double gn = sol.grad_norm.at(n);
    gn2.at(n) = gn * gn;
    for (int i = 0; i < 3; ++i) nu.at(n, i) = gn > 0.0 ? sol.grad.at(n, i) / gn : 0.0;
  }
  const ScalarField lap_gn2 = apply_laplacian(gn2, m);
  const VectorField d_gn = fd::partials(sol.grad_norm);
  const VectorField d_lap = fd::partials(sol.lap);
  const ScalarField div_nu = divergence(nu, m);
  const RiemannField riem = riemann(m);

  std::array<VerificationReport, 5> r;
  const char* names[] = {"bochner", "grad_norm_gradient", "second_form_norm",
                         "level_mean_curvature", "gauss_trace"};
  std::array<int, 5> count{};
  for (int i = 0; i < 5; ++i) {
    r[i].name = names[i];
    r[i].kind = VerificationReport::Kind::Identity;
    r[i].tolerance = opt.tolerance;
  }
  auto record = [&](int i, double lhs, double rhs) {
    ++count[i];
    if (std::abs(lhs - rhs) >= r[i].margin) r[i].margin = std::abs(lhs - rhs), r[i].lhs = lhs, r[i].rhs = rhs;
  };

  for (std::size_t n = 0; n < g.node_count(); ++n) {
    const Index3 id = g.unflatten(n);
    if (!g.deep_interior(id, opt.layers)) continue;
    bool near_face = false;
    for (int a = 0; a < 3; ++a) {
      const double cells = g.dims()[a] - 1;
      const double dist = std::min<double>(id[a], cells - id[a]);
      near_face = near_face || dist < opt.margin_fraction * cells - 1e-9;
    }
    if (near_face) continue;
    const PointSample s = fb.at_node(n);
    if (s.grad_norm <= opt.epsilon_reg || s.grad_norm < 1e-12) continue;
    const Vec3 grad = s.grad;
    const Vec3 dgn = value_at(d_gn, n);
    const double hess2 = inner(s.g_inv, s.hess, s.hess);

    record(0, 0.5 * lap_gn2.at(n),
           hess2 + contract(s.ricci, grad, grad) + dot(grad, value_at(d_lap, n)));
    record(1, dot(grad, dgn), contract(s.hess, grad, grad) / s.grad_norm);

    // Weingarten map from differences of the unit normal field.
    const LocalGeometry lg = level_geometry(s);
    Mat3 W{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double conn = 0.0;
        for (int k = 0; k < 3; ++k) conn += m.gamma(n, i, j, k) * nu.at(n, k);
        W[i][j] = fd::d1(nu, i, id, j) + conn;
      }
    std::array<std::array<double, 2>, 2> Aw{};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        Vec3 we{};
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) we[i] += W[i][j] * lg.frame[a][j];
        Aw[a][b] = contract(s.g, we, lg.frame[b]);
      }
    const double aw2 = Aw[0][0] * Aw[0][0] + Aw[0][1] * Aw[0][1] + Aw[1][0] * Aw[1][0] +
                       Aw[1][1] * Aw[1][1];
    const double hnn = contract(s.hess, lg.normal, lg.normal);
    const double dgn2 = dot(dgn, mul(s.g_inv, dgn));
    record(2, aw2, (hess2 - 2.0 * dgn2 + hnn * hnn) / (s.grad_norm * s.grad_norm));
    record(3, s.grad_norm * div_nu.at(n), s.lap - hnn);

    const double sec = sectional_numerator(value_at(riem, n), s.g, lg.frame[0], lg.frame[1]);
    const double k_int = sec + Aw[0][0] * Aw[1][1] - Aw[0][1] * Aw[1][0];
    record(4, 2.0 * contract(s.ricci, lg.normal, lg.normal),
           s.scalar_curv - 2.0 * k_int - lg.A_norm2 + lg.H * lg.H);
  }

  std::vector<VerificationReport> out;
  for (int i = 0; i < 5; ++i) {
    r[i].vacuous = count[i] == 0;
    r[i].breakdown = {{"nodes", static_cast<double>(count[i])}};
    finish_identity(r[i]);
    out.push_back(r[i]);
  }

  if (!opt.constant_faces.empty()) {
    VerificationReport d;
    d.name = "face_laplacian_decomposition";
    d.kind = VerificationReport::Kind::Identity;
    d.tolerance = opt.tolerance;
    int used = 0;
    for (Face f : opt.constant_faces) {
      const FaceGeometry& fg = bg.face(f);
      for (int i2 = 1; i2 + 1 < fg.dims[1]; ++i2)
        for (int i1 = 1; i1 + 1 < fg.dims[0]; ++i1) {
          const FaceNodeGeometry& fn = fg.at(i1, i2);
          const PointSample s = fb.at_node(fn.node);
          if (s.grad_norm <= opt.epsilon_reg) continue;
          const double lhs = s.lap;
          const double rhs = fn.H_S * dot(s.du, fn.eta) + contract(s.hess, fn.eta, fn.eta);
          if (std::abs(lhs - rhs) >= d.margin) d.margin = std::abs(lhs - rhs), d.lhs = lhs, d.rhs = rhs;
          ++used;
        }
    }
    d.vacuous = used == 0;
    d.breakdown = {{"nodes", static_cast<double>(used)}};
    finish_identity(d);
    out.push_back(d);
  }
  return out;
}

std::vector<VerificationReport> evaluate_conditions(const FieldBundle& fb,
                                                    const BoundaryGeometry& bg, double tolerance,
                                                    double epsilon_reg) {
  const Grid& g = fb.grid();
  const double inf = std::numeric_limits<double>::infinity();
  std::array<double, 5> worst{inf, inf, inf, inf, inf};
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    const PointSample s = fb.at_node(n);
    const double dh = lower_norm(s.g_inv, s.dh);
    const double hterms = s.h * s.h - 2.0 * s.h * s.P;
    worst[0] = std::min(worst[0], s.mu - norm_g(s.g, s.J) + hterms - 2.0 * dh);
    if (s.grad_norm > epsilon_reg && s.grad_norm > 0.0) {
      const Vec3 nu = s.normal();
      worst[1] = std::min(worst[1], s.mu + contract(s.g, s.J, nu) + hterms + 2.0 * dot(s.dh, nu));
    }
    worst[4] = std::min(worst[4], s.scalar_curv + s.h * s.h - 2.0 * dh);
  }
  for (const FaceGeometry& fg : bg.faces) {
    for (const FaceNodeGeometry& fn : fg.nodes) {
      const double h = fb.data().h.at(fn.node);
      const Sym3 p = value_at(fb.data().p, fn.node);
      const Sym3 gi = value_at(fb.metric().g_inv, fn.node);
      worst[2] = std::min(worst[2], fn.H_S - std::abs(fn.trS_p - h));
      worst[3] = std::min(worst[3], fn.H_S - lower_norm(gi, p_row(p, fn.eta)));
    }
  }
  const char* names[] = {"condition_bulk_worst_case", "condition_bulk_solution_normal",
                         "condition_boundary_trace", "condition_boundary_momentum",
                         "condition_scalar_curvature"};
  std::vector<VerificationReport> out;
  for (int i = 0; i < 5; ++i) {
    VerificationReport r;
    r.name = names[i];
    r.kind = VerificationReport::Kind::Condition;
    r.tolerance = tolerance;
    r.vacuous = std::isinf(worst[i]);
    r.margin = r.vacuous ? 0.0 : worst[i];
    r.lhs = r.margin;
    finish_inequality(r);
    out.push_back(r);
  }
  return out;
}

}  // namespace hlab
