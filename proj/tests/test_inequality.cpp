#include <cmath>
#include <map>
#include <numbers>

#include "doctest.h"
#include "hlab/errors.hpp"
#include "hlab/inequality.hpp"
#include "oracles.hpp"

using namespace hlab;

namespace {

constexpr double kPi = std::numbers::pi;

Grid unit_box(int n) { return Grid::box(n, {0, 0, 0}, {1, 1, 1}); }

Expr poly(std::vector<Expr::Monomial> terms) { return Expr(Expr::Polynomial{std::move(terms)}); }

Expr x_coord() { return Expr::linear({1, 0, 0}); }

Expr sine() { return Expr(Expr::SinProduct{1.0, {1, 1, 1}, {0.25, 0.25, 0.25}}); }

// Depends on z so that the z faces are curved in the metric.
Expr phi_faces() { return poly({{1.0, {0, 0, 0}}, {0.2, {2, 0, 0}}, {0.3, {0, 0, 2}}}); }

// Zero flux through z = 0 and z = 1 but not independent of z.
Expr zero_flux_u() {
  return poly({{1.0, {1, 0, 0}}, {0.25, {0, 2, 0}}, {0.2, {1, 0, 2}}, {-2.0 / 15.0, {1, 0, 3}}});
}

/// Metric, initial data, sampled u and boundary geometry in one place.
struct Setup {
  MetricData m;
  InitialDataFields idf;
  FieldBundle fb;
  BoundaryGeometry bg;

  Setup(const Grid& g, const MetricSpec& spec, const Expr& u, double p_scale = 0.0,
        std::function<double(const Vec3&)> h = nullptr)
      : m(build_metric(g, spec)), idf(make_data(m, p_scale, h)), fb(m, idf, oracle::sample(g, u)),
        bg(boundary_geometry(m, idf)) {}
  Setup(const Setup&) = delete;

  static InitialDataFields make_data(const MetricData& m, double c,
                                     const std::function<double(const Vec3&)>& h) {
    SymTensorField p(m.grid());
    for (std::size_t n = 0; n < p.size(); ++n)
      for (int k = 0; k < 6; ++k) p.at(n, k) = c * m.g.at(n, k);
    return energy_momentum(m, p, h ? oracle::sample(m.grid(), h) : ScalarField(m.grid()));
  }
};

const VerificationReport& find(const std::vector<VerificationReport>& rs, const std::string& name) {
  for (const auto& r : rs)
    if (r.name == name) return r;
  throw std::out_of_range(name);
}

}  // namespace

TEST_CASE("boundary geometry invariants") {
  const Setup st(unit_box(9), MetricSpec::conformal(phi_faces()), sine(), 0.2);
  for (const FaceGeometry& fg : st.bg.faces) {
    for (const FaceNodeGeometry& fn : fg.nodes) {
      const Sym3 g = value_at(st.m.g, fn.node);
      const Sym3 p = value_at(st.idf.p, fn.node);
      CHECK(contract(g, fn.eta, fn.eta) == doctest::Approx(1.0).epsilon(1e-8));
      CHECK(fn.trS_p ==
            doctest::Approx(st.idf.P_trace.at(fn.node) - contract(p, fn.eta, fn.eta)).epsilon(1e-10));
    }
  }
}

TEST_CASE("face mean curvature of a conformal metric converges to the closed form") {
  // H_S = 4 phi^-3 d_n phi on a coordinate plane of phi^4 delta.
  std::vector<double> hs, errs;
  for (int n : {17, 33, 65}) {
    const Setup st(unit_box(n), MetricSpec::conformal(phi_faces()), x_coord());
    const FaceGeometry& fg = st.bg.face(Face::ZHi);
    const Grid& g = st.m.grid();
    double err = 0.0;
    for (const FaceNodeGeometry& fn : fg.nodes) {
      const Vec3 x = g.position(g.unflatten(fn.node));
      const double phi = phi_faces().value(x);
      err = std::max(err, std::abs(fn.H_S - 4 * std::pow(phi, -3) * phi_faces().gradient(x)[2]));
    }
    errs.push_back(err);
    hs.push_back(g.spacing()[0]);
  }
  CHECK(oracle::fitted_order(hs, errs) > 1.9);
}

TEST_CASE("boundary integral examples") {
  const Setup plain(unit_box(9), MetricSpec::flat(), x_coord());
  CHECK(std::abs(boundary_integral_lhs(plain.fb, plain.bg, 0.0).value) < 1e-8);

  const double c = 0.1;
  const Setup tm(unit_box(9), MetricSpec::flat(), x_coord(), c, [&](const Vec3&) { return 3 * c; });
  const BoundaryIntegral b = boundary_integral_lhs(tm.fb, tm.bg, 0.0);
  CHECK(std::abs(b.value) < 1e-6);
  CHECK(b.per_face[static_cast<int>(Face::XLo)] == doctest::Approx(-c));
  CHECK(b.per_face[static_cast<int>(Face::XHi)] == doctest::Approx(c));
  CHECK(std::abs(b.per_face[static_cast<int>(Face::YLo)]) < 1e-12);

  // p with only the xx component.
  const Grid& g = tm.m.grid();
  SymTensorField pxx(g);
  for (std::size_t n = 0; n < g.node_count(); ++n) pxx.at(n, 0) = 1.0;
  const InitialDataFields idf = energy_momentum(tm.m, pxx, ScalarField(g));
  const FieldBundle fb(tm.m, idf, oracle::sample(g, x_coord()));
  const BoundaryIntegral bx = boundary_integral_lhs(fb, boundary_geometry(tm.m, idf), 0.0);
  CHECK(bx.per_face[static_cast<int>(Face::XHi)] == doctest::Approx(1.0));
  CHECK(bx.per_face[static_cast<int>(Face::XLo)] == doctest::Approx(-1.0));
  CHECK(std::abs(bx.value) < 1e-6);

  // Flipping p and h flips the integral exactly when d_eta |grad u| vanishes.
  const Setup flipped(unit_box(9), MetricSpec::flat(), x_coord(), -c,
                      [&](const Vec3&) { return -3 * c; });
  for (int f = 0; f < 6; ++f)
    CHECK(boundary_integral_lhs(flipped.fb, flipped.bg, 0.0).per_face[f] == -b.per_face[f]);

  // Points with vanishing gradient are excluded and their area reported.
  const Setup zero(unit_box(9), MetricSpec::flat(), Expr(0.0));
  CHECK(boundary_integral_lhs(zero.fb, zero.bg, 1e-9).excluded_area == doctest::Approx(6.0));
}

TEST_CASE("bulk integral: equality case and the trace-matched hand value") {
  const Setup plain(unit_box(17), MetricSpec::flat(), x_coord());
  const RegularValueSplit s0 = regular_split(plain.fb, 16, default_epsilon_reg(plain.fb));
  const BulkIntegral b0 = bulk_integral_rhs(plain.fb, s0);
  CHECK(std::abs(b0.value) < 1e-6);
  CHECK(std::abs(b0.volume) < 1e-6);

  const double c = 0.1;
  const Setup tm(unit_box(33), MetricSpec::flat(), x_coord(), c, [&](const Vec3&) { return 3 * c; });
  const RegularValueSplit s1 = regular_split(tm.fb, 32, default_epsilon_reg(tm.fb));
  const BulkIntegral b1 = bulk_integral_rhs(tm.fb, s1);
  CHECK(b1.value == doctest::Approx(-4.5 * c * c).epsilon(0.02));
  CHECK(b1.spacetime_hessian == doctest::Approx(1.5 * c * c).epsilon(1e-6));
  CHECK(b1.mu == doctest::Approx(3 * c * c).epsilon(1e-6));
  CHECK(b1.h_terms == doctest::Approx(-9 * c * c).epsilon(1e-6));
  CHECK(std::abs(b1.gauss) < 1e-10);
  CHECK(std::abs(b1.halved_value) < 1e-8);

  const VerificationReport r =
      verify_main_inequality(boundary_integral_lhs(tm.fb, tm.bg, 0.0), b1, s1, 0.0, 1e-6);
  CHECK(r.pass);
  CHECK(r.margin == doctest::Approx(4.5 * c * c).epsilon(0.02));
  CHECK(std::abs(r.value("margin_halved_h_terms")) < 1e-8);
}

TEST_CASE("bulk Gauss term integrates to 4 pi per unit level on spheres") {
  const Setup rad(unit_box(64), MetricSpec::flat(), Expr(Expr::Radial{{0.5, 0.5, 0.5}, 0.0, 1.0, 2.0}));
  const RegularValueSplit split = regular_split(rad.fb, 32, 0.0, std::array<double, 2>{0.01, 0.16});
  const BulkIntegral b = bulk_integral_rhs(rad.fb, split);
  CHECK(b.gauss == doctest::Approx(-4 * kPi * 0.15).epsilon(0.02));
}

TEST_CASE("main inequality report is monotone in tolerance") {
  BoundaryIntegral lhs;
  lhs.value = 1.0;
  lhs.value_node_route = 1.0;
  BulkIntegral rhs;
  rhs.value = 1.01;
  rhs.volume = 1.005;
  RegularValueSplit split;
  bool passed = false;
  for (double tol : {0.0, 1e-3, 4e-3, 5e-3, 1e-2, 1.0}) {
    const bool now = verify_main_inequality(lhs, rhs, split, 0.0, tol).pass;
    CHECK((!passed || now));
    passed = now;
  }
  CHECK(passed);
  // The coarea discrepancy alone covers half of the gap.
  CHECK_FALSE(verify_main_inequality(lhs, rhs, split, 0.0, 0.004).pass);
  CHECK(verify_main_inequality(lhs, rhs, split, 0.0, 0.005).pass);
}

TEST_CASE("Dirichlet lemma: hand examples in both orientations") {
  const Setup plain(unit_box(9), MetricSpec::flat(), x_coord());
  CHECK(check_dirichlet_lemma(plain.fb, plain.bg, Face::XHi, 1e-6).pass);

  const double c = 0.1;
  const Setup tm(unit_box(9), MetricSpec::flat(), x_coord(), c, [&](const Vec3&) { return 3 * c; });
  const VerificationReport hi = check_dirichlet_lemma(tm.fb, tm.bg, Face::XHi, 1e-6);
  CHECK(hi.pass);
  CHECK(hi.lhs == doctest::Approx(c));
  CHECK(hi.rhs == doctest::Approx(c));
  CHECK(hi.value("outward_nodes") == hi.value("nodes"));
  const VerificationReport lo = check_dirichlet_lemma(tm.fb, tm.bg, Face::XLo, 1e-6);
  CHECK(lo.pass);
  CHECK(lo.lhs == doctest::Approx(-c));
  CHECK(lo.value("outward_nodes") == 0);

  CHECK_THROWS_AS(check_dirichlet_lemma(tm.fb, tm.bg, Face::YHi, 1e-6), PreconditionError);
}

TEST_CASE("Dirichlet lemma converges on a curved face") {
  // h chosen so that u = x solves the equation with p = 0.
  const Expr phi = phi_faces();
  std::vector<double> hs, errs;
  for (int n : {17, 33, 65}) {
    const Setup st(unit_box(n), MetricSpec::conformal(phi), Expr::linear({0, 0, 1}), 0.0,
                   [&](const Vec3& x) {
                     return oracle::conformal_laplacian(phi, Expr::linear({0, 0, 1}), x) *
                            std::pow(phi.value(x), 2);
                   });
    const VerificationReport r = check_dirichlet_lemma(st.fb, st.bg, Face::ZHi, 1.0);
    errs.push_back(r.margin);
    hs.push_back(st.m.grid().spacing()[0]);
  }
  CHECK(errs.back() < 1e-3);
  CHECK(oracle::fitted_order(hs, errs) >= 1.5);
}

TEST_CASE("Neumann gradient lemma: flat faces match either sign") {
  const Expr u = Expr(Expr::SinProduct{1.0, {1, 1, 0}, {0.25, 0.25, 1.5707963267948966}});
  const Setup st(unit_box(17), MetricSpec::flat(), u);
  const VerificationReport r =
      check_neumann_gradient_lemma(st.fb, st.bg, {Face::ZLo, Face::ZHi}, 1e-6);
  CHECK(r.pass);
  CHECK(r.value("matching_sign") == 0.0);

  const Setup bad(unit_box(9), MetricSpec::flat(), Expr::linear({1, 0, 1}));
  CHECK_THROWS_AS(check_neumann_gradient_lemma(bad.fb, bad.bg, {Face::ZHi}, 1e-6), PreconditionError);
}

TEST_CASE("Neumann gradient lemma on curved faces selects the minus sign") {
  const Expr u = zero_flux_u();
  std::vector<double> hs, errs;
  for (int n : {17, 33, 65}) {
    const Setup st(unit_box(n), MetricSpec::conformal(phi_faces()), u);
    const VerificationReport r =
        check_neumann_gradient_lemma(st.fb, st.bg, {Face::ZLo, Face::ZHi}, 1e-3, 1e-2);
    CHECK(r.value("residual_plus") > 0.1);
    errs.push_back(r.value("residual_minus"));
    hs.push_back(st.m.grid().spacing()[0]);
    if (n == 65) {
      CHECK(r.pass);
      CHECK(r.value("matching_sign") == -1.0);
    }
  }
  CHECK(oracle::fitted_order(hs, errs) >= 1.5);
}

TEST_CASE("Neumann boundary term and curvature split") {
  const Setup flat(unit_box(9), MetricSpec::flat(), x_coord());
  const std::vector<Face> sides{Face::YLo, Face::YHi, Face::ZLo, Face::ZHi};
  const auto fr = check_neumann_boundary_term(flat.fb, flat.bg, sides,
                                              regular_split(flat.fb, 8, 0.0), 1e-6);
  CHECK(fr[0].pass);
  CHECK(fr[1].pass);
  CHECK(fr[0].value("points") > 0);

  const Expr u = zero_flux_u();
  std::vector<double> hs, main_err, split_err;
  for (int n : {17, 33, 65}) {
    const Setup st(unit_box(n), MetricSpec::conformal(phi_faces()), u);
    const auto r = check_neumann_boundary_term(st.fb, st.bg, {Face::ZLo, Face::ZHi},
                                               regular_split(st.fb, 16, 0.0), 1e-3);
    main_err.push_back(r[0].margin);
    split_err.push_back(r[1].margin);
    hs.push_back(st.m.grid().spacing()[0]);
  }
  CHECK(split_err.back() < 1e-3);
  CHECK(oracle::fitted_order(hs, split_err) >= 1.5);
  CHECK(oracle::fitted_order(hs, main_err) >= 1.5);

  // Closed spheres never reach the boundary.
  const Setup rad(unit_box(17), MetricSpec::flat(), Expr(Expr::Radial{{0.5, 0.5, 0.5}, 0.0, 1.0, 2.0}));
  const auto vac = check_neumann_boundary_term(
      rad.fb, rad.bg, sides, regular_split(rad.fb, 4, 0.0, std::array<double, 2>{0.01, 0.1}), 1e-6);
  CHECK(vac[0].vacuous);
}

TEST_CASE("proof identities vanish on a linear function") {
  const Setup st(unit_box(9), MetricSpec::flat(), x_coord());
  IdentityOptions opt;
  opt.constant_faces = {Face::XLo, Face::XHi};
  for (const auto& r : check_proof_identities(st.fb, st.bg, opt)) {
    CHECK_MESSAGE(r.margin < 1e-8, r.name);
    CHECK_FALSE(r.vacuous);
  }
}

TEST_CASE("proof identity residuals converge at second order") {
  const Expr phi = phi_faces();
  for (bool curved : {false, true}) {
    std::map<std::string, std::vector<double>> errs;
    std::vector<double> hs;
    for (int n : {17, 33, 65}) {
      const Grid g = Grid::box(n, {0.25, 0.25, 0.25}, {1.25, 1.25, 1.25});
      const Setup st(g, curved ? MetricSpec::conformal(phi) : MetricSpec::flat(),
                     Expr(Expr::SinProduct{1.0, {1, 1, 1}, {0, 0, 0}}));
      for (const auto& r : check_proof_identities(st.fb, st.bg, {})) errs[r.name].push_back(r.margin);
      hs.push_back(g.spacing()[0]);
    }
    for (const auto& [name, e] : errs) {
      INFO(name << (curved ? " (conformal)" : " (flat)"));
      CHECK(oracle::fitted_order(hs, e) >= (curved ? 1.5 : 1.9));
    }
  }
}

TEST_CASE("condition evaluators: hand values") {
  const Setup plain(unit_box(9), MetricSpec::flat(), x_coord());
  for (const auto& r : evaluate_conditions(plain.fb, plain.bg, 1e-10, 0.0)) {
    CHECK_MESSAGE(std::abs(r.margin) < 1e-12, r.name);
    CHECK(r.pass);
  }

  const double c = 0.1;
  const Setup tm(unit_box(9), MetricSpec::flat(), x_coord(), c, [&](const Vec3&) { return 3 * c; });
  const auto conds = evaluate_conditions(tm.fb, tm.bg, 1e-10, 0.0);
  CHECK(find(conds, "condition_bulk_worst_case").margin == doctest::Approx(-6 * c * c));
  CHECK_FALSE(find(conds, "condition_bulk_worst_case").pass);

  const Setup hconst(unit_box(9), MetricSpec::flat(), x_coord(), 0.0, [](const Vec3&) { return 0.7; });
  CHECK(find(evaluate_conditions(hconst.fb, hconst.bg, 1e-10, 0.0), "condition_scalar_curvature").margin ==
        doctest::Approx(0.49));
}
