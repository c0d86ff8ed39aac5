#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "hlab/levelset.hpp"
#include "oracles.hpp"

using namespace hlab;

namespace {

constexpr double kPi = std::numbers::pi;

Grid unit_box(int n) { return Grid::box(n, {0, 0, 0}, {1, 1, 1}); }

Expr poly(std::vector<Expr::Monomial> terms) { return Expr(Expr::Polynomial{std::move(terms)}); }

Expr radial() { return Expr(Expr::Radial{{0.5, 0.5, 0.5}, 0.0, 1.0, 2.0}); }

/// Everything needed to sample one analytic u on a metric with zero data.
struct Setup {
  MetricData m;
  InitialDataFields idf;
  FieldBundle fb;

  Setup(const Grid& g, const MetricSpec& spec, const Expr& u)
      : m(build_metric(g, spec)),
        idf(energy_momentum(m, SymTensorField(g), ScalarField(g))),
        fb(m, idf, oracle::sample(g, u)) {}
  Setup(const Setup&) = delete;
};

double integral(const LevelSetSurface& s, double (*f)(const SurfaceTriangle&)) {
  double acc = 0.0;
  for (const auto& tr : s.triangles) acc += f(tr) * tr.area;
  return acc;
}

}  // namespace

TEST_CASE("plane level set of a linear function") {
  const Setup st(unit_box(9), MetricSpec::flat(), Expr::linear({1, 0, 0}));
  const LevelSetSurface s = extract_level_set(st.fb, 0.5);
  CHECK(s.area() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(s.degenerate == 0);
  for (const auto& tr : s.triangles) {
    CHECK(std::abs(tr.geom.H) < 1e-12);
    CHECK(std::abs(tr.geom.A_norm2) < 1e-12);
    CHECK(std::abs(tr.geom.K) < 1e-6);
    CHECK(tr.geom.normal[0] == doctest::Approx(1.0));
  }
  CHECK_FALSE(s.closed());
  CHECK_FALSE(angle_defect_total(s, st.fb).has_value());
  CHECK_THROWS_AS(extract_level_set(st.fb, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(extract_level_set(st.fb, 0.0), std::invalid_argument);
}

TEST_CASE("sphere level set reproduces area and curvatures") {
  const Setup st(unit_box(64), MetricSpec::flat(), radial());
  const double r = 0.3;
  const LevelSetSurface s = extract_level_set(st.fb, r * r);
  CHECK(s.area() == doctest::Approx(4 * kPi * r * r).epsilon(0.01));
  double worst_h = 0.0, worst_k = 0.0;
  for (const auto& tr : s.triangles) {
    worst_h = std::max(worst_h, std::abs(tr.geom.H * r / 2.0 - 1.0));
    worst_k = std::max(worst_k, std::abs(tr.geom.K * r * r - 1.0));
  }
  CHECK(worst_h < 0.02);
  CHECK(worst_k < 0.02);
  CHECK(integral(s, [](const SurfaceTriangle& t) { return t.geom.K; }) ==
        doctest::Approx(4 * kPi).epsilon(0.02));
  REQUIRE(s.closed());
  CHECK(*angle_defect_total(s, st.fb) == doctest::Approx(4 * kPi).epsilon(1e-9));
}

TEST_CASE("conformal slice area matches quadrature of the induced area element") {
  const Expr phi = poly({{1.0, {0, 0, 0}}, {0.2, {0, 2, 0}}, {0.1, {1, 0, 1}}});
  const Setup st(unit_box(33), MetricSpec::conformal(phi), Expr::linear({1, 0, 0}));
  const LevelSetSurface s = extract_level_set(st.fb, 0.5);
  // Gauss-Legendre, 5 points per panel, 8 panels per side.
  const std::array<double, 5> xg{-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                 0.9061798459386640};
  const std::array<double, 5> wg{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                 0.4786286704993665, 0.2369268850561891};
  double exact = 0.0;
  const int panels = 8;
  for (int a = 0; a < panels; ++a)
    for (int b = 0; b < panels; ++b)
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
          const double y = (a + 0.5 * (1 + xg[i])) / panels, z = (b + 0.5 * (1 + xg[j])) / panels;
          exact += std::pow(phi.value({0.5, y, z}), 4) * wg[i] * wg[j] * 0.25 / (panels * panels);
        }
  CHECK(s.area() == doctest::Approx(exact).epsilon(0.01));
}

TEST_CASE("per-triangle invariants hold on a curved metric") {
  const Expr phi = poly({{1.0, {0, 0, 0}}, {0.2, {2, 0, 0}}, {0.3, {0, 0, 2}}});
  const Expr u = Expr(Expr::SinProduct{1.0, {1, 1, 1}, {0.25, 0.25, 0.25}});
  const Setup st(unit_box(17), MetricSpec::conformal(phi), u);
  const LevelSetSurface s = extract_level_set(st.fb, 0.5);
  REQUIRE(!s.triangles.empty());
  for (const auto& tr : s.triangles) {
    const PointSample ps = st.fb.at(tr.centroid);
    const LocalGeometry& lg = tr.geom;
    CHECK(contract(ps.g, lg.normal, lg.normal) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(contract(ps.g, lg.normal, lg.frame[0])) < 1e-12);
    CHECK(std::abs(contract(ps.g, lg.frame[0], lg.frame[1])) < 1e-12);
    CHECK(lg.H == doctest::Approx(lg.A[0] + lg.A[2]).epsilon(1e-8));

    // |A|^2 from the full Hessian, built from the same interpolated values.
    const Vec3 hn = mul(ps.hess, lg.normal);
    const double hess2 = inner(ps.g_inv, ps.hess, ps.hess);
    const double hn2 = dot(hn, mul(ps.g_inv, hn));
    const double hnn = dot(hn, lg.normal);
    const double rebuilt = (hess2 - 2 * hn2 + hnn * hnn) / (ps.grad_norm * ps.grad_norm);
    CHECK(lg.A_norm2 == doctest::Approx(rebuilt).epsilon(1e-6));
    // |grad u| H = Laplacian u - hess(nu, nu)
    CHECK(ps.grad_norm * lg.H == doctest::Approx(ps.lap - hnn).epsilon(1e-8));
    // Kato: |grad |grad u|| = |hess(nu, .)| <= |hess|
    CHECK(std::sqrt(hn2) <= std::sqrt(hess2) + 1e-8);
  }
}

TEST_CASE("reversing u flips orientation and mean curvature only") {
  const Expr u = Expr(Expr::SinProduct{1.0, {1, 1, 1}, {0.25, 0.25, 0.25}});
  const Expr neg = Expr(Expr::SinProduct{-1.0, {1, 1, 1}, {0.25, 0.25, 0.25}});
  const Setup a(unit_box(17), MetricSpec::flat(), u);
  const Setup b(unit_box(17), MetricSpec::flat(), neg);
  const LevelSetSurface sa = extract_level_set(a.fb, 0.5);
  const LevelSetSurface sb = extract_level_set(b.fb, -0.5);
  auto H = [](const SurfaceTriangle& t) { return t.geom.H; };
  auto K = [](const SurfaceTriangle& t) { return t.geom.K; };
  CHECK(sa.triangles.size() == sb.triangles.size());
  CHECK(sa.area() == doctest::Approx(sb.area()).epsilon(1e-12));
  CHECK(integral(sa, H) == doctest::Approx(-integral(sb, H)).epsilon(1e-10));
  CHECK(integral(sa, K) == doctest::Approx(integral(sb, K)).epsilon(1e-10));
}

TEST_CASE("regular split classifies levels by the gradient threshold") {
  const Setup lin(unit_box(9), MetricSpec::flat(), Expr::linear({1, 0, 0}));
  const RegularValueSplit all = regular_split(lin.fb, 8, default_epsilon_reg(lin.fb));
  CHECK(all.A_measure == 0.0);
  CHECK(all.B_levels().size() == 8);
  CHECK(all.levels.front().t == doctest::Approx(1.0 / 16));

  // |grad u| = 2 sqrt(t) on spheres about the center.
  const Setup rad(unit_box(33), MetricSpec::flat(), radial());
  const double eps = 0.4;
  const RegularValueSplit split = regular_split(rad.fb, 16, eps, std::array<double, 2>{0.0, 0.16});
  double covered = 0.0;
  for (const auto& l : split.levels) {
    covered += l.dt;
    // Skip levels close to the threshold, where discretization decides.
    if (std::abs(2 * std::sqrt(l.t) - eps) < 0.05) continue;
    CHECK(l.regular == (2 * std::sqrt(l.t) >= eps));
  }
  CHECK(covered == doctest::Approx(split.t_hi - split.t_lo));
  CHECK(split.A_measure > 0.0);
  CHECK(split.area_integral_over_A > 0.0);

  const RegularValueSplit none = regular_split(rad.fb, 16, 0.0, std::array<double, 2>{0.0, 0.16});
  CHECK(none.A_measure == 0.0);
}

TEST_CASE("coarea: slab volume and radial annulus") {
  const Setup lin(unit_box(17), MetricSpec::flat(), Expr::linear({1, 0, 0}));
  const ScalarField one(lin.fb.grid(), 1.0);
  const auto slab = coarea_integrate(one, lin.fb, regular_split(lin.fb, 16, 0.0));
  CHECK(slab[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(slab[1] == doctest::Approx(1.0).epsilon(1e-3));

  // Integral of |grad u| = 2r over the shell 0.1 < r < 0.4.
  const Setup rad(unit_box(64), MetricSpec::flat(), radial());
  const double r1 = 0.1, r2 = 0.4;
  const RegularValueSplit split =
      regular_split(rad.fb, 64, 0.0, std::array<double, 2>{r1 * r1, r2 * r2});
  const auto shell = coarea_integrate(ScalarField(rad.fb.grid(), 1.0), rad.fb, split);
  const double exact = 2 * kPi * (std::pow(r2, 4) - std::pow(r1, 4));
  CHECK(shell[0] == doctest::Approx(exact).epsilon(0.01));
  CHECK(shell[1] == doctest::Approx(exact).epsilon(0.01));
}

TEST_CASE("coarea end intervals resolve a square-root slice area") {
  // Level sets of x^2 + y^2 are quarter cylinders of area (pi/2) sqrt(t), so
  // the slice side integrates a square root from the bottom of the range.
  const Setup st(unit_box(65), MetricSpec::flat(), poly({{1.0, {2, 0, 0}}, {1.0, {0, 2, 0}}}));
  const double T = 0.81;
  const RegularValueSplit split = regular_split(st.fb, 8, 0.0, std::array<double, 2>{0.0, T});
  double weights = 0.0;
  int visits = 0;
  for_each_regular_level(st.fb, split, [&](const LevelSetSurface&, const LevelInfo& info) {
    weights += info.dt;
    ++visits;
  });
  CHECK(weights == doctest::Approx(T).epsilon(1e-12));
  CHECK(visits > 8);
  const auto r = coarea_integrate(ScalarField(st.fb.grid(), 1.0), st.fb, split);
  // A midpoint in the first interval alone would be off by about 3e-3.
  CHECK(r[0] == doctest::Approx(kPi / 3 * std::pow(T, 1.5)).epsilon(1e-3));
}

TEST_CASE("coarea slice and volume sides agree for a smooth integrand") {
  const Expr u = Expr(Expr::SinProduct{1.0, {1, 1, 1}, {0, 0, 0}});
  const Grid g = Grid::box(64, {0.25, 0.25, 0.25}, {1.25, 1.25, 1.25});
  const Setup st(g, MetricSpec::flat(), u);
  const ScalarField f = oracle::sample(g, poly({{1.0, {0, 0, 0}}, {0.5, {1, 1, 0}}}));
  const auto r = coarea_integrate(f, st.fb, regular_split(st.fb, 64, default_epsilon_reg(st.fb)));
  CHECK(r[0] == doctest::Approx(r[1]).epsilon(0.02));
}

TEST_CASE("surface export") {
  const Setup st(unit_box(17), MetricSpec::flat(), radial());
  const LevelSetSurface s = extract_level_set(st.fb, 0.09);
  const auto dir = std::filesystem::temp_directory_path() / "hlab_test_obj";
  std::filesystem::create_directories(dir);
  write_obj(dir / "s.obj", s);
  write_triangle_csv(dir / "s.csv", {s});
  std::ifstream obj(dir / "s.obj");
  std::size_t v = 0, f = 0;
  for (std::string line; std::getline(obj, line);) {
    if (line.rfind("v ", 0) == 0) ++v;
    if (line.rfind("f ", 0) == 0) ++f;
  }
  CHECK(f == s.triangles.size());
  // Closed genus-0 mesh: V - E + F = 2 with E = 3F / 2.
  CHECK(static_cast<long>(v) - static_cast<long>(3 * f / 2) + static_cast<long>(f) == 2);
  std::ifstream csv(dir / "s.csv");
  std::size_t rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  CHECK(rows == s.triangles.size() + 1);
  std::filesystem::remove_all(dir);
}
