#pragma once

#include <optional>

#include "hlab/expr.hpp"
#include "hlab/fields.hpp"

namespace hlab {

/// Analytic metric families evaluated at the nodes.
struct MetricSpec {
  enum class Family { Flat, Diagonal, Conformal };
  Family family = Family::Flat;
  /// Diagonal family: g = diag(components).
  std::array<Expr, 3> components{Expr(1.0), Expr(1.0), Expr(1.0)};
  /// Conformal family: g = phi^4 delta.
  Expr phi{1.0};

  static MetricSpec flat() { return {}; }
  static MetricSpec diagonal(std::array<Expr, 3> c) {
    MetricSpec s;
    s.family = Family::Diagonal;
    s.components = std::move(c);
    return s;
  }
  static MetricSpec conformal(Expr phi) {
    MetricSpec s;
    s.family = Family::Conformal;
    s.phi = std::move(phi);
    return s;
  }

  Sym3 evaluate(const Vec3& x) const;
};

/// Metric with every derived quantity the rest of the lab consumes.
/// Immutable once built.
struct MetricData {
  SymTensorField g;
  SymTensorField g_inv;
  ScalarField sqrt_det;
  ChristoffelField christoffel;
  SymTensorField ricci;
  ScalarField scalar_curv;

  const Grid& grid() const { return g.grid(); }
  double gamma(std::size_t n, int k, int i, int j) const {
    return christoffel.at(n, k * 6 + sym_index(i, j));
  }
};

/// Throws MetricError naming the first node where g fails to be positive definite.
MetricData build_metric(const Grid& grid, const MetricSpec& spec);

/// Tabulated input; derived fields come from the same stencils.
MetricData build_metric(SymTensorField g);

/// R^l_{ijk} with the (j, k) pair antisymmetric, stored as
/// l * 9 + i * 3 + pair where pair 0 = (0,1), 1 = (0,2), 2 = (1,2).
/// Convention: Ric_ik = R^j_{ijk} and Rm(X,Y,Y,X) > 0 on round spheres.
using RiemannField = NodeField<27>;
RiemannField riemann(const MetricData& m);

/// Rm(X, Y, Y, X) from a lowered-at-use Riemann sample.
double sectional_numerator(const std::array<double, 27>& riem, const Sym3& g, const Vec3& x,
                           const Vec3& y);

}  // namespace hlab
