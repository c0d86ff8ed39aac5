#pragma once

#include "hlab/metric.hpp"

namespace hlab {

/// p, its trace P, the prescribing function h, and the constraint
/// quantities built from them: 2 mu = R + P^2 - |p|^2, J = div(p - P g).
struct InitialDataFields {
  SymTensorField p;
  ScalarField P_trace;
  ScalarField h;
  ScalarField mu;
  /// Contravariant components.
  VectorField J;

  const Grid& grid() const { return p.grid(); }
};

struct Gradient {
  /// Contravariant grad u = g^{ij} d_j u.
  VectorField vec;
  /// |grad u|_g
  ScalarField norm;
};

Gradient gradient(const ScalarField& u, const MetricData& m);

/// Covariant Hessian d_i d_j u - Gamma^k_ij d_k u.
SymTensorField hessian(const ScalarField& u, const MetricData& m);

/// Hessian plus p |grad u|.
SymTensorField spacetime_hessian(const ScalarField& u, const InitialDataFields& idf,
                                 const MetricData& m);

/// g^{ij} (hessian u)_ij, node by node.
ScalarField hessian_trace(const SymTensorField& hess, const MetricData& m);

/// (1 / sqrt g) d_i (sqrt g V^i) for a contravariant field.
ScalarField divergence(const VectorField& v, const MetricData& m);

InitialDataFields energy_momentum(const MetricData& m, const SymTensorField& p,
                                  const ScalarField& h);

/// g(a, b) per node for contravariant fields.
double g_dot(const MetricData& m, std::size_t n, const Vec3& a, const Vec3& b);

}  // namespace hlab
