#include "hlab/differential.hpp"

#include <cmath>

#include "hlab/stencil.hpp"

namespace hlab {

double g_dot(const MetricData& m, std::size_t n, const Vec3& a, const Vec3& b) {
  return contract(value_at(m.g, n), a, b);
}

Gradient gradient(const ScalarField& u, const MetricData& m) {
  require_same_grid(u.grid(), m.grid());
  const Grid& grid = u.grid();
  const VectorField du = fd::partials(u);
  Gradient out{VectorField(grid), ScalarField(grid)};
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    const Vec3 co = value_at(du, n);
    const Vec3 contra = mul(value_at(m.g_inv, n), co);
    for (int a = 0; a < 3; ++a) out.vec.at(n, a) = contra[a];
    out.norm.at(n) = std::sqrt(std::max(0.0, dot(co, contra)));
  }
  return out;
}

SymTensorField hessian(const ScalarField& u, const MetricData& m) {
  require_same_grid(u.grid(), m.grid());
  const Grid& grid = u.grid();
  const VectorField du = fd::partials(u);
  SymTensorField out = fd::second_partials(u);
  for (std::size_t n = 0; n < grid.node_count(); ++n)
    for (int c = 0; c < 6; ++c) {
      const auto [i, j] = kSymPairs[c];
      double corr = 0.0;
      for (int k = 0; k < 3; ++k) corr += m.gamma(n, k, i, j) * du.at(n, k);
      out.at(n, c) -= corr;
    }
  return out;
}

SymTensorField spacetime_hessian(const ScalarField& u, const InitialDataFields& idf,
                                 const MetricData& m) {
  SymTensorField out = hessian(u, m);
  const Gradient grad = gradient(u, m);
  for (std::size_t n = 0; n < out.size(); ++n)
    for (int c = 0; c < 6; ++c) {
      const double add = idf.p.at(n, c) * grad.norm.at(n);
      if (add != 0.0) out.at(n, c) += add;
    }
  return out;
}

ScalarField hessian_trace(const SymTensorField& hess, const MetricData& m) {
  ScalarField out(hess.grid());
  for (std::size_t n = 0; n < out.size(); ++n)
    out.at(n) = trace(value_at(m.g_inv, n), value_at(hess, n));
  return out;
}

ScalarField divergence(const VectorField& v, const MetricData& m) {
  const Grid& grid = v.grid();
  ScalarField out(grid);
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    const Index3 id = grid.unflatten(n);
    double acc = 0.0;
    for (int a = 0; a < 3; ++a)
      acc += fd::d1([&](Index3 q) {
        const std::size_t s = grid.index(q);
        return m.sqrt_det.at(s) * v.at(s, a);
      }, grid, id, a);
    out.at(n) = acc / m.sqrt_det.at(n);
  }
  return out;
}

InitialDataFields energy_momentum(const MetricData& m, const SymTensorField& p,
                                  const ScalarField& h) {
  require_same_grid(m.grid(), p.grid());
  require_same_grid(m.grid(), h.grid());
  const Grid& grid = m.grid();
  const std::size_t nn = grid.node_count();

  ScalarField P(grid);
  ScalarField mu(grid);
  SymTensorField q(grid);  // p - P g
  for (std::size_t n = 0; n < nn; ++n) {
    const Sym3 inv = value_at(m.g_inv, n);
    const Sym3 pn = value_at(p, n);
    const double tr = trace(inv, pn);
    P.at(n) = tr;
    mu.at(n) = 0.5 * (m.scalar_curv.at(n) + tr * tr - inner(inv, pn, pn));
    for (int c = 0; c < 6; ++c) q.at(n, c) = pn[c] - tr * m.g.at(n, c);
  }

  // J_j = g^{ik} nabla_k q_ij, then raised.
  VectorField J(grid);
  for (std::size_t n = 0; n < nn; ++n) {
    const Index3 id = grid.unflatten(n);
    double dq[3][6];
    for (int k = 0; k < 3; ++k)
      for (int c = 0; c < 6; ++c) dq[k][c] = fd::d1(q, c, id, k);
    const Sym3 inv = value_at(m.g_inv, n);
    Vec3 Jlow{};
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) {
          double cov = dq[k][sym_index(i, j)];
          for (int l = 0; l < 3; ++l)
            cov -= m.gamma(n, l, k, i) * q.at(n, sym_index(l, j)) +
                   m.gamma(n, l, k, j) * q.at(n, sym_index(i, l));
          acc += at(inv, i, k) * cov;
        }
      Jlow[j] = acc;
    }
    const Vec3 up = mul(inv, Jlow);
    for (int a = 0; a < 3; ++a) J.at(n, a) = up[a];
  }

  return InitialDataFields{p, std::move(P), h, std::move(mu), std::move(J)};
}

}  // namespace hlab
