#include "hlab/metric.hpp"

#include <cmath>
#include <sstream>

#include "hlab/errors.hpp"
#include "hlab/stencil.hpp"

namespace hlab {

Sym3 MetricSpec::evaluate(const Vec3& x) const {
  switch (family) {
    case Family::Flat:
      return identity_sym();
    case Family::Diagonal:
      return {components[0].value(x), 0, 0, components[1].value(x), 0, components[2].value(x)};
    case Family::Conformal: {
      const double p = phi.value(x);
      const double p4 = p * p * p * p;
      return {p4, 0, 0, p4, 0, p4};
    }
  }
  return identity_sym();
}

MetricData build_metric(const Grid& grid, const MetricSpec& spec) {
  SymTensorField g(grid);
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    const Sym3 v = spec.evaluate(grid.position(grid.unflatten(n)));
    for (int c = 0; c < 6; ++c) g.at(n, c) = v[c];
  }
  return build_metric(std::move(g));
}

namespace {

constexpr int kPairIndex[3][3] = {{-1, 0, 1}, {0, -1, 2}, {1, 2, -1}};

/// R^l_{ijk} read from pair storage (zero on the diagonal pair).
double riem_get(const std::array<double, 27>& r, int l, int i, int j, int k) {
  if (j == k) return 0.0;
  const double v = r[l * 9 + i * 3 + kPairIndex[j][k]];
  return j < k ? v : -v;
}

}  // namespace

MetricData build_metric(SymTensorField g) {
  const Grid grid = g.grid();
  const std::size_t nn = grid.node_count();

  SymTensorField g_inv(grid);
  ScalarField sqrt_det(grid);
  for (std::size_t n = 0; n < nn; ++n) {
    const Sym3 v = value_at(g, n);
    if (!positive_definite(v)) {
      const Index3 id = grid.unflatten(n);
      std::ostringstream os;
      os << "metric is not positive definite at node (" << id.i << ", " << id.j << ", " << id.k
         << ")";
      throw MetricError(os.str(), id);
    }
    const Sym3 inv = inverse(v);
    for (int c = 0; c < 6; ++c) g_inv.at(n, c) = inv[c];
    sqrt_det.at(n) = std::sqrt(det(v));
  }

  // Gamma^k_ij = 1/2 g^{kl} (d_i g_lj + d_j g_li - d_l g_ij)
  ChristoffelField christoffel(grid);
  for (std::size_t n = 0; n < nn; ++n) {
    const Index3 id = grid.unflatten(n);
    double dg[3][6];
    for (int m = 0; m < 3; ++m)
      for (int c = 0; c < 6; ++c) dg[m][c] = fd::d1(g, c, id, m);
    const Sym3 inv = value_at(g_inv, n);
    for (int k = 0; k < 3; ++k)
      for (int c = 0; c < 6; ++c) {
        const auto [i, j] = kSymPairs[c];
        double acc = 0.0;
        for (int l = 0; l < 3; ++l)
          acc += at(inv, k, l) *
                 (dg[i][sym_index(l, j)] + dg[j][sym_index(l, i)] - dg[l][sym_index(i, j)]);
        christoffel.at(n, k * 6 + c) = 0.5 * acc;
      }
  }

  // Ric_ik = d_j G^j_ik - d_k G^j_ij + G^j_jm G^m_ik - G^j_km G^m_ij, symmetrized.
  SymTensorField ricci(grid);
  ScalarField scalar(grid);
  auto G = [&](std::size_t n, int k, int i, int j) {
    return christoffel.at(n, k * 6 + sym_index(i, j));
  };
  for (std::size_t n = 0; n < nn; ++n) {
    const Index3 id = grid.unflatten(n);
    double dG[3][18];
    for (int a = 0; a < 3; ++a)
      for (int c = 0; c < 18; ++c) dG[a][c] = fd::d1(christoffel, c, id, a);
    Mat3 ric{};
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) {
        double acc = 0.0;
        for (int j = 0; j < 3; ++j) {
          acc += dG[j][j * 6 + sym_index(i, k)] - dG[k][j * 6 + sym_index(i, j)];
          for (int m = 0; m < 3; ++m)
            acc += G(n, j, j, m) * G(n, m, i, k) - G(n, j, k, m) * G(n, m, i, j);
        }
        ric[i][k] = acc;
      }
    const Sym3 rs = to_sym(ric);
    for (int c = 0; c < 6; ++c) ricci.at(n, c) = rs[c];
    scalar.at(n) = trace(value_at(g_inv, n), rs);
  }

  return MetricData{std::move(g),     std::move(g_inv), std::move(sqrt_det),
                    std::move(christoffel), std::move(ricci), std::move(scalar)};
}

RiemannField riemann(const MetricData& m) {
  const Grid& grid = m.grid();
  RiemannField out(grid);
  constexpr int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    const Index3 id = grid.unflatten(n);
    double dG[3][18];
    for (int a = 0; a < 3; ++a)
      for (int c = 0; c < 18; ++c) dG[a][c] = fd::d1(m.christoffel, c, id, a);
    for (int l = 0; l < 3; ++l)
      for (int i = 0; i < 3; ++i)
        for (int p = 0; p < 3; ++p) {
          const int j = pairs[p][0];
          const int k = pairs[p][1];
          double acc = dG[j][l * 6 + sym_index(i, k)] - dG[k][l * 6 + sym_index(i, j)];
          for (int q = 0; q < 3; ++q)
            acc += m.gamma(n, l, j, q) * m.gamma(n, q, i, k) -
                   m.gamma(n, l, k, q) * m.gamma(n, q, i, j);
          out.at(n, l * 9 + i * 3 + p) = acc;
        }
  }
  return out;
}

double sectional_numerator(const std::array<double, 27>& riem, const Sym3& g, const Vec3& x,
                           const Vec3& y) {
  // <R(X, Y) Y, X> with R(d_j, d_k) d_i = R^l_{ijk} d_l
  const Vec3 xl = mul(g, x);
  double acc = 0.0;
  for (int l = 0; l < 3; ++l)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          acc += xl[l] * riem_get(riem, l, i, j, k) * y[i] * x[j] * y[k];
  return acc;
}

}  // namespace hlab
