#include "hlab/boundary.hpp"

#include <algorithm>
#include <cmath>

#include "hlab/stencil.hpp"

namespace hlab {

Index3 FaceGeometry::node_index(int i1, int i2, const Grid& g) const {
  Index3 n;
  n[axis] = sign < 0 ? 0 : g.dims()[axis] - 1;
  n[tangential[0]] = i1;
  n[tangential[1]] = i2;
  return n;
}

FaceNodeGeometry FaceGeometry::sample(double c1, double c2) const {
  const int b1 = std::clamp(static_cast<int>(std::floor(c1)), 0, dims[0] - 2);
  const int b2 = std::clamp(static_cast<int>(std::floor(c2)), 0, dims[1] - 2);
  const double f1 = c1 - b1, f2 = c2 - b2;
  FaceNodeGeometry out;
  out.node = at(b1, b2).node;
  for (int c = 0; c < 4; ++c) {
    const int d1 = c & 1, d2 = c >> 1;
    const double w = (d1 ? f1 : 1 - f1) * (d2 ? f2 : 1 - f2);
    const FaceNodeGeometry& n = at(b1 + d1, b2 + d2);
    for (int i = 0; i < 3; ++i) {
      out.eta[i] += w * n.eta[i];
      out.d_eta[0][i] += w * n.d_eta[0][i];
      out.d_eta[1][i] += w * n.d_eta[1][i];
    }
    for (int i = 0; i < 6; ++i) out.B[i] += w * n.B[i];
    out.H_S += w * n.H_S;
    out.trS_p += w * n.trS_p;
    out.area_weight += w * n.area_weight;
  }
  return out;
}

BoundaryGeometry boundary_geometry(const MetricData& m, const InitialDataFields& idf) {
  require_same_grid(m.grid(), idf.grid());
  const Grid& g = m.grid();
  BoundaryGeometry bg;
  for (Face f : kAllFaces) {
    FaceGeometry& fg = bg.faces[static_cast<int>(f)];
    fg.face = f;
    fg.axis = face_axis(f);
    fg.sign = face_sign(f);
    fg.tangential = {(fg.axis + 1) % 3, (fg.axis + 2) % 3};
    if (fg.tangential[0] > fg.tangential[1]) std::swap(fg.tangential[0], fg.tangential[1]);
    fg.dims = {g.dims()[fg.tangential[0]], g.dims()[fg.tangential[1]]};
    fg.nodes.resize(static_cast<std::size_t>(fg.dims[0]) * fg.dims[1]);
    const int a = fg.axis;

    for (int i2 = 0; i2 < fg.dims[1]; ++i2) {
      for (int i1 = 0; i1 < fg.dims[0]; ++i1) {
        FaceNodeGeometry& fn = fg.nodes[i1 + fg.dims[0] * i2];
        const std::size_t n = g.index(fg.node_index(i1, i2, g));
        fn.node = n;
        const Sym3 gi = value_at(m.g_inv, n);
        const double norm = std::sqrt(at(gi, a, a));
        for (int i = 0; i < 3; ++i) fn.eta[i] = fg.sign * at(gi, a, i) / norm;
        for (int c = 0; c < 6; ++c) {
          const auto [i, j] = kSymPairs[c];
          fn.B[c] = -fg.sign * m.gamma(n, a, i, j) / norm;
        }
        // Tangential projector g^ij - eta^i eta^j.
        Sym3 proj{};
        for (int c = 0; c < 6; ++c) {
          const auto [i, j] = kSymPairs[c];
          proj[c] = gi[c] - fn.eta[i] * fn.eta[j];
        }
        fn.H_S = trace(proj, fn.B);
        fn.trS_p = trace(proj, value_at(idf.p, n));

        const Sym3 gn = value_at(m.g, n);
        const int t0 = fg.tangential[0], t1 = fg.tangential[1];
        const double induced = at(gn, t0, t0) * at(gn, t1, t1) - at(gn, t0, t1) * at(gn, t0, t1);
        const double w1 = (i1 == 0 || i1 == fg.dims[0] - 1) ? 0.5 : 1.0;
        const double w2 = (i2 == 0 || i2 == fg.dims[1] - 1) ? 0.5 : 1.0;
        fn.area_weight = w1 * w2 * g.spacing()[t0] * g.spacing()[t1] * std::sqrt(induced);
      }
    }

    // Tangential covariant derivatives of eta from differences along the face.
    for (int i2 = 0; i2 < fg.dims[1]; ++i2) {
      for (int i1 = 0; i1 < fg.dims[0]; ++i1) {
        FaceNodeGeometry& fn = fg.nodes[i1 + fg.dims[0] * i2];
        const Index3 id = fg.node_index(i1, i2, g);
        for (int t = 0; t < 2; ++t) {
          const int k = fg.tangential[t];
          for (int i = 0; i < 3; ++i) {
            const double partial = fd::d1(
                [&](Index3 q) { return fg.at(q[fg.tangential[0]], q[fg.tangential[1]]).eta[i]; }, g,
                id, k);
            double conn = 0.0;
            for (int l = 0; l < 3; ++l) conn += m.gamma(fn.node, i, k, l) * fn.eta[l];
            fn.d_eta[t][i] = partial + conn;
          }
        }
      }
    }
  }
  return bg;
}

}  // namespace hlab
