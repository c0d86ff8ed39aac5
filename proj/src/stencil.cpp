#include "hlab/stencil.hpp"

namespace hlab::fd {

VectorField partials(const ScalarField& u) {
  const Grid& g = u.grid();
  VectorField out(g);
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    const Index3 id = g.unflatten(n);
    for (int a = 0; a < 3; ++a) out.at(n, a) = d1(u, 0, id, a);
  }
  return out;
}

SymTensorField second_partials(const ScalarField& u) {
  const Grid& g = u.grid();
  SymTensorField out(g);
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    const Index3 id = g.unflatten(n);
    for (int c = 0; c < 6; ++c) {
      const auto [i, j] = kSymPairs[c];
      out.at(n, c) = d11(u, 0, id, i, j);
    }
  }
  return out;
}

}  // namespace hlab::fd
