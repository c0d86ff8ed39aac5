#pragma once

#include "hlab/fields.hpp"

namespace hlab::fd {

// Second-order finite differences on the node lattice. Centered in the
// interior, one-sided second order on the first and last node of each axis.
// `f` maps an Index3 to a value.

template <class F>
double d1(F&& f, const Grid& g, Index3 n, int a) {
  const int last = g.dims()[a] - 1;
  const double h = g.spacing()[a];
  auto at = [&](int off) {
    Index3 m = n;
    m[a] += off;
    return f(m);
  };
  if (n[a] == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
  if (n[a] == last) return (3.0 * at(0) - 4.0 * at(-1) + at(-2)) / (2.0 * h);
  return (at(1) - at(-1)) / (2.0 * h);
}

template <class F>
double d2(F&& f, const Grid& g, Index3 n, int a) {
  const int last = g.dims()[a] - 1;
  const double h = g.spacing()[a];
  auto at = [&](int off) {
    Index3 m = n;
    m[a] += off;
    return f(m);
  };
  if (n[a] == 0) return (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / (h * h);
  if (n[a] == last) return (2.0 * at(0) - 5.0 * at(-1) + 4.0 * at(-2) - at(-3)) / (h * h);
  return (at(1) - 2.0 * at(0) + at(-1)) / (h * h);
}

/// d_a d_b f, composed from first differences when a != b.
template <class F>
double d11(F&& f, const Grid& g, Index3 n, int a, int b) {
  if (a == b) return d2(f, g, n, a);
  return d1([&](Index3 m) { return d1(f, g, m, a); }, g, n, b);
}

template <int N>
double d1(const NodeField<N>& field, int comp, Index3 n, int a) {
  const Grid& g = field.grid();
  return d1([&](Index3 m) { return field.at(g.index(m), comp); }, g, n, a);
}

template <int N>
double d2(const NodeField<N>& field, int comp, Index3 n, int a) {
  const Grid& g = field.grid();
  return d2([&](Index3 m) { return field.at(g.index(m), comp); }, g, n, a);
}

template <int N>
double d11(const NodeField<N>& field, int comp, Index3 n, int a, int b) {
  const Grid& g = field.grid();
  return d11([&](Index3 m) { return field.at(g.index(m), comp); }, g, n, a, b);
}

/// Coordinate partials (covariant components) of a scalar field.
VectorField partials(const ScalarField& u);
/// Coordinate second partials of a scalar field.
SymTensorField second_partials(const ScalarField& u);

}  // namespace hlab::fd
