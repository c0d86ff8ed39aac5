#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "hlab/grid.hpp"

namespace hlab {

/// N reals per node, stored node-major with x fastest.
template <int N>
class NodeField {
 public:
  static constexpr int kComponents = N;

  explicit NodeField(const Grid& grid, double fill = 0.0)
      : grid_(grid), values_(grid.node_count() * N, fill) {}

  NodeField(const Grid& grid, std::vector<double> values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.node_count() * N)
      throw std::invalid_argument("field value count does not match grid");
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return grid_.node_count(); }

  std::span<double, N> operator[](std::size_t n) {
    return std::span<double, N>(values_.data() + n * N, N);
  }
  std::span<const double, N> operator[](std::size_t n) const {
    return std::span<const double, N>(values_.data() + n * N, N);
  }

  /// Component c at node n.
  double& at(std::size_t n, int c = 0) { return values_[n * N + c]; }
  double at(std::size_t n, int c = 0) const { return values_[n * N + c]; }

  std::span<const double> raw() const { return values_; }
  std::vector<double>& raw_mut() { return values_; }

 private:
  Grid grid_;
  std::vector<double> values_;
};

using ScalarField = NodeField<1>;
using VectorField = NodeField<3>;
using SymTensorField = NodeField<6>;
/// Gamma^k_ij stored as k * 6 + sym_index(i, j).
using ChristoffelField = NodeField<18>;

template <int N>
std::array<double, N> value_at(const NodeField<N>& f, std::size_t n) {
  std::array<double, N> out{};
  for (int c = 0; c < N; ++c) out[c] = f.at(n, c);
  return out;
}

inline void require_same_grid(const Grid& a, const Grid& b) {
  if (!a.same_lattice(b)) throw std::invalid_argument("fields live on different grids");
}

}  // namespace hlab
