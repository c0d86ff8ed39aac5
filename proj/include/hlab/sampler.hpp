#pragma once

#include "hlab/differential.hpp"

namespace hlab {

/// Derived node fields of one scalar u.
struct SolutionFields {
  ScalarField u;
  /// Coordinate partials d_i u.
  VectorField du;
  /// Contravariant gradient.
  VectorField grad;
  ScalarField grad_norm;
  SymTensorField hess;
  ScalarField lap;
};

SolutionFields solution_fields(const ScalarField& u, const MetricData& m);

/// The eight nodes of a cell with trilinear weights.
struct CellStencil {
  std::array<std::size_t, 8> nodes{};
  std::array<double, 8> weights{};
};

/// `grid_coords` are continuous node indices; points on the upper faces
/// fall into the last cell.
CellStencil cell_stencil(const Grid& g, const Vec3& grid_coords);

template <int N>
std::array<double, N> interpolate(const NodeField<N>& f, const CellStencil& cs) {
  std::array<double, N> out{};
  for (int c = 0; c < 8; ++c)
    for (int k = 0; k < N; ++k) out[k] += cs.weights[c] * f.at(cs.nodes[c], k);
  return out;
}

inline double interpolate(const ScalarField& f, const CellStencil& cs) {
  return interpolate<1>(f, cs)[0];
}

/// Everything the level-set and inequality code reads at one point, all
/// trilinearly interpolated from node values.
struct PointSample {
  Vec3 position{};
  Sym3 g{}, g_inv{};
  double sqrt_det = 0.0;
  Sym3 ricci{};
  double scalar_curv = 0.0;
  double u = 0.0;
  Vec3 du{};
  /// Raised with the interpolated inverse metric, so g(grad, grad) = du(grad).
  Vec3 grad{};
  double grad_norm = 0.0;
  Sym3 hess{};
  /// g^{ij} hess_ij of the interpolated Hessian.
  double lap = 0.0;
  Sym3 p{};
  double P = 0.0;
  double h = 0.0;
  Vec3 dh{};
  double mu = 0.0;
  /// Contravariant.
  Vec3 J{};

  Vec3 normal() const;
  /// hess + p |grad u|
  Sym3 spacetime_hess() const;
};

/// Bundles the metric, initial data and a scalar u for point evaluation.
/// Holds references to `m` and `idf`, which must outlive it.
class FieldBundle {
 public:
  FieldBundle(const MetricData& m, const InitialDataFields& idf, const ScalarField& u);

  const MetricData& metric() const { return *m_; }
  const InitialDataFields& data() const { return *idf_; }
  const SolutionFields& solution() const { return sol_; }
  const Grid& grid() const { return sol_.u.grid(); }
  /// Coordinate partials of h.
  const VectorField& dh() const { return dh_; }

  PointSample at(const Vec3& grid_coords) const;
  /// Node values without interpolation.
  PointSample at_node(std::size_t n) const;

  Vec3 to_grid(const Vec3& position) const;
  Vec3 to_position(const Vec3& grid_coords) const;

 private:
  const MetricData* m_;
  const InitialDataFields* idf_;
  SolutionFields sol_;
  VectorField dh_;
};

}  // namespace hlab
