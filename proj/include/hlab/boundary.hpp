#pragma once

#include "hlab/differential.hpp"

namespace hlab {

/// Geometry of a coordinate face of the box at one face node.
struct FaceNodeGeometry {
  std::size_t node = 0;
  /// Outward g-unit normal, contravariant.
  Vec3 eta{};
  /// Second fundamental form <nabla_X eta, Y>; only meaningful on tangent vectors.
  Sym3 B{};
  double H_S = 0.0;
  /// Trace of p over the face.
  double trS_p = 0.0;
  /// nabla_k eta^i for k running over the two tangential axes.
  std::array<Vec3, 2> d_eta{};
  /// Trapezoid weight times the induced area element.
  double area_weight = 0.0;
};

struct FaceGeometry {
  Face face = Face::XLo;
  int axis = 0;
  int sign = -1;
  std::array<int, 2> tangential{};
  std::array<int, 2> dims{};
  std::vector<FaceNodeGeometry> nodes;

  const FaceNodeGeometry& at(int i1, int i2) const { return nodes[i1 + dims[0] * i2]; }
  Index3 node_index(int i1, int i2, const Grid& g) const;
  /// Bilinear interpolation in face-local node coordinates.
  FaceNodeGeometry sample(double c1, double c2) const;
  /// Whether the face node lies on an edge of the face.
  bool on_edge(int i1, int i2) const {
    return i1 == 0 || i2 == 0 || i1 == dims[0] - 1 || i2 == dims[1] - 1;
  }
};

struct BoundaryGeometry {
  std::array<FaceGeometry, 6> faces;
  const FaceGeometry& face(Face f) const { return faces[static_cast<int>(f)]; }
};

/// B_ij = -s Gamma^a_ij / sqrt(g^aa) on the face x^a = const with outward
/// sign s, which is the tangential part of the covariant derivative of the
/// unit conormal.
BoundaryGeometry boundary_geometry(const MetricData& m, const InitialDataFields& idf);

}  // namespace hlab
