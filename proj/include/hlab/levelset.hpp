#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>

#include "hlab/sampler.hpp"

namespace hlab {

/// Geometry of the level set through a point, from the interpolated
/// gradient and Hessian there.
struct LocalGeometry {
  /// Contravariant, g-unit, along grad u.
  Vec3 normal{};
  /// g-orthonormal tangent frame.
  std::array<Vec3, 2> frame{};
  /// Second fundamental form (11, 12, 22) in the frame.
  std::array<double, 3> A{};
  double H = 0.0;
  double A_norm2 = 0.0;
  double K = 0.0;
};

/// Requires grad_norm > 0.
LocalGeometry level_geometry(const PointSample& s);

/// Gauss curvature from the twice-traced Gauss equation:
/// K = (R - 2 Ric(nu, nu) - |A|^2 + H^2) / 2.
double gauss_curvature(const PointSample& s, const LocalGeometry& lg);

/// Vertices on the lattice edge joining nodes a < b share the key a * N + b.
using VertexKey = std::uint64_t;

struct SurfaceTriangle {
  /// Physical coordinates, ordered so the Euclidean normal points toward increasing u.
  std::array<Vec3, 3> vertices{};
  std::array<VertexKey, 3> keys{};
  /// Grid coordinates of the centroid.
  Vec3 centroid{};
  /// Metric area.
  double area = 0.0;
  double grad_norm = 0.0;
  LocalGeometry geom;
  /// Interpolated values of the requested extra volume fields.
  std::vector<double> extras;
};

struct LevelSetSurface {
  double level = 0.0;
  std::vector<SurfaceTriangle> triangles;
  /// Triangles with |grad u| < 1e-12 at the centroid, excluded from `triangles`.
  int degenerate = 0;

  double area() const;
  double min_grad_norm() const;
  /// Every edge shared by exactly two triangles.
  bool closed() const;
};

/// Marching tetrahedra over the Kuhn split of each cell. Throws
/// std::invalid_argument unless min u < t < max u.
LevelSetSurface extract_level_set(const FieldBundle& fb, double t,
                                  const std::vector<const ScalarField*>& extras = {});

/// Discrete Gauss-Bonnet total from angle defects measured in the metric at
/// each triangle centroid. Empty for surfaces with boundary.
std::optional<double> angle_defect_total(const LevelSetSurface& s, const FieldBundle& fb);

struct LevelInfo {
  double t = 0.0;
  double dt = 0.0;
  double min_grad_norm = 0.0;
  double area = 0.0;
  int degenerate = 0;
  bool regular = false;
};

/// Uniform midpoint levels whose intervals tile [t_lo, t_hi]. Levels with
/// min |grad u| below epsilon_reg form the excluded set.
struct RegularValueSplit {
  double epsilon_reg = 0.0;
  double t_lo = 0.0, t_hi = 0.0;
  std::vector<LevelInfo> levels;
  /// Total length of excluded intervals.
  double A_measure = 0.0;
  /// Sum over excluded levels of dt * |Sigma_t|.
  double area_integral_over_A = 0.0;

  std::vector<double> B_levels() const;
};

/// 1e-3 times the largest node value of |grad u|.
double default_epsilon_reg(const FieldBundle& fb);

RegularValueSplit regular_split(const FieldBundle& fb, int n_levels, double epsilon_reg,
                                std::optional<std::array<double, 2>> range = std::nullopt);

using LevelVisitor = std::function<void(const LevelSetSurface&, const LevelInfo&)>;

/// Re-extracts each regular level in order and hands it to `visit`. The two
/// end intervals are visited at several sub-levels whose `dt` fields are
/// quadrature weights summing to the interval width.
void for_each_regular_level(const FieldBundle& fb, const RegularValueSplit& split,
                            const LevelVisitor& visit,
                            const std::vector<const ScalarField*>& extras = {});

using PointIntegrand = std::function<double(const PointSample&, const LocalGeometry&)>;

struct CoareaResult {
  /// Sum over regular levels of dt * integral over the slice.
  std::vector<double> slice;
  /// Integral of f |grad u| dV over u^-1 of the regular intervals.
  std::vector<double> volume;
};

/// Evaluates several integrands in one pass over the levels and one over the cells.
CoareaResult coarea_integrate(const std::vector<PointIntegrand>& fs, const FieldBundle& fb,
                              const RegularValueSplit& split);

/// Convenience for a node field f.
std::array<double, 2> coarea_integrate(const ScalarField& f, const FieldBundle& fb,
                                       const RegularValueSplit& split);

void write_obj(const std::filesystem::path& path, const LevelSetSurface& s);

/// One row per triangle: level, area, H, K, grad_norm.
void write_triangle_csv(const std::filesystem::path& path,
                        const std::vector<LevelSetSurface>& surfaces);

}  // namespace hlab
