#include "hlab/grid.hpp"

#include <cmath>

namespace hlab {

namespace {
constexpr std::array<const char*, 6> kFaceNames = {"x_lo", "x_hi", "y_lo",
                                                   "y_hi", "z_lo", "z_hi"};
}

std::string face_name(Face f) { return kFaceNames[static_cast<int>(f)]; }

Face face_from_name(const std::string& name) {
  for (int f = 0; f < 6; ++f)
    if (name == kFaceNames[f]) return static_cast<Face>(f);
  throw std::invalid_argument("unknown face name '" + name + "'");
}

Grid::Grid(std::array<int, 3> dims, Vec3 spacing, Vec3 origin)
    : dims_(dims), spacing_(spacing), origin_(origin) {
  for (int a = 0; a < 3; ++a) {
    if (dims_[a] < kMinNodes)
      throw std::invalid_argument("grid needs at least 5 nodes per axis");
    if (!(spacing_[a] > 0.0) || !std::isfinite(spacing_[a]))
      throw std::invalid_argument("grid spacing must be positive");
  }
}

Grid Grid::box(int n, Vec3 lo, Vec3 hi) { return box({n, n, n}, lo, hi); }

Grid Grid::box(std::array<int, 3> n, Vec3 lo, Vec3 hi) {
  Vec3 h{};
  for (int a = 0; a < 3; ++a) {
    if (n[a] < kMinNodes) throw std::invalid_argument("grid needs at least 5 nodes per axis");
    h[a] = (hi[a] - lo[a]) / (n[a] - 1);
  }
  return Grid(n, h, lo);
}

Vec3 Grid::upper() const {
  return position(dims_[0] - 1, dims_[1] - 1, dims_[2] - 1);
}

Index3 Grid::unflatten(std::size_t n) const {
  Index3 r;
  r.i = static_cast<int>(n % dims_[0]);
  n /= dims_[0];
  r.j = static_cast<int>(n % dims_[1]);
  r.k = static_cast<int>(n / dims_[1]);
  return r;
}

bool Grid::on_boundary(const Index3& n) const {
  for (int a = 0; a < 3; ++a)
    if (n[a] == 0 || n[a] == dims_[a] - 1) return true;
  return false;
}

bool Grid::on_face(const Index3& n, Face f) const {
  const int a = face_axis(f);
  return face_sign(f) < 0 ? n[a] == 0 : n[a] == dims_[a] - 1;
}

bool Grid::deep_interior(const Index3& n, int layers) const {
  for (int a = 0; a < 3; ++a)
    if (n[a] < layers || n[a] > dims_[a] - 1 - layers) return false;
  return true;
}

bool Grid::same_lattice(const Grid& o) const {
  return dims_ == o.dims_ && spacing_ == o.spacing_ && origin_ == o.origin_;
}

}  // namespace hlab
