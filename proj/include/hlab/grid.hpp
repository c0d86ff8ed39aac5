#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "hlab/tensor.hpp"

namespace hlab {

enum class Face { XLo = 0, XHi, YLo, YHi, ZLo, ZHi };
enum class FaceTag { Dirichlet, Neumann, Free };

inline constexpr std::array<Face, 6> kAllFaces = {Face::XLo, Face::XHi, Face::YLo,
                                                  Face::YHi, Face::ZLo, Face::ZHi};

constexpr int face_axis(Face f) { return static_cast<int>(f) / 2; }
/// +1 on the high face of an axis, -1 on the low face.
constexpr int face_sign(Face f) { return (static_cast<int>(f) % 2) ? 1 : -1; }

std::string face_name(Face f);
Face face_from_name(const std::string& name);

struct Index3 {
  int i = 0, j = 0, k = 0;
  int operator[](int a) const { return a == 0 ? i : (a == 1 ? j : k); }
  int& operator[](int a) { return a == 0 ? i : (a == 1 ? j : k); }
  bool operator==(const Index3&) const = default;
};

/// Structured node lattice. Node (i, j, k) sits at origin + (i, j, k) * spacing.
class Grid {
 public:
  static constexpr int kMinNodes = 5;

  Grid(std::array<int, 3> dims, Vec3 spacing, Vec3 origin);

  /// Box [lo, hi] with n nodes per axis.
  static Grid box(int n, Vec3 lo, Vec3 hi);
  static Grid box(std::array<int, 3> n, Vec3 lo, Vec3 hi);

  const std::array<int, 3>& dims() const { return dims_; }
  const Vec3& spacing() const { return spacing_; }
  const Vec3& origin() const { return origin_; }
  Vec3 upper() const;

  std::size_t node_count() const {
    return static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
  }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims_[0]) * (static_cast<std::size_t>(j) +
                                                 static_cast<std::size_t>(dims_[1]) * k);
  }
  std::size_t index(const Index3& n) const { return index(n.i, n.j, n.k); }
  Index3 unflatten(std::size_t n) const;

  Vec3 position(int i, int j, int k) const {
    return {origin_[0] + i * spacing_[0], origin_[1] + j * spacing_[1],
            origin_[2] + k * spacing_[2]};
  }
  Vec3 position(const Index3& n) const { return position(n.i, n.j, n.k); }

  bool on_boundary(const Index3& n) const;
  bool on_face(const Index3& n, Face f) const;
  /// Nodes whose every axis index is at least `layers` away from the boundary.
  bool deep_interior(const Index3& n, int layers) const;

  FaceTag tag(Face f) const { return tags_[static_cast<int>(f)]; }
  void set_tag(Face f, FaceTag t) { tags_[static_cast<int>(f)] = t; }

  bool same_lattice(const Grid& other) const;

 private:
  std::array<int, 3> dims_;
  Vec3 spacing_;
  Vec3 origin_;
  std::array<FaceTag, 6> tags_{FaceTag::Free, FaceTag::Free, FaceTag::Free,
                               FaceTag::Free, FaceTag::Free, FaceTag::Free};
};

}  // namespace hlab
