#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace hlab {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

/// Symmetric 3x3 tensor stored as xx, xy, xz, yy, yz, zz.
using Sym3 = std::array<double, 6>;

/// Position of (i, j) in the symmetric storage order.
constexpr int sym_index(int i, int j) {
  constexpr int table[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
  return table[i][j];
}

constexpr std::array<std::array<int, 2>, 6> kSymPairs = {
    {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}};

inline double at(const Sym3& s, int i, int j) { return s[sym_index(i, j)]; }

inline Mat3 to_mat(const Sym3& s) {
  Mat3 m{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = at(s, i, j);
  return m;
}

inline Sym3 to_sym(const Mat3& m) {
  Sym3 s{};
  for (int c = 0; c < 6; ++c) {
    const auto [i, j] = kSymPairs[c];
    s[c] = 0.5 * (m[i][j] + m[j][i]);
  }
  return s;
}

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator*(double s, const Vec3& a) {
  return {s * a[0], s * a[1], s * a[2]};
}

/// T(a, b) = T_ij a^i b^j.
inline double contract(const Sym3& t, const Vec3& a, const Vec3& b) {
  double acc = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) acc += at(t, i, j) * a[i] * b[j];
  return acc;
}

/// Index raise/lower: (T v)_i = T_ij v^j.
inline Vec3 mul(const Sym3& t, const Vec3& v) {
  Vec3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i] += at(t, i, j) * v[j];
  return r;
}

/// g^{ij} t_ij.
inline double trace(const Sym3& inv, const Sym3& t) {
  double acc = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) acc += at(inv, i, j) * at(t, i, j);
  return acc;
}

/// g^{ia} g^{jb} s_ij t_ab.
inline double inner(const Sym3& inv, const Sym3& s, const Sym3& t) {
  const Mat3 gi = to_mat(inv);
  const Mat3 sm = to_mat(s);
  const Mat3 tm = to_mat(t);
  double acc = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) acc += gi[i][a] * gi[j][b] * sm[i][j] * tm[a][b];
  return acc;
}

inline double det(const Sym3& s) {
  return s[0] * (s[3] * s[5] - s[4] * s[4]) - s[1] * (s[1] * s[5] - s[4] * s[2]) +
         s[2] * (s[1] * s[4] - s[3] * s[2]);
}

inline Sym3 inverse(const Sym3& s) {
  const double d = det(s);
  Sym3 r{};
  r[0] = (s[3] * s[5] - s[4] * s[4]) / d;
  r[1] = (s[2] * s[4] - s[1] * s[5]) / d;
  r[2] = (s[1] * s[4] - s[2] * s[3]) / d;
  r[3] = (s[0] * s[5] - s[2] * s[2]) / d;
  r[4] = (s[1] * s[2] - s[0] * s[4]) / d;
  r[5] = (s[0] * s[3] - s[1] * s[1]) / d;
  return r;
}

/// Leading principal minors all positive.
inline bool positive_definite(const Sym3& s) {
  return s[0] > 0.0 && s[0] * s[3] - s[1] * s[1] > 0.0 && det(s) > 0.0;
}

inline Sym3 identity_sym() { return {1, 0, 0, 1, 0, 1}; }

inline Sym3 scaled(const Sym3& s, double c) {
  Sym3 r = s;
  for (double& v : r) v *= c;
  return r;
}

inline Sym3 operator+(const Sym3& a, const Sym3& b) {
  Sym3 r{};
  for (int c = 0; c < 6; ++c) r[c] = a[c] + b[c];
  return r;
}

inline double norm_g(const Sym3& g, const Vec3& v) { return std::sqrt(std::max(0.0, contract(g, v, v))); }

}  // namespace hlab
