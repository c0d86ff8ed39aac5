#include "hlab/levelset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace hlab {

LocalGeometry level_geometry(const PointSample& s) {
  LocalGeometry lg;
  lg.normal = s.normal();
  const Vec3& nu = lg.normal;

  // Gram-Schmidt on the coordinate axes, most transverse first.
  auto project = [&](Vec3 x, int upto) {
    x = x - contract(s.g, x, nu) * nu;
    for (int b = 0; b < upto; ++b) x = x - contract(s.g, x, lg.frame[b]) * lg.frame[b];
    return x;
  };
  for (int b = 0; b < 2; ++b) {
    Vec3 best{};
    double best_norm = -1.0;
    for (int a = 0; a < 3; ++a) {
      Vec3 e{};
      e[a] = 1.0;
      const Vec3 x = project(e, b);
      const double n = norm_g(s.g, x);
      if (n > best_norm * (1.0 + 1e-12)) best = x, best_norm = n;
    }
    lg.frame[b] = (1.0 / best_norm) * best;
  }

  const double inv = 1.0 / s.grad_norm;
  lg.A = {contract(s.hess, lg.frame[0], lg.frame[0]) * inv,
          contract(s.hess, lg.frame[0], lg.frame[1]) * inv,
          contract(s.hess, lg.frame[1], lg.frame[1]) * inv};
  lg.H = lg.A[0] + lg.A[2];
  lg.A_norm2 = lg.A[0] * lg.A[0] + 2.0 * lg.A[1] * lg.A[1] + lg.A[2] * lg.A[2];
  lg.K = gauss_curvature(s, lg);
  return lg;
}

double gauss_curvature(const PointSample& s, const LocalGeometry& lg) {
  return 0.5 * (s.scalar_curv - 2.0 * contract(s.ricci, lg.normal, lg.normal) - lg.A_norm2 +
                lg.H * lg.H);
}

double LevelSetSurface::area() const {
  double a = 0.0;
  for (const auto& tr : triangles) a += tr.area;
  return a;
}

double LevelSetSurface::min_grad_norm() const {
  if (degenerate > 0) return 0.0;
  double m = std::numeric_limits<double>::infinity();
  for (const auto& tr : triangles) m = std::min(m, tr.grad_norm);
  return m;
}

namespace {

using EdgeKey = std::pair<VertexKey, VertexKey>;

EdgeKey edge_key(VertexKey a, VertexKey b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

std::map<EdgeKey, int> edge_counts(const LevelSetSurface& s) {
  std::map<EdgeKey, int> counts;
  for (const auto& tr : s.triangles)
    for (int e = 0; e < 3; ++e) ++counts[edge_key(tr.keys[e], tr.keys[(e + 1) % 3])];
  return counts;
}

// Kuhn split of the unit cube along the 0-7 diagonal; corner c = x + 2y + 4z.
constexpr std::array<std::array<int, 4>, 6> kTets = {{
    {0, 1, 3, 7}, {0, 3, 2, 7}, {0, 2, 6, 7}, {0, 6, 4, 7}, {0, 4, 5, 7}, {0, 5, 1, 7}}};

struct Corner {
  Vec3 x;
  double f;
  std::size_t node;
};

struct Cut {
  Vec3 x;
  VertexKey key;
};

Cut cut_edge(const Corner& a, const Corner& b, double t, std::size_t nodes) {
  const double s = (t - a.f) / (b.f - a.f);
  const std::size_t lo = std::min(a.node, b.node), hi = std::max(a.node, b.node);
  return {a.x + s * (b.x - a.x), static_cast<VertexKey>(lo) * nodes + hi};
}

}  // namespace

bool LevelSetSurface::closed() const {
  if (triangles.empty() || degenerate > 0) return false;
  for (const auto& [k, c] : edge_counts(*this))
    if (c != 2) return false;
  return true;
}

LevelSetSurface extract_level_set(const FieldBundle& fb, double t,
                                  const std::vector<const ScalarField*>& extras) {
  const ScalarField& u = fb.solution().u;
  const auto [lo, hi] = std::minmax_element(u.raw().begin(), u.raw().end());
  if (!(t > *lo && t < *hi))
    throw std::invalid_argument("level " + std::to_string(t) + " is outside the range of u");

  const Grid& g = fb.grid();
  const std::size_t nodes = g.node_count();
  LevelSetSurface surf;
  surf.level = t;

  auto emit = [&](const Cut& a, const Cut& b, const Cut& c, const Vec3& toward_inside) {
    std::array<Cut, 3> v{a, b, c};
    const Vec3 e1 = v[1].x - v[0].x, e2 = v[2].x - v[0].x;
    Vec3 n = cross(e1, e2);
    if (dot(n, n) == 0.0) return;
    const Vec3 mid = (1.0 / 3.0) * (v[0].x + v[1].x + v[2].x);
    if (dot(n, toward_inside - mid) < 0.0) std::swap(v[1], v[2]);

    SurfaceTriangle tr;
    for (int i = 0; i < 3; ++i) tr.vertices[i] = v[i].x, tr.keys[i] = v[i].key;
    tr.centroid = fb.to_grid(mid);
    const PointSample s = fb.at(tr.centroid);
    if (s.grad_norm < 1e-12) {
      ++surf.degenerate;
      return;
    }
    const Vec3 f1 = tr.vertices[1] - tr.vertices[0], f2 = tr.vertices[2] - tr.vertices[0];
    const double g11 = contract(s.g, f1, f1), g22 = contract(s.g, f2, f2), g12 = contract(s.g, f1, f2);
    tr.area = 0.5 * std::sqrt(std::max(0.0, g11 * g22 - g12 * g12));
    tr.grad_norm = s.grad_norm;
    tr.geom = level_geometry(s);
    if (!extras.empty()) {
      const CellStencil cs = cell_stencil(g, tr.centroid);
      for (const ScalarField* f : extras) tr.extras.push_back(interpolate(*f, cs));
    }
    surf.triangles.push_back(std::move(tr));
  };

  std::array<Corner, 8> cube{};
  for (int k = 0; k + 1 < g.dims()[2]; ++k) {
    for (int j = 0; j + 1 < g.dims()[1]; ++j) {
      for (int i = 0; i + 1 < g.dims()[0]; ++i) {
        double cmin = std::numeric_limits<double>::infinity(), cmax = -cmin;
        for (int c = 0; c < 8; ++c) {
          const Index3 id{i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1)};
          const std::size_t n = g.index(id);
          cube[c] = {g.position(id), u.at(n), n};
          cmin = std::min(cmin, cube[c].f), cmax = std::max(cmax, cube[c].f);
        }
        if (t < cmin || t > cmax) continue;

        for (const auto& tet : kTets) {
          std::array<const Corner*, 4> in{}, out{};
          int ni = 0, no = 0;
          for (int c : tet) (cube[c].f >= t ? in[ni++] : out[no++]) = &cube[c];
          if (ni == 0 || no == 0) continue;
          if (ni == 1) {
            emit(cut_edge(*in[0], *out[0], t, nodes), cut_edge(*in[0], *out[1], t, nodes),
                 cut_edge(*in[0], *out[2], t, nodes), in[0]->x);
          } else if (ni == 3) {
            const Vec3 inside = (1.0 / 3.0) * (in[0]->x + in[1]->x + in[2]->x);
            emit(cut_edge(*out[0], *in[0], t, nodes), cut_edge(*out[0], *in[1], t, nodes),
                 cut_edge(*out[0], *in[2], t, nodes), inside);
          } else {
            const Vec3 inside = 0.5 * (in[0]->x + in[1]->x);
            const Cut p0 = cut_edge(*in[0], *out[0], t, nodes);
            const Cut p1 = cut_edge(*in[0], *out[1], t, nodes);
            const Cut p2 = cut_edge(*in[1], *out[1], t, nodes);
            const Cut p3 = cut_edge(*in[1], *out[0], t, nodes);
            emit(p0, p1, p2, inside);
            emit(p0, p2, p3, inside);
          }
        }
      }
    }
  }
  return surf;
}

std::optional<double> angle_defect_total(const LevelSetSurface& s, const FieldBundle& fb) {
  if (!s.closed()) return std::nullopt;
  std::unordered_map<VertexKey, double> angle_sum;
  for (const auto& tr : s.triangles) {
    const PointSample ps = fb.at(tr.centroid);
    for (int v = 0; v < 3; ++v) {
      const Vec3 a = tr.vertices[(v + 1) % 3] - tr.vertices[v];
      const Vec3 b = tr.vertices[(v + 2) % 3] - tr.vertices[v];
      const double c = contract(ps.g, a, b) / (norm_g(ps.g, a) * norm_g(ps.g, b));
      angle_sum[tr.keys[v]] += std::acos(std::clamp(c, -1.0, 1.0));
    }
  }
  double total = 0.0;
  for (const auto& [k, sum] : angle_sum) total += 2.0 * std::numbers::pi - sum;
  return total;
}

std::vector<double> RegularValueSplit::B_levels() const {
  std::vector<double> out;
  for (const auto& l : levels)
    if (l.regular) out.push_back(l.t);
  return out;
}

double default_epsilon_reg(const FieldBundle& fb) {
  const auto& n = fb.solution().grad_norm.raw();
  return 1e-3 * *std::max_element(n.begin(), n.end());
}

RegularValueSplit regular_split(const FieldBundle& fb, int n_levels, double epsilon_reg,
                                std::optional<std::array<double, 2>> range) {
  if (n_levels < 2) throw std::invalid_argument("n_levels must be at least 2");
  if (epsilon_reg < 0.0) throw std::invalid_argument("epsilon_reg must be nonnegative");
  const auto& uv = fb.solution().u.raw();
  const auto [umin, umax] = std::minmax_element(uv.begin(), uv.end());
  RegularValueSplit split;
  split.epsilon_reg = epsilon_reg;
  split.t_lo = range ? std::max((*range)[0], *umin) : *umin;
  split.t_hi = range ? std::min((*range)[1], *umax) : *umax;
  if (!(split.t_hi > split.t_lo)) throw std::invalid_argument("level range is empty");

  const double dt = (split.t_hi - split.t_lo) / n_levels;
  for (int k = 0; k < n_levels; ++k) {
    LevelInfo info;
    info.t = split.t_lo + (k + 0.5) * dt;
    info.dt = dt;
    const LevelSetSurface s = extract_level_set(fb, info.t);
    info.area = s.area();
    info.degenerate = s.degenerate;
    info.min_grad_norm = s.triangles.empty() && s.degenerate == 0 ? 0.0 : s.min_grad_norm();
    info.regular = !s.triangles.empty() && s.degenerate == 0 && info.min_grad_norm >= epsilon_reg;
    if (!info.regular) {
      split.A_measure += dt;
      split.area_integral_over_A += dt * info.area;
    }
    split.levels.push_back(info);
  }
  return split;
}

void for_each_regular_level(const FieldBundle& fb, const RegularValueSplit& split,
                            const LevelVisitor& visit,
                            const std::vector<const ScalarField*>& extras) {
  // Level sets collapse onto the extremal set at either end of the range, where
  // the slice integral typically behaves like sqrt(t - t_lo). Substituting
  // t = t_lo + dt s^2 makes it smooth in s, so the end intervals take a
  // Gauss rule in s instead of the midpoint.
  static constexpr std::array<double, 4> kNode{0.0694318442029737, 0.3300094782075719, 0.6699905217924281,
                                               0.9305681557970263};
  static constexpr std::array<double, 4> kWeight{0.1739274225687269, 0.3260725774312731, 0.3260725774312731,
                                                 0.1739274225687269};
  const std::size_t last = split.levels.size() - 1;
  for (std::size_t k = 0; k <= last; ++k) {
    const LevelInfo& info = split.levels[k];
    if (!info.regular) continue;
    if (k != 0 && k != last) {
      visit(extract_level_set(fb, info.t, extras), info);
      continue;
    }
    for (std::size_t q = 0; q < kNode.size(); ++q) {
      const double s = kNode[q];
      LevelInfo sub = info;
      sub.t = k == 0 ? split.t_lo + info.dt * s * s : split.t_hi - info.dt * s * s;
      sub.dt = 2.0 * info.dt * s * kWeight[q];
      visit(extract_level_set(fb, sub.t, extras), sub);
    }
  }
}

namespace {

/// 1 when u falls in a regular interval of the split.
struct RegularIndicator {
  const RegularValueSplit& split;

  int interval(double u) const {
    const double dt = split.levels.front().dt;
    return static_cast<int>(std::floor((u - split.t_lo) / dt));
  }
  bool operator()(double u) const {
    if (u < split.t_lo || u > split.t_hi) return false;
    const int k = std::min(interval(u), static_cast<int>(split.levels.size()) - 1);
    return split.levels[k].regular;
  }
  /// Whether the indicator is constant for values in [a, b].
  bool uniform(double a, double b) const {
    const bool first = (*this)(a);
    if ((*this)(b) != first) return false;
    if (a < split.t_lo || b > split.t_hi) return a > split.t_hi || b < split.t_lo;
    const int last = static_cast<int>(split.levels.size()) - 1;
    for (int k = std::max(interval(a), 0); k <= std::min(interval(b), last); ++k)
      if (split.levels[k].regular != first) return false;
    return true;
  }
};

}  // namespace

CoareaResult coarea_integrate(const std::vector<PointIntegrand>& fs, const FieldBundle& fb,
                              const RegularValueSplit& split) {
  CoareaResult r{std::vector<double>(fs.size(), 0.0), std::vector<double>(fs.size(), 0.0)};

  for_each_regular_level(fb, split, [&](const LevelSetSurface& s, const LevelInfo& info) {
    std::vector<double> level(fs.size(), 0.0);
    for (const auto& tr : s.triangles) {
      const PointSample ps = fb.at(tr.centroid);
      for (std::size_t i = 0; i < fs.size(); ++i) level[i] += fs[i](ps, tr.geom) * tr.area;
    }
    for (std::size_t i = 0; i < fs.size(); ++i) r.slice[i] += info.dt * level[i];
  });

  const Grid& g = fb.grid();
  const ScalarField& u = fb.solution().u;
  const double cell = g.spacing()[0] * g.spacing()[1] * g.spacing()[2];
  const RegularIndicator ind{split};
  const double gp = 0.5 / std::sqrt(3.0);
  constexpr int kSub = 6;

  auto accumulate = [&](const Vec3& gc, double w) {
    const PointSample ps = fb.at(gc);
    if (!ind(ps.u) || ps.grad_norm < 1e-12) return;
    const LocalGeometry lg = level_geometry(ps);
    const double scale = w * cell * ps.sqrt_det * ps.grad_norm;
    for (std::size_t i = 0; i < fs.size(); ++i) r.volume[i] += fs[i](ps, lg) * scale;
  };

  for (int k = 0; k + 1 < g.dims()[2]; ++k) {
    for (int j = 0; j + 1 < g.dims()[1]; ++j) {
      for (int i = 0; i + 1 < g.dims()[0]; ++i) {
        double cmin = std::numeric_limits<double>::infinity(), cmax = -cmin;
        for (int c = 0; c < 8; ++c) {
          const double f = u.at(g.index(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1)));
          cmin = std::min(cmin, f), cmax = std::max(cmax, f);
        }
        if (ind.uniform(cmin, cmax)) {
          if (!ind(cmin)) continue;
          for (int c = 0; c < 8; ++c) {
            const Vec3 gc{i + 0.5 + ((c & 1) ? gp : -gp), j + 0.5 + (((c >> 1) & 1) ? gp : -gp),
                          k + 0.5 + (((c >> 2) & 1) ? gp : -gp)};
            accumulate(gc, 0.125);
          }
        } else {
          // The cell is cut by an interval boundary; fall back to fine midpoints.
          const double w = 1.0 / (kSub * kSub * kSub);
          for (int c = 0; c < kSub; ++c)
            for (int b = 0; b < kSub; ++b)
              for (int a = 0; a < kSub; ++a)
                accumulate({i + (a + 0.5) / kSub, j + (b + 0.5) / kSub, k + (c + 0.5) / kSub}, w);
        }
      }
    }
  }
  return r;
}

std::array<double, 2> coarea_integrate(const ScalarField& f, const FieldBundle& fb,
                                       const RegularValueSplit& split) {
  require_same_grid(f.grid(), fb.grid());
  const Grid& g = fb.grid();
  const PointIntegrand fn = [&](const PointSample& s, const LocalGeometry&) {
    return interpolate(f, cell_stencil(g, fb.to_grid(s.position)));
  };
  const CoareaResult r = coarea_integrate({fn}, fb, split);
  return {r.slice[0], r.volume[0]};
}

void write_obj(const std::filesystem::path& path, const LevelSetSurface& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# level " << s.level << "\n";
  std::unordered_map<VertexKey, std::size_t> index;
  std::vector<std::array<std::size_t, 3>> faces;
  char buf[96];
  for (const auto& tr : s.triangles) {
    std::array<std::size_t, 3> f{};
    for (int v = 0; v < 3; ++v) {
      auto [it, fresh] = index.emplace(tr.keys[v], index.size() + 1);
      if (fresh) {
        std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", tr.vertices[v][0],
                      tr.vertices[v][1], tr.vertices[v][2]);
        out << buf;
      }
      f[v] = it->second;
    }
    faces.push_back(f);
  }
  for (const auto& f : faces) out << "f " << f[0] << " " << f[1] << " " << f[2] << "\n";
}

void write_triangle_csv(const std::filesystem::path& path,
                        const std::vector<LevelSetSurface>& surfaces) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "level,area,H,K,grad_norm\n";
  char buf[160];
  for (const auto& s : surfaces) {
    for (const auto& tr : s.triangles) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", s.level, tr.area,
                    tr.geom.H, tr.geom.K, tr.grad_norm);
      out << buf;
    }
  }
}

}  // namespace hlab
