#include "hlab/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "hlab/stencil.hpp"

namespace hlab {

SolutionFields solution_fields(const ScalarField& u, const MetricData& m) {
  require_same_grid(u.grid(), m.grid());
  Gradient gr = gradient(u, m);
  SymTensorField hs = hessian(u, m);
  ScalarField lap = hessian_trace(hs, m);
  return {u, fd::partials(u), std::move(gr.vec), std::move(gr.norm), std::move(hs), std::move(lap)};
}

CellStencil cell_stencil(const Grid& g, const Vec3& gc) {
  std::array<int, 3> base{};
  Vec3 frac{};
  for (int a = 0; a < 3; ++a) {
    const int cells = g.dims()[a] - 1;
    const double c = std::clamp(gc[a], 0.0, static_cast<double>(cells));
    base[a] = std::min(static_cast<int>(std::floor(c)), cells - 1);
    frac[a] = c - base[a];
  }
  CellStencil cs;
  for (int c = 0; c < 8; ++c) {
    const int dx = c & 1, dy = (c >> 1) & 1, dz = (c >> 2) & 1;
    cs.nodes[c] = g.index(base[0] + dx, base[1] + dy, base[2] + dz);
    cs.weights[c] = (dx ? frac[0] : 1.0 - frac[0]) * (dy ? frac[1] : 1.0 - frac[1]) *
                    (dz ? frac[2] : 1.0 - frac[2]);
  }
  return cs;
}

Vec3 PointSample::normal() const {
  const double s = 1.0 / grad_norm;
  return {grad[0] * s, grad[1] * s, grad[2] * s};
}

Sym3 PointSample::spacetime_hess() const {
  Sym3 out = hess;
  for (int c = 0; c < 6; ++c) out[c] += p[c] * grad_norm;
  return out;
}

FieldBundle::FieldBundle(const MetricData& m, const InitialDataFields& idf, const ScalarField& u)
    : m_(&m), idf_(&idf), sol_(solution_fields(u, m)), dh_(fd::partials(idf.h)) {
  require_same_grid(m.grid(), idf.grid());
}

namespace {

void finish(PointSample& s) {
  s.grad = mul(s.g_inv, s.du);
  s.grad_norm = std::sqrt(std::max(0.0, dot(s.du, s.grad)));
  s.lap = trace(s.g_inv, s.hess);
}

}  // namespace

PointSample FieldBundle::at(const Vec3& gc) const {
  const CellStencil cs = cell_stencil(grid(), gc);
  PointSample s;
  s.position = to_position(gc);
  s.g = interpolate(m_->g, cs);
  s.g_inv = inverse(s.g);
  s.sqrt_det = std::sqrt(det(s.g));
  s.ricci = interpolate(m_->ricci, cs);
  s.scalar_curv = interpolate(m_->scalar_curv, cs);
  s.u = interpolate(sol_.u, cs);
  s.du = interpolate(sol_.du, cs);
  s.hess = interpolate(sol_.hess, cs);
  s.p = interpolate(idf_->p, cs);
  s.P = interpolate(idf_->P_trace, cs);
  s.h = interpolate(idf_->h, cs);
  s.dh = interpolate(dh_, cs);
  s.mu = interpolate(idf_->mu, cs);
  s.J = interpolate(idf_->J, cs);
  finish(s);
  return s;
}

PointSample FieldBundle::at_node(std::size_t n) const {
  PointSample s;
  s.position = grid().position(grid().unflatten(n));
  s.g = value_at(m_->g, n);
  s.g_inv = value_at(m_->g_inv, n);
  s.sqrt_det = m_->sqrt_det.at(n);
  s.ricci = value_at(m_->ricci, n);
  s.scalar_curv = m_->scalar_curv.at(n);
  s.u = sol_.u.at(n);
  s.du = value_at(sol_.du, n);
  s.hess = value_at(sol_.hess, n);
  s.p = value_at(idf_->p, n);
  s.P = idf_->P_trace.at(n);
  s.h = idf_->h.at(n);
  s.dh = value_at(dh_, n);
  s.mu = idf_->mu.at(n);
  s.J = value_at(idf_->J, n);
  finish(s);
  return s;
}

Vec3 FieldBundle::to_grid(const Vec3& x) const {
  const Grid& g = grid();
  return {(x[0] - g.origin()[0]) / g.spacing()[0], (x[1] - g.origin()[1]) / g.spacing()[1],
          (x[2] - g.origin()[2]) / g.spacing()[2]};
}

Vec3 FieldBundle::to_position(const Vec3& gc) const {
  const Grid& g = grid();
  return {g.origin()[0] + gc[0] * g.spacing()[0], g.origin()[1] + gc[1] * g.spacing()[1],
          g.origin()[2] + gc[2] * g.spacing()[2]};
}

}  // namespace hlab
