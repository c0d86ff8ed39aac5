#include "hlab/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <algorithm>
#include <cmath>
#include <map>

#include "hlab/stencil.hpp"

namespace hlab {

BoundaryCondition BoundaryCondition::all_dirichlet(const Expr& v) {
  BoundaryCondition bc;
  for (auto& f : bc.faces) f = FaceCondition::dirichlet(v);
  return bc;
}

bool BoundaryCondition::any_dirichlet() const {
  return std::any_of(faces.begin(), faces.end(),
                     [](const FaceCondition& f) { return f.kind == FaceCondition::Kind::Dirichlet; });
}

void BoundaryCondition::tag(Grid& g) const {
  for (Face f : kAllFaces)
    g.set_tag(f, face(f).kind == FaceCondition::Kind::Dirichlet ? FaceTag::Dirichlet
                                                                : FaceTag::Neumann);
}

void SolverConfig::validate() const {
  if (delta_schedule.empty()) throw std::invalid_argument("delta_schedule is empty");
  for (std::size_t i = 0; i < delta_schedule.size(); ++i) {
    if (!(delta_schedule[i] > 0.0)) throw std::invalid_argument("delta values must be positive");
    if (i > 0 && !(delta_schedule[i] < delta_schedule[i - 1]))
      throw std::invalid_argument("delta_schedule must be strictly decreasing");
  }
  if (!(damping > 0.0 && damping <= 1.0)) throw std::invalid_argument("damping must lie in (0, 1]");
  if (!(picard_tol > 0.0) || !(linear_tol > 0.0))
    throw std::invalid_argument("tolerances must be positive");
  if (picard_max_iters < 1 || linear_max_iters < 1)
    throw std::invalid_argument("iteration caps must be positive");
}

namespace {

bool interior(const Grid& g, Index3 n) { return !g.on_boundary(n); }

Index3 shifted(Index3 n, int a, int off) {
  n[a] += off;
  return n;
}

double weight(const MetricData& m, std::size_t s, int a, int b) {
  return m.sqrt_det.at(s) * m.g_inv.at(s, sym_index(a, b));
}

/// First-derivative stencil along axis a at node n, appended with a scale.
void add_d1(const Grid& g, Index3 n, int a, double scale,
            std::vector<std::pair<std::size_t, double>>& out) {
  const int last = g.dims()[a] - 1;
  const double h = g.spacing()[a];
  auto put = [&](int off, double c) { out.emplace_back(g.index(shifted(n, a, off)), scale * c / (2.0 * h)); };
  if (n[a] == 0) {
    put(0, -3.0), put(1, 4.0), put(2, -1.0);
  } else if (n[a] == last) {
    put(0, 3.0), put(-1, -4.0), put(-2, 1.0);
  } else {
    put(1, 1.0), put(-1, -1.0);
  }
}

std::vector<std::pair<std::size_t, double>> merge(std::vector<std::pair<std::size_t, double>> v) {
  std::sort(v.begin(), v.end(), [](auto& a, auto& b) { return a.first < b.first; });
  std::vector<std::pair<std::size_t, double>> out;
  for (const auto& e : v) {
    if (!out.empty() && out.back().first == e.first)
      out.back().second += e.second;
    else
      out.push_back(e);
  }
  return out;
}

std::vector<std::pair<std::size_t, double>> neumann_stencil(const MetricData& m, Index3 n,
                                                            Face f) {
  const Grid& g = m.grid();
  const std::size_t s = g.index(n);
  const int a = face_axis(f);
  std::vector<std::pair<std::size_t, double>> st;
  for (int b = 0; b < 3; ++b) {
    const double c = m.g_inv.at(s, sym_index(a, b));
    if (c != 0.0) add_d1(g, n, b, c, st);
  }
  return merge(std::move(st));
}

}  // namespace

std::vector<std::pair<std::size_t, double>> laplacian_stencil(const MetricData& m, Index3 n) {
  const Grid& g = m.grid();
  const std::size_t s = g.index(n);
  const double inv_root = 1.0 / m.sqrt_det.at(s);
  std::vector<std::pair<std::size_t, double>> st;
  for (int a = 0; a < 3; ++a) {
    const double h = g.spacing()[a];
    const std::size_t sp = g.index(shifted(n, a, 1));
    const std::size_t sm = g.index(shifted(n, a, -1));
    const double cp = 0.5 * (weight(m, s, a, a) + weight(m, sp, a, a)) * inv_root / (h * h);
    const double cm = 0.5 * (weight(m, s, a, a) + weight(m, sm, a, a)) * inv_root / (h * h);
    st.emplace_back(sp, cp);
    st.emplace_back(sm, cm);
    st.emplace_back(s, -(cp + cm));
    for (int b = 0; b < 3; ++b) {
      if (b == a) continue;
      const double hb = g.spacing()[b];
      for (int side : {1, -1}) {
        const Index3 nb = shifted(n, a, side);
        const double w = weight(m, g.index(nb), a, b);
        if (w == 0.0) continue;
        const double c = side * w * inv_root / (2.0 * h * 2.0 * hb);
        st.emplace_back(g.index(shifted(nb, b, 1)), c);
        st.emplace_back(g.index(shifted(nb, b, -1)), -c);
      }
    }
  }
  return merge(std::move(st));
}

ScalarField apply_laplacian(const ScalarField& u, const MetricData& m) {
  const Grid& g = m.grid();
  ScalarField out(g);
  for (std::size_t s = 0; s < g.node_count(); ++s) {
    const Index3 n = g.unflatten(s);
    if (!interior(g, n)) continue;
    double acc = 0.0;
    for (const auto& [idx, c] : laplacian_stencil(m, n)) acc += c * u.at(idx);
    out.at(s) = acc;
  }
  return out;
}

LaplaceOperator assemble_laplacian(const MetricData& m, const BoundaryCondition& bc) {
  if (!bc.any_dirichlet() && !bc.pin)
    throw std::invalid_argument(
        "pure zero-flux boundary conditions need a pinned node (operator is singular)");
  const Grid& g = m.grid();
  const std::size_t nn = g.node_count();
  LaplaceOperator op{SparseMatrix(nn, nn), std::vector<LaplaceOperator::Row>(nn),
                     Eigen::VectorXd::Zero(nn), g};
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(nn * 7);

  const std::size_t pinned = bc.pin ? g.index(*bc.pin) : nn;
  for (std::size_t s = 0; s < nn; ++s) {
    const Index3 n = g.unflatten(s);
    if (s == pinned) {
      op.rows[s] = LaplaceOperator::Row::Pinned;
      trip.emplace_back(s, s, 1.0);
      op.boundary_rhs[s] = bc.pin_value;
      continue;
    }
    if (interior(g, n)) {
      op.rows[s] = LaplaceOperator::Row::Interior;
      for (const auto& [idx, c] : laplacian_stencil(m, n)) trip.emplace_back(s, idx, c);
      continue;
    }
    // Dirichlet wins on edges and corners; otherwise the first zero-flux face in order.
    std::optional<Face> dirichlet_face, neumann_face;
    for (Face f : kAllFaces) {
      if (!g.on_face(n, f)) continue;
      if (bc.face(f).kind == FaceCondition::Kind::Dirichlet) {
        if (!dirichlet_face) dirichlet_face = f;
      } else if (!neumann_face) {
        neumann_face = f;
      }
    }
    if (dirichlet_face) {
      op.rows[s] = LaplaceOperator::Row::Dirichlet;
      trip.emplace_back(s, s, 1.0);
      op.boundary_rhs[s] = bc.face(*dirichlet_face).value.value(g.position(n));
    } else {
      op.rows[s] = LaplaceOperator::Row::Neumann;
      for (const auto& [idx, c] : neumann_stencil(m, n, *neumann_face)) trip.emplace_back(s, idx, c);
    }
  }
  op.matrix.setFromTriplets(trip.begin(), trip.end());
  op.matrix.makeCompressed();
  return op;
}

namespace {

class IterativeSolver {
 public:
  IterativeSolver(const LaplaceOperator& op, double tol, int max_iters) : op_(op) {
    solver_.setTolerance(tol);
    solver_.setMaxIterations(max_iters);
    solver_.compute(op.matrix);
  }

  LinearSolveResult run(const Eigen::VectorXd& rhs, const Eigen::VectorXd* guess) {
    LinearSolveResult r;
    const double bnorm = rhs.norm();
    if (bnorm == 0.0) {
      r.x = Eigen::VectorXd::Zero(rhs.size());
      return r;
    }
    if (guess)
      r.x = solver_.solveWithGuess(rhs, *guess);
    else
      r.x = solver_.solve(rhs);
    r.iterations = static_cast<int>(solver_.iterations());
    r.relative_residual = (op_.matrix * r.x - rhs).norm() / bnorm;
    if (solver_.info() != Eigen::Success || r.relative_residual > solver_.tolerance() * 10.0)
      throw LinearSolveError("linear solve did not reach the requested tolerance",
                             r.relative_residual, r.x);
    return r;
  }

 private:
  const LaplaceOperator& op_;
  Eigen::BiCGSTAB<SparseMatrix, Eigen::DiagonalPreconditioner<double>> solver_;
};

ScalarField to_field(const Grid& g, const Eigen::VectorXd& v) {
  return ScalarField(g, std::vector<double>(v.data(), v.data() + v.size()));
}

/// (h - P) sqrt(|grad u|^2 + delta) on interior rows.
Eigen::VectorXd source(const LaplaceOperator& op, const ScalarField& u, const MetricData& m,
                       const InitialDataFields& idf, double delta) {
  const Gradient gr = gradient(u, m);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(u.size()));
  for (std::size_t s = 0; s < u.size(); ++s) {
    if (op.rows[s] != LaplaceOperator::Row::Interior) continue;
    const double nrm = gr.norm.at(s);
    f[s] = (idf.h.at(s) - idf.P_trace.at(s)) * std::sqrt(nrm * nrm + delta);
  }
  return f;
}

double interior_max(const LaplaceOperator& op, const Eigen::VectorXd& v) {
  double r = 0.0;
  for (Eigen::Index s = 0; s < v.size(); ++s)
    if (op.rows[s] == LaplaceOperator::Row::Interior) r = std::max(r, std::abs(v[s]));
  return r;
}

struct PicardOutcome {
  Eigen::VectorXd u;
  std::vector<DeltaStage> stages;
  int iterations = 0;
  int linear_iterations = 0;
};

PicardOutcome picard(const LaplaceOperator& op, IterativeSolver& lin, const MetricData& m,
                     const InitialDataFields& idf, const SolverConfig& cfg, Eigen::VectorXd u,
                     const StageObserver& observer) {
  PicardOutcome out;
  const Grid& g = m.grid();
  // The schedule is closed by an unregularized stage; Picard needs no smoothing
  // to converge, and this makes the reported residual the true one.
  std::vector<double> deltas = cfg.delta_schedule;
  deltas.push_back(0.0);
  for (double delta : deltas) {
    DeltaStage stage{delta, 0, {}};
    bool done = false;
    while (stage.iterations < cfg.picard_max_iters) {
      const ScalarField uf = to_field(g, u);
      const Eigen::VectorXd rhs = op.boundary_rhs + source(op, uf, m, idf, delta);
      const LinearSolveResult lr = lin.run(rhs, &u);
      out.linear_iterations += lr.iterations;
      const Eigen::VectorXd next = u + cfg.damping * (lr.x - u);
      const double update = (next - u).lpNorm<Eigen::Infinity>();
      u = next;
      ++stage.iterations;
      ++out.iterations;
      stage.updates.push_back(update);
      if (update < cfg.picard_tol) {
        // Both stopping notions must agree before a stage counts as converged.
        const ScalarField un = to_field(g, u);
        const Eigen::VectorXd res = op.matrix * u - op.boundary_rhs - source(op, un, m, idf, delta);
        if (interior_max(op, res) < 10.0 * cfg.picard_tol) {
          done = true;
          break;
        }
      }
    }
    out.stages.push_back(stage);
    if (!done) {
      throw SolverError("Picard iteration did not converge at delta = " + std::to_string(delta),
                        stage.updates, stage.updates.empty() ? 0.0 : stage.updates.back());
    }
    if (observer) observer(delta, to_field(g, u));
  }
  out.u = std::move(u);
  return out;
}

}  // namespace

LinearSolveResult linear_solve(const LaplaceOperator& op, const Eigen::VectorXd& rhs, double tol,
                               int max_iters, const Eigen::VectorXd* guess) {
  IterativeSolver s(op, tol, max_iters);
  return s.run(rhs, guess);
}

ScalarField residual(const ScalarField& u, const MetricData& m, const InitialDataFields& idf) {
  const Grid& g = m.grid();
  ScalarField out = apply_laplacian(u, m);
  const Gradient gr = gradient(u, m);
  for (std::size_t s = 0; s < g.node_count(); ++s) {
    if (g.on_boundary(g.unflatten(s))) continue;
    out.at(s) += (idf.P_trace.at(s) - idf.h.at(s)) * gr.norm.at(s);
  }
  return out;
}

SolveResult solve(const MetricData& m, const InitialDataFields& idf, const BoundaryCondition& bc,
                  const SolverConfig& cfg, const StageObserver& observer) {
  cfg.validate();
  require_same_grid(m.grid(), idf.grid());
  const Grid& g = m.grid();
  LaplaceOperator op = assemble_laplacian(m, bc);
  // Work relative to one boundary value so that shifting the data by a
  // constant leaves the iteration itself untouched.
  double offset = 0.0;
  for (std::size_t s = 0; s < g.node_count(); ++s) {
    if (op.rows[s] == LaplaceOperator::Row::Dirichlet || op.rows[s] == LaplaceOperator::Row::Pinned) {
      offset = op.boundary_rhs[s];
      break;
    }
  }
  for (std::size_t s = 0; s < g.node_count(); ++s)
    if (op.rows[s] == LaplaceOperator::Row::Dirichlet || op.rows[s] == LaplaceOperator::Row::Pinned)
      op.boundary_rhs[s] -= offset;
  IterativeSolver lin(op, cfg.linear_tol, cfg.linear_max_iters);
  const StageObserver shifted_observer =
      observer ? StageObserver([&](double delta, const ScalarField& dev) {
        ScalarField u = dev;
        for (double& v : u.raw_mut()) v += offset;
        observer(delta, u);
      })
               : StageObserver{};

  // Harmonic extension of the boundary data as the starting iterate.
  const LinearSolveResult start = lin.run(op.boundary_rhs, nullptr);
  PicardOutcome po = picard(op, lin, m, idf, cfg, start.x, shifted_observer);

  SolveResult r{to_field(g, po.u), ScalarField(g), 0, false, 0.0, 0.0, {}, 0, {}, {}};
  r.iterations = po.iterations;
  r.linear_iterations = po.linear_iterations + start.iterations;
  r.stages = std::move(po.stages);
  r.delta_final = cfg.delta_schedule.back();
  r.converged = true;

  const Eigen::VectorXd res = op.matrix * po.u - op.boundary_rhs - source(op, r.u, m, idf, 0.0);
  for (std::size_t s = 0; s < g.node_count(); ++s)
    if (op.rows[s] == LaplaceOperator::Row::Interior) r.residual_field.at(s) = res[s];
  r.residual_max = interior_max(op, res);

  for (double& v : r.u.raw_mut()) v += offset;

  if (!bc.any_dirichlet()) {
    const Eigen::VectorXd f = source(op, r.u, m, idf, 0.0);
    double acc = 0.0;
    const double cell = g.spacing()[0] * g.spacing()[1] * g.spacing()[2];
    for (std::size_t s = 0; s < g.node_count(); ++s) acc += f[s] * m.sqrt_det.at(s) * cell;
    r.neumann_compatibility = acc;
  }

  if (cfg.sensitivity_probe) {
    Eigen::VectorXd perturbed = start.x;
    for (std::size_t s = 0; s < g.node_count(); ++s) {
      if (op.rows[s] != LaplaceOperator::Row::Interior) continue;
      const Vec3 x = g.position(g.unflatten(s));
      perturbed[s] += 1e-2 * std::sin(3.0 * x[0] + 2.0 * x[1] + x[2]);
    }
    const PicardOutcome alt = picard(op, lin, m, idf, cfg, perturbed, {});
    r.initial_iterate_sensitivity = (alt.u - po.u).lpNorm<Eigen::Infinity>();
  }
  return r;
}

}  // namespace hlab
