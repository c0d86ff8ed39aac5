#include "hlab/pipeline.hpp"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hlab/errors.hpp"
#include "hlab/field_io.hpp"

#ifndef HLAB_VERSION
#define HLAB_VERSION "0.0.0"
#endif

namespace hlab {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

const char* artifact_version() { return HLAB_VERSION; }

const CheckOutcome* RunManifest::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.report.name == name) return &c;
  return nullptr;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

class StageClock {
 public:
  explicit StageClock(std::vector<std::pair<std::string, double>>& sink) : sink_(sink) {}
  void lap(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    sink_.emplace_back(stage, std::chrono::duration<double>(now - last_).count());
    last_ = now;
  }

 private:
  std::vector<std::pair<std::string, double>>& sink_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

ScalarField sample(const Grid& g, const Expr& e) {
  ScalarField f(g);
  for (std::size_t n = 0; n < g.node_count(); ++n) f.at(n) = e.value(g.position(g.unflatten(n)));
  return f;
}

MetricData make_metric(const ScenarioConfig& cfg, const Grid& g) {
  if (!cfg.metric_file) return build_metric(g, cfg.metric);
  const io::LoadedField lf = io::read_field(*cfg.metric_file);
  if (lf.components.size() != 6) throw ConfigError("metric.file", "expected a six-component tensor dump");
  if (lf.dims != g.dims()) throw ConfigError("metric.file", "lattice does not match grid.dims");
  SymTensorField field(g);
  std::copy(lf.values.begin(), lf.values.end(), field.raw_mut().begin());
  return build_metric(std::move(field));
}

SymTensorField make_p(const ScenarioConfig& cfg, const MetricData& m) {
  const Grid& g = m.grid();
  SymTensorField p(g);
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    const Vec3 x = g.position(g.unflatten(n));
    for (int c = 0; c < 6; ++c) {
      switch (cfg.p_family) {
        case ScenarioConfig::PFamily::Zero: break;
        case ScenarioConfig::PFamily::ScaledMetric: p.at(n, c) = cfg.p_scale * m.g.at(n, c); break;
        case ScenarioConfig::PFamily::Components: p.at(n, c) = cfg.p_components[c].value(x); break;
      }
    }
  }
  return p;
}

VerificationReport reference_error(const ScalarField& u, const Expr& ref, double tol) {
  const Grid& g = u.grid();
  VerificationReport r;
  r.name = "solution_reference_error";
  r.kind = VerificationReport::Kind::Identity;
  r.tolerance = tol;
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    const double d = std::abs(u.at(n) - ref.value(g.position(g.unflatten(n))));
    if (d > r.margin) r.margin = d;
  }
  finish_identity(r);
  return r;
}

/// Slice sums against the volume quadrature of the bulk integrand.
VerificationReport coarea_consistency(const BulkIntegral& b) {
  VerificationReport r;
  r.name = "coarea_consistency";
  r.kind = VerificationReport::Kind::Identity;
  r.lhs = b.value;
  r.rhs = b.volume;
  r.margin = std::abs(b.value - b.volume);
  // Relative, with an absolute floor for integrals that vanish.
  r.tolerance = 0.02 * std::max(std::abs(b.volume), 1e-6);
  r.breakdown = {{"relative", r.margin / std::max(std::abs(b.volume), 1e-300)}};
  finish_identity(r);
  return r;
}

bool face_is_neumann(const ScenarioConfig& cfg, Face f) {
  return cfg.boundary.face(f).kind == FaceCondition::Kind::Neumann;
}

void write_text(const fs::path& path, const std::string& text, std::vector<std::string>& files) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
  files.push_back(path.string());
}

void dump_fields(const fs::path& dir, const MetricData& m, const InitialDataFields& idf,
                 const FieldBundle& fb, const ScalarField* res, std::vector<std::string>& files) {
  fs::create_directories(dir);
  auto add = [&](const std::vector<fs::path>& ps) {
    for (const auto& p : ps) files.push_back(p.string());
  };
  const auto& sym = io::sym_component_names();
  const auto& vec = io::vector_component_names();
  add(io::write_field(dir / "u", "u", fb.solution().u, {"u"}));
  add(io::write_field(dir / "grad_norm", "grad_norm", fb.solution().grad_norm, {"grad_norm"}));
  add(io::write_field(dir / "metric", "metric", m.g, sym));
  add(io::write_field(dir / "scalar_curvature", "scalar_curvature", m.scalar_curv, {"R"}));
  add(io::write_field(dir / "p", "p", idf.p, sym));
  add(io::write_field(dir / "h", "h", idf.h, {"h"}));
  add(io::write_field(dir / "mu", "mu", idf.mu, {"mu"}));
  add(io::write_field(dir / "J", "J", idf.J, vec));
  if (res) add(io::write_field(dir / "residual", "residual", *res, {"residual"}));
}

void dump_surfaces(const fs::path& dir, const FieldBundle& fb, const RegularValueSplit& split,
                   std::vector<std::string>& files) {
  constexpr int kMaxSurfaces = 8;
  fs::create_directories(dir);
  const std::vector<double> levels = split.B_levels();
  const std::size_t stride = std::max<std::size_t>(1, (levels.size() + kMaxSurfaces - 1) / kMaxSurfaces);
  std::vector<LevelSetSurface> kept;
  for (std::size_t i = 0; i < levels.size(); i += stride) {
    LevelSetSurface s = extract_level_set(fb, levels[i]);
    char name[32];
    std::snprintf(name, sizeof name, "level_%03zu.obj", i);
    write_obj(dir / name, s);
    files.push_back((dir / name).string());
    kept.push_back(std::move(s));
  }
  write_triangle_csv(dir / "triangles.csv", kept);
  files.push_back((dir / "triangles.csv").string());
}

ordered_json report_to_json(const CheckOutcome& c) {
  const VerificationReport& r = c.report;
  ordered_json j{{"name", r.name},        {"kind", kind_name(r.kind)}, {"gating", c.gating},
                 {"pass", r.pass},        {"vacuous", r.vacuous},      {"lhs", r.lhs},
                 {"rhs", r.rhs},          {"margin", r.margin},        {"tolerance", r.tolerance},
                 {"error_bar", r.error_bar}};
  ordered_json b = ordered_json::object();
  for (const auto& [k, v] : r.breakdown) b[k] = std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
  j["breakdown"] = b;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

void write_error(const std::optional<fs::path>& dir, const std::string& kind, const std::string& key_path,
                 const std::string& message, int code, std::ostream& log) {
  ordered_json e{{"error", {{"kind", kind}, {"exit_code", code}, {"message", message}}}};
  if (!key_path.empty()) e["error"]["key_path"] = key_path;
  log << e.dump() << "\n";
  if (!dir) return;
  std::error_code ec;
  fs::create_directories(*dir, ec);
  std::ofstream(*dir / "error.json") << e.dump(2) << "\n";
}

}  // namespace

std::string config_hash(const ScenarioConfig& cfg, double tolerance_scale) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a(cfg.source.dump() + "|" + fmt(tolerance_scale)));
  return buf;
}

RunManifest run_scenario(const ScenarioConfig& cfg_in, const RunOptions& opt) {
  ScenarioConfig cfg = cfg_in;
  if (!(opt.tolerance_scale > 0.0)) throw ConfigError("--tolerance-scale", "must be positive");
  cfg.verification.tolerances.scale(opt.tolerance_scale);
  const VerificationConfig& v = cfg.verification;
  const Tolerances& tol = v.tolerances;

  RunManifest man;
  man.scenario = cfg.name;
  man.config_hash = config_hash(cfg_in, opt.tolerance_scale);
  man.version = artifact_version();
  StageClock clock(man.timings);

  Grid grid = cfg.grid();
  cfg.boundary.tag(grid);
  const MetricData m = make_metric(cfg, grid);
  clock.lap("metric");
  const InitialDataFields idf = energy_momentum(m, make_p(cfg, m), sample(grid, cfg.h));
  clock.lap("initial_data");

  std::optional<SolveResult> sr;
  if (cfg.u_mode == ScenarioConfig::UMode::Solve) {
    sr.emplace(solve(m, idf, cfg.boundary, cfg.solver));
    man.solver = {{"converged", sr->converged},
                  {"picard_iterations", sr->iterations},
                  {"linear_iterations", sr->linear_iterations},
                  {"residual_max", sr->residual_max},
                  {"delta_final", sr->delta_final}};
    ordered_json stages = ordered_json::array();
    for (const DeltaStage& s : sr->stages) stages.push_back({{"delta", s.delta}, {"iterations", s.iterations}});
    man.solver["stages"] = stages;
    if (sr->neumann_compatibility) man.solver["neumann_compatibility"] = *sr->neumann_compatibility;
    if (sr->initial_iterate_sensitivity)
      man.solver["initial_iterate_sensitivity"] = *sr->initial_iterate_sensitivity;
  }
  clock.lap("solve");

  const FieldBundle fb(m, idf, sr ? sr->u : sample(grid, cfg.u_expr));
  const BoundaryGeometry bg = boundary_geometry(m, idf);
  double max_grad = 0.0;
  for (double gn : fb.solution().grad_norm.raw()) max_grad = std::max(max_grad, gn);
  const double eps_reg = v.epsilon_reg.value_or(v.epsilon_reg_relative * max_grad);
  const RegularValueSplit split = regular_split(fb, v.n_levels, eps_reg, v.level_range);
  clock.lap("level_sets");

  auto add = [&](VerificationReport r, bool gating) { man.checks.push_back({std::move(r), gating}); };

  if (v.reference) add(reference_error(fb.solution().u, *v.reference, tol.reference), true);

  const double eps_neq0 = v.eps_neq0.value_or(default_eps_neq0(fb));
  const BoundaryIntegral lhs = boundary_integral_lhs(fb, bg, eps_neq0);
  const BulkIntegral rhs = bulk_integral_rhs(fb, split, v.h_term_weight);
  const double C0 = estimate_C0(fb, split, v.c0_delta);
  add(verify_main_inequality(lhs, rhs, split, C0, tol.main_inequality), v.checks.main_inequality);
  add(coarea_consistency(rhs), false);
  clock.lap("main_inequality");

  std::vector<Face> constant_faces;
  for (Face f : kAllFaces) {
    if (face_is_neumann(cfg, f)) continue;
    try {
      add(check_dirichlet_lemma(fb, bg, f, tol.lemmas, eps_neq0, v.lemma_edge_fraction), v.checks.dirichlet_lemma);
      constant_faces.push_back(f);
    } catch (const PreconditionError&) {
      man.skipped.push_back(face_name(f));
    }
  }
  std::vector<Face> neumann_faces;
  for (Face f : kAllFaces)
    if (face_is_neumann(cfg, f)) neumann_faces.push_back(f);
  if (!neumann_faces.empty()) {
    add(check_neumann_gradient_lemma(fb, bg, neumann_faces, tol.lemmas, v.neumann_flux_tol), v.checks.neumann_lemma);
    for (auto& r : check_neumann_boundary_term(fb, bg, neumann_faces, split, tol.lemmas))
      add(std::move(r), v.checks.neumann_lemma);
  }
  clock.lap("lemmas");

  IdentityOptions io_opt;
  io_opt.tolerance = tol.identities;
  io_opt.layers = v.identity_layers;
  io_opt.epsilon_reg = eps_reg;
  io_opt.constant_faces = constant_faces;
  for (auto& r : check_proof_identities(fb, bg, io_opt)) add(std::move(r), v.checks.identities);
  clock.lap("identities");

  if (v.checks.conditions)
    for (auto& r : evaluate_conditions(fb, bg, tol.conditions, eps_reg)) add(std::move(r), false);
  clock.lap("conditions");

  man.pass = true;
  for (const auto& c : man.checks)
    if (c.gating && !c.report.pass) man.pass = false;

  if (opt.write_files) {
    const fs::path dir = opt.out_dir.value_or(fs::path(cfg.output_dir));
    fs::create_directories(dir);
    if (opt.dump_fields) dump_fields(dir / "fields", m, idf, fb, sr ? &sr->residual_field : nullptr, man.files);
    if (opt.dump_surfaces) dump_surfaces(dir / "surfaces", fb, split, man.files);
    clock.lap("dumps");
    write_text(dir / "summary.csv", summary_csv(man), man.files);
    // The report lists itself.
    const fs::path report = dir / "report.json";
    man.files.push_back(report.string());
    std::vector<std::string> ignored;
    write_text(report, report_json(man, cfg_in).dump(2) + "\n", ignored);
  }
  return man;
}

std::string summary_csv(const RunManifest& m) {
  std::ostringstream out;
  out << "scenario,check,kind,gating,pass,vacuous,lhs,rhs,margin,tolerance,error_bar\n";
  for (const auto& c : m.checks) {
    const VerificationReport& r = c.report;
    out << m.scenario << ',' << r.name << ',' << kind_name(r.kind) << ',' << c.gating << ',' << r.pass
        << ',' << r.vacuous << ',' << fmt(r.lhs) << ',' << fmt(r.rhs) << ',' << fmt(r.margin) << ','
        << fmt(r.tolerance) << ',' << fmt(r.error_bar) << '\n';
  }
  return out.str();
}

ordered_json report_json(const RunManifest& m, const ScenarioConfig& cfg) {
  ordered_json timings = ordered_json::object();
  for (const auto& [k, t] : m.timings) timings[k] = t;
  ordered_json checks = ordered_json::array();
  for (const auto& c : m.checks) checks.push_back(report_to_json(c));
  return {{"scenario", m.scenario},
          {"description", cfg.description},
          {"pass", m.pass},
          {"exit_code", m.exit_code()},
          {"manifest",
           {{"config_hash", m.config_hash},
            {"version", m.version},
            {"timings_seconds", timings},
            {"files", m.files}}},
          {"grid", {{"dims", cfg.dims}, {"lower", cfg.lower}, {"upper", cfg.upper}}},
          {"solver", m.solver.is_null() ? ordered_json(nullptr) : m.solver},
          {"dirichlet_lemma_skipped_faces", m.skipped},
          {"checks", checks},
          {"config", cfg.source}};
}

int run_command(const std::string& ref, const RunOptions& opt, std::ostream& log) {
  std::optional<fs::path> dir = opt.out_dir;
  try {
    const ScenarioConfig cfg = resolve_scenario(ref);
    if (!dir) dir = fs::path(cfg.output_dir);
    RunOptions o = opt;
    o.out_dir = dir;
    const RunManifest man = run_scenario(cfg, o);
    for (const auto& c : man.checks) {
      if (!c.gating && c.report.kind != VerificationReport::Kind::Condition) continue;
      log << (c.report.pass ? "  ok    " : (c.gating ? "  FAIL  " : "  viol  ")) << c.report.name
          << "  margin " << fmt(c.report.margin) << "\n";
    }
    log << man.scenario << ": " << (man.pass ? "pass" : "FAIL") << " (report in " << dir->string() << ")\n";
    return man.exit_code();
  } catch (const ConfigError& e) {
    write_error(dir, "config", e.key_path(), e.what(), kExitConfig, log);
    return kExitConfig;
  } catch (const MetricError& e) {
    write_error(dir, "config", "metric", e.what(), kExitConfig, log);
    return kExitConfig;
  } catch (const SolverError& e) {
    write_error(dir, "solver", "", e.what(), kExitSolver, log);
    return kExitSolver;
  }
}

double fitted_order(const std::vector<double>& h, const std::vector<double>& err) {
  const std::size_t n = h.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(h[i]), y = std::log(err[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double StudyReport::order(const std::string& check) const {
  for (const auto& [k, p] : orders)
    if (k == check) return p;
  throw std::out_of_range("no order for " + check);
}

StudyReport convergence_study(const ScenarioConfig& cfg, const std::vector<int>& resolutions,
                              const RunOptions& opt) {
  if (resolutions.size() < 3) throw ConfigError("--resolutions", "need at least three resolutions");
  for (std::size_t i = 1; i < resolutions.size(); ++i)
    if (resolutions[i] <= resolutions[i - 1])
      throw ConfigError("--resolutions", "must be strictly increasing");

  StudyReport study;
  std::vector<std::string> names;
  for (int res : resolutions) {
    const ScenarioConfig c = cfg.at_resolution(res);
    RunOptions o = opt;
    o.write_files = false;
    RunManifest man;
    try {
      man = run_scenario(c, o);
    } catch (const std::exception& e) {
      study.error = "resolution " + std::to_string(res) + ": " + e.what();
      break;
    }
    const double spacing = (c.upper[0] - c.lower[0]) / res;
    for (const auto& ch : man.checks) {
      const VerificationReport& r = ch.report;
      const bool residual = r.kind == VerificationReport::Kind::Identity ||
                            r.kind == VerificationReport::Kind::Lemma;
      if (!residual || r.vacuous) continue;
      study.rows.push_back({r.name, res, spacing, r.margin});
      if (std::find(names.begin(), names.end(), r.name) == names.end()) names.push_back(r.name);
    }
  }
  for (const auto& name : names) {
    std::vector<double> h, e;
    for (const auto& row : study.rows)
      if (row.check == name && row.residual > 0.0) h.push_back(row.spacing), e.push_back(row.residual);
    if (h.size() >= 2) study.orders.emplace_back(name, fitted_order(h, e));
  }
  return study;
}

std::string study_csv(const StudyReport& s) {
  std::ostringstream out;
  out << "check,resolution,spacing,residual,order\n";
  for (const auto& r : s.rows) {
    std::string order;
    for (const auto& [k, p] : s.orders)
      if (k == r.check) order = fmt(p);
    out << r.check << ',' << r.resolution << ',' << fmt(r.spacing) << ',' << fmt(r.residual) << ','
        << order << '\n';
  }
  return out.str();
}

int study_command(const std::string& ref, const std::vector<int>& resolutions, const RunOptions& opt,
                  std::ostream& log) {
  std::optional<fs::path> dir = opt.out_dir;
  try {
    const ScenarioConfig cfg = resolve_scenario(ref);
    if (!dir) dir = fs::path(cfg.output_dir) / "study";
    const StudyReport s = convergence_study(cfg, resolutions, opt);
    fs::create_directories(*dir);
    std::vector<std::string> files;
    write_text(*dir / "study.csv", study_csv(s), files);
    for (const auto& [k, p] : s.orders) log << "  " << k << "  order " << fmt(p) << "\n";
    if (s.error) {
      write_error(dir, "solver", "", *s.error, kExitSolver, log);
      return kExitSolver;
    }
    log << "study written to " << files.front() << "\n";
    return kExitPass;
  } catch (const ConfigError& e) {
    write_error(dir, "config", e.key_path(), e.what(), kExitConfig, log);
    return kExitConfig;
  }
}

}  // namespace hlab
