#include "hlab/scenario.hpp"

#include <fstream>
#include <numbers>
#include <set>

#include "hlab/errors.hpp"

namespace hlab {

using nlohmann::json;

void Tolerances::scale(double factor) {
  main_inequality *= factor;
  identities *= factor;
  lemmas *= factor;
  conditions *= factor;
  reference *= factor;
}

namespace {

/// A JSON object together with its key path. Every key must be read, so
/// misspelt options are caught instead of silently ignored.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }
  Section(const Section&) = delete;
  ~Section() = default;

  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  bool has(const std::string& k) const { return j_.contains(k) && !j_.at(k).is_null(); }

  const json& raw(const std::string& k) {
    seen_.insert(k);
    if (!j_.contains(k)) throw ConfigError(key(k), "missing required key");
    return j_.at(k);
  }

  double number(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_number()) throw ConfigError(key(k), "expected a number");
    return v.get<double>();
  }
  double number(const std::string& k, double fallback) { return has(k) ? number(k) : mark(k, fallback); }

  int integer(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_number_integer()) throw ConfigError(key(k), "expected an integer");
    return v.get<int>();
  }
  int integer(const std::string& k, int fallback) { return has(k) ? integer(k) : mark(k, fallback); }

  bool boolean(const std::string& k, bool fallback) {
    if (!has(k)) return mark(k, fallback);
    const json& v = raw(k);
    if (!v.is_boolean()) throw ConfigError(key(k), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_string()) throw ConfigError(key(k), "expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& k, const std::string& fallback) {
    return has(k) ? string(k) : mark(k, fallback);
  }

  Vec3 vec3(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_array() || v.size() != 3) throw ConfigError(key(k), "expected three numbers");
    Vec3 out{};
    for (int a = 0; a < 3; ++a) {
      if (!v[a].is_number()) throw ConfigError(key(k) + "[" + std::to_string(a) + "]", "expected a number");
      out[a] = v[a].get<double>();
    }
    return out;
  }
  Vec3 vec3(const std::string& k, Vec3 fallback) { return has(k) ? vec3(k) : mark(k, fallback); }

  std::vector<double> numbers(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_array()) throw ConfigError(key(k), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(key(k) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  Expr expr(const std::string& k) { return parse_expr(raw(k), key(k)); }
  Expr expr(const std::string& k, Expr fallback) { return has(k) ? expr(k) : mark(k, fallback); }

  /// Rejects keys that were never read.
  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError(key(k), "unknown key");
  }

 private:
  template <class T>
  T mark(const std::string& k, T v) {
    seen_.insert(k);
    return v;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

double positive(double v, const std::string& path) {
  if (!(v > 0.0)) throw ConfigError(path, "must be positive");
  return v;
}

MetricSpec parse_metric(Section& s, std::optional<std::string>& file) {
  const std::string family = s.string("family");
  if (family == "flat") return MetricSpec::flat();
  if (family == "conformal") return MetricSpec::conformal(s.expr("phi"));
  if (family == "diagonal") {
    const json& c = s.raw("components");
    if (!c.is_array() || c.size() != 3) throw ConfigError(s.key("components"), "expected three expressions");
    std::array<Expr, 3> e;
    for (int a = 0; a < 3; ++a) e[a] = parse_expr(c[a], s.key("components") + "[" + std::to_string(a) + "]");
    return MetricSpec::diagonal(e);
  }
  if (family == "tabulated") {
    file = s.string("file");
    return MetricSpec::flat();
  }
  throw ConfigError(s.key("family"), "unknown metric family '" + family + "'");
}

void parse_p(Section& s, ScenarioConfig& c) {
  const std::string family = s.string("family");
  if (family == "zero") {
    c.p_family = ScenarioConfig::PFamily::Zero;
  } else if (family == "scaled_metric") {
    c.p_family = ScenarioConfig::PFamily::ScaledMetric;
    c.p_scale = s.number("scale");
  } else if (family == "components") {
    c.p_family = ScenarioConfig::PFamily::Components;
    Section comp(s.raw("components"), s.key("components"));
    const char* names[] = {"xx", "xy", "xz", "yy", "yz", "zz"};
    for (int i = 0; i < 6; ++i) c.p_components[i] = comp.expr(names[i], Expr(0.0));
    comp.finish();
  } else {
    throw ConfigError(s.key("family"), "unknown p family '" + family + "'");
  }
}

FaceCondition parse_face(const json& j, const std::string& path) {
  Section s(j, path);
  const std::string type = s.string("type");
  FaceCondition fc;
  if (type == "dirichlet") {
    fc = FaceCondition::dirichlet(s.expr("value"));
  } else if (type == "neumann") {
    fc = FaceCondition::neumann();
  } else {
    throw ConfigError(s.key("type"), "unknown boundary type '" + type + "'");
  }
  s.finish();
  return fc;
}

void parse_boundary(Section& s, ScenarioConfig& c) {
  FaceCondition fallback = FaceCondition::dirichlet(c.u_expr);
  if (s.has("default")) fallback = parse_face(s.raw("default"), s.key("default"));
  for (Face f : kAllFaces) {
    const std::string n = face_name(f);
    c.boundary.face(f) = s.has(n) ? parse_face(s.raw(n), s.key(n)) : fallback;
  }
  if (s.has("pin")) {
    Section pin(s.raw("pin"), s.key("pin"));
    const Vec3 at = pin.vec3("node");
    Index3 id{static_cast<int>(at[0]), static_cast<int>(at[1]), static_cast<int>(at[2])};
    for (int a = 0; a < 3; ++a)
      if (id[a] < 0 || id[a] >= c.dims[a] || id[a] != at[a])
        throw ConfigError(pin.key("node"), "not a node of the grid");
    c.boundary.pin = id;
    c.boundary.pin_value = pin.number("value", 0.0);
    pin.finish();
  }
}

void parse_solver(Section& s, SolverConfig& cfg) {
  if (s.has("delta_schedule")) cfg.delta_schedule = s.numbers("delta_schedule");
  cfg.picard_tol = s.number("picard_tol", cfg.picard_tol);
  cfg.picard_max_iters = s.integer("picard_max_iters", cfg.picard_max_iters);
  cfg.linear_tol = s.number("linear_tol", cfg.linear_tol);
  cfg.linear_max_iters = s.integer("linear_max_iters", cfg.linear_max_iters);
  cfg.damping = s.number("damping", cfg.damping);
  cfg.sensitivity_probe = s.boolean("sensitivity_probe", cfg.sensitivity_probe);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("solver", e.what());
  }
}

void parse_verification(Section& s, VerificationConfig& v) {
  v.n_levels = s.integer("n_levels", v.n_levels);
  if (v.n_levels < 2) throw ConfigError(s.key("n_levels"), "need at least 2 levels");
  if (s.has("epsilon_reg")) v.epsilon_reg = s.number("epsilon_reg");
  v.epsilon_reg_relative = s.number("epsilon_reg_relative", v.epsilon_reg_relative);
  if (s.has("level_range")) {
    const auto r = s.numbers("level_range");
    if (r.size() != 2 || !(r[0] < r[1])) throw ConfigError(s.key("level_range"), "expected [lo, hi] with lo < hi");
    v.level_range = std::array<double, 2>{r[0], r[1]};
  }
  if (s.has("eps_neq0")) v.eps_neq0 = s.number("eps_neq0");
  v.h_term_weight = s.number("h_term_weight", v.h_term_weight);
  v.c0_delta = positive(s.number("c0_delta", v.c0_delta), s.key("c0_delta"));
  v.identity_layers = s.integer("identity_layers", v.identity_layers);
  v.lemma_edge_fraction = s.number("lemma_edge_fraction", v.lemma_edge_fraction);
  if (v.lemma_edge_fraction < 0.0 || v.lemma_edge_fraction >= 0.5)
    throw ConfigError(s.key("lemma_edge_fraction"), "must lie in [0, 0.5)");
  v.neumann_flux_tol = positive(s.number("neumann_flux_tol", v.neumann_flux_tol), s.key("neumann_flux_tol"));
  if (s.has("reference")) v.reference = s.expr("reference");

  if (s.has("tolerances")) {
    Section t(s.raw("tolerances"), s.key("tolerances"));
    Tolerances& tol = v.tolerances;
    tol.main_inequality = t.number("main_inequality", tol.main_inequality);
    tol.identities = t.number("identities", tol.identities);
    tol.lemmas = t.number("lemmas", tol.lemmas);
    tol.conditions = t.number("conditions", tol.conditions);
    tol.reference = t.number("reference", tol.reference);
    t.finish();
  }
  if (s.has("checks")) {
    Section c(s.raw("checks"), s.key("checks"));
    CheckSwitches& k = v.checks;
    k.main_inequality = c.boolean("main_inequality", k.main_inequality);
    k.identities = c.boolean("identities", k.identities);
    k.dirichlet_lemma = c.boolean("dirichlet_lemma", k.dirichlet_lemma);
    k.neumann_lemma = c.boolean("neumann_lemma", k.neumann_lemma);
    k.conditions = c.boolean("conditions", k.conditions);
    c.finish();
  }
}

}  // namespace

Expr parse_expr(const json& j, const std::string& path) {
  if (j.is_number()) return Expr(j.get<double>());
  if (!j.is_object() || j.size() != 1)
    throw ConfigError(path, "expected a number or an object with exactly one expression kind");
  const auto& [kind, body] = *j.items().begin();
  const std::string at = path + "." + kind;

  if (kind == "constant") {
    if (!body.is_number()) throw ConfigError(at, "expected a number");
    return Expr(body.get<double>());
  }
  if (kind == "linear") {
    Section s(body, at);
    const Expr e = Expr::linear(s.vec3("coeffs"), s.number("offset", 0.0));
    s.finish();
    return e;
  }
  if (kind == "polynomial") {
    if (!body.is_array()) throw ConfigError(at, "expected an array of terms");
    Expr::Polynomial p;
    for (std::size_t i = 0; i < body.size(); ++i) {
      Section s(body[i], at + "[" + std::to_string(i) + "]");
      const Vec3 pw = s.vec3("powers");
      Expr::Monomial m{s.number("coeff"), {}};
      for (int a = 0; a < 3; ++a) {
        m.powers[a] = static_cast<int>(pw[a]);
        if (m.powers[a] != pw[a] || m.powers[a] < 0) throw ConfigError(s.key("powers"), "powers must be non-negative integers");
      }
      s.finish();
      p.terms.push_back(m);
    }
    return Expr(std::move(p));
  }
  if (kind == "sin_product" || kind == "cos_product") {
    Section s(body, at);
    Expr::SinProduct sp;
    sp.amplitude = s.number("amplitude", 1.0);
    sp.freq = s.vec3("freq", {1, 1, 1});
    sp.phase = s.vec3("phase", {0, 0, 0});
    if (kind == "cos_product")
      for (double& ph : sp.phase) ph += std::numbers::pi / 2;
    s.finish();
    return Expr(sp);
  }
  if (kind == "exp") {
    Section s(body, at);
    Expr::Exponential e;
    e.amplitude = s.number("amplitude", 1.0);
    e.rate = s.vec3("rate");
    e.offset = s.number("offset", 0.0);
    s.finish();
    return Expr(e);
  }
  if (kind == "radial") {
    Section s(body, at);
    Expr::Radial r;
    r.center = s.vec3("center");
    r.a = s.number("a", 0.0);
    r.b = s.number("b", 1.0);
    r.power = s.number("power", 2.0);
    s.finish();
    return Expr(r);
  }
  if (kind == "sum") {
    if (!body.is_array() || body.empty()) throw ConfigError(at, "expected a non-empty array");
    Expr::Sum sum;
    for (std::size_t i = 0; i < body.size(); ++i)
      sum.terms.push_back(parse_expr(body[i], at + "[" + std::to_string(i) + "]"));
    return Expr(std::move(sum));
  }
  throw ConfigError(at, "unknown expression kind '" + kind + "'");
}

Grid ScenarioConfig::grid() const { return Grid::box(dims, lower, upper); }

ScenarioConfig ScenarioConfig::at_resolution(int cells) const {
  if (cells + 1 < Grid::kMinNodes) throw ConfigError("resolution", "too coarse");
  ScenarioConfig c = *this;
  c.dims = {cells + 1, cells + 1, cells + 1};
  if (c.boundary.pin) {
    // Keep the pin at the same relative position.
    for (int a = 0; a < 3; ++a)
      (*c.boundary.pin)[a] = static_cast<int>(std::lround(
          static_cast<double>((*boundary.pin)[a]) * cells / (dims[a] - 1)));
  }
  c.source["grid"] = {{"resolution", cells}, {"lower", lower}, {"upper", upper}};
  return c;
}

ScenarioConfig parse_scenario(const json& j) {
  Section top(j, "");
  ScenarioConfig c;
  c.source = j;
  c.name = top.string("name");
  c.description = top.string("description", "");

  {
    Section g(top.raw("grid"), "grid");
    if (g.has("resolution")) {
      const int r = g.integer("resolution");
      c.dims = {r + 1, r + 1, r + 1};
    } else {
      const Vec3 d = g.vec3("dims");
      for (int a = 0; a < 3; ++a) {
        c.dims[a] = static_cast<int>(d[a]);
        if (c.dims[a] != d[a]) throw ConfigError(g.key("dims"), "expected integers");
      }
    }
    for (int n : c.dims)
      if (n < Grid::kMinNodes)
        throw ConfigError(g.key("dims"), "need at least " + std::to_string(Grid::kMinNodes) + " nodes per axis");
    c.lower = g.vec3("lower", {0, 0, 0});
    c.upper = g.vec3("upper", {1, 1, 1});
    for (int a = 0; a < 3; ++a)
      if (!(c.upper[a] > c.lower[a])) throw ConfigError(g.key("upper"), "must exceed lower on every axis");
    g.finish();
  }
  {
    Section m(top.raw("metric"), "metric");
    c.metric = parse_metric(m, c.metric_file);
    m.finish();
  }
  if (top.has("p")) {
    Section p(top.raw("p"), "p");
    parse_p(p, c);
    p.finish();
  }
  c.h = top.expr("h", Expr(0.0));
  {
    Section u(top.raw("u"), "u");
    const std::string mode = u.string("mode");
    if (mode == "solve") {
      c.u_mode = ScenarioConfig::UMode::Solve;
      c.u_expr = u.expr("boundary_data", Expr(0.0));
    } else if (mode == "analytic") {
      c.u_mode = ScenarioConfig::UMode::Analytic;
      c.u_expr = u.expr("expr");
    } else {
      throw ConfigError(u.key("mode"), "unknown mode '" + mode + "'");
    }
    u.finish();
  }
  if (top.has("boundary")) {
    Section b(top.raw("boundary"), "boundary");
    parse_boundary(b, c);
    b.finish();
  } else {
    c.boundary = BoundaryCondition::all_dirichlet(c.u_expr);
  }
  if (c.u_mode == ScenarioConfig::UMode::Solve && !c.boundary.any_dirichlet() && !c.boundary.pin)
    throw ConfigError("boundary.pin", "required when no face is Dirichlet");
  if (top.has("solver")) {
    Section s(top.raw("solver"), "solver");
    parse_solver(s, c.solver);
    s.finish();
  }
  if (top.has("verification")) {
    Section v(top.raw("verification"), "verification");
    parse_verification(v, c.verification);
    v.finish();
  }
  c.output_dir = top.string("output_dir", "out/" + c.name);
  top.finish();
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot read " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(j);
}

ScenarioConfig resolve_scenario(const std::string& ref) {
  const std::string prefix = "builtin:";
  if (ref.rfind(prefix, 0) == 0) return parse_scenario(builtin(ref.substr(prefix.size())).config);
  return load_scenario(ref);
}

}  // namespace hlab
