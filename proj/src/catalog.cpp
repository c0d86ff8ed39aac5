#include <cmath>

#include "hlab/errors.hpp"
#include "hlab/scenario.hpp"

namespace hlab {

using nlohmann::json;

namespace {

json linear_x() { return {{"linear", {{"coeffs", {1, 0, 0}}}}}; }

json unit_grid(int cells = 32) {
  return {{"resolution", cells}, {"lower", {0, 0, 0}}, {"upper", {1, 1, 1}}};
}

json flat() { return {{"family", "flat"}}; }

json neumann() { return {{"type", "neumann"}}; }

std::vector<CatalogEntry> make_catalog() {
  std::vector<CatalogEntry> c;
  auto add = [&](const std::string& name, const std::string& description, json config) {
    config["name"] = name;
    config["description"] = description;
    c.push_back({name, description, std::move(config)});
  };

  add("flat-linear", "Euclidean unit box, p = 0, h = 0, u = x on the boundary: the equality case",
      {{"grid", unit_grid()},
       {"metric", flat()},
       {"p", {{"family", "zero"}}},
       {"h", 0.0},
       {"u", {{"mode", "solve"}, {"boundary_data", linear_x()}}},
       {"verification", {{"reference", linear_x()}}}});

  add("trace-matched", "Euclidean unit box, p = 0.1 g, h = 0.3, u = x: strict inequality, bulk condition violated",
      {{"grid", unit_grid()},
       {"metric", flat()},
       {"p", {{"family", "scaled_metric"}, {"scale", 0.1}}},
       {"h", 0.3},
       {"u", {{"mode", "solve"}, {"boundary_data", linear_x()}}},
       {"verification", {{"reference", linear_x()}}}});

  const double e1 = std::exp(1.0) - 1.0;
  const json exp_profile = {{"exp", {{"amplitude", 1.0 / e1}, {"rate", {1, 0, 0}}, {"offset", -1.0 / e1}}}};
  add("quasi-1d-exponential", "Euclidean unit box, h = 1, data (e^x - 1)/(e - 1) with a closed-form solution",
      {{"grid", unit_grid()},
       {"metric", flat()},
       {"h", 1.0},
       {"u", {{"mode", "solve"}, {"boundary_data", exp_profile}}},
       {"verification", {{"reference", exp_profile}}}});

  add("radial-spheres", "prescribed u = |x - c|^2 whose level sets are round spheres",
      {{"grid", unit_grid()},
       {"metric", flat()},
       {"u", {{"mode", "analytic"}, {"expr", {{"radial", {{"center", {0.5, 0.5, 0.5}}}}}}}},
       {"verification",
        {{"level_range", {0.01, 0.2025}},
         {"epsilon_reg", 0.1},
         // The identities difference nu, which turns over within a few cells of the centre.
         {"checks", {{"main_inequality", false}, {"identities", false}}}}}});

  add("schwarzschild-slice", "time-symmetric Schwarzschild slice (1 + 1/(2r))^4 delta, p = 0, h = 0, u = x",
      {{"grid", {{"resolution", 32}, {"lower", {1, 1, 1}}, {"upper", {2, 2, 2}}}},
       {"metric",
        {{"family", "conformal"},
         {"phi", {{"radial", {{"center", {0, 0, 0}}, {"a", 1.0}, {"b", 0.5}, {"power", -1.0}}}}}}},
       {"u", {{"mode", "solve"}, {"boundary_data", linear_x()}}},
       // u = x on every face is not compatible with the equation along the
       // box edges, so u is not twice differentiable there.
       {"verification", {{"lemma_edge_fraction", 0.125}, {"tolerances", {{"lemmas", 5e-3}}}}}});

  add("conformal-faces", "conformally flat metric with curved z faces, prescribed u = x + y^2/4 + x(z^2/5 - 2z^3/15) with zero flux on the z faces",
      {{"grid", unit_grid()},
       {"metric",
        {{"family", "conformal"},
         {"phi",
          {{"polynomial",
            {{{"coeff", 1.0}, {"powers", {0, 0, 0}}},
             {{"coeff", 0.2}, {"powers", {2, 0, 0}}},
             {{"coeff", 0.3}, {"powers", {0, 0, 2}}}}}}}}},
       {"u",
        {{"mode", "analytic"},
         {"expr",
          {{"polynomial",
            {{{"coeff", 1.0}, {"powers", {1, 0, 0}}},
             {{"coeff", 0.25}, {"powers", {0, 2, 0}}},
             {{"coeff", 0.2}, {"powers", {1, 0, 2}}},
             {{"coeff", -2.0 / 15.0}, {"powers", {1, 0, 3}}}}}}}}},
       {"boundary", {{"z_lo", neumann()}, {"z_hi", neumann()}}},
       // One-sided differences see the cubic z profile with an O(h^2) flux.
       {"verification", {{"neumann_flux_tol", 1e-2}, {"checks", {{"main_inequality", false}}}}}});

  add("manufactured-sine", "prescribed u = sin x sin y sin z on [0.25, 1.25]^3 for identity convergence",
      {{"grid", {{"resolution", 32}, {"lower", {0.25, 0.25, 0.25}}, {"upper", {1.25, 1.25, 1.25}}}},
       {"metric", flat()},
       {"u", {{"mode", "analytic"}, {"expr", {{"sin_product", {{"freq", {1, 1, 1}}}}}}}},
       {"verification",
        {{"tolerances", {{"identities", 5e-2}}}, {"checks", {{"main_inequality", false}}}}}});

  add("neumann-slab", "Euclidean unit box, u = x on the x faces, zero flux on the others",
      {{"grid", unit_grid()},
       {"metric", flat()},
       {"u", {{"mode", "solve"}, {"boundary_data", linear_x()}}},
       {"boundary", {{"y_lo", neumann()}, {"y_hi", neumann()}, {"z_lo", neumann()}, {"z_hi", neumann()}}},
       {"verification", {{"reference", linear_x()}}}});
  return c;
}

}  // namespace

const std::vector<CatalogEntry>& builtin_catalog() {
  static const std::vector<CatalogEntry> catalog = make_catalog();
  return catalog;
}

const CatalogEntry& builtin(const std::string& name) {
  for (const auto& e : builtin_catalog())
    if (e.name == name) return e;
  throw ConfigError("builtin", "unknown scenario '" + name + "'");
}

}  // namespace hlab
