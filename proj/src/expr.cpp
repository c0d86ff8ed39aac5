#include "hlab/expr.hpp"

#include <cmath>

namespace hlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double ipow(double x, int n) {
  if (n <= 0) return 1.0;
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

/// d^order/dx^order of x^n.
double dpow(double x, int n, int order) {
  double c = 1.0;
  for (int o = 0; o < order; ++o) {
    if (n - o <= 0) return 0.0;
    c *= n - o;
  }
  return c * ipow(x, n - order);
}

}  // namespace

Expr Expr::linear(Vec3 coeffs, double offset) {
  Polynomial p;
  p.terms.push_back({offset, {0, 0, 0}});
  for (int a = 0; a < 3; ++a) {
    if (coeffs[a] == 0.0) continue;
    Monomial m{coeffs[a], {0, 0, 0}};
    m.powers[a] = 1;
    p.terms.push_back(m);
  }
  return Expr(p);
}

double Expr::value(const Vec3& x) const {
  return std::visit(
      overloaded{
          [](const Constant& c) { return c.value; },
          [&](const Polynomial& p) {
            double acc = 0.0;
            for (const auto& m : p.terms)
              acc += m.coeff * ipow(x[0], m.powers[0]) * ipow(x[1], m.powers[1]) *
                     ipow(x[2], m.powers[2]);
            return acc;
          },
          [&](const SinProduct& s) {
            double r = s.amplitude;
            for (int a = 0; a < 3; ++a) r *= std::sin(s.freq[a] * x[a] + s.phase[a]);
            return r;
          },
          [&](const Exponential& e) {
            return e.amplitude * std::exp(dot(e.rate, x)) + e.offset;
          },
          [&](const Radial& r) {
            const Vec3 d = x - r.center;
            return r.a + r.b * std::pow(dot(d, d), 0.5 * r.power);
          },
          [&](const Sum& s) {
            double acc = 0.0;
            for (const auto& t : s.terms) acc += t.value(x);
            return acc;
          },
      },
      *node_);
}

Vec3 Expr::gradient(const Vec3& x) const {
  return std::visit(
      overloaded{
          [](const Constant&) { return Vec3{0, 0, 0}; },
          [&](const Polynomial& p) {
            Vec3 g{};
            for (const auto& m : p.terms)
              for (int a = 0; a < 3; ++a) {
                double t = m.coeff;
                for (int b = 0; b < 3; ++b)
                  t *= (a == b) ? dpow(x[b], m.powers[b], 1) : ipow(x[b], m.powers[b]);
                g[a] += t;
              }
            return g;
          },
          [&](const SinProduct& s) {
            Vec3 g{};
            for (int a = 0; a < 3; ++a) {
              double t = s.amplitude;
              for (int b = 0; b < 3; ++b) {
                const double arg = s.freq[b] * x[b] + s.phase[b];
                t *= (a == b) ? s.freq[b] * std::cos(arg) : std::sin(arg);
              }
              g[a] = t;
            }
            return g;
          },
          [&](const Exponential& e) {
            const double v = e.amplitude * std::exp(dot(e.rate, x));
            return v * e.rate;
          },
          [&](const Radial& r) {
            const Vec3 d = x - r.center;
            const double r2 = dot(d, d);
            const double c = r.b * r.power * std::pow(r2, 0.5 * r.power - 1.0);
            return c * d;
          },
          [&](const Sum& s) {
            Vec3 g{};
            for (const auto& t : s.terms) g = g + t.gradient(x);
            return g;
          },
      },
      *node_);
}

Sym3 Expr::hessian(const Vec3& x) const {
  return std::visit(
      overloaded{
          [](const Constant&) { return Sym3{}; },
          [&](const Polynomial& p) {
            Sym3 h{};
            for (const auto& m : p.terms)
              for (int c = 0; c < 6; ++c) {
                const auto [i, j] = kSymPairs[c];
                double t = m.coeff;
                for (int b = 0; b < 3; ++b) {
                  const int order = (b == i) + (b == j);
                  t *= dpow(x[b], m.powers[b], order);
                }
                h[c] += t;
              }
            return h;
          },
          [&](const SinProduct& s) {
            Sym3 h{};
            for (int c = 0; c < 6; ++c) {
              const auto [i, j] = kSymPairs[c];
              double t = s.amplitude;
              for (int b = 0; b < 3; ++b) {
                const double arg = s.freq[b] * x[b] + s.phase[b];
                const int order = (b == i) + (b == j);
                if (order == 0) t *= std::sin(arg);
                if (order == 1) t *= s.freq[b] * std::cos(arg);
                if (order == 2) t *= -s.freq[b] * s.freq[b] * std::sin(arg);
              }
              h[c] = t;
            }
            return h;
          },
          [&](const Exponential& e) {
            const double v = e.amplitude * std::exp(dot(e.rate, x));
            Sym3 h{};
            for (int c = 0; c < 6; ++c) {
              const auto [i, j] = kSymPairs[c];
              h[c] = v * e.rate[i] * e.rate[j];
            }
            return h;
          },
          [&](const Radial& r) {
            const Vec3 d = x - r.center;
            const double r2 = dot(d, d);
            const double c1 = r.b * r.power * std::pow(r2, 0.5 * r.power - 1.0);
            const double c2 =
                r.b * r.power * (r.power - 2.0) * std::pow(r2, 0.5 * r.power - 2.0);
            Sym3 h{};
            for (int c = 0; c < 6; ++c) {
              const auto [i, j] = kSymPairs[c];
              h[c] = (i == j ? c1 : 0.0) + c2 * d[i] * d[j];
            }
            return h;
          },
          [&](const Sum& s) {
            Sym3 h{};
            for (const auto& t : s.terms) h = h + t.hessian(x);
            return h;
          },
      },
      *node_);
}

bool Expr::is_constant() const {
  if (std::holds_alternative<Constant>(*node_)) return true;
  if (const auto* p = std::get_if<Polynomial>(node_.get())) {
    for (const auto& m : p->terms)
      if (m.coeff != 0.0 && (m.powers[0] || m.powers[1] || m.powers[2])) return false;
    return true;
  }
  if (const auto* s = std::get_if<Sum>(node_.get())) {
    for (const auto& t : s->terms)
      if (!t.is_constant()) return false;
    return true;
  }
  return false;
}

}  // namespace hlab
