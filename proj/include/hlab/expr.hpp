#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "hlab/tensor.hpp"

namespace hlab {

/// Closed-form scalar function of position drawn from a fixed whitelist.
/// Every member evaluates its value, gradient and Hessian exactly, which is
/// what makes the analytic scenarios usable as oracles.
class Expr {
 public:
  struct Constant {
    double value = 0.0;
  };
  struct Monomial {
    double coeff = 0.0;
    std::array<int, 3> powers{0, 0, 0};
  };
  struct Polynomial {
    std::vector<Monomial> terms;
  };
  /// amplitude * prod_a sin(freq_a x_a + phase_a)
  struct SinProduct {
    double amplitude = 1.0;
    Vec3 freq{1, 1, 1};
    Vec3 phase{0, 0, 0};
  };
  /// amplitude * exp(rate . x) + offset
  struct Exponential {
    double amplitude = 1.0;
    Vec3 rate{0, 0, 0};
    double offset = 0.0;
  };
  /// a + b * |x - center|^power
  struct Radial {
    Vec3 center{0, 0, 0};
    double a = 0.0;
    double b = 1.0;
    double power = 2.0;
  };
  struct Sum {
    std::vector<Expr> terms;
  };

  using Node = std::variant<Constant, Polynomial, SinProduct, Exponential, Radial, Sum>;

  Expr() : node_(std::make_shared<Node>(Constant{0.0})) {}
  Expr(double c) : node_(std::make_shared<Node>(Constant{c})) {}  // NOLINT
  template <class T>
    requires std::is_constructible_v<Node, T>
  Expr(T n) : node_(std::make_shared<Node>(std::move(n))) {}  // NOLINT

  double value(const Vec3& x) const;
  Vec3 gradient(const Vec3& x) const;
  Sym3 hessian(const Vec3& x) const;

  bool is_constant() const;
  const Node& node() const { return *node_; }

  static Expr linear(Vec3 coeffs, double offset = 0.0);

 private:
  std::shared_ptr<const Node> node_;
};

}  // namespace hlab
