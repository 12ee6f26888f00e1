#pragma once

#include <functional>
#include <memory>
#include <string>

#include "semiharm/covering.hpp"
#include "semiharm/types.hpp"

namespace semiharm {

/// Local data handed to analytic partials: the point and the holomorphic slope of the
/// sheet through it.
struct Chart {
  BasePoint z{};
  cplx w{};
  std::array<cplx, 2> dw{};
  int m = 1;
};

/// Complex-valued function on a covering, evaluated branchwise at (z, w).
class ScalarField {
 public:
  using EvalFn = std::function<cplx(const BasePoint&, cplx)>;
  using PartialsFn = std::function<Gradient(const Chart&)>;

  static constexpr double kDefaultFdStep = 1e-5;

  ScalarField(std::string label, EvalFn eval, PartialsFn partials = {}, double fd_step = kDefaultFdStep);

  /// Field from the expression grammar; partials come from forward-mode differentiation.
  static ScalarField from_expression(const std::string& text, int m, std::string label = {});
  static ScalarField constant(cplx c);
  /// Pullback of a function of the base point only.
  static ScalarField pullback(std::string label, std::function<cplx(const BasePoint&)> g,
                              std::function<Gradient(const BasePoint&)> dg = {});
  /// ||p - a||^2.
  static ScalarField norm2_from(const BasePoint& a, int m);

  cplx operator()(const BasePoint& z, cplx w) const { return eval_(z, w); }
  cplx operator()(const CoverPoint& x) const { return eval_(x.base, x.fiber); }

  bool has_partials() const { return static_cast<bool>(partials_); }
  Gradient partials(const Chart& c) const { return partials_(c); }
  /// Finite-difference step relative to the base radius.
  double fd_step() const { return fd_step_; }
  const std::string& label() const { return label_; }

  ScalarField scaled(cplx lambda) const;
  ScalarField shifted(cplx c) const;
  ScalarField without_partials() const;

 private:
  std::string label_;
  EvalFn eval_;
  PartialsFn partials_;
  double fd_step_;
};

/// Real-valued function whose zero set is the boundary under study.
struct DefiningFunction {
  ScalarField rho;

  /// ||p - center||^2 - r^2.
  static DefiningFunction sphere(const BasePoint& center, double r, int m);
  DefiningFunction scaled(double lambda) const { return {rho.scaled(lambda)}; }
};

}  // namespace semiharm
