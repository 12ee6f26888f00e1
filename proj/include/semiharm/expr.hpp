#pragma once

// Small expression languages used by covering specs and field definitions.
//
//   coefficient grammar:  z1, z2, complex literals (2, 0.5, 3i, i), + - * ^
//   field grammar:        z1, z2, w, conj re im log abs2, + - * / ^,
//                         radial_singular(alpha, s, a_1..a_m [, h])

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "semiharm/types.hpp"

namespace semiharm {

/// Polynomial in the base coordinates z1, z2 with complex coefficients.
class BasePoly {
 public:
  /// Exponents of (z1, z2, w); the w slot is only used while parsing fiber polynomials.
  using Exponent = std::array<int, 3>;

  BasePoly() = default;
  static BasePoly constant(cplx c);
  static BasePoly variable(int j);
  static BasePoly parse(const std::string& text, int m);
  /// Parse a polynomial in z1, z2 and w; entry j of the result is the coefficient of w^j.
  static std::vector<BasePoly> parse_fiber_polynomial(const std::string& text, int m);

  BasePoly operator+(const BasePoly& o) const;
  BasePoly operator-(const BasePoly& o) const;
  BasePoly operator*(const BasePoly& o) const;
  BasePoly operator-() const;
  BasePoly pow(int n) const;

  cplx operator()(const BasePoint& z) const;
  /// Holomorphic partial d/dz_j evaluated at z.
  cplx derivative(int j, const BasePoint& z) const;

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Sum of coefficient magnitudes, used for residual scaling.
  double magnitude() const;
  /// Sum over monomials of |c| * |z1|^a |z2|^b.
  double abs_eval(const BasePoint& z) const;
  const std::map<Exponent, cplx>& terms() const { return terms_; }
  std::string to_string() const;

 private:
  void prune();
  std::map<Exponent, cplx> terms_;
};

/// Value of a field together with its real first partials.
struct Dual {
  cplx v;
  Gradient d{};
};

/// Compiled field expression; evaluates values or forward-mode derivatives.
class FieldProgram {
 public:
  static FieldProgram parse(const std::string& text, int m);

  int m() const { return m_; }
  const std::string& source() const { return source_; }

  cplx eval(const BasePoint& z, cplx w) const;
  /// dw holds the holomorphic derivatives dw/dz_j of the fiber coordinate.
  Dual eval_dual(const BasePoint& z, cplx w, const std::array<cplx, 2>& dw) const;

  enum class OpCode { Const, Z, W, Add, Sub, Mul, Div, Neg, Pow, Conj, Re, Im, Log, Abs2 };
  struct Op {
    OpCode code;
    int arg = 0;  // constant index or coordinate index
  };

 private:
  template <class T, class Leaf>
  T run(Leaf&& leaf) const;

  int m_ = 1;
  std::string source_;
  std::vector<Op> ops_;
  std::vector<cplx> constants_;
  int max_depth_ = 0;

  friend class FieldCompiler;
};

}  // namespace semiharm
