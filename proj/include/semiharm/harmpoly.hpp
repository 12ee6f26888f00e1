#pragma once

#include <gmpxx.h>

#include <map>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "semiharm/covering.hpp"

namespace semiharm {

/// Exact rational times pi^power.
struct PiMultiple {
  mpq_class coeff;
  int pi_power = 0;

  double value() const;
  std::string to_string() const;
};

/// Homogeneous polynomial in n real variables x1..xn with exact rational coefficients.
/// The zero polynomial keeps its nominal degree.
class HomoPoly {
 public:
  using Index = std::vector<int>;

  HomoPoly(int n, int degree);
  static HomoPoly monomial(const Index& e, const mpq_class& c);
  static HomoPoly constant(int n, const mpq_class& c);
  /// ||x||^{2k}.
  static HomoPoly norm2_power(int n, int k);
  /// Grammar: sums of terms like `3/2*x1^2*x2` or `-x3`. With n = 0 the variable count is
  /// the largest index used. Throws ParseError on inhomogeneous input.
  static HomoPoly parse(const std::string& text, int n = 0);

  int n() const { return n_; }
  int degree() const { return degree_; }
  const std::map<Index, mpq_class>& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  mpq_class coefficient(const Index& e) const;

  HomoPoly operator+(const HomoPoly& o) const;
  HomoPoly operator-(const HomoPoly& o) const;
  HomoPoly operator*(const HomoPoly& o) const;
  HomoPoly operator*(const mpq_class& c) const;
  bool operator==(const HomoPoly& o) const;

  HomoPoly derivative(int i) const;
  double eval(std::span<const double> x) const;
  /// Partials with respect to x1..xn in floating point.
  std::vector<double> gradient(std::span<const double> x) const;
  std::string to_string() const;

 private:
  void add_term(const Index& e, const mpq_class& c);

  int n_;
  int degree_;
  std::map<Index, mpq_class> coeffs_;
};

HomoPoly laplacian(const HomoPoly& p);
/// sum x_i dP/dx_i - degree * P; zero for every homogeneous P.
HomoPoly euler_defect(const HomoPoly& p);

struct HarmonicPart {
  int j;
  HomoPoly h;
};

struct HarmonicDecomposition {
  int n = 0;
  int degree = 0;
  std::vector<HarmonicPart> parts;  // descending j, zero parts omitted

  HomoPoly reconstruct() const;
  /// H_j, or the zero polynomial of degree j.
  HomoPoly part(int j) const;
  /// The constant H_0 (zero for odd degree).
  mpq_class h0() const;
};

/// P = sum_j ||x||^{l-j} H_j with H_j harmonic, by triangular elimination on the powers
/// of the Laplacian.
HarmonicDecomposition harmonic_decompose(const HomoPoly& p);

/// Seeded random polynomial: each monomial of the degree is present with probability 1/2,
/// with coefficient p/q, 1 <= |p| <= 9, 1 <= q <= 6. Never the zero polynomial.
HomoPoly random_homopoly(int n, int degree, std::mt19937_64& rng);

/// s * H_0 * |B| for even degree, 0 for odd degree (n = 2m).
PiMultiple sphere_integral_homogeneous(const HomoPoly& p, int sheets);
/// The surface integral over s copies of the unit sphere: s * H_0 * |S|.
PiMultiple sphere_integral_truth(const HomoPoly& p, int sheets);

/// Variables x1..x4 are (Re z1, Im z1, Re z2, Im z2).
cplx eval_on_base(const HomoPoly& p, const BasePoint& z);

/// Checks psi = sum_{j>=1} H_j / j against the boundary condition d_nu psi = P - H_0 on the
/// unit sphere of the covering, its Laplacian inside, and the shift psi + 1; also measures
/// the sphere integral against both normalizations.
nlohmann::json neumann_example_check(const HomoPoly& p, const CoveringMap& cov, int samples = 200,
                                     std::uint64_t seed = CoveringMap::kDefaultSeed);

}  // namespace semiharm
