#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "semiharm/types.hpp"

namespace semiharm {

/// |S|: Lebesgue measure of the unit sphere S^{2m-1}.
double sphere_area(int m);
/// |B|: Lebesgue measure of the unit ball B^{2m}.
double ball_volume(int m);

/// Gauss-Legendre nodes and weights on [0, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

/// Pairwise summation; the result depends only on the order of `v`.
cplx pairwise_sum(std::span<const cplx> v);

enum class RuleKind { Sphere, Ball };

/// Node counts for the product rules. Zero selects the default for the dimension:
/// m = 1: 256 circle points, 64 radial; m = 2: (24, 48, 48) Hopf angles, 32 radial.
struct QuadratureSizes {
  int sphere = 0;
  int radial = 0;

  QuadratureSizes resolved(int m) const;
};

/// Product rule over directions (unit sphere) times radii. Weights are Lebesgue measure:
/// node (d, j) = center + radii[j] * directions[d], weight = direction_weights[d] * radial_weights[j].
class QuadratureRule {
 public:
  RuleKind kind() const { return kind_; }
  int m() const { return m_; }
  const BasePoint& center() const { return center_; }
  double radius() const { return radius_; }

  const std::vector<RealPoint>& directions() const { return directions_; }
  const std::vector<double>& direction_weights() const { return direction_weights_; }
  const std::vector<double>& radii() const { return radii_; }
  const std::vector<double>& radial_weights() const { return radial_weights_; }

  std::size_t size() const { return directions_.size() * radii_.size(); }
  BasePoint node(std::size_t i) const;
  double weight(std::size_t i) const;
  std::vector<RealPoint> nodes() const;
  std::vector<double> weights() const;

  /// Sum of weight * f(node) with pairwise reduction.
  cplx integrate(const std::function<cplx(const BasePoint&)>& f) const;

 private:
  friend QuadratureRule sphere_rule(int, const BasePoint&, double, int);
  friend QuadratureRule ball_rule(int, const BasePoint&, double, int, int, int);

  RuleKind kind_ = RuleKind::Sphere;
  int m_ = 1;
  BasePoint center_{};
  double radius_ = 1.0;
  std::vector<RealPoint> directions_;
  std::vector<double> direction_weights_;
  std::vector<double> radii_;
  std::vector<double> radial_weights_;
};

/// m = 1: n-point trapezoid on the circle. m = 2: Hopf angles, Gauss-Legendre in
/// theta in [0, pi/2] (n/2 nodes) times two n-point trapezoids.
QuadratureRule sphere_rule(int m, const BasePoint& center, double r, int n);

/// Gauss-Legendre in the radius (n_r nodes, Jacobian t^{2m-1}) times sphere_rule(n_s).
/// With grading > 1 the radius is t = r u^grading and Gauss-Legendre runs in u, which
/// integrates t^{j/grading} terms exactly.
QuadratureRule ball_rule(int m, const BasePoint& center, double r, int n_r, int n_s, int grading = 1);

/// |ball integral - Gauss-Legendre in t of sphere integrals at radius t|.
double coarea_check(const std::function<cplx(const BasePoint&)>& integrand, int m, double r, int n);

}  // namespace semiharm
