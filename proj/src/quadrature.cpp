#include "semiharm/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace semiharm {

double sphere_area(int m) { return m == 1 ? 2.0 * pi : 2.0 * pi * pi; }

double ball_volume(int m) { return m == 1 ? pi : 0.5 * pi * pi; }

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Map [-1, 1] to [0, 1]; nodes ascending.
    x[i] = 0.5 * (1.0 - z);
    x[n - 1 - i] = 0.5 * (1.0 + z);
    w[i] = w[n - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

cplx pairwise_sum(std::span<const cplx> v) {
  if (v.size() <= 8) {
    cplx s = 0.0;
    for (cplx x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

QuadratureSizes QuadratureSizes::resolved(int m) const {
  QuadratureSizes q = *this;
  if (q.sphere <= 0) q.sphere = m == 1 ? 256 : 48;
  if (q.radial <= 0) q.radial = m == 1 ? 64 : 32;
  return q;
}

BasePoint QuadratureRule::node(std::size_t i) const {
  const std::size_t nr = radii_.size();
  return offset(center_, directions_[i / nr], radii_[i % nr]);
}

double QuadratureRule::weight(std::size_t i) const {
  const std::size_t nr = radii_.size();
  return direction_weights_[i / nr] * radial_weights_[i % nr];
}

std::vector<RealPoint> QuadratureRule::nodes() const {
  std::vector<RealPoint> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = to_real(node(i));
  return out;
}

std::vector<double> QuadratureRule::weights() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = weight(i);
  return out;
}

cplx QuadratureRule::integrate(const std::function<cplx(const BasePoint&)>& f) const {
  std::vector<cplx> terms(size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = weight(i) * f(node(i));
  return pairwise_sum(terms);
}

QuadratureRule sphere_rule(int m, const BasePoint& center, double r, int n) {
  if (m != 1 && m != 2) throw std::invalid_argument("sphere_rule: m must be 1 or 2");
  if (n < 8) throw std::invalid_argument("sphere_rule: n must be at least 8");
  QuadratureRule q;
  q.kind_ = RuleKind::Sphere;
  q.m_ = m;
  q.center_ = center;
  if (m == 1) q.center_[1] = 0.0;
  q.radius_ = r;
  if (m == 1) {
    for (int i = 0; i < n; ++i) {
      const double t = 2.0 * pi * i / n;
      q.directions_.push_back({std::cos(t), std::sin(t), 0.0, 0.0});
      q.direction_weights_.push_back(2.0 * pi / n);
    }
  } else {
    const int nt = n / 2;
    auto [u, wu] = gauss_legendre(nt);
    for (int i = 0; i < nt; ++i) {
      // t = cos^2 theta turns c s dtheta into dt / 2.
      const double t = u[i];
      const double c = std::sqrt(t), s = std::sqrt(1.0 - t);
      const double wt = 0.5 * wu[i];
      for (int a = 0; a < n; ++a) {
        const double p1 = 2.0 * pi * a / n;
        for (int b = 0; b < n; ++b) {
          const double p2 = 2.0 * pi * b / n;
          q.directions_.push_back({c * std::cos(p1), c * std::sin(p1), s * std::cos(p2), s * std::sin(p2)});
          q.direction_weights_.push_back(wt * (2.0 * pi / n) * (2.0 * pi / n));
        }
      }
    }
  }
  q.radii_ = {r};
  q.radial_weights_ = {std::pow(r, 2 * m - 1)};
  return q;
}

QuadratureRule ball_rule(int m, const BasePoint& center, double r, int n_r, int n_s, int grading) {
  if (n_r < 4) throw std::invalid_argument("ball_rule: n_r must be at least 4");
  if (grading < 1) throw std::invalid_argument("ball_rule: grading must be positive");
  QuadratureRule q = sphere_rule(m, center, r, n_s);
  q.kind_ = RuleKind::Ball;
  auto [u, wu] = gauss_legendre(n_r);
  q.radii_.resize(n_r);
  q.radial_weights_.resize(n_r);
  for (int j = 0; j < n_r; ++j) {
    const double t = r * std::pow(u[j], grading);
    q.radii_[j] = t;
    // t^{2m-1} dt with dt = r * grading * u^{grading-1} du
    q.radial_weights_[j] = wu[j] * std::pow(t, 2 * m - 1) * r * grading * std::pow(u[j], grading - 1);
  }
  return q;
}

double coarea_check(const std::function<cplx(const BasePoint&)>& integrand, int m, double r, int n) {
  const int n_r = m == 1 ? 64 : 32;
  const cplx ball = ball_rule(m, {}, r, n_r, n).integrate(integrand);
  auto [u, wu] = gauss_legendre(n_r + 3);
  std::vector<cplx> shells(u.size());
  for (std::size_t j = 0; j < u.size(); ++j)
    shells[j] = r * wu[j] * sphere_rule(m, {}, r * u[j], n).integrate(integrand);
  return std::abs(ball - pairwise_sum(shells));
}

}  // namespace semiharm
