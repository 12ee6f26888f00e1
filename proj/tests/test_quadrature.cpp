#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "semiharm/quadrature.hpp"

using namespace semiharm;

namespace {

double monomial(const std::vector<int>& a, const BasePoint& z) {
  const RealPoint x = to_real(z);
  double v = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) v *= std::pow(x[i], a[i]);
  return v;
}

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

TEST_CASE("normalization constants") {
  CHECK(sphere_area(1) == doctest::Approx(2.0 * pi).epsilon(1e-15));
  CHECK(sphere_area(2) == doctest::Approx(2.0 * pi * pi).epsilon(1e-15));
  CHECK(ball_volume(1) == doctest::Approx(pi).epsilon(1e-15));
  CHECK(ball_volume(2) == doctest::Approx(pi * pi / 2.0).epsilon(1e-15));
}

TEST_CASE("sphere and ball rule examples") {
  const auto one = [](const BasePoint&) { return cplx(1.0); };
  const auto x2 = [](const BasePoint& z) { return cplx(z[0].real() * z[0].real()); };
  const auto r2 = [](const BasePoint& z) { return cplx(std::norm(z[0])); };
  CHECK(std::abs(sphere_rule(1, {}, 1.0, 256).integrate(one) - 2.0 * pi) < 1e-13);
  CHECK(std::abs(sphere_rule(1, {}, 1.0, 256).integrate(x2) - pi) < 1e-13);
  CHECK(std::abs(sphere_rule(2, {}, 1.0, 48).integrate(one) - 2.0 * pi * pi) < 1e-12);
  CHECK(std::abs(ball_rule(1, {}, 1.0, 64, 256).integrate(one) - pi) < 1e-13);
  CHECK(std::abs(ball_rule(1, {}, 1.0, 64, 256).integrate(r2) - pi / 2.0) < 1e-13);
  CHECK(std::abs(ball_rule(2, {}, 1.0, 32, 48).integrate(one) - pi * pi / 2.0) < 1e-12);
}

TEST_CASE("rules reproduce monomial moments") {
  for (int m : {1, 2}) {
    const int n = 2 * m;
    const auto s = sphere_rule(m, {}, 1.0, m == 1 ? 64 : 12);
    const auto b = ball_rule(m, {}, 1.0, 8, m == 1 ? 64 : 12);
    for (int d = 0; d <= 8; ++d)
      for (const auto& a : oracle::monomials(n, d)) {
        const auto f = [&](const BasePoint& z) { return cplx(monomial(a, z)); };
        CHECK(std::abs(s.integrate(f).real() - oracle::sphere_moment(a)) < 1e-13);
        CHECK(std::abs(b.integrate(f).real() - oracle::ball_moment(a)) < 1e-13);
      }
  }
}

TEST_CASE("weights and nodes") {
  for (int m : {1, 2})
    for (double r : {0.2, 1.0, 1.9}) {
      const BasePoint c{cplx(0.3, -0.2), cplx(m == 2 ? -0.5 : 0.0, 0.1 * (m - 1))};
      const auto s = sphere_rule(m, c, r, 16);
      const auto b = ball_rule(m, c, r, 8, 16);
      const double sa = sphere_area(m) * std::pow(r, 2 * m - 1), bv = ball_volume(m) * std::pow(r, 2 * m);
      CHECK(std::abs(sum(s.weights()) - sa) / sa < 1e-12);
      CHECK(std::abs(sum(b.weights()) - bv) / bv < 1e-12);
      for (const auto& x : s.nodes()) CHECK(std::abs(distance(to_base(x), c, m) - r) < 1e-12);
      for (double w : b.weights()) CHECK(w > 0.0);
      CHECK(s.size() == s.weights().size());
    }
}

TEST_CASE("graded radial rule keeps the moments") {
  const auto b = ball_rule(1, {}, 1.0, 32, 64, 3);
  const std::vector<int> a{2, 4};
  const auto f = [&](const BasePoint& z) { return cplx(monomial(a, z)); };
  CHECK(std::abs(b.integrate(f).real() - oracle::ball_moment(a)) < 1e-10);
}

TEST_CASE("coarea") {
  CHECK(coarea_check([](const BasePoint&) { return cplx(1.0); }, 1, 1.0, 16) < 1e-12);
  CHECK(coarea_check([](const BasePoint& z) { return cplx(std::norm(z[0])); }, 1, 1.0, 16) < 1e-10);
  CHECK(coarea_check([](const BasePoint& z) { return cplx(z[0].real() * z[0].real()); }, 2, 1.0, 16) < 1e-8);
}

TEST_CASE("Gauss-Legendre nodes") {
  const auto [x, w] = gauss_legendre(10);
  CHECK(sum(w) == doctest::Approx(1.0).epsilon(1e-15));
  double m19 = 0.0;
  for (int i = 0; i < 10; ++i) m19 += w[i] * std::pow(x[i], 19);
  CHECK(m19 == doctest::Approx(1.0 / 20.0).epsilon(1e-14));
}
