#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "semiharm/covering.hpp"
#include "semiharm/errors.hpp"
#include "semiharm/field.hpp"
#include "semiharm/fields.hpp"

using namespace semiharm;

namespace {

double max_diff(const Gradient& a, const Gradient& b, int m) {
  double d = 0.0;
  for (int i = 0; i < 2 * m; ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("gradient examples") {
  const auto id = CoveringMap::identity(1);
  const auto x = id.point_over({cplx(0.3, -0.4)});
  CHECK(max_diff(gradient(id, ScalarField::from_expression("re(z1)", 1), x), {1.0, 0.0, 0.0, 0.0}, 1) < 1e-12);

  const auto one = id.point_over({cplx(1.0)});
  CHECK(max_diff(gradient(id, ScalarField::norm2_from({}, 1), one), {2.0, 0.0, 0.0, 0.0}, 1) < 1e-12);
  const auto fd = ScalarField::norm2_from({}, 1).without_partials();
  CHECK(max_diff(gradient(id, fd, one), {2.0, 0.0, 0.0, 0.0}, 1) < 1e-8);

  const auto sq = CoveringMap::from_polynomial(1, "w^2 - z1");
  const auto y = sq.point({cplx(1.0)}, 1.0);
  const auto rew = ScalarField::from_expression("re(w)", 1);
  CHECK(max_diff(gradient(sq, rew, y), {0.5, 0.0, 0.0, 0.0}, 1) < 1e-12);
  CHECK(max_diff(gradient(sq, rew.without_partials(), y), {0.5, 0.0, 0.0, 0.0}, 1) < 1e-8);
  const auto y2 = sq.point({cplx(1.0)}, -1.0);
  CHECK(max_diff(gradient(sq, rew, y2), {-0.5, 0.0, 0.0, 0.0}, 1) < 1e-12);
}

TEST_CASE("analytic partials agree with finite differences") {
  const auto sq = CoveringMap::from_polynomial(1, "w^2 - z1");
  for (const char* e : {"re(w)*abs2(z1)", "im(w^3) + re(z1*w)", "log(abs2(w + 3))", "abs2(w)^2"})
    CHECK(validate_partials(sq, ScalarField::from_expression(e, 1)) < 1e-4);
  const auto m2 = CoveringMap::from_polynomial(2, "w^2 - z1*z2");
  CHECK(validate_partials(m2, ScalarField::from_expression("re(z1)*im(w) + abs2(z2)", 2)) < 1e-4);
}

TEST_CASE("gradient near the branch locus") {
  const auto sq = CoveringMap::from_polynomial(1, "w^2 - z1");
  const auto f = ScalarField::from_expression("re(w)", 1).without_partials();
  CHECK_THROWS_AS(gradient(sq, f, sq.point({cplx(1e-9)}, std::sqrt(cplx(1e-9)))), BranchJump);
}

TEST_CASE("radial derivative examples") {
  const auto id = CoveringMap::identity(1);
  const auto a = id.point_over({cplx(0.2, 0.1)});
  const auto x = id.point_over({cplx(0.7, -0.3)});
  const double rho = std::abs(x.base[0] - a.base[0]);
  CHECK(std::abs(radial_derivative(id, ScalarField::norm2_from(a.base, 1), a, x) - 2.0 * rho) < 1e-12);
  CHECK(std::abs(radial_derivative(id, ScalarField::constant(4.0), a, x)) == 0.0);
  const auto o = id.point_over({});
  const auto logf = ScalarField::from_expression("log(abs2(z1))", 1);
  const auto y = id.point_over({cplx(0.0, 0.25)});
  CHECK(std::abs(radial_derivative(id, logf, o, y) - 2.0 / 0.25) < 1e-12);
  CHECK_THROWS_AS(radial_derivative(id, logf, o, o), DegenerateRadius);
}

TEST_CASE("Euler fields") {
  const auto id = CoveringMap::identity(1);
  const auto o = id.point_over({});
  const auto x = id.point_over({cplx(0.4, 0.3)});
  CHECK(std::abs(euler_dbar_apply(id, ScalarField::from_expression("z1^3 + 2*z1", 1), o, x)) < 1e-12);
  CHECK(std::abs(euler_dbar_apply(id, ScalarField::from_expression("conj(z1)", 1), o, x) - std::conj(x.base[0])) < 1e-12);
  const auto a = id.point_over({cplx(-0.1, 0.2)});
  const double r2 = std::norm(x.base[0] - a.base[0]);
  CHECK(std::abs(euler_dbar_apply(id, ScalarField::norm2_from(a.base, 1), a, x) - r2) < 1e-12);
  CHECK(std::abs(euler_d_apply(id, ScalarField::norm2_from(a.base, 1), a, x) - r2) < 1e-12);
}

TEST_CASE("partial gradient splits into Euler parts") {
  const auto m2 = CoveringMap::from_polynomial(2, "w^2 - z1*z2");
  const auto g = ScalarField::from_expression("re(z1*w) + abs2(z2)", 2);
  const auto f = ScalarField::from_expression("im(w^3) + re(z1)*abs2(w)", 2);
  for (const auto& z : sample_base_points(m2, 20, 5)) {
    const auto x = m2.point_over(z);
    const cplx lhs = directional_gradient(m2, g, f, x);
    cplx sum = 0.0;
    for (int k = 0; k < 2; ++k) sum += partial_gradient(m2, g, f, k, x);
    const cplx rhs = euler_apply(m2, g, f, x) + euler_bar_apply(m2, g, f, x);
    CHECK(std::abs(lhs - sum) < 1e-8);
    CHECK(std::abs(lhs - rhs) < 1e-8);
  }
}

TEST_CASE("dbar-Neumann derivative") {
  const auto id = CoveringMap::identity(1);
  const auto rho = DefiningFunction::sphere({}, 1.0, 1);
  const auto x = id.point_over({cplx(1.0)});
  CHECK(std::abs(dbar_neumann(id, ScalarField::constant(2.0), rho, x)) < 1e-14);
  const auto zbar = ScalarField::from_expression("conj(z1)", 1);
  CHECK(std::abs(dbar_neumann(id, zbar, rho, x) - 1.0) < 1e-12);
  CHECK(std::abs(dbar_neumann(id, zbar, rho.scaled(2.0), x) - dbar_neumann(id, zbar, rho, x)) < 1e-10);
  CHECK_THROWS_AS(dbar_neumann(id, zbar, rho, id.point_over({cplx(0.5)})), NotOnBoundary);
  const DefiningFunction flat{ScalarField::constant(0.0)};
  CHECK_THROWS_AS(dbar_neumann(id, zbar, flat, x), VanishingGradient);
}

TEST_CASE("normal derivative") {
  const auto id = CoveringMap::identity(2);
  const double r = 0.7;
  const auto rho = DefiningFunction::sphere({}, r, 2);
  const BasePoint z{cplx(0.3, 0.2), cplx(0.0, 0.0)};
  const double s = std::sqrt(norm2(z, 2));
  const BasePoint b{z[0] * (r / s), z[1] * (r / s)};
  const auto x = id.point_over(b);
  CHECK(std::abs(normal_derivative(id, ScalarField::norm2_from({}, 2), rho, x) - 2.0 * r) < 1e-12);
  CHECK(std::abs(normal_derivative(id, ScalarField::constant(1.0), rho, x)) < 1e-14);

  // H = x1^2 x2 - x2^3/3 is harmonic of degree 3; on the unit circle d_nu H = 3 H.
  const auto id1 = CoveringMap::identity(1);
  const auto H = ScalarField::from_expression("re(z1)^2*im(z1) - im(z1)^3/3", 1);
  const auto unit = DefiningFunction::sphere({}, 1.0, 1);
  for (double t : {0.3, 1.1, 2.5}) {
    const auto y = id1.point_over({std::polar(1.0, t)});
    CHECK(std::abs(normal_derivative(id1, H, unit, y) - 3.0 * H(y)) < 1e-12);
  }
}

TEST_CASE("pulled-back Laplacian") {
  const auto id = CoveringMap::identity(1);
  const auto x = id.point_over({cplx(0.3, 0.1)});
  CHECK(std::abs(laplacian(id, ScalarField::norm2_from({}, 1), x) - 4.0) < 1e-6);
  CHECK(std::abs(laplacian(id, ScalarField::from_expression("re(z1^3)", 1), x)) < 1e-6);
  const auto sq = CoveringMap::from_polynomial(1, "w^2 - z1");
  const auto y = sq.point_over({cplx(0.8, 0.3)});
  CHECK(std::abs(laplacian(sq, ScalarField::from_expression("im(w^3)", 1), y)) < 1e-6);
  CHECK(std::abs(laplacian(sq, ScalarField::from_expression("abs2(w)", 1), y)) > 0.1);
}
