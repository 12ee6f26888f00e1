#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "semiharm/covering.hpp"
#include "semiharm/errors.hpp"
#include "semiharm/field.hpp"
#include "semiharm/means.hpp"
#include "semiharm/quadrature.hpp"

using namespace semiharm;

namespace {

const QuadratureSizes kSmall{16, 16};

}  // namespace

TEST_CASE("solid mean examples") {
  const auto one = ScalarField::constant(1.0);
  const auto id = CoveringMap::identity(1);
  CHECK(std::abs(solid_mean(id, one, id.point_over({}), 0.5) - 1.0) < 1e-12);
  const auto sq = CoveringMap::from_polynomial(1, "w^2 - z1");
  CHECK(std::abs(solid_mean(sq, one, sq.point({}, 0.0), 0.5) - 2.0) < 1e-12);
  const auto abs2 = ScalarField::from_expression("abs2(z1)", 1);
  for (double r : {0.2, 0.7, 1.0}) CHECK(std::abs(solid_mean(id, abs2, id.point_over({}), r) - r * r / 2.0) < 1e-12);
}

TEST_CASE("spherical mean examples") {
  const auto id = CoveringMap::identity(1);
  const auto o = id.point_over({});
  CHECK(std::abs(spherical_mean(id, ScalarField::constant(1.0), o, 0.4) - 1.0) < 1e-12);
  CHECK(std::abs(spherical_mean(id, ScalarField::from_expression("re(z1)", 1), o, 0.4)) < 1e-14);
  CHECK(std::abs(spherical_mean(id, ScalarField::from_expression("abs2(z1)", 1), o, 0.4) - 0.16) < 1e-12);
}

TEST_CASE("degree from means") {
  const auto one = ScalarField::constant(1.0);
  for (const auto& [m, text] : std::vector<std::pair<int, std::string>>{
           {1, "w - z1"}, {1, "w^2 - z1"}, {1, "w^3 - z1"}, {2, "w^2 - z1*z2"}}) {
    const auto cov = CoveringMap::from_polynomial(m, text);
    const auto a = cov.annotate(cov.point_over({}));
    for (double r : {0.3, 0.6, 1.2}) {
      const QuadratureSizes q = m == 1 ? QuadratureSizes{} : kSmall;
      CHECK(std::abs(solid_mean(cov, one, a, r, q) - double(cov.degree())) < 1e-8);
      CHECK(std::abs(spherical_mean(cov, one, a, r, q) - double(cov.degree())) < 1e-8);
    }
  }
}

TEST_CASE("mean value test") {
  const auto sq = CoveringMap::from_polynomial(1, "w^2 - z1");
  const std::vector<double> radii{0.1, 0.2, 0.4};
  auto res = mean_value_test(sq, ScalarField::from_expression("re(w)", 1), sq.point({}, 0.0), radii, 1e-8);
  CHECK(res.pass);
  CHECK(std::abs(res.target) < 1e-12);

  const auto id = CoveringMap::identity(1);
  res = mean_value_test(id, ScalarField::from_expression("abs2(z1)", 1), id.point_over({}), radii, 1e-8);
  CHECK_FALSE(res.pass);

  const BasePoint c{cplx(0.3, -0.6)};
  res = mean_value_test(id, ScalarField::from_expression("re(z1)", 1), id.point_over(c), radii, 1e-8);
  CHECK(res.pass);
  CHECK(std::abs(res.target - 0.3) < 1e-14);
}

TEST_CASE("Dirichlet product examples") {
  const auto id = CoveringMap::identity(1);
  const auto o = id.point_over({});
  const auto abs2 = ScalarField::from_expression("abs2(z1)", 1);
  const auto r2 = ScalarField::norm2_from({}, 1);
  CHECK(std::abs(dirichlet_product(id, ScalarField::constant(3.0), abs2, o, 0.8)) < 1e-14);
  for (double r : {0.5, 1.0}) CHECK(std::abs(dirichlet_product(id, abs2, r2, o, r) - std::pow(r, 4) / 2.0) < 1e-10);
  CHECK(std::abs(dirichlet_product(id, ScalarField::from_expression("re(z1)", 1), r2, o, 0.8)) < 1e-9);
}

TEST_CASE("mean gap identity") {
  const auto id = CoveringMap::identity(1);
  const auto rep = mean_gap_identity(id, ScalarField::from_expression("abs2(z1)", 1), id.point_over({}), 1.0);
  CHECK(std::abs(rep.gap - 0.5) < 1e-10);
  CHECK(std::abs(rep.dirichlet_term - 0.5) < 1e-10);
  CHECK(rep.identity_residual < 1e-9);

  const auto h = mean_gap_identity(id, ScalarField::from_expression("re(z1^3) - im(z1)", 1), id.point_over({}), 0.7);
  CHECK(std::abs(h.gap) < 1e-10);
  CHECK(std::abs(h.dirichlet_term) < 1e-10);

  const auto id2 = CoveringMap::identity(2);
  const auto rep2 = mean_gap_identity(id2, ScalarField::from_expression("re(z1^2)", 2), id2.point_over({}), 0.6, kSmall);
  CHECK(rep2.identity_residual < 1e-8);

  const auto sq = CoveringMap::from_polynomial(1, "w^2 - z1");
  const auto b = mean_gap_identity(sq, ScalarField::from_expression("abs2(w)*re(w) + im(w^3)", 1), sq.point({}, 0.0), 0.5);
  CHECK(b.nu == 2);
  CHECK(b.identity_residual < 1e-7);
}

TEST_CASE("Green's identity") {
  const auto id = CoveringMap::identity(1);
  const auto o = id.point_over({});
  const auto one = ScalarField::constant(1.0);
  const auto abs2 = ScalarField::from_expression("abs2(z1)", 1);
  CHECK(greens_residual(id, one, ScalarField::from_expression("re(z1^2)", 1), o, 1.0).residual < 1e-7);
  const auto g = greens_residual(id, one, abs2, o, 1.0);
  CHECK(g.residual < 1e-7);
  CHECK(std::abs(g.boundary) > 0.1);
  CHECK(greens_residual(id, ScalarField::from_expression("re(z1)", 1), abs2, o, 1.0).residual < 1e-7);
}

TEST_CASE("Hermitian symmetry of the Dirichlet product") {
  const auto sq = CoveringMap::from_polynomial(1, "w^2 - z1");
  const auto a = sq.point_over({cplx(0.9)});
  const auto eta = ScalarField::from_expression("re(w)*abs2(z1)", 1);
  const auto phi = ScalarField::from_expression("im(z1*w) + abs2(w)", 1);
  const cplx s = dirichlet_product(sq, eta, phi, a, 0.4) + dirichlet_product(sq, phi, eta, a, 0.4);
  CHECK(std::abs(s.imag()) < 1e-9);
}

TEST_CASE("regions must stay in the base ball") {
  const auto id = CoveringMap::identity(1);
  CHECK_THROWS_AS(solid_mean(id, ScalarField::constant(1.0), id.point_over({cplx(1.5)}), 0.6), RegionEscapesDomain);
}
