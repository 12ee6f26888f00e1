#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "semiharm/covering.hpp"
#include "semiharm/errors.hpp"
#include "semiharm/field.hpp"
#include "semiharm/residue.hpp"

using namespace semiharm;

namespace {

ScalarField singular(double alpha, double s, int m, const std::string& h = "1") {
  std::string e = "radial_singular(" + format_double(alpha) + ", " + format_double(s) + (m == 1 ? ", 0" : ", 0, 0");
  return ScalarField::from_expression(e + ", " + h + ")", m);
}

}  // namespace

TEST_CASE("closed forms") {
  CHECK(std::abs(residue_closed_form(1, 1.0, 0.0, 0.5, 1, 1.0) - (-1.0)) < 1e-15);
  CHECK(std::abs(residue_closed_form(1, 0.0, 0.0, 0.5, 1, 1.0)) == 0.0);
  CHECK(std::abs(residue_closed_form(1, 0.0, 2.0, 0.5, 1, 1.0) - 4.0) < 1e-12);
  CHECK(std::abs(residue_closed_form(2, 0.0, 0.0, 0.7, 1, 1.0) - 1.0) < 1e-15);
  CHECK_THROWS_AS(residue_closed_form(1, 0.5, 0.0, 1.0, 1, 1.0), LogSingularity);
}

TEST_CASE("log residue on the identity covering") {
  const auto id = CoveringMap::identity(1);
  const auto o = id.point_over({});
  for (double r : {0.2, 0.3, 0.5, 1.3})
    CHECK(std::abs(harmonic_residue(id, ScalarField::from_expression("log(abs2(z1))", 1), o, r) - (-1.0)) < 1e-12);
}

TEST_CASE("one-dimensional family matches the closed form") {
  const auto id = CoveringMap::identity(1);
  const auto o = id.point_over({});
  for (double alpha : {0.0, 1.0})
    for (double s : {0.0, 2.0})
      for (double r : {0.2, 0.3, 0.5}) {
        const cplx got = harmonic_residue(id, singular(alpha, s, 1), o, r);
        CHECK(std::abs(got - residue_closed_form(1, alpha, s, r, 1, 1.0)) < 1e-8);
      }
}

TEST_CASE("two-dimensional residue") {
  const auto id = CoveringMap::identity(2);
  const auto o = id.point_over({});
  for (double r : {0.3, 0.5})
    CHECK(std::abs(harmonic_residue(id, ScalarField::from_expression("1/(abs2(z1) + abs2(z2))", 2), o, r) - 1.0) <
          1e-5);
  const double r = 0.5;
  const auto sq = CoveringMap::from_polynomial(2, "w^2 - z1");
  const auto a = sq.annotate(sq.point({}, 0.0));
  REQUIRE(sq.multiplicity(a) == 2);
  const cplx got = harmonic_residue(sq, singular(1.0, 2.0, 2, "3"), a, r, {24, 24});
  CHECK(std::abs(got - residue_closed_form(2, 1.0, 2.0, r, 2, 3.0)) < 1e-5);
}

TEST_CASE("pullback doubles the residue at a branch point") {
  const auto id = CoveringMap::identity(1);
  const auto sq = CoveringMap::from_polynomial(1, "w^2 - z1");
  const auto a = sq.annotate(sq.point({}, 0.0));
  for (double alpha : {0.0, 1.0})
    for (double s : {0.0, 2.0}) {
      const auto f = singular(alpha, s, 1);
      const cplx base = harmonic_residue(id, f, id.point_over({}), 0.3);
      CHECK(std::abs(harmonic_residue(sq, f, a, 0.3) - 2.0 * base) < 1e-5);
    }
}

TEST_CASE("residue scans") {
  const auto id = CoveringMap::identity(1);
  const auto o = id.point_over({});
  const std::vector<double> radii{0.2, 0.3, 0.5};
  auto scan = residue_scan(id, ScalarField::from_expression("re(z1)", 1), o, radii, 1e-9);
  CHECK(scan.semi_harmonic_candidate);
  CHECK(scan.max_abs < 1e-9);

  scan = residue_scan(id, ScalarField::from_expression("abs2(z1)", 1), o, radii, 1e-9);
  CHECK_FALSE(scan.semi_harmonic_candidate);
  for (std::size_t i = 0; i < radii.size(); ++i) CHECK(std::abs(scan.values[i] + radii[i] * radii[i]) < 1e-10);

  scan = residue_scan(id, ScalarField::from_expression("log(abs2(z1))", 1), o, radii, 1e-9);
  CHECK_FALSE(scan.semi_harmonic_candidate);
  CHECK(scan.spread < 1e-8);
}

TEST_CASE("semi-harmonic fields have zero residue at regular points") {
  const auto sq = CoveringMap::from_polynomial(1, "w^2 - z1");
  for (const char* e : {"re(w)", "im(w^3) + re(z1*w)", "log(abs2(w + 3))"})
    for (const auto& z : {BasePoint{cplx(0.8)}, BasePoint{cplx(-0.4, 0.7)}}) {
      const auto a = sq.point_over(z);
      CHECK(std::abs(harmonic_residue(sq, ScalarField::from_expression(e, 1), a, 0.3)) < 1e-8);
    }
}

TEST_CASE("degenerate radius") {
  const auto id = CoveringMap::identity(1);
  CHECK_THROWS_AS(harmonic_residue(id, ScalarField::constant(1.0), id.point_over({}), 0.0), DegenerateRadius);
}
