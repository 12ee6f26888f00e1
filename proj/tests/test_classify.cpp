#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "semiharm/classify.hpp"
#include "semiharm/covering.hpp"
#include "semiharm/field.hpp"
#include "semiharm/verify.hpp"

using namespace semiharm;

namespace {

const std::vector<double> kRadii{0.1, 0.2};

ClassificationReport run(const CoveringMap& cov, const std::string& e, std::vector<BasePoint> zs,
                         const QuadratureSizes& q = {}) {
  std::vector<CoverPoint> centers;
  for (const auto& z : zs) centers.push_back(cov.annotate(cov.point_over(z)));
  return classify(cov, ScalarField::from_expression(e, cov.m()), centers, kRadii, 1e-6, q);
}

}  // namespace

TEST_CASE("grading") {
  CHECK(grade(1e-7, 1e-6) == Outcome::Pass);
  CHECK(grade(5e-6, 1e-6) == Outcome::Inconclusive);
  CHECK(grade(9e-6, 1e-6) == Outcome::Inconclusive);
  CHECK(grade(2e-5, 1e-6) == Outcome::Fail);
}

TEST_CASE("classifier examples") {
  const auto sq = CoveringMap::from_polynomial(1, "w^2 - z1");
  const auto rep = run(sq, "re(w)", {BasePoint{}, BasePoint{cplx(0.5)}, BasePoint{cplx(-0.3, 0.4)}});
  CHECK(rep.verdict == Verdict::SemiHarmonic);
  CHECK(rep.centers[0].nu == 2);
  for (const auto& c : rep.centers) CHECK(c.coherent());

  const auto id = CoveringMap::identity(1);
  const auto bad = run(id, "abs2(z1)", {BasePoint{}});
  CHECK(bad.verdict == Verdict::NotSemiHarmonic);
  CHECK(bad.centers[0].solid_deviation == doctest::Approx(0.02).epsilon(1e-6));

  const auto id2 = CoveringMap::identity(2);
  const auto ph = run(id2, "re(z1*z2)", {BasePoint{}, BasePoint{cplx(0.2), cplx(0.0, 0.3)}}, {16, 16});
  CHECK(ph.verdict == Verdict::SemiHarmonic);
}

TEST_CASE("catalog verdicts on the square-root covering") {
  const auto sq = CoveringMap::from_polynomial(1, "w^2 - z1");
  for (const auto& f : catalog::classifier_fields()) {
    const auto rep = run(sq, f.expr, catalog::classifier_centers());
    CHECK_MESSAGE(rep.verdict == (f.semi_harmonic ? Verdict::SemiHarmonic : Verdict::NotSemiHarmonic), f.expr);
    for (const auto& c : rep.centers) CHECK_MESSAGE(c.coherent(), f.expr);
  }
}

TEST_CASE("report JSON") {
  const auto id = CoveringMap::identity(1);
  const auto j = run(id, "re(z1)", {BasePoint{}}).to_json();
  CHECK(j["verdict"] == "semi-harmonic");
  CHECK(j["centers"].size() == 1);
  CHECK(j["radii"].size() == 2);
}

TEST_CASE("maximum principle audit") {
  const auto id = CoveringMap::identity(1);
  const auto o = id.point_over({});
  CHECK(max_principle_audit(id, ScalarField::from_expression("re(z1)", 1), o, 1.0, 16).outcome == AuditOutcome::Pass);
  const auto neg = max_principle_audit(id, ScalarField::from_expression("-abs2(z1)", 1), o, 1.0, 16);
  CHECK(neg.outcome == AuditOutcome::HypothesisViolated);
  const auto sq = CoveringMap::from_polynomial(1, "w^2 - z1");
  CHECK(max_principle_audit(sq, ScalarField::from_expression("re(w)", 1), sq.point({}, 0.0), 1.0, 16).outcome ==
        AuditOutcome::Pass);
}

TEST_CASE("Dirichlet orthogonality") {
  const auto id = CoveringMap::identity(1);
  const auto a = id.point_over({cplx(0.2, 0.1)});
  CHECK(orthogonality_test(id, ScalarField::from_expression("re(z1)", 1), a, 0.5) < 1e-8);
  CHECK(orthogonality_test(id, ScalarField::constant(2.0), a, 0.5) < 1e-14);
  const auto o = id.point_over({});
  CHECK(orthogonality_test(id, ScalarField::from_expression("abs2(z1)", 1), o, 0.5) ==
        doctest::Approx(std::pow(0.5, 4) / 2.0).epsilon(1e-8));
}
