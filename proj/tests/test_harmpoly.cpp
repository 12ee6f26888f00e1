#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "semiharm/covering.hpp"
#include "semiharm/errors.hpp"
#include "semiharm/harmpoly.hpp"

using namespace semiharm;

namespace {

oracle::Poly to_oracle(const HomoPoly& p) {
  oracle::Poly out;
  for (const auto& [e, c] : p.coeffs()) out[e] = c;
  return out;
}

}  // namespace

TEST_CASE("parsing and printing") {
  const auto p = HomoPoly::parse("x1^2 - 1/2*x2^2");
  CHECK(p.n() == 2);
  CHECK(p.degree() == 2);
  CHECK(p.coefficient({0, 2}) == mpq_class(-1, 2));
  CHECK(HomoPoly::parse(p.to_string()) == p);
  CHECK(HomoPoly::parse("x1^2", 4).n() == 4);
  CHECK_THROWS_AS(HomoPoly::parse("x1^2 + x2"), ParseError);
  CHECK_THROWS_AS(HomoPoly::parse("x3^2", 2), ParseError);
}

TEST_CASE("Laplacian examples") {
  CHECK(laplacian(HomoPoly::parse("x1^2", 2)) == HomoPoly::constant(2, 2));
  CHECK(laplacian(HomoPoly::parse("x1^2 - x2^2")).is_zero());
  CHECK(laplacian(HomoPoly::parse("x1^4", 2)) == HomoPoly::parse("12*x1^2", 2));
  CHECK(laplacian(HomoPoly::parse("x1", 2)).is_zero());
}

TEST_CASE("decomposition examples") {
  const auto d = harmonic_decompose(HomoPoly::parse("x1^2", 2));
  CHECK(d.h0() == mpq_class(1, 2));
  CHECK(d.part(2) == HomoPoly::parse("1/2*x1^2 - 1/2*x2^2"));
  CHECK(d.reconstruct() == HomoPoly::parse("x1^2", 2));

  const auto h = HomoPoly::parse("x1^3 - 3*x1*x2^2");
  const auto dh = harmonic_decompose(h);
  REQUIRE(dh.parts.size() == 1);
  CHECK(dh.parts[0].j == 3);
  CHECK(dh.parts[0].h == h);

  const auto n4 = harmonic_decompose(HomoPoly::norm2_power(4, 1));
  REQUIRE(n4.parts.size() == 1);
  CHECK(n4.parts[0].j == 0);
  CHECK(n4.h0() == 1);
}

TEST_CASE("random polynomials decompose exactly") {
  std::mt19937_64 rng(20070703);
  int count = 0;
  for (int n : {2, 4})
    for (int l = 0; l <= 8; ++l)
      for (int t = 0; t < 3; ++t) {
        const auto P = random_homopoly(n, l, rng);
        const auto d = harmonic_decompose(P);
        CHECK(d.reconstruct() == P);
        oracle::Poly sum;
        for (const auto& part : d.parts) {
          CHECK(part.h.degree() == part.j);
          CHECK((l - part.j) % 2 == 0);
          CHECK(laplacian(part.h).is_zero());
          CHECK(oracle::laplacian(to_oracle(part.h)).empty());
          CHECK(euler_defect(part.h).is_zero());
          for (const auto& [e, c] : oracle::mul(oracle::norm2_power(n, (l - part.j) / 2), to_oracle(part.h))) sum[e] += c;
        }
        oracle::prune(sum);
        CHECK(sum == to_oracle(P));
        ++count;
      }
  CHECK(count == 54);
}

TEST_CASE("decomposition matches the brute-force linear solve") {
  std::mt19937_64 rng(17);
  for (int n : {2, 4})
    for (int l = 0; l <= (n == 2 ? 8 : 5); ++l) {
      const auto P = random_homopoly(n, l, rng);
      const auto ref = oracle::decompose(to_oracle(P), n, l);
      const auto d = harmonic_decompose(P);
      CHECK(d.parts.size() == ref.size());
      for (const auto& part : d.parts) CHECK(to_oracle(part.h) == ref.at(part.j));
    }
}

TEST_CASE("decomposition is idempotent") {
  std::mt19937_64 rng(3);
  for (int l = 1; l <= 6; ++l) {
    const auto P = random_homopoly(4, l, rng);
    const auto d1 = harmonic_decompose(P);
    const auto d2 = harmonic_decompose(d1.reconstruct());
    REQUIRE(d1.parts.size() == d2.parts.size());
    for (std::size_t i = 0; i < d1.parts.size(); ++i) {
      CHECK(d1.parts[i].j == d2.parts[i].j);
      CHECK(d1.parts[i].h == d2.parts[i].h);
    }
  }
}

TEST_CASE("sphere integrals") {
  const auto x2 = HomoPoly::parse("x1^2", 2);
  CHECK(sphere_integral_homogeneous(x2, 1).coeff == mpq_class(1, 2));
  CHECK(sphere_integral_homogeneous(x2, 1).pi_power == 1);
  CHECK(sphere_integral_truth(x2, 1).value() == doctest::Approx(pi).epsilon(1e-15));
  CHECK(sphere_integral_homogeneous(HomoPoly::parse("x1^3", 2), 1).coeff == 0);
  CHECK(sphere_integral_homogeneous(HomoPoly::constant(2, 1), 3).value() == doctest::Approx(3.0 * pi));
  CHECK(sphere_integral_truth(HomoPoly::constant(2, 1), 3).value() == doctest::Approx(6.0 * pi));

  // Truth against the Gamma-function moments in four variables.
  const auto q = HomoPoly::parse("x1^2*x4^2 - 3*x2^4 + x3^2*x1^2", 4);
  double ref = 0.0;
  for (const auto& [e, c] : q.coeffs()) ref += c.get_d() * oracle::sphere_moment(e);
  CHECK(sphere_integral_truth(q, 1).value() == doctest::Approx(ref).epsilon(1e-14));
}

TEST_CASE("Neumann example") {
  const auto id = CoveringMap::identity(1);
  auto rep = neumann_example_check(HomoPoly::parse("x1^2", 2), id);
  CHECK(rep["boundary_residual"].get<double>() < 1e-8);
  rep = neumann_example_check(HomoPoly::parse("x1^3 - 3*x1*x2^2"), id);
  CHECK(rep["boundary_residual"].get<double>() < 1e-8);
  const auto sq = CoveringMap::from_polynomial(1, "w^2 - z1");
  rep = neumann_example_check(HomoPoly::parse("x1^2", 2), sq);
  CHECK(rep["boundary_residual"].get<double>() < 1e-6);
  CHECK(rep["sheets"].get<int>() == 2);
}
