#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "semiharm/errors.hpp"
#include "semiharm/scenario.hpp"
#include "semiharm/verify.hpp"

using namespace semiharm;
using nlohmann::json;

TEST_CASE("scenario parsing") {
  const auto sc = Scenario::from_json(json::parse(R"j({
    "operation": "means",
    "covering": {"m": 1, "fiber_degree": 2, "coeffs": {"w^0": "-z1"}, "base_center": [0, 0], "base_radius": 2},
    "field": "re(w)",
    "centers": [[0.5, 0], {"base": [0.5, 0], "fiber": [0.7071067811865476, 0]}],
    "radii": [0.1, 0.2],
    "nodes": {"sphere": 64, "radial": 16},
    "tol": 1e-9,
    "seed": 9
  })j"));
  CHECK(sc.operation == Operation::Means);
  CHECK(sc.fields == std::vector<std::string>{"re(w)"});
  CHECK(sc.nodes.sphere == 64);
  CHECK(sc.nodes.radial == 16);
  CHECK(*sc.tol == 1e-9);
  CHECK(sc.seed == 9u);
  const auto cov = sc.build_covering();
  CHECK(cov.degree() == 2);
  const auto pts = sc.resolve_centers(cov);
  REQUIRE(pts.size() == 2);
  CHECK(std::abs(pts[1].fiber - std::sqrt(0.5)) < 1e-12);
  CHECK_NOTHROW(sc.validate_geometry(cov, pts));
}

TEST_CASE("scenario rejections") {
  CHECK_THROWS_AS(Scenario::from_json(json::parse(R"({"radius": 1})")), ConfigError);
  CHECK_THROWS_AS(Scenario::from_json(json::parse(R"({"operation": "integrate"})")), ConfigError);
  CHECK_THROWS_AS(Scenario::from_json(json::parse(R"({"tol": 0})")), ConfigError);
  CHECK_THROWS_AS(Scenario::from_json(json::parse(R"({"tol": -1e-6})")), ConfigError);
  CHECK_THROWS_AS(Scenario::from_json(json::parse(R"({"radii": [0.1, -0.2]})")), ConfigError);
  CHECK_THROWS_AS(Scenario::from_json(json::parse(R"({"nodes": 4})")), ConfigError);
  CHECK_THROWS_AS(Scenario::from_json(json::parse(R"({"nodes": {"polar": 8}})")), ConfigError);
  CHECK_THROWS_AS(Scenario::from_json(json::parse(R"({"centers": [{"base": [0, 0], "sheet": 1}]})")), ConfigError);
  CHECK_THROWS_AS(Scenario::from_json(json::parse(R"([1, 2])")), ConfigError);

  auto sc = Scenario::from_json(json::parse(R"({"radii": [2.0]})"));
  const auto cov = sc.build_covering();
  CHECK_THROWS_AS(sc.validate_geometry(cov, sc.resolve_centers(cov)), ConfigError);
  sc = Scenario::from_json(json::parse(R"({"centers": [[1.0, 0]], "radii": [1.0]})"));
  CHECK_THROWS_AS(sc.validate_geometry(cov, sc.resolve_centers(cov)), ConfigError);

  sc = Scenario::from_json(json::parse(R"({"centers": [{"base": [0.5, 0], "fiber": [0.3, 0]}]})"));
  sc.fiber_polynomial = "w^2 - z1";
  CHECK_THROWS_AS(sc.resolve_centers(sc.build_covering()), ConfigError);
}

TEST_CASE("covering shorthand and non-monic input") {
  Scenario sc;
  sc.fiber_polynomial = "w^3 - z1";
  CHECK(sc.build_covering().degree() == 3);
  sc.fiber_polynomial = "2*w^3 - z1";
  CHECK_THROWS_AS(sc.build_covering(), Error);
  const auto bad = Scenario::from_json(json::parse(
      R"({"covering": {"m": 1, "fiber_degree": 1, "coeffs": {"w^1": "3", "w^0": "-z1"}, "base_center": [0, 0], "base_radius": 1}})"));
  CHECK_THROWS_AS(bad.build_covering(), InvalidCovering);
}

TEST_CASE("base point text") {
  const auto z = parse_base_point("0.5, -1,2,3", 2);
  CHECK(z[0] == cplx(0.5, -1.0));
  CHECK(z[1] == cplx(2.0, 3.0));
  CHECK_THROWS_AS(parse_base_point("0.5", 1), ConfigError);
  CHECK_THROWS_AS(parse_base_point("a,b", 1), ConfigError);
}

TEST_CASE("operations round trip") {
  for (auto op : {Operation::Means, Operation::Residue, Operation::Classify, Operation::Decompose, Operation::Neumann,
                  Operation::Verify})
    CHECK(parse_operation(to_string(op)) == op);
}

TEST_CASE("parallel_for covers every index and rethrows the first error") {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_WITH(parallel_for(10, 3,
                                 [](std::size_t i) {
                                   if (i == 3 || i == 7) throw std::runtime_error(std::to_string(i));
                                 }),
                    "3");
}

TEST_CASE("traceability lists every suite") {
  const auto ids = verify_traceability();
  CHECK(ids.size() == 31);
  for (const char* module : {"covering", "fields", "quadrature", "means", "residue", "harmpoly", "classify", "cli",
                             "calibration"})
    CHECK(std::any_of(ids.begin(), ids.end(), [&](const auto& p) { return p.second == module; }));
}
