#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "semiharm/covering.hpp"
#include "semiharm/quadrature.hpp"

namespace semiharm {

enum class Operation { Means, Residue, Classify, Decompose, Neumann, Verify };

std::string to_string(Operation op);
/// Throws ConfigError for unknown names.
Operation parse_operation(const std::string& name);

/// A center is given by its base point; the fiber value is optional and defaults to the
/// first root cluster over the base point.
struct CenterSpec {
  BasePoint base{};
  std::optional<cplx> fiber;
};

/// One run of the command-line front end. Every key of the JSON form is optional except
/// where the operation needs it:
///   operation, covering, field, centers, radii, nodes {sphere, radial}, tol, out, seed,
///   jobs, alpha, s, h, polynomial, variables, samples
struct Scenario {
  std::optional<Operation> operation;
  std::optional<nlohmann::json> covering;
  /// Command-line shorthand for the covering: fiber polynomial text over the ball of radius 2.
  std::string fiber_polynomial;
  int m = 1;
  std::vector<std::string> fields;
  std::vector<CenterSpec> centers;
  std::vector<double> radii;
  QuadratureSizes nodes;
  std::optional<double> tol;
  std::string out;
  std::uint64_t seed = CoveringMap::kDefaultSeed;
  int jobs = 0;
  double alpha = 1.0;
  double s = 0.0;
  std::string h = "1";
  std::string polynomial;
  /// Number of real variables of the polynomial; 0 rounds the largest index up to even.
  int variables = 0;
  int samples = 200;

  /// Parses and validates; unknown keys and malformed values throw ConfigError naming the key.
  static Scenario from_json(const nlohmann::json& j);
  /// Reads a file; JSON syntax errors report the line and column.
  static Scenario load(const std::string& path);

  /// Builds the covering; the identity covering in dimension m over the ball of radius 2
  /// when none is given.
  CoveringMap build_covering() const;
  int dimension() const;
  /// Resolves the centers on `cov`; the base origin when none are given.
  std::vector<CoverPoint> resolve_centers(const CoveringMap& cov) const;
  /// Checks positive tolerances and radii strictly inside the base ball about every center.
  void validate_geometry(const CoveringMap& cov, const std::vector<CoverPoint>& centers) const;
};

/// Parses a center written as "x1,y1[,x2,y2]".
BasePoint parse_base_point(const std::string& text, int m);

}  // namespace semiharm
