#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "semiharm/covering.hpp"
#include "semiharm/quadrature.hpp"

namespace semiharm {

/// Runs fn(0..n-1) on `jobs` worker threads (0: hardware concurrency). Exceptions are
/// rethrown on the calling thread, lowest index first.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

/// Quadrature sizes used by the catalog suites: the defaults for m = 1, (16, 16) for m = 2.
QuadratureSizes catalog_sizes(int m);

struct CatalogField {
  std::string expr;
  bool semi_harmonic;
};

namespace catalog {

/// w - z1, w^2 - z1, w^3 - z1 over the ball of radius 2.
std::vector<CoveringMap> classifier_coverings();
/// Twelve continuous fields in z1 and w, with the expected classification.
std::vector<CatalogField> classifier_fields();
/// Harmonic polynomials of degree <= 4 in z1, pulled back.
std::vector<std::string> harmonic_pullbacks();
/// Branch point and two regular points over the base.
std::vector<BasePoint> classifier_centers();

/// Ten C^2 fields for the mean-gap identity in dimension m.
std::vector<std::string> mean_fields(int m);
/// w - z1 and w^2 - z1 (m = 1), w^2 - z1 z2 (m = 2).
std::vector<CoveringMap> mean_coverings();

}  // namespace catalog

struct SuiteResult {
  std::string id;
  std::string module;
  std::string property;
  bool pass = false;
  double worst = 0.0;
  double tol = 0.0;
  nlohmann::json detail;

  nlohmann::json to_json() const;
};

/// Measured normalization constants.
struct Calibration {
  /// Per covering: C * 2|S| where C relates the interior integral of dd^c phi to the flux
  /// of the normal derivative, with the sign printed for that dimension.
  nlohmann::json normal_constant;
  double normal_constant_spread = 0.0;
  /// Per covering and polynomial: sphere quadrature over s H_0 |B|.
  nlohmann::json sphere_ratio;
  double sphere_ratio_spread = 0.0;
  /// Residue of log ||p||^2 at the origin of the identity covering.
  double log_residue = 0.0;
  bool stable = false;

  nlohmann::json to_json() const;
};

Calibration run_calibration();

struct VerifyOptions {
  std::uint64_t seed = CoveringMap::kDefaultSeed;
  int jobs = 0;
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::vector<SuiteResult> suites;
  Calibration calibration;

  bool pass() const;
  nlohmann::json to_json() const;
};

/// Every invariant suite of every module plus the calibration constants. The report does
/// not depend on the number of jobs.
VerifyReport run_verify(const VerifyOptions& opt = {});

/// Ids and properties of the suites run_verify executes, in report order.
std::vector<std::pair<std::string, std::string>> verify_traceability();

}  // namespace semiharm
