#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "semiharm/covering.hpp"
#include "semiharm/field.hpp"
#include "semiharm/quadrature.hpp"

namespace semiharm {

enum class Outcome { Pass, Fail, Inconclusive };
enum class Verdict { SemiHarmonic, NotSemiHarmonic, Inconclusive };

/// Pass below tol, fail above 10 * tol, inconclusive between.
Outcome grade(double deviation, double tol);
std::string to_string(Outcome o);
std::string to_string(Verdict v);

struct CenterReport {
  CoverPoint a;
  int nu = 1;
  bool refused = false;
  std::string note;
  double solid_deviation = 0.0;      // max_r |solid mean - nu f(a)|
  double spherical_deviation = 0.0;  // max_r |spherical mean - nu f(a)|
  double near_harmonic = 0.0;        // max_r |spherical - solid|
  double residue_max = 0.0;          // max_r |Res_a(f, r)|
  double fd_laplacian_max = 0.0;     // near a, on the branches through a
  Outcome solid = Outcome::Inconclusive;
  Outcome spherical = Outcome::Inconclusive;
  Outcome near = Outcome::Inconclusive;
  Outcome residue = Outcome::Inconclusive;

  /// True when the four tests do not split into clear passes and clear fails.
  bool coherent() const;
};

struct ClassificationReport {
  std::string field;
  std::string covering;
  int m = 1;
  double tol = 0.0;
  std::vector<double> radii;
  std::vector<CenterReport> centers;
  Verdict verdict = Verdict::Inconclusive;

  nlohmann::json to_json() const;
};

/// Spherical and solid mean-value properties, near-harmonicity and vanishing residue at
/// every center. Centers where f takes different values on the sheets meeting there are
/// refused.
ClassificationReport classify(const CoveringMap& cov, const ScalarField& f, std::span<const CoverPoint> centers,
                              std::span<const double> radii, double tol, const QuadratureSizes& sizes = {});

enum class AuditOutcome { Pass, PrincipleViolated, HypothesisViolated };
std::string to_string(AuditOutcome o);

struct AuditResult {
  AuditOutcome outcome = AuditOutcome::Pass;
  std::optional<CoverPoint> witness;
  double interior_max = 0.0;
  double boundary_max = 0.0;
};

/// Maximum principle on the pseudo-ball of radius r about a, sampled on a polar grid of
/// `grid` radii (directions follow the sphere rule of size 2 * grid for m = 1, grid for m = 2).
/// The sub-mean hypothesis nu f(x) <= solid mean is checked first at a and at interior points.
AuditResult max_principle_audit(const CoveringMap& cov, const ScalarField& f, const CoverPoint& a, double r,
                                int grid, double tol = 1e-8);

/// |[phi, eta]| for the bump eta = ||p - p(a)||^2 - r^2 inside the ball, 0 outside.
double orthogonality_test(const CoveringMap& cov, const ScalarField& phi, const CoverPoint& a, double r_support,
                          const QuadratureSizes& sizes = {});

}  // namespace semiharm
