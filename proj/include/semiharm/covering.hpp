#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "semiharm/expr.hpp"
#include "semiharm/types.hpp"

namespace semiharm {

class ScalarField;

/// A point of the covering space: base coordinate plus fiber coordinate.
struct CoverPoint {
  BasePoint base{};
  cplx fiber{};
  /// Local multiplicity; filled in by CoveringMap::annotate.
  std::optional<int> mult;
};

struct FiberRoot {
  cplx w;
  int mult;
  /// The raw solver roots merged into this cluster.
  std::vector<cplx> members;
};

/// Riemann domain over a ball in C^m given as the zero set of a monic fiber polynomial
///   F(z, w) = w^k + c_{k-1}(z) w^{k-1} + ... + c_0(z),
/// projected to z. Immutable after construction.
class CoveringMap {
 public:
  static constexpr std::uint64_t kDefaultSeed = 20070703;

  /// coeffs[j] is the coefficient of w^j for j < k; the w^k coefficient is 1.
  CoveringMap(int m, std::vector<BasePoly> coeffs, BasePoint base_center, double base_radius,
              std::string label = {}, std::uint64_t seed = kDefaultSeed);

  /// F = w - z1.
  static CoveringMap identity(int m, BasePoint center = {}, double radius = 2.0);
  /// Build from a fiber polynomial written in the coefficient grammar with w allowed,
  /// e.g. "w^2 - z1*z2". Convenience for tests and catalogs.
  static CoveringMap from_polynomial(int m, const std::string& fiber_poly, BasePoint center = {},
                                     double radius = 2.0, std::string label = {});
  /// JSON spec: {"m", "fiber_degree", "coeffs": {"w^j": expr}, "base_center", "base_radius"}.
  static CoveringMap from_json(const nlohmann::json& spec, std::uint64_t seed = kDefaultSeed);

  int m() const { return m_; }
  int degree() const { return static_cast<int>(coeffs_.size()); }
  const BasePoint& base_center() const { return center_; }
  double base_radius() const { return radius_; }
  bool is_identity() const { return identity_; }
  const std::string& label() const { return label_; }
  const std::vector<BasePoly>& coefficients() const { return coeffs_; }

  bool in_base(const BasePoint& z, double margin = 0.0) const;

  /// Coefficients c_0..c_{k-1} at z.
  std::vector<cplx> coefficients_at(const BasePoint& z) const;
  cplx eval(const BasePoint& z, cplx w) const;
  cplx dF_dw(const BasePoint& z, cplx w) const;
  /// Holomorphic dw/dz_j along the sheet through (z, w); requires dF/dw != 0.
  std::array<cplx, 2> dw_dz(const BasePoint& z, cplx w) const;
  /// Sum over j of j |c_j(z)| |w|^{j-1} (c_k = 1): the rounding scale of dF_dw.
  double dF_dw_scale(const BasePoint& z, cplx w) const;
  /// Scale used for residual tolerances: 1 + sum of |coefficient terms| at z.
  double residual_scale(const BasePoint& z, cplx w) const;

  /// All roots of F(z, .) with repetition, lexicographic order.
  std::vector<cplx> roots(const BasePoint& z) const;
  /// Warm-started variant for path following.
  std::vector<cplx> roots(const BasePoint& z, std::span<const cplx> seeds) const;

  /// Clustered fiber over z; multiplicities sum to degree().
  std::vector<FiberRoot> fiber(const BasePoint& z) const;
  int local_multiplicity(const CoverPoint& x) const;
  /// Sum of multiplicities at 8 seeded base points; equals degree().
  int checked_degree() const;

  /// Validated point of X (throws InvalidCovering if F(z, w) is not ~0).
  CoverPoint point(const BasePoint& z, cplx w) const;
  /// Point over z on the first fiber cluster (lexicographic).
  CoverPoint point_over(const BasePoint& z) const;
  CoverPoint annotate(CoverPoint x) const;
  int multiplicity(const CoverPoint& x) const { return x.mult ? *x.mult : local_multiplicity(x); }

  std::uint64_t seed() const { return seed_; }

 private:
  void validate();

  int m_;
  std::vector<BasePoly> coeffs_;
  BasePoint center_;
  double radius_;
  std::string label_;
  bool identity_ = false;
  std::uint64_t seed_;
};

/// `n` seeded points drawn uniformly from the ball of radius shrink * base_radius.
std::vector<BasePoint> sample_base_points(const CoveringMap& cov, int n, std::uint64_t seed, double shrink = 0.9);

/// Fiber-sum pushforward: sum over (w, mult) in fiber(z) of mult * f(z, w).
cplx trace(const CoveringMap& cov, const ScalarField& f, const BasePoint& z);

/// Fiber values over a + t*dir on the sheets through a, for each t of the ascending list ts.
/// Returns ts.size() rows of `nu` values each (row-major), where nu is the multiplicity of a.
/// When nu equals the degree every root is returned; otherwise roots are continued from a.
/// Throws BranchJump if a continued sheet meets another sheet. When `bases` is given it
/// receives the base point used for each t (nodes on the branch locus are jittered).
std::vector<cplx> branch_values_along_ray(const CoveringMap& cov, const CoverPoint& a, int nu,
                                          const RealPoint& dir, std::span<const double> ts,
                                          std::vector<BasePoint>* bases = nullptr);

/// The nearest root over z_to to the sheet through (z_from, w_from), or BranchJump when the
/// choice is ambiguous (two roots within 1e-7, or no clear nearest root).
cplx continue_root(const CoveringMap& cov, const BasePoint& z_from, cplx w_from,
                   std::span<const cplx> fiber_from, const BasePoint& z_to);

}  // namespace semiharm
