#include "semiharm/means.hpp"

#include <algorithm>
#include <cmath>

#include "semiharm/errors.hpp"
#include "semiharm/fields.hpp"

namespace semiharm {

namespace {

double normalized_volume(int m) { return 1.0 / ball_volume(m); }

}  // namespace

void check_region(const CoveringMap& cov, const CoverPoint& a, double r) {
  if (!(r > 0.0)) throw RegionEscapesDomain("radius must be positive");
  const double reach = distance(a.base, cov.base_center(), cov.m()) + r;
  if (reach >= cov.base_radius())
    throw RegionEscapesDomain("ball of radius " + format_double(r) + " about " + format_point(a.base, cov.m()) +
                              " leaves the base ball of radius " + format_double(cov.base_radius()));
}

cplx integrate_branches(const CoveringMap& cov, const CoverPoint& a, RuleKind kind, double r,
                        const QuadratureSizes& sizes, const BranchIntegrand& g) {
  check_region(cov, a, r);
  const int m = cov.m();
  const int k = cov.degree();
  const int nu = cov.multiplicity(a);
  const QuadratureSizes q = sizes.resolved(m);
  // Puiseux branches at a branch point are series in t^{1/nu}; grade the radius to match.
  const QuadratureRule rule = kind == RuleKind::Sphere ? sphere_rule(m, a.base, r, q.sphere)
                                                       : ball_rule(m, a.base, r, q.radial, q.sphere, nu);
  const auto& ts = rule.radii();
  const auto& dirs = rule.directions();
  const std::size_t nr = ts.size();
  std::vector<cplx> terms(rule.size());
  std::vector<BasePoint> bases;
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    const auto values = branch_values_along_ray(cov, a, nu, dirs[d], ts, &bases);
    for (std::size_t j = 0; j < nr; ++j) {
      std::span<const cplx> row(values.data() + j * nu, nu);
      std::span<const cplx> full = nu == k ? row : std::span<const cplx>{};
      cplx s = 0.0;
      for (cplx w : row) s += g(bases[j], w, full);
      terms[d * nr + j] = rule.direction_weights()[d] * rule.radial_weights()[j] * s;
    }
  }
  return pairwise_sum(terms);
}

cplx solid_mean(const CoveringMap& cov, const ScalarField& f, const CoverPoint& a, double r,
                const QuadratureSizes& sizes) {
  const cplx total = integrate_branches(cov, a, RuleKind::Ball, r, sizes,
                                        [&](const BasePoint& z, cplx w, std::span<const cplx>) { return f(z, w); });
  return total * normalized_volume(cov.m()) / std::pow(r, 2 * cov.m());
}

cplx spherical_mean(const CoveringMap& cov, const ScalarField& f, const CoverPoint& a, double r,
                    const QuadratureSizes& sizes) {
  const cplx total = integrate_branches(cov, a, RuleKind::Sphere, r, sizes,
                                        [&](const BasePoint& z, cplx w, std::span<const cplx>) { return f(z, w); });
  return total / (sphere_area(cov.m()) * std::pow(r, 2 * cov.m() - 1));
}

MeanValueResult mean_value_test(const CoveringMap& cov, const ScalarField& f, const CoverPoint& a,
                                std::span<const double> radii, double tol, const QuadratureSizes& sizes) {
  MeanValueResult res;
  res.target = static_cast<double>(cov.multiplicity(a)) * f(a);
  for (double r : radii) {
    res.solid.push_back(solid_mean(cov, f, a, r, sizes));
    res.spherical.push_back(spherical_mean(cov, f, a, r, sizes));
    res.worst_solid = std::max(res.worst_solid, std::abs(res.solid.back() - res.target));
    res.worst_spherical = std::max(res.worst_spherical, std::abs(res.spherical.back() - res.target));
  }
  res.pass = res.worst_solid < tol && res.worst_spherical < tol;
  return res;
}

cplx dirichlet_product(const CoveringMap& cov, const ScalarField& eta, const ScalarField& phi, const CoverPoint& a,
                       double r, const QuadratureSizes& sizes) {
  const int m = cov.m();
  const cplx total =
      integrate_branches(cov, a, RuleKind::Ball, r, sizes, [&](const BasePoint& z, cplx w, std::span<const cplx> fib) {
        const Gradient de = gradient_at(cov, eta, z, w, fib);
        const Gradient dp = gradient_at(cov, phi, z, w, fib);
        cplx s = 0.0;
        for (int k = 0; k < 2 * m; ++k) s += de[k] * std::conj(dp[k]);
        return s;
      });
  return total * normalized_volume(m) / (4.0 * m);
}

MeanReport mean_gap_identity(const CoveringMap& cov, const ScalarField& f, const CoverPoint& a, double r,
                             const QuadratureSizes& sizes) {
  MeanReport rep;
  rep.a = cov.annotate(a);
  rep.r = r;
  rep.nu = *rep.a.mult;
  rep.solid = solid_mean(cov, f, rep.a, r, sizes);
  rep.spherical = spherical_mean(cov, f, rep.a, r, sizes);
  rep.gap = rep.spherical - rep.solid;
  // [f, rho^2] with rho^2 real, so no conjugate lands on f.
  const ScalarField rho2 = ScalarField::norm2_from(a.base, cov.m());
  rep.dirichlet_term = dirichlet_product(cov, f, rho2, rep.a, r, sizes) / std::pow(r, 2 * cov.m());
  rep.identity_residual = std::abs(rep.gap - rep.dirichlet_term);
  return rep;
}

GreensReport greens_residual(const CoveringMap& cov, const ScalarField& eta, const ScalarField& phi,
                             const CoverPoint& a, double r, const QuadratureSizes& sizes) {
  const int m = cov.m();
  const double vol = normalized_volume(m) / (4.0 * m);
  GreensReport rep;
  rep.dirichlet = vol * integrate_branches(cov, a, RuleKind::Ball, r, sizes,
                                           [&](const BasePoint& z, cplx w, std::span<const cplx> fib) {
                                             return directional_gradient(gradient_at(cov, eta, z, w, fib),
                                                                         gradient_at(cov, phi, z, w, fib), m);
                                           });
  rep.boundary = integrate_branches(cov, a, RuleKind::Sphere, r, sizes,
                                    [&](const BasePoint& z, cplx w, std::span<const cplx> fib) {
                                      return eta(z, w) *
                                             radial_derivative(gradient_at(cov, phi, z, w, fib), a.base, z, m);
                                    }) /
                 (2.0 * sphere_area(m));
  rep.volume = vol * integrate_branches(cov, a, RuleKind::Ball, r, sizes,
                                        [&](const BasePoint& z, cplx w, std::span<const cplx> fib) {
                                          return eta(z, w) * laplacian(cov, phi, z, w, fib);
                                        });
  rep.residual = std::abs(rep.dirichlet - (rep.boundary - rep.volume));
  return rep;
}

}  // namespace semiharm
