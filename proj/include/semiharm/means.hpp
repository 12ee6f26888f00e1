#pragma once

#include <functional>
#include <span>
#include <vector>

#include "semiharm/covering.hpp"
#include "semiharm/field.hpp"
#include "semiharm/quadrature.hpp"

namespace semiharm {

/// Integrand on one branch at base point z with fiber value w. `fiber` is the full fiber
/// over z when it is known, else empty.
using BranchIntegrand = std::function<cplx(const BasePoint& z, cplx w, std::span<const cplx> fiber)>;

/// Lebesgue integral over the sphere (kind Sphere) or ball (kind Ball) of radius r about
/// p(a), summed over the branches through a. Sheets not through a are excluded by
/// continuing the fiber roots radially from a. Throws RegionEscapesDomain if the closed
/// ball leaves the base domain.
cplx integrate_branches(const CoveringMap& cov, const CoverPoint& a, RuleKind kind, double r,
                        const QuadratureSizes& sizes, const BranchIntegrand& g);

void check_region(const CoveringMap& cov, const CoverPoint& a, double r);

struct MeanReport {
  CoverPoint a;
  double r = 0.0;
  cplx solid;
  cplx spherical;
  int nu = 1;
  cplx gap;
  cplx dirichlet_term;
  double identity_residual = 0.0;
};

/// r^{-2m} times the integral of f against the normalized volume form, m!/pi^m dV.
cplx solid_mean(const CoveringMap& cov, const ScalarField& f, const CoverPoint& a, double r,
                const QuadratureSizes& sizes = {});
/// Integral of f against dsigma / (|S| r^{2m-1}).
cplx spherical_mean(const CoveringMap& cov, const ScalarField& f, const CoverPoint& a, double r,
                    const QuadratureSizes& sizes = {});

struct MeanValueResult {
  bool pass = false;
  cplx target;
  std::vector<cplx> solid;
  std::vector<cplx> spherical;
  double worst_solid = 0.0;
  double worst_spherical = 0.0;
};

/// Both means against nu_p(a) f(a) at every radius.
MeanValueResult mean_value_test(const CoveringMap& cov, const ScalarField& f, const CoverPoint& a,
                                std::span<const double> radii, double tol, const QuadratureSizes& sizes = {});

/// [eta, phi] = (1/4m) integral of sum_k eta_k conj(phi_k) against m!/pi^m dV over the ball.
cplx dirichlet_product(const CoveringMap& cov, const ScalarField& eta, const ScalarField& phi, const CoverPoint& a,
                       double r, const QuadratureSizes& sizes = {});

/// spherical - solid against r^{-2m} [f, ||p - p(a)||^2].
MeanReport mean_gap_identity(const CoveringMap& cov, const ScalarField& f, const CoverPoint& a, double r,
                             const QuadratureSizes& sizes = {});

struct GreensReport {
  cplx dirichlet;  // (1/4m) int grad eta . grad phi, normalized volume
  cplx boundary;   // 1/(2|S|) int eta R phi dsigma
  cplx volume;     // (1/4m) int eta Laplace(phi), normalized volume
  double residual = 0.0;
};

/// Green's first identity on the ball of radius r about a; the Laplacian is the
/// finite-difference one.
GreensReport greens_residual(const CoveringMap& cov, const ScalarField& eta, const ScalarField& phi,
                             const CoverPoint& a, double r, const QuadratureSizes& sizes = {});

}  // namespace semiharm
