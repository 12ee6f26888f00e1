#pragma once

#include <span>
#include <vector>

#include "semiharm/covering.hpp"
#include "semiharm/field.hpp"
#include "semiharm/quadrature.hpp"

namespace semiharm {

/// -c_m / (2|S|) times the sphere integral of the radial derivative of f, summed over the
/// branches through a; c_1 = 1, c_m = 1/(m-1) otherwise.
cplx harmonic_residue(const CoveringMap& cov, const ScalarField& f, const CoverPoint& a, double r,
                      const QuadratureSizes& sizes = {});

/// Closed form for f = (log ||p - p(a)||^2)^alpha h / ||p - p(a)||^{2m-2+s} with h
/// semi-harmonic; nu_h_a is nu_p(a) h(a). Throws LogSingularity when log r^2 = 0 is raised
/// to a negative power.
cplx residue_closed_form(int m, double alpha, double s, double r, cplx nu_h_a);
cplx residue_closed_form(int m, double alpha, double s, double r, int nu, cplx h_a);

struct ResidueScan {
  CoverPoint a;
  std::vector<double> radii;
  std::vector<cplx> values;
  double spread = 0.0;     // max pairwise |difference|
  double max_abs = 0.0;
  bool semi_harmonic_candidate = false;
};

ResidueScan residue_scan(const CoveringMap& cov, const ScalarField& f, const CoverPoint& a,
                         std::span<const double> radii, double tol, const QuadratureSizes& sizes = {});

}  // namespace semiharm
