#include "semiharm/residue.hpp"

#include <algorithm>
#include <cmath>

#include "semiharm/errors.hpp"
#include "semiharm/fields.hpp"
#include "semiharm/means.hpp"

namespace semiharm {

cplx harmonic_residue(const CoveringMap& cov, const ScalarField& f, const CoverPoint& a, double r,
                      const QuadratureSizes& sizes) {
  const int m = cov.m();
  if (r < 1e-12) throw DegenerateRadius("residue radius " + format_double(r));
  const double cm = m == 1 ? 1.0 : 1.0 / (m - 1);
  const cplx flux = integrate_branches(cov, a, RuleKind::Sphere, r, sizes,
                                       [&](const BasePoint& z, cplx w, std::span<const cplx> fib) {
                                         return radial_derivative(gradient_at(cov, f, z, w, fib), a.base, z, m);
                                       });
  return -cm * flux / (2.0 * sphere_area(m));
}

cplx residue_closed_form(int m, double alpha, double s, double r, cplx nu_h_a) {
  // Complex powers so that non-integer alpha with r < 1 takes the principal branch, as the
  // field grammar does.
  auto lpow = [L = cplx(std::log(r * r))](double e) {
    const double n = std::round(e);
    if (e != n) return std::pow(L, e);
    cplx p = 1.0;
    for (int i = 0; i < std::abs(static_cast<int>(n)); ++i) p *= L;
    return n < 0 ? 1.0 / p : p;
  };
  const double rs = std::pow(r, s);
  cplx first = 0.0;
  if (alpha != 0.0) {
    if (r == 1.0 && alpha < 1.0)
      throw LogSingularity("(log r^2)^(alpha-1) with r = 1 and alpha = " + format_double(alpha));
    first = alpha * lpow(alpha - 1.0) / rs;
  }
  const cplx tail = lpow(alpha) / rs;
  const cplx bracket = m == 1 ? -first + 0.5 * s * tail : (-first + (m - 1 + 0.5 * s) * tail) / double(m - 1);
  return bracket * nu_h_a;
}

cplx residue_closed_form(int m, double alpha, double s, double r, int nu, cplx h_a) {
  return residue_closed_form(m, alpha, s, r, static_cast<double>(nu) * h_a);
}

ResidueScan residue_scan(const CoveringMap& cov, const ScalarField& f, const CoverPoint& a,
                         std::span<const double> radii, double tol, const QuadratureSizes& sizes) {
  ResidueScan scan;
  scan.a = cov.annotate(a);
  scan.radii.assign(radii.begin(), radii.end());
  for (double r : radii) {
    scan.values.push_back(harmonic_residue(cov, f, scan.a, r, sizes));
    scan.max_abs = std::max(scan.max_abs, std::abs(scan.values.back()));
  }
  for (std::size_t i = 0; i < scan.values.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) scan.spread = std::max(scan.spread, std::abs(scan.values[i] - scan.values[j]));
  scan.semi_harmonic_candidate = scan.max_abs < tol;
  return scan;
}

}  // namespace semiharm
