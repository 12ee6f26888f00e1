#include "semiharm/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "semiharm/errors.hpp"

namespace semiharm {

namespace {

constexpr double kLaplaceStep = 1e-3;

std::vector<cplx> fiber_or_solve(const CoveringMap& cov, const BasePoint& z, std::span<const cplx> fiber) {
  if (!fiber.empty()) return {fiber.begin(), fiber.end()};
  return cov.roots(z);
}

BasePoint shifted(const BasePoint& z, int k, double h) {
  BasePoint out = z;
  out[k / 2] += (k % 2 == 0) ? cplx(h, 0) : cplx(0, h);
  return out;
}

// f on the sheet through (z, w), continued to z_to.
cplx eval_continued(const CoveringMap& cov, const ScalarField& f, const BasePoint& z, cplx w,
                    std::span<const cplx> fiber, const BasePoint& z_to) {
  return f(z_to, continue_root(cov, z, w, fiber, z_to));
}

double grad_norm(const Gradient& g, int m) {
  double s = 0.0;
  for (int k = 0; k < 2 * m; ++k) s += std::norm(g[k]);
  return std::sqrt(s);
}

Gradient boundary_gradient(const CoveringMap& cov, const DefiningFunction& rho, const CoverPoint& x,
                           double& norm) {
  const cplx value = rho.rho(x);
  if (std::abs(value) > 1e-8)
    throw NotOnBoundary("|rho| = " + format_double(std::abs(value)) + " at " + format_point(x.base, cov.m()));
  Gradient g = gradient(cov, rho.rho, x);
  norm = grad_norm(g, cov.m());
  if (!(norm > 1e-8)) throw VanishingGradient("||grad rho|| = " + format_double(norm));
  return g;
}

}  // namespace

Chart chart_at(const CoveringMap& cov, const BasePoint& z, cplx w) {
  const cplx fw = cov.dF_dw(z, w);
  // On the locus dF/dw vanishes; away from it the computed value is accurate relative to
  // its own rounding scale, which can be tiny near a branch point.
  if (std::abs(fw) <= 1e4 * std::numeric_limits<double>::epsilon() * cov.dF_dw_scale(z, w))
    throw BranchJump("point " + format_point(z, cov.m()) + " lies on the branch locus");
  return Chart{z, w, cov.dw_dz(z, w), cov.m()};
}

Gradient fd_gradient(const CoveringMap& cov, const ScalarField& f, const BasePoint& z, cplx w,
                     std::span<const cplx> fiber) {
  const auto roots = fiber_or_solve(cov, z, fiber);
  const double h = f.fd_step() * cov.base_radius();
  Gradient g{};
  for (int k = 0; k < 2 * cov.m(); ++k) {
    const cplx plus = eval_continued(cov, f, z, w, roots, shifted(z, k, h));
    const cplx minus = eval_continued(cov, f, z, w, roots, shifted(z, k, -h));
    g[k] = (plus - minus) / (2.0 * h);
  }
  return g;
}

Gradient gradient_at(const CoveringMap& cov, const ScalarField& f, const BasePoint& z, cplx w,
                     std::span<const cplx> fiber) {
  if (f.has_partials()) return f.partials(chart_at(cov, z, w));
  return fd_gradient(cov, f, z, w, fiber);
}

Gradient gradient(const CoveringMap& cov, const ScalarField& f, const CoverPoint& x) {
  return gradient_at(cov, f, x.base, x.fiber, {});
}

cplx laplacian(const CoveringMap& cov, const ScalarField& f, const BasePoint& z, cplx w,
               std::span<const cplx> fiber) {
  const auto roots = fiber_or_solve(cov, z, fiber);
  const cplx center = f(z, w);
  auto second_difference = [&](double h) {
    cplx s = 0.0;
    for (int k = 0; k < 2 * cov.m(); ++k) {
      s += eval_continued(cov, f, z, w, roots, shifted(z, k, h)) +
           eval_continued(cov, f, z, w, roots, shifted(z, k, -h)) - 2.0 * center;
    }
    return s / (h * h);
  };
  const double h = kLaplaceStep * cov.base_radius();
  return (4.0 * second_difference(0.5 * h) - second_difference(h)) / 3.0;
}

cplx laplacian(const CoveringMap& cov, const ScalarField& f, const CoverPoint& x) {
  return laplacian(cov, f, x.base, x.fiber, {});
}

cplx wirtinger(const Gradient& g, int j) { return 0.5 * (g[2 * j] - cplx(0, 1) * g[2 * j + 1]); }

cplx wirtinger_bar(const Gradient& g, int j) { return 0.5 * (g[2 * j] + cplx(0, 1) * g[2 * j + 1]); }

cplx radial_derivative(const Gradient& g, const BasePoint& a, const BasePoint& z, int m) {
  const double r = distance(z, a, m);
  if (r < 1e-12) throw DegenerateRadius("||p(x) - p(a)|| = " + format_double(r));
  cplx s = 0.0;
  for (int j = 0; j < m; ++j) {
    const cplx d = z[j] - a[j];
    s += d.real() * g[2 * j] + d.imag() * g[2 * j + 1];
  }
  return s / r;
}

cplx radial_derivative(const CoveringMap& cov, const ScalarField& f, const CoverPoint& a, const CoverPoint& x) {
  if (distance(x.base, a.base, cov.m()) < 1e-12)
    throw DegenerateRadius("x projects onto p(a)");
  return radial_derivative(gradient(cov, f, x), a.base, x.base, cov.m());
}

cplx directional_gradient(const Gradient& g, const Gradient& f, int m) {
  cplx s = 0.0;
  for (int k = 0; k < 2 * m; ++k) s += g[k] * f[k];
  return s;
}

cplx euler_apply(const CoveringMap& cov, const ScalarField& g, const ScalarField& f, const CoverPoint& x) {
  const Gradient dg = gradient(cov, g, x), df = gradient(cov, f, x);
  cplx s = 0.0;
  for (int j = 0; j < cov.m(); ++j) s += wirtinger_bar(dg, j) * wirtinger(df, j);
  return 2.0 * s;
}

cplx euler_bar_apply(const CoveringMap& cov, const ScalarField& g, const ScalarField& f, const CoverPoint& x) {
  const Gradient dg = gradient(cov, g, x), df = gradient(cov, f, x);
  cplx s = 0.0;
  for (int j = 0; j < cov.m(); ++j) s += wirtinger(dg, j) * wirtinger_bar(df, j);
  return 2.0 * s;
}

cplx directional_gradient(const CoveringMap& cov, const ScalarField& g, const ScalarField& f, const CoverPoint& x) {
  return directional_gradient(gradient(cov, g, x), gradient(cov, f, x), cov.m());
}

cplx partial_gradient(const CoveringMap& cov, const ScalarField& g, const ScalarField& f, int k,
                      const CoverPoint& x) {
  const Gradient dg = gradient(cov, g, x), df = gradient(cov, f, x);
  return 2.0 * (wirtinger(dg, k) * wirtinger_bar(df, k) + wirtinger_bar(dg, k) * wirtinger(df, k));
}

cplx euler_d_apply(const CoveringMap& cov, const ScalarField& f, const CoverPoint& a, const CoverPoint& x) {
  const Gradient df = gradient(cov, f, x);
  cplx s = 0.0;
  for (int j = 0; j < cov.m(); ++j) s += (x.base[j] - a.base[j]) * wirtinger(df, j);
  return s;
}

cplx euler_dbar_apply(const CoveringMap& cov, const ScalarField& f, const CoverPoint& a, const CoverPoint& x) {
  const Gradient df = gradient(cov, f, x);
  cplx s = 0.0;
  for (int j = 0; j < cov.m(); ++j) s += std::conj(x.base[j] - a.base[j]) * wirtinger_bar(df, j);
  return s;
}

cplx dbar_neumann(const CoveringMap& cov, const ScalarField& f, const DefiningFunction& rho, const CoverPoint& x) {
  double norm = 0.0;
  const Gradient dr = boundary_gradient(cov, rho, x, norm);
  const Gradient df = gradient(cov, f, x);
  cplx s = 0.0;
  for (int j = 0; j < cov.m(); ++j) s += wirtinger(dr, j) / norm * wirtinger_bar(df, j);
  return 2.0 * s;
}

cplx normal_derivative(const CoveringMap& cov, const ScalarField& f, const DefiningFunction& rho,
                       const CoverPoint& x) {
  double norm = 0.0;
  const Gradient dr = boundary_gradient(cov, rho, x, norm);
  return directional_gradient(gradient(cov, f, x), dr, cov.m()) / norm;
}

double validate_partials(const CoveringMap& cov, const ScalarField& f, int samples) {
  if (!f.has_partials()) return 0.0;
  double worst = 0.0;
  int done = 0;
  std::uint64_t seed = cov.seed() + 17;
  while (done < samples) {
    for (const auto& z : sample_base_points(cov, samples, seed++)) {
      if (done == samples) break;
      const auto roots = cov.roots(z);
      for (cplx w : roots) {
        Gradient a, n;
        try {
          a = f.partials(chart_at(cov, z, w));
          n = fd_gradient(cov, f, z, w, roots);
        } catch (const BranchJump&) {
          continue;
        }
        for (int k = 0; k < 2 * cov.m(); ++k)
          worst = std::max(worst, std::abs(a[k] - n[k]) / std::max(1.0, std::abs(a[k])));
      }
      ++done;
    }
  }
  return worst;
}

}  // namespace semiharm
