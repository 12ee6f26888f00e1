#include "semiharm/roots.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "semiharm/errors.hpp"

namespace semiharm {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Magnitude bound on the rounding error of a Horner evaluation at w.
double rounding_bound(std::span<const cplx> c, cplx w) {
  const double aw = std::abs(w);
  double s = 1.0;
  for (std::size_t j = c.size(); j-- > 0;) s = s * aw + std::abs(c[j]);
  return 4.0 * (c.size() + 1) * kEps * s;
}

cplx monic_derivative(std::span<const cplx> c, cplx w) {
  const std::size_t k = c.size();
  cplx d = static_cast<double>(k);
  for (std::size_t j = k - 1; j-- > 0;) d = d * w + static_cast<double>(j + 1) * c[j + 1];
  return d;
}

void polish(std::span<const cplx> c, cplx& w) {
  for (int it = 0; it < 4; ++it) {
    cplx p = monic_eval(c, w);
    if (std::abs(p) <= rounding_bound(c, w)) return;
    cplx dp = monic_derivative(c, w);
    if (std::abs(dp) < 1e-300) return;
    cplx step = p / dp;
    w -= step;
    if (std::abs(step) <= kEps * std::abs(w)) return;
  }
}

// Every iterate is a root to within rounding (the case for multiple roots, where
// the step size stalls above the tolerance).
bool settled(std::span<const cplx> c, std::span<const cplx> w) {
  for (cplx x : w)
    if (std::abs(monic_eval(c, x)) > 64.0 * rounding_bound(c, x)) return false;
  return true;
}

}  // namespace

cplx monic_eval(std::span<const cplx> c, cplx w) {
  cplx p = 1.0;
  for (std::size_t j = c.size(); j-- > 0;) p = p * w + c[j];
  return p;
}

void sort_lexicographic(std::vector<cplx>& roots) {
  std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

std::vector<cplx> companion_roots(std::span<const cplx> c) {
  const int k = static_cast<int>(c.size());
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(k, k);
  for (int i = 1; i < k; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < k; ++i) comp(i, k - 1) = -c[i];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(comp, false);
  if (solver.info() != Eigen::Success) throw SolverDivergence("companion eigenvalue solve failed");
  std::vector<cplx> roots(solver.eigenvalues().data(), solver.eigenvalues().data() + k);
  for (auto& w : roots) polish(c, w);
  sort_lexicographic(roots);
  return roots;
}

std::vector<cplx> monic_roots(std::span<const cplx> c, std::span<const cplx> seeds,
                              const RootSolverOptions& opts) {
  const std::size_t k = c.size();
  if (k == 0) return {};
  if (k == 1) return {-c[0]};

  std::vector<cplx> w(k);
  if (seeds.size() == k) {
    std::copy(seeds.begin(), seeds.end(), w.begin());
  } else {
    double bound = 0.0;
    for (cplx x : c) bound = std::max(bound, std::abs(x));
    const double radius = 0.5 * (1.0 + bound);
    for (std::size_t i = 0; i < k; ++i)
      w[i] = std::polar(radius, 2.0 * pi * static_cast<double>(i) / k + 0.4);
  }
  // Coincident seeds stall the iteration; spread them slightly.
  double scale = 1.0;
  for (cplx x : w) scale = std::max(scale, std::abs(x));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(w[i] - w[j]) < 1e-9 * scale) w[i] += std::polar(1e-6 * scale, 0.7 + 2.1 * i);

  bool converged = false;
  for (int it = 0; it < opts.max_iterations && !converged; ++it) {
    double worst = 0.0;
    bool degenerate = false;
    for (std::size_t i = 0; i < k; ++i) {
      cplx denom = 1.0;
      for (std::size_t j = 0; j < k; ++j)
        if (j != i) denom *= w[i] - w[j];
      if (denom == 0.0) {
        degenerate = true;
        w[i] += std::polar(1e-6 * scale, 1.3 + i);
        continue;
      }
      cplx step = monic_eval(c, w[i]) / denom;
      w[i] -= step;
      worst = std::max(worst, std::abs(step) / (1.0 + std::abs(w[i])));
    }
    if (!std::isfinite(worst)) break;
    if (!degenerate && (worst <= opts.tolerance || settled(c, w))) converged = true;
  }

  if (!converged) {
    auto fallback = companion_roots(c);
    for (cplx x : fallback)
      if (!std::isfinite(x.real()) || !std::isfinite(x.imag()) ||
          std::abs(monic_eval(c, x)) > 1e6 * rounding_bound(c, x))
        throw SolverDivergence("no convergence within " + std::to_string(opts.max_iterations) +
                               " iterations and companion fallback residual too large");
    return fallback;
  }
  sort_lexicographic(w);
  return w;
}

}  // namespace semiharm
