#pragma once

// Reference computations that do not share code with the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>
#include <gmpxx.h>

namespace oracle {

using cplx = std::complex<double>;

// Power sums p_1..p_K of the roots of w^k + c[k-1] w^(k-1) + ... + c[0], by Newton's identities.
inline std::vector<cplx> power_sums(const std::vector<cplx>& c, int K) {
  const int k = static_cast<int>(c.size());
  std::vector<cplx> e(K + 1, 0.0), p(K + 1, 0.0);
  e[0] = 1.0;
  for (int i = 1; i <= std::min(k, K); ++i) e[i] = (i % 2 ? -1.0 : 1.0) * c[k - i];
  for (int n = 1; n <= K; ++n) {
    cplx s = (n % 2 ? 1.0 : -1.0) * static_cast<double>(n) * e[n];
    for (int i = 1; i < n; ++i) s += (i % 2 ? 1.0 : -1.0) * e[i] * p[n - i];
    p[n] = s;
  }
  return p;
}

// Monic coefficients c[0..k-1] of prod (w - r_i).
inline std::vector<cplx> from_roots(const std::vector<cplx>& roots) {
  std::vector<cplx> poly{1.0};
  for (const cplx& r : roots) {
    std::vector<cplx> next(poly.size() + 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i + 1] += poly[i];
      next[i] -= r * poly[i];
    }
    poly = next;
  }
  poly.pop_back();
  return poly;
}

inline std::vector<cplx> eigen_roots(const std::vector<cplx>& c) {
  const int k = static_cast<int>(c.size());
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(k, k);
  for (int i = 1; i < k; ++i) M(i, i - 1) = 1.0;
  for (int i = 0; i < k; ++i) M(i, k - 1) = -c[i];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M);
  std::vector<cplx> out(es.eigenvalues().data(), es.eigenvalues().data() + k);
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
  return out;
}

// Integral of x^alpha over the unit sphere in R^n: 2 prod Gamma(b_i) / Gamma(sum b_i), b_i = (alpha_i + 1) / 2.
inline double sphere_moment(const std::vector<int>& alpha) {
  double lg = 0.0, b = 0.0;
  for (int a : alpha) {
    if (a % 2) return 0.0;
    lg += std::lgamma(0.5 * (a + 1));
    b += 0.5 * (a + 1);
  }
  return 2.0 * std::exp(lg - std::lgamma(b));
}

inline double ball_moment(const std::vector<int>& alpha) {
  const int d = std::accumulate(alpha.begin(), alpha.end(), 0);
  return sphere_moment(alpha) / (d + static_cast<int>(alpha.size()));
}

// Sparse exact polynomials in n real variables.
using Exp = std::vector<int>;
using Poly = std::map<Exp, mpq_class>;

inline void prune(Poly& p) {
  for (auto it = p.begin(); it != p.end();) it = it->second == 0 ? p.erase(it) : std::next(it);
}

inline Poly mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      Exp e(ea.size());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      out[e] += ca * cb;
    }
  prune(out);
  return out;
}

inline Poly laplacian(const Poly& p) {
  Poly out;
  for (const auto& [e, c] : p)
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i] >= 2) {
        Exp f = e;
        f[i] -= 2;
        out[f] += c * e[i] * (e[i] - 1);
      }
  prune(out);
  return out;
}

inline Poly norm2_power(int n, int k) {
  Poly r{{Exp(n, 0), 1}};
  Poly q;
  for (int i = 0; i < n; ++i) {
    Exp e(n, 0);
    e[i] = 2;
    q[e] = 1;
  }
  for (int i = 0; i < k; ++i) r = mul(r, q);
  return r;
}

inline void monomials(int n, int d, Exp& e, int i, std::vector<Exp>& out) {
  if (i == n - 1) {
    e[i] = d;
    out.push_back(e);
    return;
  }
  for (int a = d; a >= 0; --a) {
    e[i] = a;
    monomials(n, d - a, e, i + 1, out);
  }
}

inline std::vector<Exp> monomials(int n, int d) {
  std::vector<Exp> out;
  if (d < 0) return out;
  Exp e(n, 0);
  monomials(n, d, e, 0, out);
  return out;
}

// Solves P = sum_j |x|^(l-j) H_j with every H_j harmonic as one exact linear system over the
// monomial coefficients of all H_j. Returns H_j keyed by j; throws if the solution is not unique.
inline std::map<int, Poly> decompose(const Poly& P, int n, int l) {
  std::vector<std::pair<int, Exp>> unknowns;
  for (int j = l; j >= 0; j -= 2)
    for (const auto& e : monomials(n, j)) unknowns.emplace_back(j, e);
  const std::size_t N = unknowns.size();
  std::vector<std::vector<mpq_class>> rows;
  std::map<Exp, std::size_t> top;
  for (const auto& e : monomials(n, l)) {
    top[e] = rows.size();
    rows.emplace_back(N + 1, 0);
    auto it = P.find(e);
    if (it != P.end()) rows.back()[N] = it->second;
  }
  std::map<std::pair<int, Exp>, std::size_t> lap;
  for (int j = l; j >= 2; j -= 2)
    for (const auto& e : monomials(n, j - 2)) {
      lap[{j, e}] = rows.size();
      rows.emplace_back(N + 1, 0);
    }
  for (std::size_t u = 0; u < N; ++u) {
    const auto& [j, e] = unknowns[u];
    for (const auto& [f, c] : mul(norm2_power(n, (l - j) / 2), Poly{{e, 1}})) rows[top.at(f)][u] += c;
    for (const auto& [f, c] : laplacian(Poly{{e, 1}})) rows[lap.at({j, f})][u] += c;
  }
  std::size_t rank = 0;
  std::vector<std::size_t> pivot_col;
  for (std::size_t col = 0; col < N && rank < rows.size(); ++col) {
    std::size_t piv = rank;
    while (piv < rows.size() && rows[piv][col] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[rank]);
    const mpq_class inv = 1 / rows[rank][col];
    for (auto& x : rows[rank]) x *= inv;
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (r != rank && rows[r][col] != 0) {
        const mpq_class f = rows[r][col];
        for (std::size_t k = col; k <= N; ++k) rows[r][k] -= f * rows[rank][k];
      }
    pivot_col.push_back(col);
    ++rank;
  }
  if (rank != N) throw std::runtime_error("decomposition is not unique");
  for (std::size_t r = rank; r < rows.size(); ++r)
    if (rows[r][N] != 0) throw std::runtime_error("decomposition does not exist");
  std::map<int, Poly> out;
  for (std::size_t r = 0; r < rank; ++r) {
    const auto& [j, e] = unknowns[pivot_col[r]];
    if (rows[r][N] != 0) out[j][e] = rows[r][N];
  }
  return out;
}

}  // namespace oracle
