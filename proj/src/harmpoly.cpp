#include "semiharm/harmpoly.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>

#include "semiharm/errors.hpp"
#include "semiharm/fields.hpp"
#include "semiharm/quadrature.hpp"

namespace semiharm {

double PiMultiple::value() const { return coeff.get_d() * std::pow(pi, pi_power); }

std::string PiMultiple::to_string() const {
  if (coeff == 0) return "0";
  std::string s = coeff.get_str();
  if (pi_power == 1) s += "*pi";
  else if (pi_power > 1) s += "*pi^" + std::to_string(pi_power);
  return s;
}

HomoPoly::HomoPoly(int n, int degree) : n_(n), degree_(degree) {
  if (n < 1) throw std::invalid_argument("HomoPoly: need at least one variable");
  if (degree < 0) throw std::invalid_argument("HomoPoly: negative degree");
}

HomoPoly HomoPoly::monomial(const Index& e, const mpq_class& c) {
  int d = 0;
  for (int x : e) d += x;
  HomoPoly p(static_cast<int>(e.size()), d);
  p.add_term(e, c);
  return p;
}

HomoPoly HomoPoly::constant(int n, const mpq_class& c) { return monomial(Index(n, 0), c); }

HomoPoly HomoPoly::norm2_power(int n, int k) {
  HomoPoly sq(n, 2);
  for (int i = 0; i < n; ++i) {
    Index e(n, 0);
    e[i] = 2;
    sq.add_term(e, 1);
  }
  HomoPoly r = constant(n, 1);
  for (int i = 0; i < k; ++i) r = r * sq;
  return r;
}

void HomoPoly::add_term(const Index& e, const mpq_class& c) {
  if (c == 0) return;
  auto [it, fresh] = coeffs_.emplace(e, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) coeffs_.erase(it);
  }
}

mpq_class HomoPoly::coefficient(const Index& e) const {
  auto it = coeffs_.find(e);
  return it == coeffs_.end() ? mpq_class(0) : it->second;
}

HomoPoly HomoPoly::operator+(const HomoPoly& o) const {
  if (n_ != o.n_) throw std::invalid_argument("HomoPoly: variable counts differ");
  if (o.is_zero()) return *this;
  if (is_zero()) return o;
  if (degree_ != o.degree_) throw std::invalid_argument("HomoPoly: degrees differ");
  HomoPoly r = *this;
  for (const auto& [e, c] : o.coeffs_) r.add_term(e, c);
  return r;
}

HomoPoly HomoPoly::operator-(const HomoPoly& o) const { return *this + o * mpq_class(-1); }

HomoPoly HomoPoly::operator*(const HomoPoly& o) const {
  if (n_ != o.n_) throw std::invalid_argument("HomoPoly: variable counts differ");
  HomoPoly r(n_, degree_ + o.degree_);
  Index e(n_);
  for (const auto& [e1, c1] : coeffs_)
    for (const auto& [e2, c2] : o.coeffs_) {
      for (int i = 0; i < n_; ++i) e[i] = e1[i] + e2[i];
      r.add_term(e, c1 * c2);
    }
  return r;
}

HomoPoly HomoPoly::operator*(const mpq_class& c) const {
  HomoPoly r(n_, degree_);
  if (c == 0) return r;
  for (const auto& [e, x] : coeffs_) r.coeffs_.emplace(e, x * c);
  return r;
}

bool HomoPoly::operator==(const HomoPoly& o) const {
  if (n_ != o.n_) return false;
  if (is_zero() && o.is_zero()) return true;
  return degree_ == o.degree_ && coeffs_ == o.coeffs_;
}

HomoPoly HomoPoly::derivative(int i) const {
  HomoPoly r(n_, std::max(degree_ - 1, 0));
  for (const auto& [e, c] : coeffs_) {
    if (e[i] == 0) continue;
    Index d = e;
    d[i] -= 1;
    r.add_term(d, c * e[i]);
  }
  return r;
}

double HomoPoly::eval(std::span<const double> x) const {
  double s = 0.0;
  for (const auto& [e, c] : coeffs_) {
    double t = c.get_d();
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < e[i]; ++k) t *= x[i];
    s += t;
  }
  return s;
}

std::vector<double> HomoPoly::gradient(std::span<const double> x) const {
  std::vector<double> g(n_);
  for (int i = 0; i < n_; ++i) g[i] = derivative(i).eval(x);
  return g;
}

std::string HomoPoly::to_string() const {
  if (coeffs_.empty()) return "0";
  std::string s;
  // Highest exponent of x1 first, which reads naturally for small examples.
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    const auto& [e, c] = *it;
    mpq_class a = abs(c);
    if (s.empty()) s += c < 0 ? "-" : "";
    else s += c < 0 ? " - " : " + ";
    bool any = false;
    if (a != 1) {
      s += a.get_str();
      any = true;
    }
    for (int i = 0; i < n_; ++i) {
      if (e[i] == 0) continue;
      if (any) s += "*";
      s += "x" + std::to_string(i + 1);
      if (e[i] > 1) s += "^" + std::to_string(e[i]);
      any = true;
    }
    if (!any) s += "1";
  }
  return s;
}

HomoPoly HomoPoly::parse(const std::string& text, int n) {
  std::size_t i = 0;
  auto fail = [&](const std::string& msg) -> void {
    throw ParseError(msg + " at column " + std::to_string(i + 1) + " in \"" + text + "\"");
  };
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto read_int = [&]() -> std::string {
    std::size_t j = i;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    if (j == i) fail("expected an integer");
    std::string out = text.substr(i, j - i);
    i = j;
    return out;
  };

  std::vector<std::pair<std::map<int, int>, mpq_class>> terms;
  int max_var = 0;
  skip();
  if (i == text.size()) fail("empty polynomial");
  bool first = true;
  while (true) {
    skip();
    if (i == text.size()) break;
    int sign = 1;
    if (text[i] == '+' || text[i] == '-') {
      sign = text[i] == '-' ? -1 : 1;
      ++i;
    } else if (!first) {
      fail("expected '+' or '-'");
    }
    first = false;
    mpq_class c(sign);
    std::map<int, int> powers;
    bool need_factor = true;
    while (need_factor) {
      skip();
      if (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        std::string num = read_int();
        mpq_class q(num);
        skip();
        if (i < text.size() && text[i] == '/') {
          ++i;
          skip();
          mpz_class den(read_int());
          if (den == 0) fail("zero denominator");
          q /= den;
        }
        c *= q;
      } else if (i < text.size() && text[i] == 'x') {
        ++i;
        const int v = std::stoi(read_int());
        if (v < 1) fail("variables are numbered from 1");
        int e = 1;
        skip();
        if (i < text.size() && text[i] == '^') {
          ++i;
          skip();
          e = std::stoi(read_int());
        }
        powers[v] += e;
        max_var = std::max(max_var, v);
      } else {
        fail("expected a number or a variable");
      }
      skip();
      need_factor = i < text.size() && text[i] == '*';
      if (need_factor) ++i;
    }
    terms.emplace_back(std::move(powers), c);
  }
  if (n == 0) n = std::max(max_var, 1);
  if (max_var > n) fail("variable index exceeds " + std::to_string(n));
  int degree = -1;
  HomoPoly p(n, 0);
  for (const auto& [powers, c] : terms) {
    Index e(n, 0);
    int d = 0;
    for (auto [v, k] : powers) {
      e[v - 1] += k;
      d += k;
    }
    if (degree >= 0 && d != degree) throw ParseError("polynomial is not homogeneous: \"" + text + "\"");
    degree = d;
    p.degree_ = d;
    p.add_term(e, c);
  }
  return p;
}

HomoPoly laplacian(const HomoPoly& p) {
  HomoPoly r(p.n(), std::max(p.degree() - 2, 0));
  for (int i = 0; i < p.n(); ++i) r = r + p.derivative(i).derivative(i);
  return r;
}

HomoPoly euler_defect(const HomoPoly& p) {
  HomoPoly r = p * mpq_class(-p.degree());
  for (int i = 0; i < p.n(); ++i) {
    HomoPoly::Index e(p.n(), 0);
    e[i] = 1;
    r = r + HomoPoly::monomial(e, 1) * p.derivative(i);
  }
  return r;
}

HomoPoly HarmonicDecomposition::reconstruct() const {
  HomoPoly r(n, degree);
  for (const auto& part : parts) r = r + HomoPoly::norm2_power(n, (degree - part.j) / 2) * part.h;
  return r;
}

HomoPoly HarmonicDecomposition::part(int j) const {
  for (const auto& p : parts)
    if (p.j == j) return p.h;
  return HomoPoly(n, j);
}

mpq_class HarmonicDecomposition::h0() const {
  for (const auto& p : parts)
    if (p.j == 0) return p.h.coefficient(HomoPoly::Index(n, 0));
  return 0;
}

HarmonicDecomposition harmonic_decompose(const HomoPoly& p) {
  const int n = p.n(), l = p.degree(), K = l / 2;
  // Delta^q (||x||^{2k} H_j) = c(k, q) ||x||^{2(k-q)} H_j for harmonic H_j of degree j = l - 2k.
  auto c = [&](int k, int q) {
    const int j = l - 2 * k;
    mpq_class r = 1;
    for (int i = 0; i < q; ++i) r *= 2 * (k - i) * (2 * j + n + 2 * (k - i) - 2);
    return r;
  };
  std::vector<HomoPoly> lap{p};
  for (int q = 1; q <= K; ++q) lap.push_back(laplacian(lap.back()));
  std::vector<HomoPoly> h(K + 1, HomoPoly(n, 0));  // h[k] is H_{l-2k}
  for (int q = K; q >= 0; --q) {
    HomoPoly rhs = lap[q];
    for (int k = q + 1; k <= K; ++k) rhs = rhs - HomoPoly::norm2_power(n, k - q) * h[k] * c(k, q);
    h[q] = rhs * mpq_class(1 / c(q, q));
  }
  HarmonicDecomposition out;
  out.n = n;
  out.degree = l;
  for (int k = 0; k <= K; ++k)
    if (!h[k].is_zero()) out.parts.push_back({l - 2 * k, h[k]});
  return out;
}

namespace {

void exponents(int n, int degree, HomoPoly::Index& e, int i, std::vector<HomoPoly::Index>& out) {
  if (i == n - 1) {
    e[i] = degree;
    out.push_back(e);
    return;
  }
  for (int d = degree; d >= 0; --d) {
    e[i] = d;
    exponents(n, degree - d, e, i + 1, out);
  }
}

}  // namespace

HomoPoly random_homopoly(int n, int degree, std::mt19937_64& rng) {
  std::vector<HomoPoly::Index> all;
  HomoPoly::Index e(n, 0);
  exponents(n, degree, e, 0, all);
  std::uniform_int_distribution<int> coin(0, 1), num(1, 9), den(1, 6);
  HomoPoly p(n, degree);
  while (p.is_zero())
    for (const auto& idx : all) {
      if (coin(rng) == 0) continue;
      const int sign = coin(rng) == 0 ? -1 : 1;
      mpq_class c(sign * num(rng), den(rng));
      c.canonicalize();
      p = p + HomoPoly::monomial(idx, c);
    }
  return p;
}

namespace {

int factorial(int k) { return k <= 1 ? 1 : k * factorial(k - 1); }

int base_dimension(const HomoPoly& p) {
  if (p.n() % 2 != 0) throw std::invalid_argument("sphere integrals need an even number of variables");
  return p.n() / 2;
}

}  // namespace

PiMultiple sphere_integral_homogeneous(const HomoPoly& p, int sheets) {
  const int m = base_dimension(p);
  if (p.degree() % 2 == 1) return {0, m};
  const mpq_class h0 = harmonic_decompose(p).h0();
  return {mpq_class(sheets) * h0 / factorial(m), m};
}

PiMultiple sphere_integral_truth(const HomoPoly& p, int sheets) {
  const int m = base_dimension(p);
  if (p.degree() % 2 == 1) return {0, m};
  const mpq_class h0 = harmonic_decompose(p).h0();
  return {mpq_class(2 * sheets) * h0 / factorial(m - 1), m};
}

cplx eval_on_base(const HomoPoly& p, const BasePoint& z) {
  const RealPoint x = to_real(z);
  return p.eval(std::span<const double>(x.data(), p.n()));
}

nlohmann::json neumann_example_check(const HomoPoly& p, const CoveringMap& cov, int samples, std::uint64_t seed) {
  const int m = cov.m();
  if (p.n() != 2 * m) throw ConfigError("polynomial must use 2m = " + std::to_string(2 * m) + " variables");
  if (distance(cov.base_center(), {}, m) + 1.0 >= cov.base_radius())
    throw RegionEscapesDomain("the unit ball must lie inside the base domain");
  const auto dec = harmonic_decompose(p);
  const double h0 = dec.h0().get_d();
  std::vector<HarmonicPart> higher;
  for (const auto& part : dec.parts)
    if (part.j >= 1) higher.push_back(part);

  auto psi_at = [higher, n = p.n()](const BasePoint& z) {
    const RealPoint x = to_real(z);
    double s = 0.0;
    for (const auto& part : higher) s += part.h.eval(std::span<const double>(x.data(), n)) / part.j;
    return cplx(s);
  };
  const ScalarField psi = ScalarField::pullback("psi", psi_at);
  const ScalarField psi_shift = psi.shifted(1.0);
  const DefiningFunction rho = DefiningFunction::sphere({}, 1.0, m);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  auto random_direction = [&] {
    RealPoint d{};
    double s = 0.0;
    for (int i = 0; i < 2 * m; ++i) {
      d[i] = gauss(rng);
      s += d[i] * d[i];
    }
    for (auto& x : d) x /= std::sqrt(s);
    return d;
  };

  double boundary = 0.0, shift = 0.0;
  int taken = 0, attempts = 0;
  while (taken < samples && attempts < 100 * samples) {
    ++attempts;
    const BasePoint z = offset({}, random_direction(), 1.0);
    const auto roots = cov.roots(z);
    bool near_locus = false;
    for (std::size_t i = 0; i < roots.size(); ++i)
      for (std::size_t j = 0; j < i; ++j) near_locus = near_locus || std::abs(roots[i] - roots[j]) < 1e-3;
    if (near_locus) continue;
    for (cplx w : roots) {
      if (taken == samples) break;
      const CoverPoint x{z, w, std::nullopt};
      const cplx dn = normal_derivative(cov, psi, rho, x);
      boundary = std::max(boundary, std::abs(dn - (eval_on_base(p, z) - h0)));
      shift = std::max(shift, std::abs(normal_derivative(cov, psi_shift, rho, x) - dn));
      ++taken;
    }
  }

  double lap = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double t = 0.9 * std::pow(std::uniform_real_distribution<double>()(rng), 1.0 / (2 * m));
    const BasePoint z = offset({}, random_direction(), t);
    const auto roots = cov.roots(z);
    for (cplx w : roots) {
      try {
        lap = std::max(lap, std::abs(laplacian(cov, psi, z, w, roots)));
      } catch (const BranchJump&) {
      }
    }
  }

  // Surface integral of the pulled-back P over the unit sphere, all sheets.
  const QuadratureSizes q = QuadratureSizes{}.resolved(m);
  const QuadratureRule rule = sphere_rule(m, {}, 1.0, q.sphere);
  const cplx quad = rule.integrate([&](const BasePoint& z) {
    cplx s = 0.0;
    for (cplx w : cov.roots(z)) {
      (void)w;
      s += eval_on_base(p, z);
    }
    return s;
  });
  const PiMultiple printed = sphere_integral_homogeneous(p, cov.degree());
  const PiMultiple truth = sphere_integral_truth(p, cov.degree());

  nlohmann::json parts = nlohmann::json::array();
  for (const auto& part : dec.parts) parts.push_back({{"j", part.j}, {"H", part.h.to_string()}});
  nlohmann::json out = {
      {"polynomial", p.to_string()},
      {"covering", cov.label()},
      {"m", m},
      {"sheets", cov.degree()},
      {"parts", parts},
      {"boundary_samples", taken},
      {"boundary_residual", boundary},
      {"laplacian_residual", lap},
      {"constant_shift_residual", shift},
      {"sphere_integral_formula", printed.to_string()},
      {"sphere_integral_formula_value", printed.value()},
      {"sphere_integral_truth", truth.to_string()},
      {"sphere_integral_truth_value", truth.value()},
      {"sphere_integral_quadrature", quad.real()},
  };
  if (printed.coeff != 0) out["quadrature_over_formula"] = quad.real() / printed.value();
  return out;
}

}  // namespace semiharm
