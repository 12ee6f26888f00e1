#include "semiharm/covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "semiharm/errors.hpp"
#include "semiharm/field.hpp"
#include "semiharm/roots.hpp"

namespace semiharm {

namespace {

constexpr double kClusterRel = 1e-6;

// Value and first derivative of the d-th derivative of the monic polynomial with
// coefficients c (c[j] multiplies w^j, leading 1).
std::pair<cplx, cplx> derivative_at(const std::vector<cplx>& c, int d, cplx w) {
  const int k = static_cast<int>(c.size());
  auto coeff = [&](int j) { return j == k ? cplx(1.0) : c[j]; };
  auto falling = [](int j, int d) {
    double f = 1.0;
    for (int i = 0; i < d; ++i) f *= j - i;
    return f;
  };
  cplx v = 0.0, dv = 0.0;
  for (int j = k; j >= d; --j) {
    dv = dv * w + v;
    v = v * w + falling(j, d) * coeff(j);
  }
  return {v, dv};
}
constexpr double kJitterRel = 1e-8;
constexpr double kLocusRel = 1e-10;

BasePoint random_base_point(std::mt19937_64& rng, const BasePoint& center, double radius, int m) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif;
  RealPoint dir{};
  double n = 0.0;
  for (int i = 0; i < 2 * m; ++i) {
    dir[i] = gauss(rng);
    n += dir[i] * dir[i];
  }
  n = std::sqrt(n);
  for (auto& d : dir) d /= n;
  const double t = radius * std::pow(unif(rng), 1.0 / (2 * m));
  return offset(center, dir, t);
}

double min_separation(const std::vector<cplx>& r) {
  double s = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) s = std::min(s, std::abs(r[i] - r[j]));
  return s;
}

double root_scale(const std::vector<cplx>& r) {
  double s = 1.0;
  for (cplx w : r) s = std::max(s, std::abs(w));
  return s;
}

std::string describe(const std::vector<BasePoly>& coeffs) {
  const int k = static_cast<int>(coeffs.size());
  std::string s = "w^" + std::to_string(k);
  for (int j = k - 1; j >= 0; --j) {
    if (coeffs[j].is_zero()) continue;
    s += " + (" + coeffs[j].to_string() + ")";
    if (j > 0) s += "*w^" + std::to_string(j);
  }
  return s;
}

}  // namespace

CoveringMap::CoveringMap(int m, std::vector<BasePoly> coeffs, BasePoint base_center, double base_radius,
                         std::string label, std::uint64_t seed)
    : m_(m),
      coeffs_(std::move(coeffs)),
      center_(base_center),
      radius_(base_radius),
      label_(std::move(label)),
      seed_(seed) {
  if (m_ != 1 && m_ != 2) throw InvalidCovering("base dimension must be 1 or 2");
  if (coeffs_.empty()) throw InvalidCovering("fiber degree must be at least 1");
  if (!(radius_ > 0.0) || !std::isfinite(radius_)) throw InvalidCovering("base radius must be positive");
  if (m_ == 1) center_[1] = 0.0;
  identity_ = coeffs_.size() == 1 && (coeffs_[0] + BasePoly::variable(0)).is_zero();
  if (label_.empty()) label_ = describe(coeffs_);
  validate();
}

CoveringMap CoveringMap::identity(int m, BasePoint center, double radius) {
  return CoveringMap(m, {-BasePoly::variable(0)}, center, radius, "w - z1");
}

CoveringMap CoveringMap::from_polynomial(int m, const std::string& fiber_poly, BasePoint center, double radius,
                                         std::string label) {
  auto parts = BasePoly::parse_fiber_polynomial(fiber_poly, m);
  const int k = static_cast<int>(parts.size()) - 1;
  if (k < 1) throw InvalidCovering("fiber polynomial must involve w");
  const auto& lead = parts[k];
  if (!lead.is_constant() || lead(BasePoint{}) != cplx(1.0))
    throw InvalidCovering("fiber polynomial must be monic in w");
  parts.pop_back();
  return CoveringMap(m, std::move(parts), center, radius, label.empty() ? fiber_poly : label);
}

CoveringMap CoveringMap::from_json(const nlohmann::json& desc, std::uint64_t seed) {
  static const std::vector<std::string> allowed = {"m", "fiber_degree", "coeffs", "base_center", "base_radius",
                                                   "label"};
  if (!desc.is_object()) throw ConfigError("covering must be a JSON object");
  for (const auto& [key, value] : desc.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("unknown covering key '" + key + "'");
  try {
    const int m = desc.at("m").get<int>();
    const int k = desc.at("fiber_degree").get<int>();
    if (m != 1 && m != 2) throw ConfigError("covering.m must be 1 or 2");
    if (k < 1) throw ConfigError("covering.fiber_degree must be >= 1");
    std::vector<BasePoly> coeffs(k);
    for (const auto& [key, value] : desc.at("coeffs").items()) {
      if (key.rfind("w^", 0) != 0) throw ConfigError("coefficient key '" + key + "' must look like w^j");
      std::size_t used = 0;
      int j = -1;
      try {
        j = std::stoi(key.substr(2), &used);
      } catch (const std::exception&) {
        throw ConfigError("coefficient key '" + key + "' must look like w^j");
      }
      if (used != key.size() - 2 || j < 0) throw ConfigError("coefficient key '" + key + "' must look like w^j");
      const std::string text = value.is_string() ? value.get<std::string>() : value.dump();
      BasePoly c = BasePoly::parse(text, m);
      if (j == k) {
        if (!c.is_constant() || c(BasePoint{}) != cplx(1.0))
          throw InvalidCovering("fiber polynomial is not monic: coefficient of w^" + std::to_string(k) +
                                " must be 1");
        continue;
      }
      if (j > k) throw InvalidCovering("coefficient " + key + " exceeds fiber_degree");
      coeffs[j] = c;
    }
    const auto& c = desc.at("base_center");
    if (!c.is_array() || c.size() != static_cast<std::size_t>(2 * m))
      throw ConfigError("base_center must hold 2m real numbers");
    BasePoint center{};
    for (int j = 0; j < m; ++j) center[j] = cplx(c[2 * j].get<double>(), c[2 * j + 1].get<double>());
    const double radius = desc.at("base_radius").get<double>();
    return CoveringMap(m, std::move(coeffs), center, radius, desc.value("label", std::string{}), seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("covering: ") + e.what());
  }
}

void CoveringMap::validate() {
  std::mt19937_64 rng(seed_);
  for (int i = 0; i < 8; ++i) {
    BasePoint z = random_base_point(rng, center_, radius_, m_);
    auto r = roots(z);
    if (r.size() > 1 && min_separation(r) <= kClusterRel * root_scale(r))
      throw InvalidCovering("fiber polynomial has repeated roots at a random base point " + format_point(z, m_) +
                            "; the discriminant vanishes identically");
  }
}

bool CoveringMap::in_base(const BasePoint& z, double margin) const {
  return distance(z, center_, m_) <= radius_ - margin + 1e-12 * radius_;
}

std::vector<cplx> CoveringMap::coefficients_at(const BasePoint& z) const {
  std::vector<cplx> c(coeffs_.size());
  for (std::size_t j = 0; j < coeffs_.size(); ++j) c[j] = coeffs_[j](z);
  return c;
}

cplx CoveringMap::eval(const BasePoint& z, cplx w) const { return monic_eval(coefficients_at(z), w); }

cplx CoveringMap::dF_dw(const BasePoint& z, cplx w) const {
  const int k = degree();
  cplx d = static_cast<double>(k);
  for (int j = k - 1; j >= 1; --j) d = d * w + static_cast<double>(j) * coeffs_[j](z);
  return d;
}

double CoveringMap::dF_dw_scale(const BasePoint& z, cplx w) const {
  const int k = degree();
  const double aw = std::abs(w);
  double s = k;
  for (int j = k - 1; j >= 1; --j) s = s * aw + j * std::abs(coeffs_[j](z));
  return s;
}

std::array<cplx, 2> CoveringMap::dw_dz(const BasePoint& z, cplx w) const {
  const cplx fw = dF_dw(z, w);
  std::array<cplx, 2> out{};
  for (int i = 0; i < m_; ++i) {
    cplx fz = 0.0, wp = 1.0;
    for (std::size_t j = 0; j < coeffs_.size(); ++j) {
      fz += coeffs_[j].derivative(i, z) * wp;
      wp *= w;
    }
    out[i] = -fz / fw;
  }
  return out;
}

double CoveringMap::residual_scale(const BasePoint& z, cplx w) const {
  double s = 1.0, wp = 1.0;
  for (const auto& c : coeffs_) {
    s += c.abs_eval(z) * wp;
    wp *= std::abs(w);
  }
  return s + wp;
}

std::vector<cplx> CoveringMap::roots(const BasePoint& z) const { return monic_roots(coefficients_at(z)); }

std::vector<cplx> CoveringMap::roots(const BasePoint& z, std::span<const cplx> seeds) const {
  return monic_roots(coefficients_at(z), seeds);
}

std::vector<FiberRoot> CoveringMap::fiber(const BasePoint& z) const {
  auto raw = roots(z);
  const std::size_t n = raw.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double scale = std::max({1.0, std::abs(raw[i]), std::abs(raw[j])});
      if (std::abs(raw[i] - raw[j]) <= kClusterRel * scale) parent[find(i)] = find(j);
    }
  std::vector<FiberRoot> out;
  std::vector<int> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(out.size());
      out.push_back({0.0, 0, {}});
    }
    auto& fr = out[slot[r]];
    fr.members.push_back(raw[i]);
    fr.mult += 1;
  }
  const auto c = coefficients_at(z);
  for (auto& fr : out) {
    cplx s = 0.0;
    for (cplx w : fr.members) s += w;
    fr.w = s / static_cast<double>(fr.mult);
    if (fr.mult == 1) continue;
    // The solver only reaches sqrt(eps)-accuracy at a multiple root; the cluster centre is a
    // simple root of the (mult - 1)-th derivative.
    double spread = 0.0;
    for (cplx w : fr.members) spread = std::max(spread, std::abs(w - fr.w));
    cplx w = fr.w;
    for (int it = 0; it < 8; ++it) {
      const auto [v, dv] = derivative_at(c, fr.mult - 1, w);
      if (dv == cplx(0.0)) break;
      const cplx step = v / dv;
      w -= step;
      if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(w))) break;
    }
    if (std::abs(w - fr.w) <= 2.0 * spread + 1e-12 * std::max(1.0, std::abs(fr.w))) fr.w = w;
  }
  std::sort(out.begin(), out.end(), [](const FiberRoot& a, const FiberRoot& b) {
    if (a.w.real() != b.w.real()) return a.w.real() < b.w.real();
    return a.w.imag() < b.w.imag();
  });
  return out;
}

int CoveringMap::local_multiplicity(const CoverPoint& x) const {
  const int k = degree();
  if (k == 1) return 1;
  const double eps = 1e-4 * radius_;
  double sep = std::numeric_limits<double>::infinity();
  for (const auto& fr : fiber(x.base)) {
    const double d = std::abs(fr.w - x.fiber);
    if (d > kClusterRel * std::max(1.0, std::abs(x.fiber))) sep = std::min(sep, d);
  }
  const double delta = std::min(10.0 * std::pow(eps, 1.0 / k), sep / 3.0);
  BasePoint zp = x.base;
  zp[0] += eps * std::polar(1.0, 0.3) / std::sqrt(static_cast<double>(m_));
  if (m_ == 2) zp[1] += eps * std::polar(1.0, 1.1) / std::sqrt(2.0);
  int count = 0;
  for (cplx w : roots(zp)) {
    const double d = std::abs(w - x.fiber);
    if (d >= 0.5 * delta && d <= 2.0 * delta)
      throw AmbiguousCluster("perturbed root at distance " + format_double(d) + " straddles cluster radius " +
                             format_double(delta));
    if (d < delta) ++count;
  }
  if (count == 0) throw AmbiguousCluster("no fiber root near " + format_complex(x.fiber));
  return count;
}

int CoveringMap::checked_degree() const {
  std::mt19937_64 rng(seed_ ^ 0x9e3779b97f4a7c15ULL);
  for (int i = 0; i < 8; ++i) {
    int total = 0;
    for (const auto& fr : fiber(random_base_point(rng, center_, radius_, m_))) total += fr.mult;
    if (total != degree()) throw InvalidCovering("fiber count differs from the fiber degree");
  }
  return degree();
}

CoverPoint CoveringMap::point(const BasePoint& z, cplx w) const {
  BasePoint zz = z;
  if (m_ == 1) zz[1] = 0.0;
  if (std::abs(eval(zz, w)) > 1e-9 * residual_scale(zz, w))
    throw InvalidCovering("point " + format_point(zz, m_) + ", w=" + format_complex(w) + " is not on the covering");
  return CoverPoint{zz, w, std::nullopt};
}

CoverPoint CoveringMap::point_over(const BasePoint& z) const {
  BasePoint zz = z;
  if (m_ == 1) zz[1] = 0.0;
  return CoverPoint{zz, fiber(zz).front().w, std::nullopt};
}

CoverPoint CoveringMap::annotate(CoverPoint x) const {
  if (!x.mult) x.mult = local_multiplicity(x);
  return x;
}

std::vector<BasePoint> sample_base_points(const CoveringMap& cov, int n, std::uint64_t seed, double shrink) {
  std::mt19937_64 rng(seed);
  std::vector<BasePoint> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i)
    out.push_back(random_base_point(rng, cov.base_center(), shrink * cov.base_radius(), cov.m()));
  return out;
}

cplx trace(const CoveringMap& cov, const ScalarField& f, const BasePoint& z) {
  cplx s = 0.0;
  for (const auto& fr : cov.fiber(z)) s += static_cast<double>(fr.mult) * f(z, fr.w);
  return s;
}

cplx continue_root(const CoveringMap& cov, const BasePoint& z_from, cplx w_from, std::span<const cplx> fiber_from,
                   const BasePoint& z_to) {
  const auto all = fiber_from.size() == static_cast<std::size_t>(cov.degree()) ? cov.roots(z_to, fiber_from)
                                                                                 : cov.roots(z_to);
  if (all.size() == 1) return all[0];
  cplx predicted = w_from;
  if (std::abs(cov.dF_dw(z_from, w_from)) > 1e-12) {
    const auto dw = cov.dw_dz(z_from, w_from);
    for (int j = 0; j < cov.m(); ++j) predicted += dw[j] * (z_to[j] - z_from[j]);
  }
  std::size_t best = 0;
  double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const double d = std::abs(all[i] - predicted);
    if (d < d1) {
      d2 = d1;
      d1 = d;
      best = i;
    } else if (d < d2) {
      d2 = d;
    }
  }
  for (std::size_t i = 0; i < all.size(); ++i)
    if (i != best && std::abs(all[i] - all[best]) < 1e-7)
      throw BranchJump("two fiber roots within 1e-7 at " + format_point(z_to, cov.m()));
  if (d1 > 0.5 * d2) throw BranchJump("sheet continuation is ambiguous at " + format_point(z_to, cov.m()));
  return all[best];
}

std::vector<cplx> branch_values_along_ray(const CoveringMap& cov, const CoverPoint& a, int nu, const RealPoint& dir,
                                          std::span<const double> ts, std::vector<BasePoint>* bases) {
  const int k = cov.degree();
  const int m = cov.m();
  std::vector<cplx> out;
  out.reserve(ts.size() * nu);
  if (bases) bases->clear();
  if (ts.empty()) return out;

  if (nu >= k) {
    BasePoint jitter{std::polar(kJitterRel * cov.base_radius(), 0.7),
                     m == 2 ? std::polar(kJitterRel * cov.base_radius(), 1.9) : cplx(0.0)};
    std::vector<cplx> prev;
    for (double t : ts) {
      BasePoint z = offset(a.base, dir, t);
      auto r = prev.empty() ? cov.roots(z) : cov.roots(z, prev);
      if (k > 1 && min_separation(r) < kLocusRel * root_scale(r)) {
        z[0] += jitter[0];
        z[1] += jitter[1];
        r = cov.roots(z);
      }
      prev = r;
      out.insert(out.end(), r.begin(), r.end());
      if (bases) bases->push_back(z);
    }
    return out;
  }

  // Follow the nu sheets through a outward along the ray.
  std::vector<cplx> tracked, all;
  double t_cur = 0.0;
  if (nu == 1) {
    all = cov.roots(a.base);
    tracked = {a.fiber};
  } else {
    t_cur = 1e-4 * ts.front();
    all = cov.roots(offset(a.base, dir, t_cur));
    std::vector<cplx> sorted = all;
    std::sort(sorted.begin(), sorted.end(),
              [&](cplx p, cplx q) { return std::abs(p - a.fiber) < std::abs(q - a.fiber); });
    tracked.assign(sorted.begin(), sorted.begin() + nu);
  }
  const double max_step = std::max(ts.back(), 1e-12) / 8.0;
  double h = max_step;
  std::vector<cplx> next(nu);
  std::vector<char> used(k);
  for (double target : ts) {
    while (t_cur < target) {
      const double step = std::min(h, target - t_cur);
      const BasePoint z_cur = offset(a.base, dir, t_cur);
      const BasePoint z_new = offset(a.base, dir, t_cur + step);
      auto all_new = cov.roots(z_new, all);
      bool ok = true;
      std::fill(used.begin(), used.end(), 0);
      for (int i = 0; i < nu && ok; ++i) {
        cplx pred = tracked[i];
        if (std::abs(cov.dF_dw(z_cur, tracked[i])) > 1e-10) {
          const auto dw = cov.dw_dz(z_cur, tracked[i]);
          for (int j = 0; j < m; ++j) pred += dw[j] * (z_new[j] - z_cur[j]);
        }
        int best = -1;
        double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
        for (int j = 0; j < k; ++j) {
          const double d = std::abs(all_new[j] - pred);
          if (d < d1) {
            d2 = d1;
            d1 = d;
            best = j;
          } else if (d < d2) {
            d2 = d;
          }
        }
        if (d1 >= 0.25 * d2 || used[best]) ok = false;
        else {
          used[best] = 1;
          next[i] = all_new[best];
        }
      }
      if (ok) {
        t_cur += step;
        tracked = next;
        all = std::move(all_new);
        h = std::min(2.0 * step, max_step);
      } else {
        h = 0.5 * step;
        if (h < 1e-13 * (1.0 + target))
          throw BranchJump("sheets through " + format_point(a.base, m) + " meet another sheet along a ray at t=" +
                           format_double(t_cur));
      }
    }
    out.insert(out.end(), tracked.begin(), tracked.end());
    if (bases) bases->push_back(offset(a.base, dir, target));
  }
  return out;
}

}  // namespace semiharm
