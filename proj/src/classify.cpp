#include "semiharm/classify.hpp"

#include <algorithm>
#include <cmath>

#include "semiharm/errors.hpp"
#include "semiharm/fields.hpp"
#include "semiharm/means.hpp"
#include "semiharm/residue.hpp"

namespace semiharm {

Outcome grade(double deviation, double tol) {
  if (!std::isfinite(deviation)) return Outcome::Fail;
  if (deviation < tol) return Outcome::Pass;
  if (deviation > 10.0 * tol) return Outcome::Fail;
  return Outcome::Inconclusive;
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Pass: return "pass";
    case Outcome::Fail: return "fail";
    default: return "inconclusive";
  }
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::SemiHarmonic: return "semi-harmonic";
    case Verdict::NotSemiHarmonic: return "not semi-harmonic";
    default: return "inconclusive";
  }
}

std::string to_string(AuditOutcome o) {
  switch (o) {
    case AuditOutcome::Pass: return "pass";
    case AuditOutcome::PrincipleViolated: return "principle-violated";
    default: return "hypothesis-violated";
  }
}

bool CenterReport::coherent() const {
  if (refused) return true;
  const Outcome all[] = {solid, spherical, near, residue};
  const bool any_pass = std::find(std::begin(all), std::end(all), Outcome::Pass) != std::end(all);
  const bool any_fail = std::find(std::begin(all), std::end(all), Outcome::Fail) != std::end(all);
  return !(any_pass && any_fail);
}

nlohmann::json ClassificationReport::to_json() const {
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : centers) {
    nlohmann::json base = nlohmann::json::array();
    for (int k = 0; k < m; ++k) base.push_back({c.a.base[k].real(), c.a.base[k].imag()});
    nlohmann::json j = {{"base", base},
                        {"fiber", {c.a.fiber.real(), c.a.fiber.imag()}},
                        {"nu", c.nu},
                        {"refused", c.refused}};
    if (c.refused) {
      j["note"] = c.note;
    } else {
      j["solid_mvp"] = {{"outcome", to_string(c.solid)}, {"worst_deviation", c.solid_deviation}};
      j["spherical_mvp"] = {{"outcome", to_string(c.spherical)}, {"worst_deviation", c.spherical_deviation}};
      j["near_harmonic"] = {{"outcome", to_string(c.near)}, {"max_gap", c.near_harmonic}};
      j["residue"] = {{"outcome", to_string(c.residue)}, {"max_abs", c.residue_max}};
      j["fd_laplacian_max"] = c.fd_laplacian_max;
    }
    cs.push_back(j);
  }
  return {{"field", field}, {"covering", covering}, {"tol", tol},
          {"radii", radii}, {"centers", cs},        {"verdict", to_string(verdict)}};
}

namespace {

// Laplacian of f at a (when regular) and along four rays at half the smallest radius.
double laplacian_probe(const CoveringMap& cov, const ScalarField& f, const CoverPoint& a, int nu, double t) {
  double worst = 0.0;
  if (nu == 1) {
    try {
      worst = std::abs(laplacian(cov, f, a));
    } catch (const BranchJump&) {
    }
  }
  const int m = cov.m();
  const RealPoint dirs[] = {{1, 0, 0, 0}, {0, 1, 0, 0}, {-1, 0, 0, 0}, {0, -1, 0, 0}};
  for (RealPoint d : dirs) {
    if (m == 2) {
      d[2] = d[0];
      d[3] = d[1];
      for (auto& x : d) x /= std::sqrt(2.0);
    }
    std::vector<BasePoint> bases;
    const double ts[] = {t};
    const auto w = branch_values_along_ray(cov, a, nu, d, ts, &bases);
    for (cplx wi : w) {
      try {
        worst = std::max(worst, std::abs(laplacian(cov, f, bases[0], wi, {})));
      } catch (const BranchJump&) {
      }
    }
  }
  return worst;
}

}  // namespace

ClassificationReport classify(const CoveringMap& cov, const ScalarField& f, std::span<const CoverPoint> centers,
                              std::span<const double> radii, double tol, const QuadratureSizes& sizes) {
  ClassificationReport rep;
  rep.field = f.label();
  rep.covering = cov.label();
  rep.m = cov.m();
  rep.tol = tol;
  rep.radii.assign(radii.begin(), radii.end());
  const double r_min = radii.empty() ? 0.0 : *std::min_element(radii.begin(), radii.end());

  for (const CoverPoint& c : centers) {
    CenterReport cr;
    cr.a = cov.annotate(c);
    cr.nu = *cr.a.mult;
    if (cr.nu > 1) {
      // f must agree on the sheets that meet at a.
      for (const auto& fr : cov.fiber(cr.a.base)) {
        if (std::abs(fr.w - cr.a.fiber) > 1e-6 * std::max(1.0, std::abs(fr.w))) continue;
        cplx first = f(cr.a.base, fr.members.front());
        double spread = 0.0;
        for (cplx w : fr.members) spread = std::max(spread, std::abs(f(cr.a.base, w) - first));
        if (spread > 1e-6) {
          cr.refused = true;
          cr.note = "field jumps between sheets at the center (spread " + format_double(spread) + ")";
        }
      }
    }
    if (!cr.refused) {
      try {
        const auto mv = mean_value_test(cov, f, cr.a, radii, tol, sizes);
        cr.solid_deviation = mv.worst_solid;
        cr.spherical_deviation = mv.worst_spherical;
        for (std::size_t i = 0; i < mv.solid.size(); ++i)
          cr.near_harmonic = std::max(cr.near_harmonic, std::abs(mv.spherical[i] - mv.solid[i]));
        const auto scan = residue_scan(cov, f, cr.a, radii, tol, sizes);
        cr.residue_max = scan.max_abs;
        cr.fd_laplacian_max = laplacian_probe(cov, f, cr.a, cr.nu, 0.5 * r_min);
        cr.solid = grade(cr.solid_deviation, tol);
        cr.spherical = grade(cr.spherical_deviation, tol);
        cr.near = grade(cr.near_harmonic, tol);
        cr.residue = grade(cr.residue_max, tol);
      } catch (const Error& e) {
        cr.refused = true;
        cr.note = e.what();
      }
    }
    rep.centers.push_back(cr);
  }

  bool any_fail = false, all_pass = true, any_used = false;
  for (const auto& c : rep.centers) {
    if (c.refused) continue;
    any_used = true;
    for (Outcome o : {c.solid, c.spherical, c.near, c.residue}) {
      any_fail = any_fail || o == Outcome::Fail;
      all_pass = all_pass && o == Outcome::Pass;
    }
  }
  if (any_fail) rep.verdict = Verdict::NotSemiHarmonic;
  else if (any_used && all_pass) rep.verdict = Verdict::SemiHarmonic;
  else rep.verdict = Verdict::Inconclusive;
  return rep;
}

AuditResult max_principle_audit(const CoveringMap& cov, const ScalarField& f, const CoverPoint& a0, double r,
                                int grid, double tol) {
  check_region(cov, a0, r);
  const CoverPoint a = cov.annotate(a0);
  const int nu = *a.mult;
  const int m = cov.m();
  AuditResult res;

  const QuadratureSizes small{m == 1 ? 64 : 16, m == 1 ? 16 : 8};
  auto sub_mean_violation = [&](const CoverPoint& x, double rad) {
    const double lhs = cov.multiplicity(x) * f(x).real();
    return lhs - solid_mean(cov, f, x, rad, small).real() > tol;
  };

  const QuadratureRule dirs = sphere_rule(m, a.base, 1.0, m == 1 ? std::max(8, 2 * grid) : std::max(8, grid));
  std::vector<double> ts;
  for (int i = 1; i <= grid; ++i) ts.push_back(r * i / grid);

  if (sub_mean_violation(a, 0.5 * r)) {
    res.outcome = AuditOutcome::HypothesisViolated;
    res.witness = a;
  }

  double interior = f(a).real();
  CoverPoint interior_at = a;
  double boundary = -std::numeric_limits<double>::infinity();
  std::vector<BasePoint> bases;
  for (std::size_t d = 0; d < dirs.directions().size(); ++d) {
    const auto w = branch_values_along_ray(cov, a, nu, dirs.directions()[d], ts, &bases);
    for (std::size_t j = 0; j < ts.size(); ++j)
      for (int b = 0; b < nu; ++b) {
        const double v = f(bases[j], w[j * nu + b]).real();
        if (j + 1 == ts.size()) {
          boundary = std::max(boundary, v);
        } else if (v > interior) {
          interior = v;
          interior_at = CoverPoint{bases[j], w[j * nu + b], std::nullopt};
        }
      }
    // Sub-mean hypothesis at one interior point per direction, on the first sheet.
    if (!res.witness && d % 4 == 0 && ts.size() > 1) {
      const std::size_t j = ts.size() / 2;
      const CoverPoint x{bases[j], w[j * nu], 1};
      const double room = std::min(r - ts[j], ts[j]) * 0.5;
      try {
        if (room > 0 && sub_mean_violation(x, room)) {
          res.outcome = AuditOutcome::HypothesisViolated;
          res.witness = x;
        }
      } catch (const Error&) {
      }
    }
  }
  res.interior_max = interior;
  res.boundary_max = boundary;
  if (res.outcome == AuditOutcome::HypothesisViolated) return res;
  if (interior > boundary + tol) {
    res.outcome = AuditOutcome::PrincipleViolated;
    res.witness = interior_at;
  }
  return res;
}

double orthogonality_test(const CoveringMap& cov, const ScalarField& phi, const CoverPoint& a, double r_support,
                          const QuadratureSizes& sizes) {
  const BasePoint c = a.base;
  const int m = cov.m();
  const double r2 = r_support * r_support;
  const ScalarField bump = ScalarField::pullback(
      "bump",
      [c, m, r2](const BasePoint& z) { return cplx(std::min(0.0, norm2({z[0] - c[0], z[1] - c[1]}, m) - r2)); },
      [c, m, r2](const BasePoint& z) {
        Gradient g{};
        if (norm2({z[0] - c[0], z[1] - c[1]}, m) >= r2) return g;
        for (int j = 0; j < m; ++j) {
          g[2 * j] = 2.0 * (z[j] - c[j]).real();
          g[2 * j + 1] = 2.0 * (z[j] - c[j]).imag();
        }
        return g;
      });
  return std::abs(dirichlet_product(cov, phi, bump, a, r_support, sizes));
}

}  // namespace semiharm
