#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "semiharm/classify.hpp"
#include "semiharm/errors.hpp"
#include "semiharm/harmpoly.hpp"
#include "semiharm/means.hpp"
#include "semiharm/residue.hpp"
#include "semiharm/scenario.hpp"
#include "semiharm/verify.hpp"

using namespace semiharm;
using nlohmann::json;

namespace {

constexpr int kPass = 0, kFail = 1, kInputError = 2;

struct Flags {
  std::string scenario;
  std::string nodes;
  std::uint64_t seed = CoveringMap::kDefaultSeed;
  double tol = 0.0;
  std::string out;
  int jobs = 0;
  std::string covering;
  int m = 1;
  std::vector<std::string> fields;
  std::vector<std::string> centers;
  std::string radii;
  double alpha = 1.0;
  double s = 0.0;
  std::string h = "1";
  std::string polynomial;
  int variables = 0;
  int samples = 200;
};

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--" + what + " expects comma-separated numbers, got '" + text + "'");
    }
  }
  return v;
}

// Writes `text` to out/name when an output directory is set; always echoes to stdout.
void emit(const Scenario& sc, const std::string& name, const std::string& text) {
  std::cout << text;
  if (sc.out.empty()) return;
  std::filesystem::create_directories(sc.out);
  std::ofstream f(std::filesystem::path(sc.out) / name);
  if (!f) throw ConfigError("cannot write " + (std::filesystem::path(sc.out) / name).string());
  f << text;
}

// Flags given on the command line override the scenario file.
Scenario merge(const Flags& fl, const CLI::App& sub, Operation op) {
  Scenario sc;
  if (!fl.scenario.empty()) sc = Scenario::load(fl.scenario);
  if (sc.operation && *sc.operation != op)
    throw ConfigError("scenario operation '" + to_string(*sc.operation) + "' does not match subcommand '" +
                      to_string(op) + "'");
  sc.operation = op;
  auto given = [&](const char* name) {
    const CLI::Option* o = sub.get_option_no_throw(name);
    return o != nullptr && o->count() > 0;
  };
  if (given("--nodes")) {
    const auto v = parse_list(fl.nodes, "nodes");
    if (v.empty() || v.size() > 2) throw ConfigError("--nodes expects SPHERE or SPHERE,RADIAL");
    sc.nodes.sphere = static_cast<int>(v[0]);
    if (v.size() == 2) sc.nodes.radial = static_cast<int>(v[1]);
    if (sc.nodes.sphere < 8 || (v.size() == 2 && sc.nodes.radial < 4))
      throw ConfigError("--nodes needs at least 8 sphere and 4 radial nodes");
  }
  if (given("--seed")) sc.seed = fl.seed;
  if (given("--tol")) {
    if (!(fl.tol > 0.0)) throw ConfigError("--tol must be positive");
    sc.tol = fl.tol;
  }
  if (given("--out")) sc.out = fl.out;
  if (given("--jobs")) sc.jobs = fl.jobs;
  if (given("--covering")) {
    sc.fiber_polynomial = fl.covering;
    sc.covering.reset();
  }
  if (given("--m")) sc.m = fl.m;
  if (given("--field")) sc.fields = fl.fields;
  if (given("--center")) {
    sc.centers.clear();
    for (const auto& c : fl.centers) sc.centers.push_back({parse_base_point(c, sc.dimension()), std::nullopt});
  }
  if (given("--radii")) {
    sc.radii = parse_list(fl.radii, "radii");
    for (double r : sc.radii)
      if (!(r > 0.0)) throw ConfigError("--radii must be positive");
  }
  if (given("--alpha")) sc.alpha = fl.alpha;
  if (given("--s")) sc.s = fl.s;
  if (sc.alpha < 0.0 || sc.s < 0.0) throw ConfigError("--alpha and --s must be non-negative");
  if (given("--factor")) sc.h = fl.h;
  if (given("--polynomial")) sc.polynomial = fl.polynomial;
  if (given("--variables")) {
    if (fl.variables < 1) throw ConfigError("--variables must be positive");
    sc.variables = fl.variables;
  }
  if (given("--samples")) {
    if (fl.samples < 1) throw ConfigError("--samples must be positive");
    sc.samples = fl.samples;
  }
  return sc;
}

int run_means(Scenario sc) {
  const CoveringMap cov = sc.build_covering();
  const int m = cov.m();
  if (sc.fields.empty()) throw ConfigError("means needs at least one field");
  if (sc.radii.empty()) sc.radii = {0.2, 0.5, 0.9};
  const auto centers = sc.resolve_centers(cov);
  sc.validate_geometry(cov, centers);
  const double tol = sc.tol.value_or(m == 1 ? 1e-7 : 1e-6);
  std::vector<ScalarField> fields;
  for (const auto& e : sc.fields) fields.push_back(ScalarField::from_expression(e, m));

  const std::size_t nc = centers.size(), nr = sc.radii.size();
  std::vector<MeanReport> rows(fields.size() * nc * nr);
  parallel_for(rows.size(), sc.jobs, [&](std::size_t i) {
    const std::size_t fi = i / (nc * nr), ci = (i / nr) % nc, ri = i % nr;
    rows[i] = mean_gap_identity(cov, fields[fi], centers[ci], sc.radii[ri], sc.nodes);
  });

  std::string text = "field,cov,a,r,nu,solid_re,solid_im,spherical_re,spherical_im,gap_abs,identity_residual\n";
  bool ok = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const std::string a = format_point(r.a.base, m) + "@" + format_complex(r.a.fiber);
    text += csv_cell(sc.fields[i / (nc * nr)]) + "," + csv_cell(cov.label()) + "," + csv_cell(a) + "," +
            format_double(r.r) + "," + std::to_string(r.nu) + "," + format_double(r.solid.real()) + "," +
            format_double(r.solid.imag()) + "," + format_double(r.spherical.real()) + "," +
            format_double(r.spherical.imag()) + "," + format_double(std::abs(r.gap)) + "," +
            format_double(r.identity_residual) + "\n";
    ok = ok && r.identity_residual < tol;
  }
  emit(sc, "means.csv", text);
  return ok ? kPass : kFail;
}

int run_residue(Scenario sc) {
  const CoveringMap cov = sc.build_covering();
  const int m = cov.m();
  if (!sc.fields.empty()) throw ConfigError("residue scans the radial singular family; use alpha, s and h, not field");
  if (sc.centers.size() > 1) throw ConfigError("residue takes a single center");
  if (sc.radii.empty()) sc.radii = {0.2, 0.3, 0.5};
  const auto a = sc.resolve_centers(cov).front();
  sc.validate_geometry(cov, {a});
  const double tol = sc.tol.value_or(m == 1 ? 1e-8 : 1e-5);

  std::ostringstream expr;
  expr.precision(17);
  expr << "radial_singular(" << sc.alpha << ", " << sc.s;
  for (int j = 0; j < m; ++j) expr << ", (" << a.base[j].real() << " + " << a.base[j].imag() << "i)";
  expr << ", " << sc.h << ")";
  const ScalarField f = ScalarField::from_expression(expr.str(), m);
  const cplx h_a = ScalarField::from_expression(sc.h, m)(a);

  std::vector<cplx> num(sc.radii.size()), closed(sc.radii.size());
  parallel_for(sc.radii.size(), sc.jobs, [&](std::size_t i) {
    num[i] = harmonic_residue(cov, f, a, sc.radii[i], sc.nodes);
    closed[i] = residue_closed_form(m, sc.alpha, sc.s, sc.radii[i], *a.mult, h_a);
  });
  std::string text = "r,res_re,res_im,closed_form_re,closed_form_im,abs_err\n";
  bool ok = true;
  for (std::size_t i = 0; i < sc.radii.size(); ++i) {
    const double err = std::abs(num[i] - closed[i]);
    text += format_double(sc.radii[i]) + "," + format_double(num[i].real()) + "," + format_double(num[i].imag()) +
            "," + format_double(closed[i].real()) + "," + format_double(closed[i].imag()) + "," +
            format_double(err) + "\n";
    ok = ok && err < tol;
  }
  emit(sc, "residue.csv", text);
  return ok ? kPass : kFail;
}

int run_classify(Scenario sc) {
  const CoveringMap cov = sc.build_covering();
  if (sc.fields.size() != 1) throw ConfigError("classify needs exactly one field");
  if (sc.radii.empty()) sc.radii = {0.1, 0.2};
  const auto centers = sc.resolve_centers(cov);
  sc.validate_geometry(cov, centers);
  const double tol = sc.tol.value_or(1e-6);
  const ScalarField f = ScalarField::from_expression(sc.fields.front(), cov.m());

  // Centers are independent; classify each alone and merge in input order.
  std::vector<ClassificationReport> parts(centers.size());
  parallel_for(centers.size(), sc.jobs, [&](std::size_t i) {
    parts[i] = classify(cov, f, std::span<const CoverPoint>(&centers[i], 1), sc.radii, tol, sc.nodes);
  });
  ClassificationReport rep = parts.front();
  rep.centers.clear();
  bool any_fail = false, all_pass = true, any_used = false;
  for (const auto& p : parts) {
    rep.centers.push_back(p.centers.front());
    any_fail = any_fail || p.verdict == Verdict::NotSemiHarmonic;
    all_pass = all_pass && p.verdict == Verdict::SemiHarmonic;
    any_used = any_used || !p.centers.front().refused;
  }
  // A refused center leaves its own verdict inconclusive; the others still decide.
  all_pass = any_used;
  for (const auto& c : rep.centers)
    if (!c.refused)
      for (Outcome o : {c.solid, c.spherical, c.near, c.residue}) all_pass = all_pass && o == Outcome::Pass;
  rep.verdict = any_fail ? Verdict::NotSemiHarmonic : all_pass ? Verdict::SemiHarmonic : Verdict::Inconclusive;
  emit(sc, "classify.json", rep.to_json().dump(2) + "\n");
  return rep.verdict == Verdict::SemiHarmonic ? kPass : kFail;
}

int run_decompose(const Scenario& sc) {
  if (sc.polynomial.empty()) throw ConfigError("decompose needs a polynomial");
  int n = sc.variables;
  if (n == 0) {
    const int used = HomoPoly::parse(sc.polynomial).n();
    n = used + used % 2;
  }
  const HomoPoly p = HomoPoly::parse(sc.polynomial, n);
  const auto dec = harmonic_decompose(p);
  json parts = json::array();
  bool harmonic = true;
  for (const auto& part : dec.parts) {
    parts.push_back({{"j", part.j}, {"H", part.h.to_string()}});
    harmonic = harmonic && laplacian(part.h).is_zero();
  }
  const bool exact = dec.reconstruct() == p;
  json out = {{"polynomial", p.to_string()}, {"n", p.n()},           {"degree", p.degree()},
              {"parts", parts},             {"h0", dec.h0().get_str()}, {"reconstruction_exact", exact},
              {"parts_harmonic", harmonic}};
  if (p.n() % 2 == 0 && p.n() <= 4) {
    out["sphere_integral_formula"] = sphere_integral_homogeneous(p, 1).to_string();
    out["sphere_integral_truth"] = sphere_integral_truth(p, 1).to_string();
  }
  emit(sc, "decompose.json", out.dump(2) + "\n");
  return exact && harmonic ? kPass : kFail;
}

int run_neumann(const Scenario& sc) {
  if (sc.polynomial.empty()) throw ConfigError("neumann needs a polynomial");
  const CoveringMap cov = sc.build_covering();
  const HomoPoly p = HomoPoly::parse(sc.polynomial, 2 * cov.m());
  const double tol = sc.tol.value_or(1e-6);
  json rep = neumann_example_check(p, cov, sc.samples, sc.seed);
  rep["tol"] = tol;
  const bool ok = rep["boundary_residual"].get<double>() < tol;
  rep["pass"] = ok;
  emit(sc, "neumann.json", rep.dump(2) + "\n");
  return ok ? kPass : kFail;
}

int run_verify(const Scenario& sc) {
  const auto rep = semiharm::run_verify({sc.seed, sc.jobs});
  emit(sc, "verify.json", rep.to_json().dump(2) + "\n");
  for (const auto& s : rep.suites)
    std::cerr << (s.pass ? "PASS " : "FAIL ") << s.id << "  worst=" << format_double(s.worst)
              << " tol=" << format_double(s.tol) << "\n";
  return rep.pass() ? kPass : kFail;
}

int dispatch(const Scenario& sc) {
  switch (*sc.operation) {
    case Operation::Means: return run_means(sc);
    case Operation::Residue: return run_residue(sc);
    case Operation::Classify: return run_classify(sc);
    case Operation::Decompose: return run_decompose(sc);
    case Operation::Neumann: return run_neumann(sc);
    default: return run_verify(sc);
  }
}

void add_common(CLI::App* sub, Flags& fl) {
  sub->add_option("--scenario", fl.scenario, "Scenario JSON file");
  sub->add_option("--nodes", fl.nodes, "Quadrature nodes: SPHERE or SPHERE,RADIAL");
  sub->add_option("--seed", fl.seed, "Random seed");
  sub->add_option("--tol", fl.tol, "Contract tolerance");
  sub->add_option("--out", fl.out, "Output directory");
  sub->add_option("--jobs", fl.jobs, "Worker threads (0: all cores)");
}

void add_covering(CLI::App* sub, Flags& fl) {
  sub->add_option("--covering", fl.covering, "Fiber polynomial, e.g. \"w^2 - z1\"");
  sub->add_option("--m", fl.m, "Base dimension (1 or 2)")->check(CLI::Range(1, 2));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Harmonic analysis on branched polynomial coverings"};
  app.require_subcommand(1);
  Flags fl;

  auto* means = app.add_subcommand("means", "Solid and spherical means with the mean-gap identity (CSV)");
  auto* residue = app.add_subcommand("residue", "Harmonic residues of the radial singular family (CSV)");
  auto* cls = app.add_subcommand("classify", "Semi-harmonicity classification (JSON)");
  auto* decompose = app.add_subcommand("decompose", "Exact harmonic decomposition of a homogeneous polynomial");
  auto* neumann = app.add_subcommand("neumann", "Polynomial Neumann example check (JSON)");
  auto* verify = app.add_subcommand("verify", "Run every invariant suite (JSON)");
  auto* run = app.add_subcommand("run", "Run the operation named in a scenario file");

  for (auto* sub : {means, residue, cls, decompose, neumann, verify, run}) add_common(sub, fl);
  for (auto* sub : {means, residue, cls, neumann}) add_covering(sub, fl);
  for (auto* sub : {means, cls}) sub->add_option("--field", fl.fields, "Field expression (repeatable)");
  for (auto* sub : {means, cls, residue}) {
    sub->add_option("--center", fl.centers, "Center x1,y1[,x2,y2] (repeatable)");
    sub->add_option("--radii", fl.radii, "Comma-separated radii");
  }
  residue->add_option("--alpha", fl.alpha, "Log exponent alpha >= 0");
  residue->add_option("--s", fl.s, "Extra radial exponent s >= 0");
  residue->add_option("--factor", fl.h, "Semi-harmonic factor h of the singular family");
  for (auto* sub : {decompose, neumann}) sub->add_option("--polynomial", fl.polynomial, "e.g. \"x1^2*x2 - 3*x2^3\"");
  decompose->add_option("--variables", fl.variables, "Number of real variables (default: even, from the indices)");
  neumann->add_option("--samples", fl.samples, "Boundary samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (sub == run) {
      if (fl.scenario.empty()) throw ConfigError("run needs --scenario");
      const Scenario base = Scenario::load(fl.scenario);
      if (!base.operation) throw ConfigError(fl.scenario + ": scenario has no operation");
      return dispatch(merge(fl, *sub, *base.operation));
    }
    const Operation op = parse_operation(sub->get_name());
    return dispatch(merge(fl, *sub, op));
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kInputError;
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return kInputError;
  } catch (const InvalidCovering& e) {
    std::cerr << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
}
