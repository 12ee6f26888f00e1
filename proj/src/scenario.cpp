#include "semiharm/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "semiharm/errors.hpp"

namespace semiharm {

namespace {

const char* const kOperations[] = {"means", "residue", "classify", "decompose", "neumann", "verify"};

const std::vector<std::string> kKeys = {"operation", "covering", "field", "fields", "centers", "radii",
                                        "nodes",     "tol",      "out",   "seed",   "jobs",    "alpha",
                                        "s",         "h",        "polynomial", "variables", "samples"};

cplx parse_pair(const nlohmann::json& j, const std::string& key) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError("'" + key + "' must be a number or a [re, im] pair");
}

template <class T>
T get_as(const nlohmann::json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("'" + key + "' has the wrong type");
  }
}

}  // namespace

std::string to_string(Operation op) { return kOperations[static_cast<int>(op)]; }

Operation parse_operation(const std::string& name) {
  for (int i = 0; i < 6; ++i)
    if (name == kOperations[i]) return static_cast<Operation>(i);
  throw ConfigError("unknown operation '" + name + "'");
}

BasePoint parse_base_point(const std::string& text, int m) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("center '" + text + "' is not a list of real numbers");
    }
  }
  if (v.size() != static_cast<std::size_t>(2 * m))
    throw ConfigError("center '" + text + "' needs " + std::to_string(2 * m) + " real coordinates");
  BasePoint z{};
  for (int j = 0; j < m; ++j) z[j] = cplx(v[2 * j], v[2 * j + 1]);
  return z;
}

Scenario Scenario::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end())
      throw ConfigError("unknown scenario key '" + key + "'");

  Scenario sc;
  if (j.contains("operation")) sc.operation = parse_operation(get_as<std::string>(j["operation"], "operation"));
  if (j.contains("covering")) {
    if (!j["covering"].is_object()) throw ConfigError("'covering' must be an object");
    sc.covering = j["covering"];
  }
  if (j.contains("field")) sc.fields.push_back(get_as<std::string>(j["field"], "field"));
  if (j.contains("fields"))
    for (const auto& f : j["fields"]) sc.fields.push_back(get_as<std::string>(f, "fields"));
  if (j.contains("centers")) {
    if (!j["centers"].is_array()) throw ConfigError("'centers' must be an array");
    for (std::size_t i = 0; i < j["centers"].size(); ++i) {
      const auto& c = j["centers"][i];
      const std::string where = "centers[" + std::to_string(i) + "]";
      const nlohmann::json base = c.is_object() ? c.value("base", nlohmann::json()) : c;
      if (c.is_object())
        for (const auto& [key, value] : c.items())
          if (key != "base" && key != "fiber") throw ConfigError("unknown key '" + key + "' in " + where);
      if (!base.is_array() || (base.size() != 2 && base.size() != 4))
        throw ConfigError(where + ".base must hold 2 or 4 real numbers");
      CenterSpec cs;
      for (std::size_t k = 0; k < base.size() / 2; ++k)
        cs.base[k] = cplx(get_as<double>(base[2 * k], where), get_as<double>(base[2 * k + 1], where));
      if (c.is_object() && c.contains("fiber")) cs.fiber = parse_pair(c["fiber"], where + ".fiber");
      sc.centers.push_back(cs);
    }
  }
  if (j.contains("radii")) {
    sc.radii = get_as<std::vector<double>>(j["radii"], "radii");
    for (double r : sc.radii)
      if (!(r > 0.0)) throw ConfigError("'radii' must be positive");
  }
  if (j.contains("nodes")) {
    const auto& n = j["nodes"];
    if (n.is_number_integer()) {
      sc.nodes.sphere = n.get<int>();
    } else if (n.is_object()) {
      for (const auto& [key, value] : n.items()) {
        if (key == "sphere") sc.nodes.sphere = get_as<int>(value, "nodes.sphere");
        else if (key == "radial") sc.nodes.radial = get_as<int>(value, "nodes.radial");
        else throw ConfigError("unknown key '" + key + "' in nodes");
      }
    } else {
      throw ConfigError("'nodes' must be an integer or {sphere, radial}");
    }
    if (sc.nodes.sphere != 0 && sc.nodes.sphere < 8) throw ConfigError("nodes.sphere must be at least 8");
    if (sc.nodes.radial != 0 && sc.nodes.radial < 4) throw ConfigError("nodes.radial must be at least 4");
  }
  if (j.contains("tol")) {
    sc.tol = get_as<double>(j["tol"], "tol");
    if (!(*sc.tol > 0.0)) throw ConfigError("'tol' must be positive");
  }
  if (j.contains("out")) sc.out = get_as<std::string>(j["out"], "out");
  if (j.contains("seed")) sc.seed = get_as<std::uint64_t>(j["seed"], "seed");
  if (j.contains("jobs")) {
    sc.jobs = get_as<int>(j["jobs"], "jobs");
    if (sc.jobs < 0) throw ConfigError("'jobs' must be non-negative");
  }
  if (j.contains("alpha")) sc.alpha = get_as<double>(j["alpha"], "alpha");
  if (j.contains("s")) sc.s = get_as<double>(j["s"], "s");
  if (sc.alpha < 0.0 || sc.s < 0.0) throw ConfigError("'alpha' and 's' must be non-negative");
  if (j.contains("h")) sc.h = get_as<std::string>(j["h"], "h");
  if (j.contains("polynomial")) sc.polynomial = get_as<std::string>(j["polynomial"], "polynomial");
  if (j.contains("variables")) {
    sc.variables = get_as<int>(j["variables"], "variables");
    if (sc.variables < 1) throw ConfigError("'variables' must be positive");
  }
  if (j.contains("samples")) {
    sc.samples = get_as<int>(j["samples"], "samples");
    if (sc.samples < 1) throw ConfigError("'samples' must be positive");
  }
  return sc;
}

Scenario Scenario::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t pos = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + pos, '\n');
    const auto bol = text.rfind('\n', pos == 0 ? 0 : pos - 1);
    const auto col = pos - (bol == std::string::npos ? 0 : bol + 1) + 1;
    throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }
  try {
    return from_json(j);
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    const std::string prefix = "ConfigError: ";
    throw ConfigError(path + ": " + (what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what));
  }
}

CoveringMap Scenario::build_covering() const {
  if (!fiber_polynomial.empty()) return CoveringMap::from_polynomial(m, fiber_polynomial, {}, 2.0, fiber_polynomial);
  if (!covering) return CoveringMap::identity(m);
  return CoveringMap::from_json(*covering, seed);
}

int Scenario::dimension() const {
  if (fiber_polynomial.empty() && covering && covering->contains("m") && (*covering)["m"].is_number_integer())
    return (*covering)["m"].get<int>();
  return m;
}

std::vector<CoverPoint> Scenario::resolve_centers(const CoveringMap& cov) const {
  const int m = cov.m();
  std::vector<CoverPoint> out;
  if (centers.empty()) {
    out.push_back(cov.annotate(cov.point_over(cov.base_center())));
    return out;
  }
  for (const auto& c : centers) {
    BasePoint z = c.base;
    if (m == 1 && z[1] != cplx(0.0)) throw ConfigError("center " + format_point(z, 2) + " has two coordinates for m = 1");
    if (!c.fiber) {
      out.push_back(cov.annotate(cov.point_over(z)));
      continue;
    }
    // Snap a user-supplied fiber value to the nearest root cluster.
    const auto fib = cov.fiber(z);
    auto best = std::min_element(fib.begin(), fib.end(), [&](const FiberRoot& x, const FiberRoot& y) {
      return std::abs(x.w - *c.fiber) < std::abs(y.w - *c.fiber);
    });
    if (std::abs(best->w - *c.fiber) > 1e-6 * std::max(1.0, std::abs(best->w)))
      throw ConfigError("fiber value " + format_complex(*c.fiber) + " is not over " + format_point(z, m));
    out.push_back(cov.annotate(CoverPoint{z, best->w, std::nullopt}));
  }
  return out;
}

void Scenario::validate_geometry(const CoveringMap& cov, const std::vector<CoverPoint>& pts) const {
  if (tol && !(*tol > 0.0)) throw ConfigError("'tol' must be positive");
  for (const auto& a : pts) {
    if (!cov.in_base(a.base)) throw ConfigError("center " + format_point(a.base, cov.m()) + " lies outside the base ball");
    const double room = cov.base_radius() - distance(a.base, cov.base_center(), cov.m());
    for (double r : radii)
      if (!(r < room))
        throw ConfigError("radius " + format_double(r) + " about " + format_point(a.base, cov.m()) +
                          " leaves the base ball");
  }
}

}  // namespace semiharm
