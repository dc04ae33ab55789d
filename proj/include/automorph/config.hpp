#ifndef AUTOMORPH_CONFIG_HPP
#define AUTOMORPH_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "automorph/circle_map.hpp"
#include "automorph/continued_fraction.hpp"
#include "automorph/error.hpp"
#include "automorph/grid_measure.hpp"
#include "automorph/s_measure.hpp"
#include "automorph/tongue.hpp"

namespace automorph {

using Json = nlohmann::json;

/// Map given either by its offset or as the point on the alpha-tongue with the
/// listed non-linear terms (offset solved by bisection).
struct MapSpec {
  double offset = 0.0;
  std::vector<double> sine;
  std::vector<double> cosine;
  bool on_tongue = false;
};

/// Everything an experiment needs; every default lives here.
struct ExperimentConfig {
  std::optional<MapSpec> map;
  MonotoneFamily family = MonotoneFamily::arnold();
  std::vector<double> exponents;
  std::size_t grid = std::size_t{1} << 14;
  double tol_kr = 1e-9;
  int max_iter = 100'000;
  double tol_a = 1e-12;
  double rotation_tol = 1e-10;
  std::int64_t rotation_budget = 10'000'000;
  std::int64_t max_q = 100'000'000;
  std::optional<ContinuedFraction> alpha;
  std::vector<double> nu_grid;
  double fd_h = 0.0;
  TransferScheme scheme = TransferScheme::AtomTransport;
  SolveMethod method = SolveMethod::Inverse;
  std::vector<int> partition_levels;
  int closest_return_levels = 10;
  std::optional<double> cf_value;
  std::size_t cf_depth = 12;
  std::vector<std::string> kr_inputs;
  std::string output_dir = "out";
  unsigned workers = 1;
  std::string baselines;
  Json source;  ///< the parsed document, for the digest

  SolveOptions solve_options() const {
    SolveOptions o;
    o.tol_kr = tol_kr;
    o.max_iter = max_iter;
    o.method = method;
    o.scheme = scheme;
    return o;
  }
  TongueOptions tongue_options() const {
    TongueOptions o;
    o.tol_a = tol_a;
    o.max_q = max_q;
    o.N = grid;
    o.solve = solve_options();
    o.fd_h = fd_h;
    o.workers = workers;
    return o;
  }
};

/// Numbers are JSON numbers or strings: "golden", "silver", "x/2pi", "p/q".
inline double parse_number(const Json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) throw InvalidArgument(what + ": expected a number");
  std::string s = j.get<std::string>();
  if (s == "golden") return (std::sqrt(5.0) - 1.0) / 2.0;
  if (s == "silver") return std::sqrt(2.0) - 1.0;
  try {
    const std::string suffix = "/2pi";
    if (s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0) {
      return std::stod(s.substr(0, s.size() - suffix.size())) / kTwoPi;
    }
    const auto slash = s.find('/');
    if (slash != std::string::npos) return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument(what + ": cannot parse '" + s + "'");
  }
}

inline std::vector<double> parse_numbers(const Json& j, const std::string& what) {
  if (!j.is_array()) throw InvalidArgument(what + ": expected a list");
  std::vector<double> out;
  for (const auto& x : j) out.push_back(parse_number(x, what));
  return out;
}

inline double positive(double x, const std::string& what) {
  if (!(x > 0.0)) throw InvalidArgument(what + " must be positive");
  return x;
}

inline TrigPolynomial parse_trig(const Json& j, const std::string& what) {
  TrigPolynomial p;
  if (j.contains("constant")) p.constant = parse_number(j["constant"], what);
  if (j.contains("sine")) p.sine = parse_numbers(j["sine"], what + ".sine");
  if (j.contains("cosine")) p.cosine = parse_numbers(j["cosine"], what + ".cosine");
  return p;
}

/// alpha must be a quotient list {"quotients": [...], "period": n} or one of
/// "golden"/"silver"; a bare float is rejected.
inline ContinuedFraction parse_alpha(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "golden") return ContinuedFraction::golden();
    if (s == "silver") return ContinuedFraction::silver();
    throw InvalidArgument("alpha: unknown name '" + s + "'");
  }
  if (j.is_number()) throw InvalidArgument("alpha must be given as continued-fraction quotients, not a float");
  std::vector<std::int64_t> ks;
  std::size_t period = 0;
  const Json& q = j.is_object() ? j.at("quotients") : j;
  if (!q.is_array()) throw InvalidArgument("alpha: expected a quotient list");
  for (const auto& k : q) {
    if (!k.is_number_integer()) throw InvalidArgument("alpha: quotients must be integers");
    ks.push_back(k.get<std::int64_t>());
  }
  if (j.is_object() && j.contains("period")) period = j["period"].get<std::size_t>();
  return ContinuedFraction(std::move(ks), period);
}

inline ExperimentConfig parse_config_fields(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("config: top level must be an object");
  ExperimentConfig c;
  c.source = j;
  if (j.contains("map")) {
    const auto& m = j["map"];
    MapSpec spec;
    if (m.contains("rotation")) {
      spec.offset = parse_number(m["rotation"], "map.rotation");
    } else {
      if (m.contains("offset")) spec.offset = parse_number(m["offset"], "map.offset");
      if (m.contains("sine")) spec.sine = parse_numbers(m["sine"], "map.sine");
      if (m.contains("cosine")) spec.cosine = parse_numbers(m["cosine"], "map.cosine");
      if (m.contains("nu")) spec.sine = {parse_number(m["nu"], "map.nu")};
      spec.on_tongue = m.value("on_tongue", false);
    }
    c.map = spec;
  }
  if (j.contains("family")) {
    const auto& fj = j["family"];
    if (fj.is_string()) {
      if (fj.get<std::string>() != "arnold") throw InvalidArgument("family: only 'arnold' is built in");
    } else {
      MonotoneFamily f;
      if (fj.contains("base")) f.base = parse_trig(fj["base"], "family.base");
      if (fj.contains("direction")) f.direction = parse_trig(fj["direction"], "family.direction");
      if (fj.contains("nu_min")) f.nu_min = parse_number(fj["nu_min"], "family.nu_min");
      if (fj.contains("nu_max")) f.nu_max = parse_number(fj["nu_max"], "family.nu_max");
      if (!(f.nu_min <= f.nu_max)) throw InvalidArgument("family: nu_min > nu_max");
      c.family = f;
    }
  }
  if (j.contains("exponents")) c.exponents = parse_numbers(j["exponents"], "exponents");
  if (j.contains("grid")) {
    const auto n = j["grid"].get<std::int64_t>();
    if (n < 2 || !is_power_of_two(static_cast<std::size_t>(n))) throw InvalidArgument("grid must be a power of two");
    c.grid = static_cast<std::size_t>(n);
  }
  if (j.contains("tol_kr")) c.tol_kr = positive(parse_number(j["tol_kr"], "tol_kr"), "tol_kr");
  if (j.contains("tol_a")) c.tol_a = positive(parse_number(j["tol_a"], "tol_a"), "tol_a");
  if (j.contains("rotation_tol")) c.rotation_tol = positive(parse_number(j["rotation_tol"], "rotation_tol"), "rotation_tol");
  if (j.contains("fd_h")) c.fd_h = positive(parse_number(j["fd_h"], "fd_h"), "fd_h");
  if (j.contains("max_iter")) {
    c.max_iter = j["max_iter"].get<int>();
    if (c.max_iter < 1) throw InvalidArgument("max_iter must be positive");
  }
  if (j.contains("rotation_budget")) {
    c.rotation_budget = j["rotation_budget"].get<std::int64_t>();
    if (c.rotation_budget < 1) throw InvalidArgument("rotation_budget must be positive");
  }
  if (j.contains("max_q")) {
    c.max_q = j["max_q"].get<std::int64_t>();
    if (c.max_q < 1) throw InvalidArgument("max_q must be positive");
  }
  if (j.contains("alpha")) c.alpha = parse_alpha(j["alpha"]);
  if (j.contains("nu_grid")) {
    const auto& g = j["nu_grid"];
    if (g.is_object()) {
      const double a = parse_number(g.at("start"), "nu_grid.start");
      const double b = parse_number(g.at("stop"), "nu_grid.stop");
      const int n = g.at("count").get<int>();
      if (n < 1) throw InvalidArgument("nu_grid.count must be positive");
      for (int i = 0; i < n; ++i) c.nu_grid.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
    } else {
      c.nu_grid = parse_numbers(g, "nu_grid");
    }
  }
  if (j.contains("scheme")) {
    const auto s = j["scheme"].get<std::string>();
    if (s == "atom") c.scheme = TransferScheme::AtomTransport;
    else if (s == "overlap") c.scheme = TransferScheme::CellOverlap;
    else throw InvalidArgument("scheme must be 'atom' or 'overlap'");
  }
  if (j.contains("method")) {
    const auto s = j["method"].get<std::string>();
    if (s == "inverse") c.method = SolveMethod::Inverse;
    else if (s == "power") c.method = SolveMethod::Power;
    else throw InvalidArgument("method must be 'inverse' or 'power'");
  }
  if (j.contains("partition_levels")) c.partition_levels = j["partition_levels"].get<std::vector<int>>();
  if (j.contains("closest_return_levels")) c.closest_return_levels = j["closest_return_levels"].get<int>();
  if (j.contains("cf_value")) c.cf_value = parse_number(j["cf_value"], "cf_value");
  if (j.contains("cf_depth")) c.cf_depth = j["cf_depth"].get<std::size_t>();
  if (j.contains("kr_inputs")) c.kr_inputs = j["kr_inputs"].get<std::vector<std::string>>();
  if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("workers")) c.workers = std::max(1u, j["workers"].get<unsigned>());
  if (j.contains("baselines")) c.baselines = j["baselines"].get<std::string>();
  return c;
}

/// Parses a config document; JSON type errors surface as InvalidArgument.
inline ExperimentConfig parse_config(const Json& j) {
  try {
    return parse_config_fields(j);
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidArgument("cannot open config " + path);
  Json j;
  try {
    j = Json::parse(is, nullptr, true, true);
  } catch (const Json::exception& e) {
    throw InvalidArgument("config " + path + ": " + e.what());
  }
  return parse_config(j);
}

/// Builds the configured map, solving the offset on the alpha-tongue if asked.
inline AnalyticCircleMap build_map(const ExperimentConfig& c) {
  if (!c.map) throw InvalidArgument("config has no map");
  const auto& m = *c.map;
  AnalyticCircleMap f(m.offset, m.sine, m.cosine);
  if (m.on_tongue) {
    if (!c.alpha) throw InvalidArgument("map.on_tongue needs alpha");
    f = f.with_offset(solve_offset_for_alpha(f.with_offset(0.0), *c.alpha, c.tongue_options()).a);
  }
  return f;
}

}  // namespace automorph

#endif  // AUTOMORPH_CONFIG_HPP
