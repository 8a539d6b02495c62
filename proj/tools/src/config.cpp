#include "becprobe/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include <yaml-cpp/yaml.h>

#include "becprobe/fock.hpp"
#include "json.hpp"

namespace becprobe::cli {

namespace {

using nlohmann::json;

// Float ratios closer than this to a small-denominator fraction are taken as exact.
constexpr double kRatioDetectTol = 1e-14;
constexpr long long kRatioMaxDen = 1000000;

const std::set<std::string> kScenarioKeys{"initial_atomic", "beta", "ratio", "kappa", "delta", "g2_tilde",
                                          "omega0", "gamma", "frame", "time_grid", "g1"};
const std::set<std::string> kProductKeys{"id", "type", "subsystem", "conditioning", "times", "grid", "ks",
                                         "include_any", "scan", "revivals", "bands", "families", "gamma_t",
                                         "separation", "steady_state_offset", "regime"};
const std::set<std::string> kTypes{"phase_variance", "husimi", "count_probability", "gamma_scan",
                                   "infer_report", "table1_matrix"};

void check_keys(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(path, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
  }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw ConfigError(key, "expected a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(key, "cannot parse '" + node.Scalar() + "'");
  }
}

double finite(const YAML::Node& node, const std::string& key) {
  const double v = scalar<double>(node, key);
  if (!std::isfinite(v)) throw ConfigError(key, "must be finite");
  return v;
}

cplx parse_complex(const YAML::Node& node, const std::string& key) {
  if (node.IsScalar()) return finite(node, key);
  if (node.IsSequence()) {
    if (node.size() != 2) throw ConfigError(key, "expected [re, im]");
    return {finite(node[0], key + "[0]"), finite(node[1], key + "[1]")};
  }
  if (node.IsMap()) {
    if (node["abs2"]) {
      check_keys(node, key, {"abs2", "phase"});
      const double a2 = finite(node["abs2"], key + ".abs2");
      if (a2 < 0) throw ConfigError(key + ".abs2", "must be >= 0");
      const double ph = node["phase"] ? finite(node["phase"], key + ".phase") : 0.0;
      return std::polar(std::sqrt(a2), ph);
    }
    check_keys(node, key, {"re", "im"});
    return {node["re"] ? finite(node["re"], key + ".re") : 0.0, node["im"] ? finite(node["im"], key + ".im") : 0.0};
  }
  throw ConfigError(key, "expected a number, [re, im], {abs2, phase} or {re, im}");
}

AtomicSpec parse_atomic(const YAML::Node& node, const std::string& key) {
  check_keys(node, key, {"type", "n", "abs2", "phase"});
  if (!node["type"]) throw ConfigError(key + ".type", "missing");
  const auto type = scalar<std::string>(node["type"], key + ".type");
  AtomicSpec a;
  if (type == "fock" || type == "binomial") {
    a.kind = type == "fock" ? AtomicKind::fock : AtomicKind::binomial;
    if (!node["n"]) throw ConfigError(key + ".n", "missing");
    a.n = scalar<int>(node["n"], key + ".n");
    if (a.n < 0 || a.n > 400) throw ConfigError(key + ".n", "must be in [0, 400]");
  } else if (type == "coherent") {
    a.kind = AtomicKind::coherent;
    a.abs2 = node["abs2"] ? finite(node["abs2"], key + ".abs2") : 3.0;
    a.phase = node["phase"] ? finite(node["phase"], key + ".phase") : 0.0;
    if (a.abs2 < 0 || a.abs2 > 400) throw ConfigError(key + ".abs2", "must be in [0, 400]");
  } else {
    throw ConfigError(key + ".type", "expected fock, coherent or binomial, got '" + type + "'");
  }
  return a;
}

void parse_ratio(const YAML::Node& node, const std::string& key, Scenario& s) {
  const auto text = scalar<std::string>(node, key);
  s.ratio_declared_exact = true;
  if (text == "irrational") {
    s.ratio = RatioIrrational{};
    s.ratio_float = 2.0 / std::numbers::pi;
    return;
  }
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    long long p = 0, q = 0;
    try {
      std::size_t used = 0;
      p = std::stoll(text.substr(0, slash), &used);
      if (used != slash) throw std::invalid_argument("p");
      const auto rest = text.substr(slash + 1);
      q = std::stoll(rest, &used);
      if (used != rest.size()) throw std::invalid_argument("q");
    } catch (const std::exception&) {
      throw ConfigError(key, "cannot parse fraction '" + text + "'");
    }
    if (p < 0 || q <= 0) throw ConfigError(key, "fraction must have p >= 0, q > 0");
    if (p == 0) {
      s.ratio = RatioZero{};
      s.ratio_float = 0.0;
      return;
    }
    const long long g = std::gcd(p, q);
    s.ratio = Fraction{p / g, q / g};
    s.ratio_float = static_cast<double>(p) / static_cast<double>(q);
    return;
  }
  const double x = finite(node, key);
  if (x < 0) throw ConfigError(key, "must be >= 0");
  s.ratio_float = x;
  if (x == 0.0) {
    s.ratio = RatioZero{};
    return;
  }
  s.ratio_declared_exact = false;
  if (const auto f = rational_detect(x, kRatioMaxDen, kRatioDetectTol))
    s.ratio = *f;
  else
    s.ratio = RatioIrrational{};
}

TimeUnit parse_unit(const YAML::Node& node, const std::string& key) {
  const auto u = scalar<std::string>(node, key);
  if (u == "t_rev_c") return TimeUnit::t_rev_c;
  if (u == "t_rev_l") return TimeUnit::t_rev_l;
  if (u == "absolute") return TimeUnit::absolute;
  throw ConfigError(key, "expected t_rev_c, t_rev_l or absolute, got '" + u + "'");
}

void apply_scenario(const YAML::Node& node, const std::string& path, Scenario& s) {
  auto k = [&](const std::string& name) { return path.empty() ? name : path + "." + name; };
  if (node["initial_atomic"]) s.initial = parse_atomic(node["initial_atomic"], k("initial_atomic"));
  if (node["beta"]) s.beta = parse_complex(node["beta"], k("beta"));
  if (node["ratio"]) parse_ratio(node["ratio"], k("ratio"), s);
  if (node["kappa"]) s.kappa = finite(node["kappa"], k("kappa"));
  if (node["delta"]) s.delta = finite(node["delta"], k("delta"));
  if (node["g1"]) s.g1 = parse_complex(node["g1"], k("g1"));
  if (node["g2_tilde"]) s.g2_tilde = parse_complex(node["g2_tilde"], k("g2_tilde"));
  if (node["omega0"]) s.omega0 = finite(node["omega0"], k("omega0"));
  if (node["gamma"]) s.gamma = finite(node["gamma"], k("gamma"));
  if (node["frame"]) {
    const auto f = scalar<std::string>(node["frame"], k("frame"));
    if (f == "lab") s.frame = Frame::lab;
    else if (f == "rotating") s.frame = Frame::rotating;
    else throw ConfigError(k("frame"), "expected lab or rotating");
  }
  if (const auto g = node["time_grid"]) {
    check_keys(g, k("time_grid"), {"start", "end", "points", "units"});
    if (g["start"]) s.grid.start = finite(g["start"], k("time_grid.start"));
    if (g["end"]) s.grid.end = finite(g["end"], k("time_grid.end"));
    if (g["points"]) s.grid.points = scalar<int>(g["points"], k("time_grid.points"));
    if (g["units"]) s.grid.units = parse_unit(g["units"], k("time_grid.units"));
  }
}

void validate_scenario(const Scenario& s, const std::string& path) {
  auto k = [&](const std::string& name) { return path + "." + name; };
  if (s.kappa < 0) throw ConfigError(k("kappa"), "must be >= 0");
  if (s.delta == 0) throw ConfigError(k("delta"), "must be nonzero");
  if (s.gamma < 0) throw ConfigError(k("gamma"), "must be >= 0");
  if (!s.g1 && s.kappa * s.delta < 0 && s.ratio_float > 0)
    throw ConfigError(k("ratio"), "kappa * delta must be > 0 for a nonzero ratio");
  if (!s.g1 && s.ratio_float > 0 && s.kappa == 0) throw ConfigError(k("ratio"), "a nonzero ratio needs kappa > 0; use g1");
  if (s.g1 && s.kappa != 0) throw ConfigError(k("g1"), "only allowed with kappa == 0; use ratio");
  const bool coupled = s.g1 ? *s.g1 != cplx{} : s.ratio_float > 0;
  if (!coupled && s.g2_tilde != cplx{}) throw ConfigError(k("g2_tilde"), "needs g1 != 0");
  if (s.grid.points < 2) throw ConfigError(k("time_grid.points"), "must be >= 2");
  if (s.grid.start < 0) throw ConfigError(k("time_grid.start"), "must be >= 0");
  if (!(s.grid.end > s.grid.start)) throw ConfigError(k("time_grid.end"), "must exceed start");
  if (s.grid.units == TimeUnit::t_rev_c && s.kappa == 0)
    throw ConfigError(k("time_grid.units"), "t_rev_c needs kappa > 0");
  if (s.grid.units == TimeUnit::t_rev_l && !coupled)
    throw ConfigError(k("time_grid.units"), "t_rev_l needs g1 != 0");
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json atomic_json(const AtomicSpec& a) {
  json j{{"type", to_string(a.kind)}};
  if (a.kind == AtomicKind::coherent) {
    j["abs2"] = a.abs2;
    j["phase"] = a.phase;
  } else {
    j["n"] = a.n;
  }
  return j;
}

json scenario_json(const Scenario& s) {
  return json{{"initial_atomic", atomic_json(s.initial)},
              {"beta", complex_json(s.beta)},
              {"ratio", describe_ratio(s)},
              {"ratio_value", s.ratio_float},
              {"kappa", s.kappa},
              {"delta", s.delta},
              {"g1", s.g1 ? complex_json(*s.g1) : json(nullptr)},
              {"g2_tilde", complex_json(s.g2_tilde)},
              {"omega0", s.omega0},
              {"gamma", s.gamma},
              {"frame", s.frame == Frame::lab ? "lab" : "rotating"},
              {"time_grid",
               {{"start", s.grid.start}, {"end", s.grid.end}, {"points", s.grid.points}, {"units", to_string(s.grid.units)}}}};
}

template <class T>
std::vector<T> scalar_list(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) throw ConfigError(key, "expected a list");
  std::vector<T> out;
  for (std::size_t i = 0; i < node.size(); ++i) out.push_back(scalar<T>(node[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

ProductSpec parse_product(const YAML::Node& node, const std::string& path, const YAML::Node& defaults,
                          std::set<std::string>& ids) {
  std::set<std::string> allowed = kProductKeys;
  allowed.insert(kScenarioKeys.begin(), kScenarioKeys.end());
  check_keys(node, path, allowed);
  auto k = [&](const std::string& name) { return path + "." + name; };

  ProductSpec p;
  if (!node["type"]) throw ConfigError(k("type"), "missing");
  p.type = scalar<std::string>(node["type"], k("type"));
  if (!kTypes.count(p.type)) throw ConfigError(k("type"), "unknown product type '" + p.type + "'");
  if (!node["id"]) throw ConfigError(k("id"), "missing");
  p.id = scalar<std::string>(node["id"], k("id"));
  if (p.id.empty() || p.id.find_first_not_of("abcdefghijklmnopqrstuvwxyz0123456789_-") != std::string::npos)
    throw ConfigError(k("id"), "must be non-empty [a-z0-9_-]");
  if (!ids.insert(p.id).second) throw ConfigError(k("id"), "duplicate id '" + p.id + "'");

  if (defaults) apply_scenario(defaults, "defaults", p.scenario);
  apply_scenario(node, path, p.scenario);
  validate_scenario(p.scenario, path);

  if (node["subsystem"]) {
    const auto sub = scalar<std::string>(node["subsystem"], k("subsystem"));
    if (sub == "atoms") p.subsystem = Subsystem::atoms;
    else if (sub == "light") p.subsystem = Subsystem::light;
    else throw ConfigError(k("subsystem"), "expected atoms or light");
  }
  if (const auto c = node["conditioning"]) {
    if (c.IsMap()) {
      check_keys(c, k("conditioning"), {"count"});
      p.conditioning = Conditioning::count;
      p.count_k = scalar<int>(c["count"], k("conditioning.count"));
      if (p.count_k < 0) throw ConfigError(k("conditioning.count"), "must be >= 0");
    } else {
      const auto text = scalar<std::string>(c, k("conditioning"));
      if (text == "none") p.conditioning = Conditioning::none;
      else if (text == "preselected") p.conditioning = Conditioning::preselected;
      else if (text == "arbitrary") p.conditioning = Conditioning::arbitrary;
      else throw ConfigError(k("conditioning"), "expected none, preselected, arbitrary or {count: k}");
    }
  }
  const bool detecting = p.conditioning != Conditioning::none || p.type == "count_probability" ||
                         p.type == "gamma_scan" || p.type == "infer_report";
  if (detecting && p.type != "gamma_scan" && p.type != "infer_report" && !(p.scenario.gamma > 0))
    throw ConfigError(k("gamma"), "photodetection products need gamma > 0");
  if (!detecting && p.scenario.gamma != 0)
    throw ConfigError(k("conditioning"), "gamma > 0 needs conditioning preselected, arbitrary or {count: k}");

  if (node["times"]) p.times = scalar_list<double>(node["times"], k("times"));
  if (const auto g = node["grid"]) {
    check_keys(g, k("grid"), {"radius", "points"});
    if (g["radius"]) p.grid_radius = finite(g["radius"], k("grid.radius"));
    if (g["points"]) p.grid_points = scalar<int>(g["points"], k("grid.points"));
    if (p.grid_points < 2 || p.grid_points > 2001) throw ConfigError(k("grid.points"), "must be in [2, 2001]");
    if (p.grid_radius < 0) throw ConfigError(k("grid.radius"), "must be >= 0");
  }
  if (node["ks"]) p.ks = scalar_list<int>(node["ks"], k("ks"));
  for (int kk : p.ks)
    if (kk < 0) throw ConfigError(k("ks"), "counts must be >= 0");
  if (node["include_any"]) p.include_any = scalar<bool>(node["include_any"], k("include_any"));
  if (const auto sc = node["scan"]) {
    check_keys(sc, k("scan"), {"gamma_over_2kappa_start", "gamma_over_2kappa_end", "points"});
    if (sc["gamma_over_2kappa_start"]) p.scan_start = finite(sc["gamma_over_2kappa_start"], k("scan.gamma_over_2kappa_start"));
    if (sc["gamma_over_2kappa_end"]) p.scan_end = finite(sc["gamma_over_2kappa_end"], k("scan.gamma_over_2kappa_end"));
    if (sc["points"]) p.scan_points = scalar<int>(sc["points"], k("scan.points"));
    if (!(p.scan_start > 0) || !(p.scan_end > p.scan_start) || p.scan_points < 2)
      throw ConfigError(k("scan"), "need 0 < start < end and points >= 2");
  }
  if (node["revivals"]) p.revivals = scalar<int>(node["revivals"], k("revivals"));
  if (p.revivals < 1 || p.revivals > 50) throw ConfigError(k("revivals"), "must be in [1, 50]");
  if (node["bands"]) p.bands = scalar_list<double>(node["bands"], k("bands"));
  if (const auto f = node["families"]) {
    if (!f.IsSequence()) throw ConfigError(k("families"), "expected a list");
    for (std::size_t i = 0; i < f.size(); ++i) p.families.push_back(parse_atomic(f[i], k("families[" + std::to_string(i) + "]")));
  }
  if (node["gamma_t"]) p.gamma_t = finite(node["gamma_t"], k("gamma_t"));
  if (node["separation"]) p.separation = finite(node["separation"], k("separation"));
  if (node["steady_state_offset"]) p.steady_state_offset = finite(node["steady_state_offset"], k("steady_state_offset"));
  if (const auto r = node["regime"]) {
    check_keys(r, k("regime"), {"min_gamma_t", "min_separation"});
    if (r["min_gamma_t"]) p.min_gamma_t = finite(r["min_gamma_t"], k("regime.min_gamma_t"));
    if (r["min_separation"]) p.min_separation = finite(r["min_separation"], k("regime.min_separation"));
  }

  if (p.type == "husimi" && p.times.empty()) throw ConfigError(k("times"), "husimi needs at least one time");
  if (p.type == "count_probability" && p.ks.empty() && !p.include_any)
    throw ConfigError(k("ks"), "count_probability needs ks or include_any");
  if ((p.type == "infer_report" || p.type == "table1_matrix") && p.families.empty())
    throw ConfigError(k("families"), p.type + " needs at least one family");
  if (p.type == "infer_report" && !(p.gamma_t > 0 && p.separation > 0))
    throw ConfigError(k("gamma_t"), "gamma_t and separation must be > 0");
  if (p.type == "gamma_scan" && p.conditioning != Conditioning::none && p.conditioning != Conditioning::preselected)
    throw ConfigError(k("conditioning"), "gamma_scan uses the pre-selected state");

  json extra{{"id", p.id},
             {"type", p.type},
             {"subsystem", p.subsystem == Subsystem::atoms ? "atoms" : "light"},
             {"conditioning", static_cast<int>(p.conditioning)},
             {"count_k", p.count_k},
             {"times", p.times},
             {"grid", {p.grid_radius, p.grid_points}},
             {"ks", p.ks},
             {"include_any", p.include_any},
             {"scan", {p.scan_start, p.scan_end, p.scan_points}},
             {"revivals", p.revivals},
             {"bands", p.bands},
             {"gamma_t", p.gamma_t},
             {"separation", p.separation},
             {"steady_state_offset", p.steady_state_offset},
             {"regime", {p.min_gamma_t, p.min_separation}}};
  json fams = json::array();
  for (const auto& a : p.families) fams.push_back(atomic_json(a));
  extra["families"] = fams;
  p.canonical = json{{"scenario", scenario_json(p.scenario)}, {"product", extra}}.dump();
  return p;
}

Config parse_root(const YAML::Node& root) {
  check_keys(root, "", {"name", "description", "defaults", "products"});
  Config cfg;
  if (!root["name"]) throw ConfigError("name", "missing");
  cfg.name = scalar<std::string>(root["name"], "name");
  if (cfg.name.empty() || cfg.name.find_first_not_of("abcdefghijklmnopqrstuvwxyz0123456789_-") != std::string::npos)
    throw ConfigError("name", "must be non-empty [a-z0-9_-]");
  if (root["description"]) cfg.description = scalar<std::string>(root["description"], "description");
  const YAML::Node defaults = root["defaults"];
  if (defaults) check_keys(defaults, "defaults", kScenarioKeys);
  const YAML::Node products = root["products"];
  if (!products || !products.IsSequence() || products.size() == 0)
    throw ConfigError("products", "expected a non-empty list");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < products.size(); ++i)
    cfg.products.push_back(parse_product(products[i], "products[" + std::to_string(i) + "]", defaults, ids));
  return cfg;
}

}  // namespace

ModelParams Scenario::model() const {
  if (g1) {
    ModelParams p;
    p.kappa = kappa;
    p.delta = delta;
    p.g1 = *g1;
    p.g2_tilde = g2_tilde;
    p.omega0 = omega0;
    return p;
  }
  const double r = std::holds_alternative<Fraction>(ratio) && ratio_declared_exact ? std::get<Fraction>(ratio).value()
                                                                                    : ratio_float;
  return ModelParams::from_ratio(kappa, delta, r, g2_tilde, omega0);
}

double Scenario::time_unit() const {
  switch (grid.units) {
    case TimeUnit::t_rev_c:
      return revival_time_collision(kappa);
    case TimeUnit::t_rev_l:
      return revival_time_light(model());
    case TimeUnit::absolute:
      break;
  }
  return 1.0;
}

std::vector<double> Scenario::times() const {
  const double u = time_unit();
  std::vector<double> out;
  for (int i = 0; i < grid.points; ++i) {
    const double x = grid.start + (grid.end - grid.start) * i / (grid.points - 1);
    out.push_back(x * u);
  }
  return out;
}

DensityMatrix Scenario::initial_state() const {
  switch (initial.kind) {
    case AtomicKind::fock:
      return fock_state(initial.n, std::max(initial.n, 1));
    case AtomicKind::binomial:
      return binomial_mixture(initial.n, 1);
    case AtomicKind::coherent:
      break;
  }
  const cplx a = std::polar(std::sqrt(initial.abs2), initial.phase);
  CVector v = coherent_fock_vector(a, std::max(default_cutoff(std::abs(a)), 1)).amplitudes;
  // Renormalise the retained levels so evolution sees a unit-trace state.
  v /= v.norm();
  return DensityMatrix(v * v.adjoint());
}

Config parse_config_file(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    throw ConfigError("<file>", "cannot open '" + path + "'");
  } catch (const YAML::ParserException& e) {
    throw ConfigError("<yaml>", path + ": " + e.what());
  }
  return parse_root(root);
}

Config parse_config_string(const std::string& text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("<yaml>", origin + ": " + e.what());
  }
  return parse_root(root);
}

std::string to_string(TimeUnit u) {
  switch (u) {
    case TimeUnit::t_rev_c:
      return "t_rev_c";
    case TimeUnit::t_rev_l:
      return "t_rev_l";
    case TimeUnit::absolute:
      break;
  }
  return "absolute";
}

std::string to_string(AtomicKind k) {
  switch (k) {
    case AtomicKind::fock:
      return "fock";
    case AtomicKind::binomial:
      return "binomial";
    case AtomicKind::coherent:
      break;
  }
  return "coherent";
}

std::string describe(const AtomicSpec& a) {
  if (a.kind == AtomicKind::coherent) {
    const double n = a.abs2;
    return "coherent(" + std::string(n == std::floor(n) ? std::to_string(static_cast<long>(n)) : std::to_string(n)) + ")";
  }
  return to_string(a.kind) + "(" + std::to_string(a.n) + ")";
}

std::string describe_ratio(const Scenario& s) {
  if (s.g1) return "undefined";
  if (std::holds_alternative<RatioZero>(s.ratio)) return "0";
  if (std::holds_alternative<RatioIrrational>(s.ratio)) return "irrational";
  const auto f = std::get<Fraction>(s.ratio);
  return std::to_string(f.p) + "/" + std::to_string(f.q);
}

}  // namespace becprobe::cli
