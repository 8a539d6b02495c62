#include "becprobe/cli/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "becprobe/cli/emit.hpp"
#include "becprobe/observables.hpp"
#include "becprobe/photodetection.hpp"
#include "json.hpp"

namespace becprobe::cli {

namespace {

using nlohmann::json;
using Series = std::vector<std::pair<double, double>>;

// Deviation from the initial value that counts as a collapse, and as a return.
constexpr double kBehaviourBand = 0.10;
constexpr double kConstantTol = 1e-6;

DetectionParams detection(const Scenario& s) {
  DetectionParams det;
  det.gamma = s.gamma;
  det.model = s.model();
  det.beta = s.beta;
  return det;
}

// Joint state of one product's scenario at absolute time t.
JointDensity joint_state(const ProductSpec& p, const DensityMatrix& rho0, double t) {
  const Scenario& s = p.scenario;
  switch (p.conditioning) {
    case Conditioning::none:
      return evolve_density(rho0, s.beta, s.model(), t, s.frame);
    case Conditioning::count:
      return conditioned_state(rho0, detection(s), p.count_k, t, s.frame);
    case Conditioning::preselected:
      return unconditioned_state(rho0, detection(s), t, s.frame);
    case Conditioning::arbitrary:
      break;
  }
  return arbitrary_count_state(rho0, detection(s), t, s.frame);
}

DensityMatrix marginal(const JointDensity& state, Subsystem sub) {
  return sub == Subsystem::atoms ? reduce_to_atoms(state) : reduce_to_light(state, light_cutoff_for(state));
}

// Declared grid coordinates and their absolute times.
std::vector<std::pair<double, double>> grid_points(const Scenario& s) {
  const auto abs = s.times();
  std::vector<std::pair<double, double>> out;
  for (int i = 0; i < s.grid.points; ++i) {
    const double x = s.grid.start + (s.grid.end - s.grid.start) * i / (s.grid.points - 1);
    out.emplace_back(x, abs[static_cast<std::size_t>(i)]);
  }
  return out;
}

template <class F>
auto at_time(double x, const Scenario& s, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw ProductError("t = " + format_double(x) + " " + to_string(s.grid.units), e.what());
  }
}

std::string subsystem_name(Subsystem s) { return s == Subsystem::atoms ? "atoms" : "light"; }

std::string conditioning_name(const ProductSpec& p) {
  switch (p.conditioning) {
    case Conditioning::none:
      return "none";
    case Conditioning::count:
      return "count=" + std::to_string(p.count_k);
    case Conditioning::preselected:
      return "preselected";
    case Conditioning::arbitrary:
      break;
  }
  return "arbitrary";
}

std::string slug(const AtomicSpec& a) {
  std::string out;
  for (char c : describe(a))
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '.') out += c == '.' ? 'p' : c;
  return out;
}

json base_metadata(const ProductSpec& p, const std::string& hash) {
  return json{{"id", p.id},
              {"type", p.type},
              {"units", to_string(p.scenario.grid.units)},
              {"time_unit_length", p.scenario.time_unit()},
              {"parameter_hash", hash},
              {"parameters", json::parse(p.canonical)}};
}

void phase_variance_product(const ProductSpec& p, ProductResult& r, json& meta) {
  const auto rho0 = p.scenario.initial_state();
  Series series;
  for (const auto& [x, t] : grid_points(p.scenario))
    series.emplace_back(x, at_time(x, p.scenario, [&, t = t] {
                          return phase_variance(marginal(joint_state(p, rho0, t), p.subsystem));
                        }));
  meta["subsystem"] = subsystem_name(p.subsystem);
  meta["conditioning"] = conditioning_name(p);
  meta["columns"] = {"t", "value"};
  r.files.push_back({p.id + ".csv", timeseries_csv(series)});
  r.summary = p.id + ": " + std::to_string(series.size()) + " points, V(start) = " +
              format_double(series.front().second) + ", V(end) = " + format_double(series.back().second);
}

void husimi_product(const ProductSpec& p, ProductResult& r, json& meta, const std::string& hash) {
  const Scenario& s = p.scenario;
  const auto rho0 = s.initial_state();
  double radius = p.grid_radius;
  if (radius == 0.0) {
    double amp = 0.0;
    if (p.subsystem == Subsystem::atoms) {
      amp = std::sqrt(number_moments(rho0, 1)[0]);
    } else {
      amp = std::abs(s.beta);
      const auto m = s.model();
      if (std::abs(m.g1) > 0) amp += 2 * std::abs(s.g2_tilde / m.g1);
    }
    radius = amp + 3.0;
  }
  const GridSpec grid{-radius, radius, -radius, radius, p.grid_points, p.grid_points};
  const double unit = s.time_unit();
  json frames = json::array();
  for (std::size_t i = 0; i < p.times.size(); ++i) {
    const double x = p.times[i];
    const auto q = at_time(x, s, [&] { return husimi(marginal(joint_state(p, rho0, x * unit), p.subsystem), grid); });
    const std::string stem = p.id + "_t" + std::to_string(i);
    const json side{{"time", x},
                    {"units", to_string(s.grid.units)},
                    {"subsystem", subsystem_name(p.subsystem)},
                    {"grid", {{"re_min", grid.re_min}, {"re_max", grid.re_max}, {"im_min", grid.im_min},
                              {"im_max", grid.im_max}, {"n_re", grid.n_re}, {"n_im", grid.n_im}}},
                    {"integral", q.integral()},
                    {"peaks", count_peaks(q)},
                    {"scenario_hash", hash}};
    r.files.push_back({stem + ".csv", husimi_csv(q)});
    r.files.push_back({stem + ".json", side.dump(2) + "\n"});
    frames.push_back({{"file", stem + ".csv"}, {"time", x}, {"peaks", count_peaks(q)}});
  }
  meta["subsystem"] = subsystem_name(p.subsystem);
  meta["frames"] = frames;
  r.summary = p.id + ": " + std::to_string(p.times.size()) + " grids of " + std::to_string(p.grid_points) + "x" +
              std::to_string(p.grid_points);
}

void count_probability_product(const ProductSpec& p, ProductResult& r, json& meta) {
  const Scenario& s = p.scenario;
  const auto rho0 = s.initial_state();
  const auto det = detection(s);
  std::vector<std::string> header{"t"};
  for (int k : p.ks) header.push_back("p" + std::to_string(k));
  if (p.include_any) header.emplace_back("p_any");
  std::vector<std::vector<double>> rows;
  for (const auto& [x, t] : grid_points(s)) {
    rows.push_back(at_time(x, s, [&, t = t] {
      std::vector<double> row{x};
      for (int k : p.ks) row.push_back(count_probability(rho0, det, k, t));
      if (p.include_any) row.push_back(-std::expm1(std::log(count_probability(rho0, det, 0, t))));
      return row;
    }));
  }
  meta["columns"] = header;
  r.files.push_back({p.id + ".csv", table_csv(header, rows)});
  r.summary = p.id + ": " + std::to_string(rows.size()) + " points, columns " + std::to_string(header.size() - 1);
}

// Log-linear interpolation of the first upward crossing of `level`, if any.
std::optional<double> first_crossing(const Series& s, double level) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    const auto [x0, y0] = s[i - 1];
    const auto [x1, y1] = s[i];
    if (y0 < level && y1 >= level) {
      const double f = (level - y0) / (y1 - y0);
      return std::exp(std::log(x0) + f * (std::log(x1) - std::log(x0)));
    }
  }
  return std::nullopt;
}

void gamma_scan_product(const ProductSpec& p, ProductResult& r, json& meta) {
  const Scenario& s = p.scenario;
  const auto pred = predict_revival(s.ratio, s.kappa);
  if (!pred.exists || !pred.time) throw ProductError("ratio " + describe_ratio(s), "no revival to scan");
  const auto rho0 = s.initial_state();
  const double v0 = phase_variance(marginal(evolve_density(rho0, s.beta, s.model(), 0.0, s.frame), p.subsystem));
  const double unit = s.time_unit();
  json revivals = json::array();
  for (int rev = 1; rev <= p.revivals; ++rev) {
    const double t = rev * *pred.time;
    Series series;
    for (int i = 0; i < p.scan_points; ++i) {
      const double x = std::exp(std::log(p.scan_start) +
                                (std::log(p.scan_end) - std::log(p.scan_start)) * i / (p.scan_points - 1));
      DetectionParams det;
      det.gamma = 2 * s.kappa * x;
      det.model = s.model();
      det.beta = s.beta;
      try {
        series.emplace_back(x, phase_variance(marginal(unconditioned_state(rho0, det, t, s.frame), p.subsystem)));
      } catch (const Error& e) {
        throw ProductError("gamma/2kappa = " + format_double(x) + ", revival " + std::to_string(rev), e.what());
      }
    }
    const std::string name = p.id + "_rev" + std::to_string(rev) + ".csv";
    r.files.push_back({name, timeseries_csv(series, "gamma_over_2kappa,value")});
    json bands = json::array();
    for (double b : p.bands) {
      const auto c = first_crossing(series, (1 + b) * v0);
      bands.push_back({{"band", b}, {"level", (1 + b) * v0}, {"crossing", c ? json(*c) : json(nullptr)}});
    }
    revivals.push_back({{"file", name}, {"revival", rev}, {"time", t / unit}, {"bands", bands}});
  }
  meta["subsystem"] = subsystem_name(p.subsystem);
  meta["initial_variance"] = v0;
  meta["revivals"] = revivals;
  r.summary = p.id + ": " + std::to_string(p.revivals) + " revival scans of " + std::to_string(p.scan_points) + " rates";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

void infer_report_product(const ProductSpec& p, ProductResult& r, json& meta) {
  const Scenario& s = p.scenario;
  const double gamma = s.gamma > 0 ? s.gamma : 1.0;
  const double t = p.gamma_t / gamma;
  const RegimeThresholds thresholds{p.min_gamma_t, p.min_separation};
  std::string csv = "family,n_atoms,k_tilde_measured,k_tilde_predicted,q_inferred,classification,in_regime,warnings\n";
  json rows = json::array();
  r.summary = p.id + ":\n";
  for (const auto& fam : p.families) {
    Scenario fs = s;
    fs.initial = fam;
    const auto rho = fs.initial_state();
    const auto moments = number_moments(rho, 2);
    const double n_atoms = moments[0];
    DetectionParams det;
    det.gamma = gamma;
    det.model = s.model();
    // Weak dispersive coupling chosen to put gamma^2 / (xi^2 <n^2>) at the requested separation.
    const double xi = gamma / std::sqrt(p.separation * moments[1]);
    det.model.g1 = std::sqrt(xi * s.delta);
    if (det.model.g2_tilde == cplx{}) det.model.g2_tilde = 1.0;
    det.beta = -kI * det.g(n_atoms + p.steady_state_offset);
    RescaledMoment res;
    try {
      res = rescaled_moment(rho, det, 1, t, thresholds);
    } catch (const Error& e) {
      throw ProductError("family " + describe(fam), e.what());
    }
    const double q = infer_mandel_q(res.value, n_atoms);
    const auto verdict = to_string(classify(q));
    r.warnings.insert(r.warnings.end(), res.warnings.begin(), res.warnings.end());
    std::string warn;
    for (const auto& w : res.warnings) warn += (warn.empty() ? "" : "; ") + w;
    csv += csv_field(describe(fam)) + "," + format_double(n_atoms) + "," + format_double(res.value) + "," +
           format_double(moments[1]) + "," + format_double(q) + "," + verdict + "," +
           (res.in_regime() ? "true" : "false") + "," + csv_field(warn) + "\n";
    rows.push_back({{"family", describe(fam)}, {"k_tilde", res.value}, {"q", q}, {"classification", verdict},
                    {"warnings", res.warnings}});
    r.summary += "  " + describe(fam) + "  N_A " + format_double(n_atoms) + "  k~ " + format_double(res.value) +
                 "  Q " + format_double(q) + "  " + verdict + (warn.empty() ? "" : "  [" + warn + "]") + "\n";
  }
  meta["gamma_t"] = p.gamma_t;
  meta["rows"] = rows;
  r.files.push_back({p.id + ".csv", csv});
  r.summary.pop_back();
}

std::string behaviour(const Series& v) {
  const double v0 = v.front().second;
  double max_change = 0.0;
  bool collapsed = false, returned = false;
  for (const auto& [x, y] : v) {
    const double rel = std::abs(y - v0) / v0;
    max_change = std::max(max_change, std::abs(y - v0));
    if (rel > kBehaviourBand) collapsed = true;
    else if (collapsed) returned = true;
  }
  if (max_change <= kConstantTol) return "constant";
  if (collapsed) return returned ? "collapse-revival" : "collapse";
  return "varying";
}

void table1_product(const ProductSpec& p, ProductResult& r, json& meta) {
  std::string csv = "family,subsystem,v_initial,v_min,v_max,max_abs_change,behaviour\n";
  json rows = json::array();
  r.summary = p.id + ":\n";
  for (const auto& fam : p.families) {
    ProductSpec fp = p;
    fp.scenario.initial = fam;
    fp.conditioning = Conditioning::none;
    const auto rho0 = fp.scenario.initial_state();
    Series atoms, light;
    for (const auto& [x, t] : grid_points(fp.scenario)) {
      const auto st = at_time(x, fp.scenario, [&, t = t] { return joint_state(fp, rho0, t); });
      atoms.emplace_back(x, phase_variance(marginal(st, Subsystem::atoms)));
      light.emplace_back(x, phase_variance(marginal(st, Subsystem::light)));
    }
    std::vector<std::vector<double>> table;
    for (std::size_t i = 0; i < atoms.size(); ++i) table.push_back({atoms[i].first, atoms[i].second, light[i].second});
    const std::string name = p.id + "_" + slug(fam) + ".csv";
    r.files.push_back({name, table_csv({"t", "atoms", "light"}, table)});
    for (const auto& [sub, v] : {std::pair{"atoms", &atoms}, std::pair{"light", &light}}) {
      double lo = v->front().second, hi = lo, change = 0.0;
      for (const auto& [x, y] : *v) {
        lo = std::min(lo, y);
        hi = std::max(hi, y);
        change = std::max(change, std::abs(y - v->front().second));
      }
      const auto b = behaviour(*v);
      csv += csv_field(describe(fam)) + "," + sub + "," + format_double(v->front().second) + "," + format_double(lo) +
             "," + format_double(hi) + "," + format_double(change) + "," + b + "\n";
      rows.push_back({{"family", describe(fam)}, {"subsystem", sub}, {"behaviour", b}, {"file", name}});
      r.summary += "  " + describe(fam) + "  " + sub + "  " + b + "\n";
    }
  }
  meta["rows"] = rows;
  r.files.push_back({p.id + ".csv", csv});
  r.summary.pop_back();
}

std::string context(const ProductSpec& p) {
  const Scenario& s = p.scenario;
  return "product '" + p.id + "' (" + p.type + ", " + describe(s.initial) + ", ratio " + describe_ratio(s) +
         ", gamma " + format_double(s.gamma) + ")";
}

}  // namespace

ProductResult run_product(const ProductSpec& p) {
  ProductResult r;
  r.id = p.id;
  r.type = p.type;
  r.parameter_hash = sha256_hex(p.canonical);
  json meta = base_metadata(p, r.parameter_hash);
  try {
    if (p.type == "phase_variance") phase_variance_product(p, r, meta);
    else if (p.type == "husimi") husimi_product(p, r, meta, r.parameter_hash);
    else if (p.type == "count_probability") count_probability_product(p, r, meta);
    else if (p.type == "gamma_scan") gamma_scan_product(p, r, meta);
    else if (p.type == "infer_report") infer_report_product(p, r, meta);
    else if (p.type == "table1_matrix") table1_product(p, r, meta);
    else throw ProductError("type", "unknown product type '" + p.type + "'");
  } catch (const ProductError& e) {
    throw ProductError(context(p), e.what());
  } catch (const Error& e) {
    throw ProductError(context(p), e.what());
  }
  meta["warnings"] = r.warnings;
  json files = json::array();
  for (const auto& f : r.files) files.push_back(f.name);
  meta["files"] = files;
  r.files.push_back({p.id + ".json", meta.dump(2) + "\n"});
  return r;
}

RunSummary run_config(const Config& cfg, const RunOptions& options, std::ostream& log) {
  const std::size_t n = cfg.products.size();
  std::vector<std::optional<ProductResult>> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = run_product(cfg.products[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(options.threads, 1, static_cast<int>(std::max<std::size_t>(n, 1)));
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::exception_ptr first;
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    if (!first) first = errors[i];
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      log << "error: " << e.what() << "\n";
    }
  }
  if (first) std::rethrow_exception(first);

  RunSummary summary;
  summary.directory = options.out_dir / cfg.name;
  std::filesystem::create_directories(summary.directory);
  json products = json::array();
  for (const auto& r : results) {
    json files = json::array();
    for (const auto& f : r->files) {
      write_file(summary.directory / f.name, f.content);
      summary.files.push_back(f.name);
      files.push_back({{"name", f.name}, {"sha256", sha256_hex(f.content)}, {"bytes", f.content.size()}});
    }
    for (const auto& w : r->warnings) log << "warning: " << r->id << ": " << w << "\n";
    log << r->summary << "\n";
    products.push_back({{"id", r->id}, {"type", r->type}, {"parameter_hash", r->parameter_hash}, {"files", files}});
  }
  const json manifest{{"name", cfg.name}, {"description", cfg.description}, {"products", products}};
  write_file(summary.directory / "manifest.json", manifest.dump(2) + "\n");
  summary.files.emplace_back("manifest.json");
  return summary;
}

}  // namespace becprobe::cli
