#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "becprobe/dynamics.hpp"
#include "becprobe/revival.hpp"

namespace becprobe::cli {

// Invalid configuration; the message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error("config key '" + key + "': " + what), key_(key) {}
  [[nodiscard]] const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class AtomicKind { fock, coherent, binomial };

struct AtomicSpec {
  AtomicKind kind = AtomicKind::coherent;
  int n = 0;           // fock(n), binomial(n)
  double abs2 = 3.0;   // coherent
  double phase = 0.0;  // coherent
};

enum class TimeUnit { t_rev_c, t_rev_l, absolute };

struct TimeGrid {
  double start = 0.0;
  double end = 1.0;
  int points = 2;
  TimeUnit units = TimeUnit::t_rev_c;
};

// One fully resolved physical scenario (defaults merged with product overrides).
struct Scenario {
  AtomicSpec initial;
  cplx beta{1.7320508075688772, 0.0};
  RatioSpec ratio = Fraction{1, 1};
  // False when the ratio was given as a float and classified by rational_detect.
  bool ratio_declared_exact = true;
  double ratio_float = 1.0;
  double kappa = 1.0;
  double delta = 1.0;
  // Explicit probe coupling, only with kappa == 0 where the ratio is undefined.
  std::optional<cplx> g1;
  cplx g2_tilde{};
  double omega0 = 0.0;
  double gamma = 0.0;
  Frame frame = Frame::rotating;
  TimeGrid grid;

  [[nodiscard]] ModelParams model() const;
  // Length of one declared time unit.
  [[nodiscard]] double time_unit() const;
  [[nodiscard]] std::vector<double> times() const;  // absolute times
  [[nodiscard]] DensityMatrix initial_state() const;
};

enum class Subsystem { atoms, light };
enum class Conditioning { none, count, preselected, arbitrary };

struct ProductSpec {
  std::string id;
  std::string type;
  Scenario scenario;
  Subsystem subsystem = Subsystem::atoms;
  Conditioning conditioning = Conditioning::none;
  int count_k = 0;
  // husimi
  std::vector<double> times;  // in the scenario's time units
  double grid_radius = 0.0;   // 0: |amplitude| + 3
  int grid_points = 201;
  // count_probability
  std::vector<int> ks;
  bool include_any = false;
  // gamma_scan
  double scan_start = 1e-5;
  double scan_end = 1e-2;
  int scan_points = 31;
  int revivals = 1;
  std::vector<double> bands{0.1, 0.2};
  // infer_report / table1_matrix
  std::vector<AtomicSpec> families;
  double gamma_t = 100.0;
  double separation = 1e6;
  double steady_state_offset = 0.375;
  double min_gamma_t = 50.0;
  double min_separation = 100.0;
  // the resolved YAML of this product, used for hashing and metadata
  std::string canonical;
};

struct Config {
  std::string name;
  std::string description;
  std::vector<ProductSpec> products;
};

Config parse_config_file(const std::string& path);
Config parse_config_string(const std::string& text, const std::string& origin = "<string>");

std::string to_string(TimeUnit u);
std::string to_string(AtomicKind k);
std::string describe(const AtomicSpec& a);
std::string describe_ratio(const Scenario& s);

}  // namespace becprobe::cli
