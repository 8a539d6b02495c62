#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "becprobe/dynamics.hpp"

namespace becprobe {

// Reduced fraction p/q, q >= 1.
struct Fraction {
  long long p = 0;
  long long q = 1;

  [[nodiscard]] double value() const { return static_cast<double>(p) / static_cast<double>(q); }
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

struct RevivalPrediction {
  bool exists = false;
  std::optional<double> time;
  std::optional<Fraction> ratio;
};

// pi / kappa.
double revival_time_collision(double kappa);

// 2 pi delta / |g1|^2.
double revival_time_light(const ModelParams& params);

// First time at which every branch phase kappa n(n-1) t + xi n m t is a multiple of 2 pi,
// for xi / kappa = p / q. This is 2 q / gcd(p, 2) collision revivals: for even p
// the shorter q t_rev^C already works.
RevivalPrediction joint_revival_time(Fraction ratio_pq, double kappa);

// Continued-fraction convergent p/q of x with q <= max_den and |x - p/q| <= tol.
std::optional<Fraction> rational_detect(double x, long long max_den, double tol);

struct SeriesPoint {
  double t;
  double value;
};

// One time per contiguous run of values <= threshold: the run's minimum, earliest on ties.
std::vector<double> detect_revivals(const std::vector<SeriesPoint>& series, double threshold);

// The ratio |g1|^2 / (kappa delta) as the user declared it.
struct RatioZero {};
struct RatioIrrational {};
using RatioSpec = std::variant<RatioZero, Fraction, RatioIrrational>;

double ratio_value(const RatioSpec& spec);

// Zero ratio revives at t_rev^C; irrational never revives.
RevivalPrediction predict_revival(const RatioSpec& spec, double kappa);

}  // namespace becprobe
