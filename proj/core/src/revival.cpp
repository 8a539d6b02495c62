#include "becprobe/revival.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace becprobe {

double revival_time_collision(double kappa) {
  if (!(kappa > 0.0)) throw DomainError("revival_time_collision: kappa must be > 0");
  return std::numbers::pi / kappa;
}

double revival_time_light(const ModelParams& params) {
  if (params.g1 == cplx{}) throw DomainError("revival_time_light: g1 must be nonzero");
  return 2.0 * std::numbers::pi * params.delta / std::norm(params.g1);
}

RevivalPrediction joint_revival_time(Fraction ratio_pq, double kappa) {
  if (ratio_pq.p < 1 || ratio_pq.q < 1 || std::gcd(ratio_pq.p, ratio_pq.q) != 1)
    throw DomainError("joint_revival_time: ratio must be a reduced fraction with p, q >= 1");
  const double t_c = revival_time_collision(kappa);
  const long long mult = 2 * ratio_pq.q / std::gcd(ratio_pq.p, 2LL);
  return {true, static_cast<double>(mult) * t_c, ratio_pq};
}

std::optional<Fraction> rational_detect(double x, long long max_den, double tol) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("rational_detect: x must be finite and > 0");
  if (max_den < 1) throw DomainError("rational_detect: max_den must be >= 1");
  // Convergents h_k / k_k from the continued fraction of x.
  long long h_prev = 1, h = static_cast<long long>(std::floor(x));
  long long k_prev = 0, k = 1;
  double rem = x - std::floor(x);
  for (int iter = 0; iter < 64; ++iter) {
    if (h > 0 && std::abs(x - static_cast<double>(h) / static_cast<double>(k)) <= tol)
      return Fraction{h, k};
    if (rem < 1e-300) break;
    const double inv = 1.0 / rem;
    const double a_real = std::floor(inv);
    if (a_real > 1e15) break;
    const auto a = static_cast<long long>(a_real);
    rem = inv - a_real;
    const long long k_next = a * k + k_prev;
    if (k_next > max_den || k_next < 0) break;
    const long long h_next = a * h + h_prev;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
  }
  return std::nullopt;
}

std::vector<double> detect_revivals(const std::vector<SeriesPoint>& series, double threshold) {
  if (series.empty()) throw DomainError("detect_revivals: empty series");
  std::vector<double> out;
  bool in_run = false;
  SeriesPoint best{};
  for (const auto& pt : series) {
    if (pt.value <= threshold) {
      if (!in_run || pt.value < best.value) best = pt;
      in_run = true;
    } else if (in_run) {
      out.push_back(best.t);
      in_run = false;
    }
  }
  if (in_run) out.push_back(best.t);
  return out;
}

double ratio_value(const RatioSpec& spec) {
  if (std::holds_alternative<RatioZero>(spec)) return 0.0;
  if (const auto* f = std::get_if<Fraction>(&spec)) return f->value();
  return 2.0 / std::numbers::pi;
}

RevivalPrediction predict_revival(const RatioSpec& spec, double kappa) {
  if (std::holds_alternative<RatioZero>(spec)) return {true, revival_time_collision(kappa), Fraction{0, 1}};
  if (const auto* f = std::get_if<Fraction>(&spec)) return joint_revival_time(*f, kappa);
  return {};
}

}  // namespace becprobe
