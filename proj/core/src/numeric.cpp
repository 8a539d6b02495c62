#include "becprobe/numeric.hpp"

#include <cmath>
#include <vector>

namespace becprobe::numeric {

cplx expm1(cplx z) {
  const double x = z.real();
  const double y = z.imag();
  const double s = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

cplx phi1(cplx z) {
  if (std::abs(z) < 1e-2) {
    // sum_k z^k / (k+1)!
    cplx term{1.0, 0.0};
    cplx sum = term;
    for (int k = 1; k < 10; ++k) {
      term *= z / static_cast<double>(k + 1);
      sum += term;
    }
    return sum;
  }
  return expm1(z) / z;
}

cplx phi2(cplx z) {
  if (std::abs(z) < 0.1) {
    // sum_k z^k / (k+2)!
    cplx term{0.5, 0.0};
    cplx sum = term;
    for (int k = 1; k < 14; ++k) {
      term *= z / static_cast<double>(k + 2);
      sum += term;
    }
    return sum;
  }
  return (expm1(z) - z) / (z * z);
}

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

double poisson_tail(double mean, int n_max) {
  if (mean < 0.0) throw DomainError("poisson_tail: negative mean");
  if (n_max < 0) return 1.0;
  if (mean == 0.0) return 0.0;
  const double log_mean = std::log(mean);
  auto log_term = [&](int k) { return k * log_mean - mean - log_factorial(k); };

  if (static_cast<double>(n_max) < mean) {
    double head = 0.0;
    for (int k = 0; k <= n_max; ++k) head += std::exp(log_term(k));
    return std::max(0.0, 1.0 - head);
  }
  double tail = 0.0;
  for (int k = n_max + 1;; ++k) {
    const double term = std::exp(log_term(k));
    tail += term;
    if (term <= 1e-22 * tail || term < 1e-300) break;
  }
  return tail;
}

double stirling2(int r, int j) {
  if (r < 0 || j < 0) throw DomainError("stirling2: negative index");
  if (j > r) return 0.0;
  // S(n, k) = k S(n-1, k) + S(n-1, k-1)
  std::vector<double> row(static_cast<std::size_t>(r) + 1, 0.0);
  row[0] = 1.0;
  for (int n = 1; n <= r; ++n) {
    for (int k = n; k >= 1; --k) row[k] = k * row[k] + row[k - 1];
    row[0] = 0.0;
  }
  return row[static_cast<std::size_t>(j)];
}

double touchard(int r, double x) {
  if (r < 0) throw DomainError("touchard: negative order");
  double sum = 0.0;
  double power = 1.0;
  for (int j = 0; j <= r; ++j) {
    sum += stirling2(r, j) * power;
    power *= x;
  }
  return sum;
}

}  // namespace becprobe::numeric
