#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "becprobe/dynamics.hpp"
#include "becprobe/fock.hpp"

namespace testing {

using becprobe::cplx;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline cplx polar_random(std::mt19937_64& rng, double r_lo, double r_hi) {
  return std::polar(uniform(rng, r_lo, r_hi), uniform(rng, -std::numbers::pi, std::numbers::pi));
}

inline becprobe::ModelParams random_params(std::mt19937_64& rng, bool with_pump = true) {
  becprobe::ModelParams p;
  p.kappa = uniform(rng, 0.05, 1.5);
  p.delta = uniform(rng, 0.5, 2.0) * (uniform(rng, 0, 1) < 0.2 ? -1.0 : 1.0);
  p.g1 = polar_random(rng, 0.2, 1.3);
  p.g2_tilde = with_pump ? polar_random(rng, 0.0, 0.8) : cplx{};
  p.omega0 = uniform(rng, -1.0, 1.0);
  return p;
}

// Normalised random pure state on |0>..|n_max>.
inline becprobe::FockVector random_fock_vector(std::mt19937_64& rng, int n_max) {
  becprobe::CVector v(n_max + 1);
  for (int i = 0; i <= n_max; ++i) v(i) = polar_random(rng, 0.0, 1.0);
  v /= v.norm();
  return {v};
}

// Random density matrix of rank <= 3 on |0>..|n_max>.
inline becprobe::DensityMatrix random_density(std::mt19937_64& rng, int n_max) {
  becprobe::CMatrix rho = becprobe::CMatrix::Zero(n_max + 1, n_max + 1);
  double total = 0.0;
  for (int r = 0; r < 3; ++r) {
    const double w = uniform(rng, 0.1, 1.0);
    const auto v = random_fock_vector(rng, n_max).amplitudes;
    rho += w * v * v.adjoint();
    total += w;
  }
  return becprobe::DensityMatrix(rho / total);
}

// Composite Simpson rule with n (even) panels.
template <class F>
auto simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  auto acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return acc * (h / 3.0);
}

}  // namespace testing
