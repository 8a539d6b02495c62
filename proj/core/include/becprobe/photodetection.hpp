#pragma once

#include <string>
#include <vector>

#include "becprobe/dynamics.hpp"
#include "becprobe/fock.hpp"

namespace becprobe {

// Probe counted at rate gamma (amplitude damping gamma / 2), initial probe amplitude beta.
struct DetectionParams {
  double gamma = 0.0;
  ModelParams model;
  cplx beta{};

  // gamma / 2 + i xi m.
  [[nodiscard]] cplx big_gamma(double m) const;
  // conj(F) m / Gamma_m, zero for m = 0.
  [[nodiscard]] cplx g(double m) const;
  // beta + i G_m.
  [[nodiscard]] cplx lambda(double m) const;

  void validate() const;
};

// F_{m,n}(t) = gamma * int_0^t beta_m(s) conj(beta_n(s)) ds.
cplx f_mn(const DetectionParams& det, int m, int n, double t);

cplx beta_m_damped(const DetectionParams& det, int m, double t);

// 2 Re Phi_m = -F_mm keeps the count-averaged state normalised.
cplx phi_m_damped(const DetectionParams& det, int m, double t, Frame frame = Frame::lab);

double count_probability(const DensityMatrix& rho_a0, const DetectionParams& det, int k, double t);

// Joint state after exactly k counts in [0, t], unit trace.
JointDensity conditioned_state(const DensityMatrix& rho_a0, const DetectionParams& det, int k,
                               double t, Frame frame = Frame::lab);

// Count-averaged (pre-selected) joint state.
JointDensity unconditioned_state(const DensityMatrix& rho_a0, const DetectionParams& det, double t,
                                 Frame frame = Frame::lab);

// State given at least one count, [rho - P(0) rho_0] / (1 - P(0)).
JointDensity arbitrary_count_state(const DensityMatrix& rho_a0, const DetectionParams& det,
                                   double t, Frame frame = Frame::lab);

// sum_k k^r P(k, t) through Poisson raw moments.
double count_moment(const DensityMatrix& rho_a0, const DetectionParams& det, int r, double t);

struct RegimeThresholds {
  double min_gamma_t = 50.0;
  double min_separation = 100.0;
};

struct RescaledMoment {
  double value = 0.0;
  double gamma_t = 0.0;
  // gamma^2 / (xi^2 <n^2>).
  double separation = 0.0;
  std::vector<std::string> warnings;

  [[nodiscard]] bool in_regime() const { return warnings.empty(); }
};

// k^r / [(gamma t)^r |2 g1 g2_tilde / (gamma delta)|^{2r}], with regime warnings.
RescaledMoment rescaled_moment(const DensityMatrix& rho_a0, const DetectionParams& det, int r,
                               double t, const RegimeThresholds& thresholds = {});

// (k~ - N^2) / N - 1.
double infer_mandel_q(double k_tilde, double n_atoms);

enum class SsrVerdict { compatible, violation_indicated };

// Q < -tolerance is sub-Poissonian and compatible with the superselection rule; the
// tolerance absorbs the finite-gamma*t bias of an inferred Q.
SsrVerdict classify(double q, double tolerance = 0.05);
std::string to_string(SsrVerdict v);

}  // namespace becprobe
