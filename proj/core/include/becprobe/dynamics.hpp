#pragma once

#include "becprobe/fock.hpp"
#include "becprobe/types.hpp"

namespace becprobe {

// Parameters of the single-mode atom + probe Hamiltonian (hbar = 1)
//
//   H = omega_A n + kappa n(n-1) + n (F a + F* a^dag) + xi n a^dag a,
//
// with omega_A = omega0 + |g2_tilde|^2 / delta, F = g1 conj(g2_tilde) / delta
// and xi = |g1|^2 / delta. n counts condensate atoms, a is the probe mode.
struct ModelParams {
  double kappa = 0.0;   // collision rate
  double delta = 1.0;   // detuning
  cplx g1{};            // probe coupling
  cplx g2_tilde{};      // pumped coupling g2 * alpha2
  double omega0 = 0.0;  // trap ground frequency

  // |g1| = sqrt(ratio * kappa * delta) with g1 real, i.e. |g1|^2 / (kappa delta) = ratio.
  static ModelParams from_ratio(double kappa, double delta, double ratio, cplx g2_tilde = {},
                                double omega0 = 0.0);

  [[nodiscard]] double xi() const;
  [[nodiscard]] cplx drive() const;
  [[nodiscard]] double omega_a() const;

  // Throws DomainError for delta == 0, kappa < 0, non-finite derived values,
  // or g1 == 0 with g2_tilde != 0 (displacement ratio g2_tilde / g1 undefined).
  void validate() const;
};

// Lab frame keeps the e^{-i omega_A m t} rotation; rotating strips it.
enum class Frame { lab, rotating };

// Probe amplitude beta_m(t) of the |m> branch (unitary evolution).
cplx beta_m(const ModelParams& params, int m, double t, cplx beta);

// Exponent Phi_m(t) of the |m> branch; Re Phi_m keeps sum_m |C_m e^{Phi_m}|^2 = 1.
//
// This is the closed form of the driven-oscillator propagator including its
// energy shift |F_m|^2 / xi_m, so the lab-frame linear phase is -i omega0 m t.
cplx phi_m(const ModelParams& params, int m, double t, cplx beta, Frame frame = Frame::lab);

JointPureState evolve_pure(const FockVector& c, cplx beta, const ModelParams& params, double t,
                           Frame frame = Frame::lab);

JointDensity evolve_density(const DensityMatrix& rho_a, cplx beta, const ModelParams& params,
                            double t, Frame frame = Frame::lab);

// Normal-ordering coefficients of the driven oscillator xi_m a^dag a + F_m a + F_m* a^dag:
// U = N{exp(A + B b + C b* + D b* b)}.
struct DhoCoefficients {
  cplx a;
  cplx b;
  cplx c;
  cplx d;
};

DhoCoefficients dho_coefficients(double xi_m, cplx f_m, double t);

// U|beta> = prefactor |amplitude> with |amplitude> normalised.
struct PropagatedCoherent {
  cplx prefactor;
  cplx amplitude;
};

PropagatedCoherent apply_dho_propagator(const DhoCoefficients& coeffs, cplx beta);

}  // namespace becprobe
