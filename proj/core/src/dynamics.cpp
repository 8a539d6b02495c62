#include "becprobe/dynamics.hpp"

#include <cmath>
#include <vector>

#include "becprobe/numeric.hpp"

namespace becprobe {

ModelParams ModelParams::from_ratio(double kappa, double delta, double ratio, cplx g2_tilde,
                                    double omega0) {
  if (ratio < 0.0 || kappa * delta * ratio < 0.0)
    throw DomainError("ModelParams::from_ratio: ratio * kappa * delta must be >= 0");
  ModelParams p;
  p.kappa = kappa;
  p.delta = delta;
  p.g1 = std::sqrt(ratio * kappa * delta);
  p.g2_tilde = g2_tilde;
  p.omega0 = omega0;
  return p;
}

double ModelParams::xi() const { return std::norm(g1) / delta; }

cplx ModelParams::drive() const { return g1 * std::conj(g2_tilde) / delta; }

double ModelParams::omega_a() const { return omega0 + std::norm(g2_tilde) / delta; }

void ModelParams::validate() const {
  if (delta == 0.0 || !std::isfinite(delta)) throw DomainError("ModelParams: delta must be finite and nonzero");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw DomainError("ModelParams: kappa must be finite and >= 0");
  if (!std::isfinite(xi()) || !std::isfinite(std::abs(drive())) || !std::isfinite(omega_a()))
    throw DomainError("ModelParams: derived xi, F or omega_A not finite");
  if (g1 == cplx{} && g2_tilde != cplx{})
    throw DomainError("ModelParams: g1 == 0 with g2_tilde != 0 leaves g2_tilde / g1 undefined");
}

cplx beta_m(const ModelParams& params, int m, double t, cplx beta) {
  params.validate();
  if (m < 0) throw DomainError("beta_m: m must be >= 0");
  if (params.g1 == cplx{}) return beta;
  const cplx z = -kI * (params.xi() * m * t);
  return beta * std::exp(z) + (params.g2_tilde / params.g1) * numeric::expm1(z);
}

cplx phi_m(const ModelParams& params, int m, double t, cplx beta, Frame frame) {
  const cplx bm = beta_m(params, m, t, beta);
  const double md = static_cast<double>(m);
  cplx phi = -kI * (params.omega_a() * md * t + params.kappa * md * (md - 1.0) * t);
  if (params.g1 != cplx{}) {
    phi += 0.5 * (std::norm(bm) - std::norm(beta));
    phi += std::conj(params.g2_tilde / params.g1) * (bm - beta);
    // Energy shift -|F_m|^2 / xi_m of the displaced oscillator.
    phi += kI * (std::norm(params.g2_tilde) / params.delta) * md * t;
  }
  if (frame == Frame::rotating) phi += kI * params.omega_a() * md * t;
  return phi;
}

JointPureState evolve_pure(const FockVector& c, cplx beta, const ModelParams& params, double t,
                           Frame frame) {
  params.validate();
  if (std::abs(c.norm_squared() - 1.0) > 1e-9)
    throw DomainError("evolve_pure: initial atomic state is not normalised");
  JointPureState out;
  out.terms.reserve(c.amplitudes.size());
  for (int m = 0; m <= c.n_max(); ++m) {
    const cplx cm = c.amplitudes(m);
    const cplx weight = (cm == cplx{}) ? cplx{} : cm * std::exp(phi_m(params, m, t, beta, frame));
    out.terms.push_back({weight, beta_m(params, m, t, beta)});
  }
  return out;
}

JointDensity evolve_density(const DensityMatrix& rho_a, cplx beta, const ModelParams& params,
                            double t, Frame frame) {
  params.validate();
  if (std::abs(rho_a.trace() - 1.0) > 1e-9)
    throw DomainError("evolve_density: initial atomic state has trace != 1");
  const int dim = rho_a.dim();
  std::vector<cplx> phis(dim);
  JointDensity out;
  out.labels.resize(dim);
  for (int m = 0; m < dim; ++m) {
    phis[m] = phi_m(params, m, t, beta, frame);
    out.labels[m] = beta_m(params, m, t, beta);
  }
  out.coeff = CMatrix::Zero(dim, dim);
  for (int m = 0; m < dim; ++m)
    for (int n = 0; n < dim; ++n) {
      const cplx r = rho_a(m, n);
      if (r != cplx{}) out.coeff(m, n) = r * std::exp(phis[m] + std::conj(phis[n]));
    }
  return out;
}

DhoCoefficients dho_coefficients(double xi_m, cplx f_m, double t) {
  // D = e^{-i xi t} - 1, B = (F/xi) D, C = (F*/xi) D,
  // A = (|F|^2/xi^2) D + i |F|^2 t / xi, written through phi1/phi2 so xi -> 0 is regular.
  const cplx z = -kI * (xi_m * t);
  DhoCoefficients out;
  out.d = numeric::expm1(z);
  out.b = -kI * t * f_m * numeric::phi1(z);
  out.c = -kI * t * std::conj(f_m) * numeric::phi1(z);
  out.a = -std::norm(f_m) * t * t * numeric::phi2(z);
  return out;
}

PropagatedCoherent apply_dho_propagator(const DhoCoefficients& coeffs, cplx beta) {
  const cplx amplitude = (1.0 + coeffs.d) * beta + coeffs.c;
  const cplx log_pref =
      coeffs.a + coeffs.b * beta - 0.5 * std::norm(beta) + 0.5 * std::norm(amplitude);
  return {std::exp(log_pref), amplitude};
}

}  // namespace becprobe
