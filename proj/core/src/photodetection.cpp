#include "becprobe/photodetection.hpp"

#include <cmath>

#include "becprobe/numeric.hpp"

namespace becprobe {

namespace {

void check_time(double t, const char* who) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError(std::string(who) + ": t must be finite and >= 0");
}

void check_state(const DensityMatrix& rho, const char* who) {
  if (std::abs(rho.trace() - 1.0) > 1e-9) throw DomainError(std::string(who) + ": atomic state has trace != 1");
}

// int_0^t e^{-a s} ds.
cplx damped_integral(cplx a, double t) { return t * numeric::phi1(-a * t); }

struct Branches {
  std::vector<cplx> phi;
  std::vector<cplx> labels;
};

Branches branches(const DensityMatrix& rho, const DetectionParams& det, double t, Frame frame) {
  Branches b;
  for (int m = 0; m < rho.dim(); ++m) {
    b.phi.push_back(phi_m_damped(det, m, t, frame));
    b.labels.push_back(beta_m_damped(det, m, t));
  }
  return b;
}

}  // namespace

cplx DetectionParams::big_gamma(double m) const { return 0.5 * gamma + kI * (model.xi() * m); }

cplx DetectionParams::g(double m) const {
  if (m == 0.0) return {};
  return std::conj(model.drive()) * m / big_gamma(m);
}

cplx DetectionParams::lambda(double m) const { return beta + kI * g(m); }

void DetectionParams::validate() const {
  model.validate();
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("DetectionParams: gamma must be finite and > 0");
}

cplx f_mn(const DetectionParams& det, int m, int n, double t) {
  det.validate();
  check_time(t, "f_mn");
  const cplx gm = det.big_gamma(m), gn = det.big_gamma(n);
  const cplx lm = det.lambda(m), ln = det.lambda(n);
  const cplx qm = det.g(m), qn = det.g(n);
  const cplx s = gm + std::conj(gn);
  cplx acc = lm * std::conj(ln) * damped_integral(s, t) + qm * std::conj(qn) * t;
  acc += kI * (std::conj(qn) * lm * damped_integral(gm, t) - qm * std::conj(ln) * damped_integral(std::conj(gn), t));
  acc *= det.gamma;
  if (m == n) return {std::max(acc.real(), 0.0), 0.0};
  return acc;
}

cplx beta_m_damped(const DetectionParams& det, int m, double t) {
  det.validate();
  check_time(t, "beta_m_damped");
  const cplx gm = det.big_gamma(m);
  // Lambda e^{-Gamma t} - i G = beta e^{-Gamma t} + i G (e^{-Gamma t} - 1).
  const cplx drive = std::conj(det.model.drive()) * static_cast<double>(m);
  return det.beta * std::exp(-gm * t) - kI * drive * damped_integral(gm, t);
}

cplx phi_m_damped(const DetectionParams& det, int m, double t, Frame frame) {
  const cplx bm = beta_m_damped(det, m, t);
  const double md = static_cast<double>(m);
  const ModelParams& p = det.model;
  const cplx gm = det.big_gamma(m);
  const cplx fm = p.drive() * md;
  cplx phi = -0.5 * (std::norm(det.beta) - std::norm(bm));
  // i (F_m / Gamma_m) Lambda_m (e^{-Gamma_m t} - 1)
  phi += -kI * fm * det.lambda(md) * damped_integral(gm, t);
  if (m != 0) phi += -std::norm(fm) / gm * t;
  phi += -kI * (p.omega_a() * md + p.kappa * md * (md - 1.0)) * t;
  if (frame == Frame::rotating) phi += kI * p.omega_a() * md * t;
  return phi;
}

double count_probability(const DensityMatrix& rho_a0, const DetectionParams& det, int k, double t) {
  if (k < 0) throw DomainError("count_probability: k must be >= 0");
  check_state(rho_a0, "count_probability");
  double p = 0.0;
  for (int m = 0; m < rho_a0.dim(); ++m) {
    const double w = rho_a0(m, m).real();
    if (w == 0.0) continue;
    const double f = f_mn(det, m, m, t).real();
    if (f == 0.0) {
      if (k == 0) p += w;
      continue;
    }
    p += w * std::exp(k * std::log(f) - f - numeric::log_factorial(k));
  }
  return p;
}

JointDensity conditioned_state(const DensityMatrix& rho_a0, const DetectionParams& det, int k,
                               double t, Frame frame) {
  const double prob = count_probability(rho_a0, det, k, t);
  if (!(prob >= 1e-300))
    throw DegenerateInputError("conditioned_state: P(" + std::to_string(k) + ", t) vanishes");
  const Branches b = branches(rho_a0, det, t, frame);
  const int dim = rho_a0.dim();
  const double log_norm = numeric::log_factorial(k) + std::log(prob);
  JointDensity out;
  out.labels = b.labels;
  out.coeff = CMatrix::Zero(dim, dim);
  for (int m = 0; m < dim; ++m)
    for (int n = 0; n < dim; ++n) {
      const cplx r = rho_a0(m, n);
      if (r == cplx{}) continue;
      cplx expo = b.phi[m] + std::conj(b.phi[n]) - log_norm;
      if (k > 0) {
        const cplx f = f_mn(det, m, n, t);
        if (f == cplx{}) continue;
        expo += static_cast<double>(k) * std::log(f);
      }
      out.coeff(m, n) = r * std::exp(expo);
    }
  return out;
}

JointDensity unconditioned_state(const DensityMatrix& rho_a0, const DetectionParams& det, double t,
                                 Frame frame) {
  check_state(rho_a0, "unconditioned_state");
  const Branches b = branches(rho_a0, det, t, frame);
  const int dim = rho_a0.dim();
  JointDensity out;
  out.labels = b.labels;
  out.coeff = CMatrix::Zero(dim, dim);
  // Re of the exponent is <= 0 off the diagonal and 0 on it, so no overflow guard is needed.
  for (int m = 0; m < dim; ++m)
    for (int n = 0; n < dim; ++n) {
      const cplx r = rho_a0(m, n);
      if (r != cplx{}) out.coeff(m, n) = r * std::exp(b.phi[m] + std::conj(b.phi[n]) + f_mn(det, m, n, t));
    }
  return out;
}

JointDensity arbitrary_count_state(const DensityMatrix& rho_a0, const DetectionParams& det,
                                   double t, Frame frame) {
  check_state(rho_a0, "arbitrary_count_state");
  double p_any = 0.0;
  for (int m = 0; m < rho_a0.dim(); ++m)
    p_any -= rho_a0(m, m).real() * std::expm1(-f_mn(det, m, m, t).real());
  if (!(p_any > 1e-300))
    throw DegenerateInputError("arbitrary_count_state: P(0, t) = 1, no count can have occurred");
  const Branches b = branches(rho_a0, det, t, frame);
  const int dim = rho_a0.dim();
  JointDensity out;
  out.labels = b.labels;
  out.coeff = CMatrix::Zero(dim, dim);
  for (int m = 0; m < dim; ++m)
    for (int n = 0; n < dim; ++n) {
      const cplx r = rho_a0(m, n);
      if (r == cplx{}) continue;
      out.coeff(m, n) =
          r * std::exp(b.phi[m] + std::conj(b.phi[n])) * numeric::expm1(f_mn(det, m, n, t)) / p_any;
    }
  return out;
}

double count_moment(const DensityMatrix& rho_a0, const DetectionParams& det, int r, double t) {
  if (r < 1) throw DomainError("count_moment: r must be >= 1");
  check_state(rho_a0, "count_moment");
  double acc = 0.0;
  for (int m = 0; m < rho_a0.dim(); ++m) {
    const double w = rho_a0(m, m).real();
    if (w != 0.0) acc += w * numeric::touchard(r, f_mn(det, m, m, t).real());
  }
  return acc;
}

RescaledMoment rescaled_moment(const DensityMatrix& rho_a0, const DetectionParams& det, int r,
                               double t, const RegimeThresholds& thresholds) {
  det.validate();
  const double coupling = 4.0 * std::norm(det.model.drive()) / (det.gamma * det.gamma);
  if (!(coupling > 0.0)) throw DomainError("rescaled_moment: g1 g2_tilde must be nonzero");
  RescaledMoment out;
  out.gamma_t = det.gamma * t;
  out.value = count_moment(rho_a0, det, r, t) / std::pow(out.gamma_t * coupling, r);
  double n2 = 0.0;
  for (int m = 1; m < rho_a0.dim(); ++m) n2 += static_cast<double>(m) * m * rho_a0(m, m).real();
  const double xi = det.model.xi();
  out.separation = (xi == 0.0 || n2 == 0.0) ? INFINITY : det.gamma * det.gamma / (xi * xi * n2);
  if (out.gamma_t < thresholds.min_gamma_t)
    out.warnings.push_back("gamma*t = " + std::to_string(out.gamma_t) + " below " +
                           std::to_string(thresholds.min_gamma_t));
  if (out.separation < thresholds.min_separation)
    out.warnings.push_back("gamma^2 / (xi^2 <n^2>) = " + std::to_string(out.separation) + " below " +
                           std::to_string(thresholds.min_separation));
  return out;
}

double infer_mandel_q(double k_tilde, double n_atoms) {
  if (!(n_atoms > 0.0)) throw DomainError("infer_mandel_q: N_A must be > 0");
  return (k_tilde - n_atoms * n_atoms) / n_atoms - 1.0;
}

SsrVerdict classify(double q, double tolerance) {
  return q < -tolerance ? SsrVerdict::compatible : SsrVerdict::violation_indicated;
}

std::string to_string(SsrVerdict v) {
  return v == SsrVerdict::compatible ? "sub-Poissonian/SSR-compatible"
                                     : "Poissonian-or-super/SSR-violation-indicated";
}

}  // namespace becprobe
