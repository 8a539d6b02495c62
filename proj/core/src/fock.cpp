#include "becprobe/fock.hpp"

#include <cmath>
#include <string>

#include "becprobe/numeric.hpp"

namespace becprobe {

DensityMatrix::DensityMatrix(CMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0)
    throw DomainError("DensityMatrix: entries must be a non-empty square matrix");
}

DensityMatrix DensityMatrix::from_pure(const FockVector& psi) {
  return DensityMatrix(psi.amplitudes * psi.amplitudes.adjoint());
}

double DensityMatrix::hermiticity_error() const {
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  const CMatrix herm = 0.5 * (entries_ + entries_.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double JointPureState::norm_squared() const {
  double sum = 0.0;
  for (const auto& term : terms) sum += std::norm(term.weight);
  return sum;
}

double JointDensity::hermiticity_error() const {
  return (coeff - coeff.adjoint()).cwiseAbs().maxCoeff();
}

int default_cutoff(double abs_alpha) {
  const double a = std::abs(abs_alpha);
  return static_cast<int>(std::ceil(a * a + 10.0 * a + 10.0));
}

CVector coherent_amplitudes(cplx alpha, int n_max) {
  if (n_max < 0) throw DomainError("coherent_amplitudes: negative cutoff");
  CVector out(n_max + 1);
  const double r = std::abs(alpha);
  const double phase = std::arg(alpha);
  if (r == 0.0) {
    out.setZero();
    out(0) = 1.0;
    return out;
  }
  const double log_r = std::log(r);
  for (int m = 0; m <= n_max; ++m) {
    const double log_mag = m * log_r - 0.5 * numeric::log_factorial(m) - 0.5 * r * r;
    out(m) = std::polar(std::exp(log_mag), m * phase);
  }
  return out;
}

FockVector coherent_fock_vector(cplx alpha, int n_max) {
  if (n_max < 1) throw DomainError("coherent_fock_vector: n_max must be >= 1");
  const double tail = numeric::poisson_tail(std::norm(alpha), n_max);
  if (tail > kTruncationEpsilon)
    throw CutoffError("coherent_fock_vector: n_max = " + std::to_string(n_max) +
                      " leaves Poisson tail " + std::to_string(tail));
  return FockVector{coherent_amplitudes(alpha, n_max)};
}

FockVector fock_vector(int n, int n_max) {
  if (n < 0 || n_max < std::max(n, 1)) throw DomainError("fock_vector: need 0 <= n <= n_max, n_max >= 1");
  CVector amps = CVector::Zero(n_max + 1);
  amps(n) = 1.0;
  return FockVector{amps};
}

DensityMatrix fock_state(int n, int n_max) {
  if (n < 0 || n > n_max) throw DomainError("fock_state: need 0 <= n <= n_max");
  CMatrix rho = CMatrix::Zero(n_max + 1, n_max + 1);
  rho(n, n) = 1.0;
  return DensityMatrix(rho);
}

DensityMatrix binomial_mixture(int n_atoms, int n_max) {
  if (n_atoms < 0) throw DomainError("binomial_mixture: N must be >= 0");
  const int dim = std::max(n_max, n_atoms) + 1;
  CMatrix rho = CMatrix::Zero(dim, dim);
  const double log_half = n_atoms * std::log(0.5);
  for (int m = 0; m <= n_atoms; ++m) {
    const double log_binom = numeric::log_factorial(n_atoms) - numeric::log_factorial(m) -
                             numeric::log_factorial(n_atoms - m);
    rho(m, m) = std::exp(log_binom + log_half);
  }
  return DensityMatrix(rho);
}

cplx coherent_overlap(cplx b1, cplx b2) {
  return std::exp(-0.5 * std::norm(b1) - 0.5 * std::norm(b2) + std::conj(b1) * b2);
}

DensityMatrix reduce_to_atoms(const JointPureState& state) {
  const int dim = static_cast<int>(state.terms.size());
  CMatrix rho(dim, dim);
  for (int m = 0; m < dim; ++m) {
    const auto& tm = state.terms[m];
    rho(m, m) = std::norm(tm.weight);
    for (int n = m + 1; n < dim; ++n) {
      const auto& tn = state.terms[n];
      rho(m, n) = tm.weight * std::conj(tn.weight) * coherent_overlap(tn.probe_amp, tm.probe_amp);
      rho(n, m) = std::conj(rho(m, n));
    }
  }
  return DensityMatrix(rho);
}

DensityMatrix reduce_to_atoms(const JointDensity& state) {
  const int dim = static_cast<int>(state.labels.size());
  CMatrix rho(dim, dim);
  for (int m = 0; m < dim; ++m) {
    rho(m, m) = state.coeff(m, m).real();
    for (int n = m + 1; n < dim; ++n) {
      const cplx c = state.coeff(m, n);
      rho(m, n) = (c == 0.0) ? cplx{} : c * coherent_overlap(state.labels[n], state.labels[m]);
      rho(n, m) = std::conj(rho(m, n));
    }
  }
  return DensityMatrix(rho);
}

namespace {

DensityMatrix light_from_populations(const std::vector<double>& populations,
                                     const std::vector<cplx>& labels, int photon_cutoff) {
  if (photon_cutoff < 1) throw DomainError("reduce_to_light: photon_cutoff must be >= 1");
  double weighted_tail = 0.0;
  CMatrix rho = CMatrix::Zero(photon_cutoff + 1, photon_cutoff + 1);
  for (std::size_t m = 0; m < labels.size(); ++m) {
    if (populations[m] == 0.0) continue;
    weighted_tail += populations[m] * numeric::poisson_tail(std::norm(labels[m]), photon_cutoff);
    const CVector v = coherent_amplitudes(labels[m], photon_cutoff);
    rho.noalias() += populations[m] * (v * v.adjoint());
  }
  if (weighted_tail > kTruncationEpsilon)
    throw CutoffError("reduce_to_light: photon cutoff " + std::to_string(photon_cutoff) +
                      " leaves weighted tail " + std::to_string(weighted_tail));
  return DensityMatrix(rho);
}

}  // namespace

DensityMatrix reduce_to_light(const JointPureState& state, int photon_cutoff) {
  std::vector<double> pops;
  std::vector<cplx> labels;
  for (const auto& t : state.terms) {
    pops.push_back(std::norm(t.weight));
    labels.push_back(t.probe_amp);
  }
  return light_from_populations(pops, labels, photon_cutoff);
}

DensityMatrix reduce_to_light(const JointDensity& state, int photon_cutoff) {
  std::vector<double> pops;
  for (int m = 0; m <= state.n_max(); ++m) pops.push_back(state.coeff(m, m).real());
  return light_from_populations(pops, state.labels, photon_cutoff);
}

int light_cutoff_for(const JointDensity& state) {
  double largest = 0.0;
  for (int m = 0; m <= state.n_max(); ++m)
    if (std::abs(state.coeff(m, m)) > 0.0) largest = std::max(largest, std::abs(state.labels[m]));
  return std::max(default_cutoff(largest), 1);
}

JointDensity to_density(const JointPureState& state) {
  const int dim = static_cast<int>(state.terms.size());
  JointDensity out;
  out.coeff.resize(dim, dim);
  out.labels.resize(dim);
  for (int m = 0; m < dim; ++m) {
    out.labels[m] = state.terms[m].probe_amp;
    for (int n = 0; n < dim; ++n)
      out.coeff(m, n) = state.terms[m].weight * std::conj(state.terms[n].weight);
  }
  return out;
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw DomainError("trace_distance: dimension mismatch");
  const CMatrix diff = a.matrix() - b.matrix();
  const CMatrix herm = 0.5 * (diff + diff.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

}  // namespace becprobe
