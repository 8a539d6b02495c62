#pragma once

#include <vector>

#include "becprobe/types.hpp"

namespace becprobe {

// Largest probability mass a Fock truncation may discard.
inline constexpr double kTruncationEpsilon = 1e-12;

// Amplitudes C_m of a single-mode pure state on |0>..|n_max>.
struct FockVector {
  CVector amplitudes;

  [[nodiscard]] int n_max() const { return static_cast<int>(amplitudes.size()) - 1; }
  [[nodiscard]] double norm_squared() const { return amplitudes.squaredNorm(); }
};

// Dense single-mode density matrix on |0>..|n_max>, entries(m, n) = <m|rho|n>.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(CMatrix entries);

  static DensityMatrix from_pure(const FockVector& psi);

  [[nodiscard]] const CMatrix& matrix() const { return entries_; }
  [[nodiscard]] int n_max() const { return static_cast<int>(entries_.rows()) - 1; }
  [[nodiscard]] int dim() const { return static_cast<int>(entries_.rows()); }
  [[nodiscard]] cplx operator()(int m, int n) const { return entries_(m, n); }

  [[nodiscard]] double trace() const { return entries_.trace().real(); }
  [[nodiscard]] double hermiticity_error() const;
  [[nodiscard]] double min_eigenvalue() const;

 private:
  CMatrix entries_;
};

// One term C_m e^{Phi_m} |m> (x) |beta_m> of an entangled-coherent expansion.
struct CoherentTerm {
  cplx weight;
  cplx probe_amp;
};

// sum_m weight_m |m> (x) |probe_amp_m>, indexed by atom number m.
struct JointPureState {
  std::vector<CoherentTerm> terms;

  [[nodiscard]] int n_max() const { return static_cast<int>(terms.size()) - 1; }
  [[nodiscard]] double norm_squared() const;
};

// sum_{m,n} coeff(m, n) |m><n| (x) |labels_m><labels_n|.
//
// Every coherent label is normalised, so the joint trace is sum_m coeff(m, m).
struct JointDensity {
  CMatrix coeff;
  std::vector<cplx> labels;

  [[nodiscard]] int n_max() const { return static_cast<int>(labels.size()) - 1; }
  [[nodiscard]] cplx trace() const { return coeff.trace(); }
  [[nodiscard]] double hermiticity_error() const;
};

// ceil(|alpha|^2 + 10 |alpha| + 10).
int default_cutoff(double abs_alpha);

// Normalised coherent amplitudes e^{-|a|^2/2} a^m / sqrt(m!) for m <= n_max,
// evaluated in the log domain. No truncation check.
CVector coherent_amplitudes(cplx alpha, int n_max);

// Glauber coherent state truncated at n_max; throws CutoffError when the
// discarded Poisson tail exceeds kTruncationEpsilon.
FockVector coherent_fock_vector(cplx alpha, int n_max);

FockVector fock_vector(int n, int n_max);

// |n><n| embedded in [0, n_max].
DensityMatrix fock_state(int n, int n_max);

// Diagonal mixture P_m = C(N, m) / 2^N, embedded in [0, max(n_max, N)].
DensityMatrix binomial_mixture(int n_atoms, int n_max = 0);

// <b1|b2> for normalised coherent states.
cplx coherent_overlap(cplx b1, cplx b2);

DensityMatrix reduce_to_atoms(const JointPureState& state);
DensityMatrix reduce_to_atoms(const JointDensity& state);

// Light marginal in the photon Fock basis [0, photon_cutoff]. Throws
// CutoffError when the population-weighted photon tail exceeds kTruncationEpsilon.
DensityMatrix reduce_to_light(const JointPureState& state, int photon_cutoff);
DensityMatrix reduce_to_light(const JointDensity& state, int photon_cutoff);

// Smallest photon cutoff keeping the weighted tail of the given labels below
// kTruncationEpsilon.
int light_cutoff_for(const JointDensity& state);

JointDensity to_density(const JointPureState& state);

// 1/2 ||a - b||_1 for Hermitian a, b of equal dimension.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace becprobe
