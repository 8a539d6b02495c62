#pragma once

#include "becprobe/dynamics.hpp"
#include "becprobe/fock.hpp"

namespace becprobe::oracle {

// Atom (outer) x photon (inner) Fock product space, index m * (n_photons_max + 1) + k.
struct TruncatedSpace {
  int n_atoms_max = 0;
  int n_photons_max = 0;

  [[nodiscard]] int photon_dim() const { return n_photons_max + 1; }
  [[nodiscard]] int dim() const { return (n_atoms_max + 1) * (n_photons_max + 1); }
  [[nodiscard]] int index(int m, int k) const { return m * photon_dim() + k; }

  // dim <= 4096.
  void validate() const;
};

CMatrix build_hamiltonian(const ModelParams& params, const TruncatedSpace& space);

// e^{-iHt} psi0 by Hermitian eigendecomposition, one atom-number block at a time
// when H is block diagonal.
CVector propagate_numeric(const CVector& psi0, const CMatrix& h, const TruncatedSpace& space,
                          double t);

// Dense joint vectors/matrices of the analytic states.
CVector joint_vector(const JointPureState& state, const TruncatedSpace& space);
CMatrix joint_matrix(const JointDensity& state, const TruncatedSpace& space);

DensityMatrix atom_marginal(const CMatrix& joint, const TruncatedSpace& space);

// Fixed-step RK4 for d rho/dt = -i[H, rho] + gamma (a rho a^dag - {a^dag a, rho} / 2).
// H must be block diagonal in atom number; dt above 0.01 / scale throws DomainError.
CMatrix lindblad_integrate(const CMatrix& rho0, const CMatrix& h, const TruncatedSpace& space,
                           double gamma, double t, double dt);

// Largest admissible lindblad_integrate step for this H and gamma.
double lindblad_max_step(const CMatrix& h, const TruncatedSpace& space, double gamma);

// Nested-integral counting operation N_t(k) rho for k <= 2 by composite trapezoid.
// diagonal_only keeps only the atom-number diagonal blocks (enough for traces).
CMatrix counting_operation_numeric(const CMatrix& rho0, const CMatrix& h,
                                   const TruncatedSpace& space, double gamma, int k, double t,
                                   int n_steps, bool diagonal_only = false);

// Richardson combination (4 T_{2n} - T_n) / 3 of the trapezoid results.
CMatrix counting_operation_extrapolated(const CMatrix& rho0, const CMatrix& h,
                                        const TruncatedSpace& space, double gamma, int k, double t,
                                        int n_steps, bool diagonal_only = false);

}  // namespace becprobe::oracle
