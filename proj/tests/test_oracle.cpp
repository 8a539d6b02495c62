#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "becprobe/observables.hpp"
#include "becprobe/oracle.hpp"
#include "becprobe/photodetection.hpp"
#include "support/testing.hpp"

using namespace becprobe;
using namespace becprobe::oracle;

namespace {

constexpr double kPi = std::numbers::pi;

CMatrix product_density(const DensityMatrix& atoms, cplx beta, const TruncatedSpace& space) {
  JointDensity j;
  j.coeff = CMatrix::Zero(space.n_atoms_max + 1, space.n_atoms_max + 1);
  j.coeff.topLeftCorner(atoms.dim(), atoms.dim()) = atoms.matrix();
  j.labels.assign(space.n_atoms_max + 1, beta);
  return joint_matrix(j, space);
}

// Coherent atomic amplitudes truncated at n_max and renormalised.
DensityMatrix truncated_coherent(double abs2, int n_max) {
  CVector v = coherent_amplitudes(std::sqrt(abs2), n_max);
  v /= v.norm();
  return DensityMatrix(v * v.adjoint());
}

}  // namespace

TEST_CASE("Hamiltonian structure") {
  std::mt19937_64 rng(51);
  const auto p = testing::random_params(rng);
  const TruncatedSpace space{5, 12};
  const CMatrix h = build_hamiltonian(p, space);
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  CMatrix n_op = CMatrix::Zero(space.dim(), space.dim());
  for (int m = 0; m <= 5; ++m)
    for (int k = 0; k <= 12; ++k) n_op(space.index(m, k), space.index(m, k)) = m;
  CHECK((h * n_op - n_op * h).cwiseAbs().maxCoeff() < 1e-12);

  ModelParams bare;
  bare.omega0 = 0.7;
  const CMatrix hb = build_hamiltonian(bare, space);
  for (int m = 0; m <= 5; ++m)
    for (int k = 0; k <= 12; ++k) CHECK(hb(space.index(m, k), space.index(m, k)) == cplx(0.7 * m));
  CHECK(hb.cwiseAbs().sum() == doctest::Approx(0.7 * 13 * 15));

  CHECK_THROWS_AS((TruncatedSpace{63, 64}.validate()), DomainError);
}

TEST_CASE("numeric propagation") {
  std::mt19937_64 rng(52);
  const TruncatedSpace space{3, 10};
  const auto p = testing::random_params(rng);
  const CMatrix h = build_hamiltonian(p, space);
  CVector psi = CVector::Zero(space.dim());
  for (int i = 0; i < space.dim(); ++i) psi(i) = testing::polar_random(rng, 0, 1);
  psi /= psi.norm();
  CHECK((propagate_numeric(psi, h, space, 0.0) - psi).norm() < 1e-13);
  CHECK(std::abs(propagate_numeric(psi, h, space, 7.5).norm() - 1.0) < 1e-10);

  // Leakage between atom-number sectors.
  CVector sector = CVector::Zero(space.dim());
  sector.segment(2 * space.photon_dim(), space.photon_dim()).setConstant(1.0 / std::sqrt(11.0));
  const CVector out = propagate_numeric(sector, h, space, 3.0);
  CHECK(out.head(2 * space.photon_dim()).norm() + out.tail(space.photon_dim()).norm() < 1e-14);

  CMatrix diag = CMatrix::Zero(space.dim(), space.dim());
  for (int i = 0; i < space.dim(); ++i) diag(i, i) = 0.1 * i;
  const CVector dout = propagate_numeric(psi, diag, space, 2.0);
  for (int i = 0; i < space.dim(); ++i) CHECK(std::abs(dout(i) - psi(i) * std::exp(cplx(0, -0.2 * i))) < 1e-13);

  CMatrix bad = h;
  bad(0, 1) += 1.0;
  CHECK_THROWS_AS(propagate_numeric(psi, bad, space, 1.0), DomainError);

  // A non-block-diagonal Hermitian H still propagates.
  CMatrix mixing = h;
  mixing(0, space.photon_dim()) += 0.3;
  mixing(space.photon_dim(), 0) += 0.3;
  CHECK(std::abs(propagate_numeric(psi, mixing, space, 2.0).norm() - 1.0) < 1e-10);
}

TEST_CASE("Lindblad integration limits") {
  std::mt19937_64 rng(53);
  const TruncatedSpace space{3, 16};
  const auto p = testing::random_params(rng);
  const CMatrix h = build_hamiltonian(p, space);
  const auto c = testing::random_fock_vector(rng, 3);
  JointPureState init;
  for (int m = 0; m <= 3; ++m) init.terms.push_back({c.amplitudes(m), cplx(0.6, 0.2)});
  const CVector psi0 = joint_vector(init, space);
  const CMatrix rho0 = psi0 * psi0.adjoint();
  const double t = 2.0;

  const double dt0 = lindblad_max_step(h, space, 0.0);
  const CVector psi_t = propagate_numeric(psi0, h, space, t);
  const CMatrix closed = lindblad_integrate(rho0, h, space, 0.0, t, dt0);
  CHECK((closed - psi_t * psi_t.adjoint()).cwiseAbs().maxCoeff() < 1e-7);
  CHECK(std::abs(closed.trace().real() - rho0.trace().real()) < 1e-8);

  CHECK_THROWS_AS(lindblad_integrate(rho0, h, space, 0.0, t, 10 * dt0), DomainError);

  // Pure damping of a coherent probe.
  const TruncatedSpace light{0, 30};
  const CMatrix zero = CMatrix::Zero(light.dim(), light.dim());
  const cplx beta{1.5, -0.5};
  const CVector b = coherent_amplitudes(beta, 30);
  const double gamma = 0.4;
  const CMatrix damped = lindblad_integrate(b * b.adjoint(), zero, light, gamma, 3.0, lindblad_max_step(zero, light, gamma));
  const CVector expect = coherent_amplitudes(beta * std::exp(-gamma * 1.5), 30);
  CHECK((damped - expect * expect.adjoint()).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(std::abs(damped.trace().real() - 1.0) < 1e-8);
}

TEST_CASE("count-averaged state matches the master equation (random small instances)") {
  std::mt19937_64 rng(54);
  for (int trial = 0; trial < 3; ++trial) {
    DetectionParams det;
    det.model = testing::random_params(rng);
    det.model.g1 = testing::polar_random(rng, 0.6, 1.2);
    det.model.g2_tilde = testing::polar_random(rng, 0.0, 0.3);
    det.gamma = testing::uniform(rng, 0.05, 0.5);
    det.beta = testing::polar_random(rng, 0.0, 1.0);
    const auto rho = testing::random_density(rng, 3);
    const double r = std::abs(det.beta) + 2 * std::abs(det.model.g2_tilde / det.model.g1) + 1.0;
    const TruncatedSpace space{3, default_cutoff(r)};
    const CMatrix h = build_hamiltonian(det.model, space);
    const double t = testing::uniform(rng, 0.5, 3.0);
    const CMatrix numeric = lindblad_integrate(product_density(rho, det.beta, space), h, space, det.gamma, t,
                                               lindblad_max_step(h, space, det.gamma));
    const auto unc = unconditioned_state(rho, det, t);
    CHECK(trace_distance(atom_marginal(numeric, space), reduce_to_atoms(unc)) < 1e-6);
    CHECK((numeric - joint_matrix(unc, space)).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("counting operation against closed-form probabilities") {
  DetectionParams det;
  det.model = ModelParams::from_ratio(1.0, 1.0, 1.0, {0.2, 0.1});
  det.gamma = 0.3;
  det.beta = {0.8, 0.3};
  const TruncatedSpace space{4, 24};
  const CMatrix h = build_hamiltonian(det.model, space);
  const double t = 2.5;

  const auto fock = fock_state(3, 4);
  const CMatrix rho_f = product_density(fock, det.beta, space);
  const double f = f_mn(det, 3, 3, t).real();
  const CMatrix n1 = counting_operation_extrapolated(rho_f, h, space, det.gamma, 1, t, 200, true);
  CHECK(std::abs(n1.trace().real() - f * std::exp(-f)) < 1e-5);

  std::mt19937_64 rng(55);
  const auto rho = testing::random_density(rng, 4);
  const CMatrix rho0 = product_density(rho, det.beta, space);
  double total = 0.0;
  for (int k = 0; k <= 2; ++k) {
    const double tr = counting_operation_extrapolated(rho0, h, space, det.gamma, k, t, 200, true).trace().real();
    CHECK(std::abs(tr - count_probability(rho, det, k, t)) < 1e-5);
    total += tr;
  }
  CHECK(total <= 1.0 + 1e-9);

  // The no-count branch matches the analytic k = 0 state (times P(0, t)).
  const CMatrix n0 = counting_operation_numeric(rho0, h, space, det.gamma, 0, t, 200);
  const auto c0 = conditioned_state(rho, det, 0, t);
  CHECK((n0 - count_probability(rho, det, 0, t) * joint_matrix(c0, space)).cwiseAbs().maxCoeff() < 1e-8);

  CHECK_THROWS_AS(counting_operation_numeric(rho0, h, space, det.gamma, 3, t, 200), DomainError);
  CHECK_THROWS_AS(counting_operation_numeric(rho0, h, space, det.gamma, 1, t, 100), DomainError);

  // Closed system: no counts.
  const CMatrix u0 = counting_operation_numeric(rho0, h, space, 0.0, 0, t, 200);
  CHECK(std::abs(u0.trace().real() - rho0.trace().real()) < 1e-12);
  CHECK(counting_operation_numeric(rho0, h, space, 0.0, 1, t, 200).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("count-averaged state for the detection-figure parameters") {
  DetectionParams det;
  det.model = ModelParams::from_ratio(1.0, 1.0, 1.0);
  det.gamma = 2e-2;
  det.beta = std::sqrt(3.0);
  const TruncatedSpace space{8, 48};
  const auto rho = truncated_coherent(3.0, 8);
  const CMatrix h = build_hamiltonian(det.model, space);
  const double t = 2 * kPi;
  const CMatrix numeric =
      lindblad_integrate(product_density(rho, det.beta, space), h, space, det.gamma, t, lindblad_max_step(h, space, det.gamma));
  CHECK(trace_distance(atom_marginal(numeric, space), reduce_to_atoms(unconditioned_state(rho, det, t))) < 1e-6);
  CHECK(std::abs(numeric.trace().real() - 1.0) < 1e-8);
}
