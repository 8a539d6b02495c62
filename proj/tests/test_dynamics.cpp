#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "becprobe/dynamics.hpp"
#include "becprobe/oracle.hpp"
#include "support/testing.hpp"

using namespace becprobe;

namespace {

constexpr double kPi = std::numbers::pi;

// Photon cutoff holding every branch amplitude |beta| + 2 |g2/g1|.
int photon_cutoff(const ModelParams& p, cplx beta) {
  const double r = std::abs(beta) + (p.g1 == cplx{} ? 0.0 : 2.0 * std::abs(p.g2_tilde / p.g1));
  return default_cutoff(r);
}

}  // namespace

TEST_CASE("branch amplitudes") {
  ModelParams p = ModelParams::from_ratio(1.0, 1.0, 1.0, {0.4, 0.3});
  const cplx beta{1.0, 0.5};
  CHECK(beta_m(p, 3, 0.0, beta) == beta);
  CHECK(beta_m(p, 0, 17.0, beta) == beta);
  // Light revival time returns every branch.
  const double t_l = 2.0 * kPi * p.delta / std::norm(p.g1);
  for (int m = 0; m < 8; ++m) CHECK(std::abs(beta_m(p, m, t_l, beta) - beta) < 1e-13);
  CHECK_THROWS_AS(beta_m(p, -1, 1.0, beta), DomainError);

  ModelParams bad = p;
  bad.g1 = 0.0;
  CHECK_THROWS_AS(beta_m(bad, 1, 1.0, beta), DomainError);
  bad.g2_tilde = 0.0;
  CHECK(beta_m(bad, 4, 1.0, beta) == beta);

  ModelParams zero_delta = p;
  zero_delta.delta = 0.0;
  CHECK_THROWS_AS(zero_delta.validate(), DomainError);
}

TEST_CASE("phases") {
  std::mt19937_64 rng(21);
  const auto p = testing::random_params(rng);
  const cplx beta{0.8, -0.9};
  for (int m = 0; m < 6; ++m) CHECK(std::abs(phi_m(p, m, 0.0, beta)) < 1e-15);

  // Rotating frame strips exactly omega_A m t.
  const double t = 1.7;
  for (int m = 0; m < 6; ++m) {
    const cplx diff = phi_m(p, m, t, beta, Frame::rotating) - phi_m(p, m, t, beta, Frame::lab);
    CHECK(std::abs(diff - kI * p.omega_a() * static_cast<double>(m) * t) < 1e-12);
  }

  // kappa = 0 and no pump: a bare lab-frame rotation.
  ModelParams bare = ModelParams::from_ratio(0.0, 1.0, 0.0, 0.0, 0.37);
  bare.g1 = 0.6;
  for (int m = 0; m < 6; ++m) CHECK(std::abs(phi_m(bare, m, t, beta) + kI * 0.37 * double(m) * t) < 1e-14);
}

TEST_CASE("norm is conserved for random parameters") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = testing::random_params(rng);
    const auto c = testing::random_fock_vector(rng, 10);
    const cplx beta = testing::polar_random(rng, 0.0, 2.5);
    const double t = testing::uniform(rng, 0.0, 40.0);
    const auto state = evolve_pure(c, beta, p, t);
    CHECK(std::abs(state.norm_squared() - 1.0) < 1e-10);
  }
}

TEST_CASE("normal-ordered propagator agrees with the closed form") {
  std::mt19937_64 rng(23);
  double worst = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = testing::random_params(rng);
    const cplx beta = testing::polar_random(rng, 0.0, 2.5);
    const double t = testing::uniform(rng, 0.0, 30.0);
    for (int m = 0; m < 12; ++m) {
      const double md = m;
      const auto coeffs = dho_coefficients(p.xi() * md, p.drive() * md, t);
      const auto prop = apply_dho_propagator(coeffs, beta);
      const cplx phase = std::exp(-kI * (p.omega_a() * md + p.kappa * md * (md - 1.0)) * t);
      const cplx closed = std::exp(phi_m(p, m, t, beta));
      worst = std::max(worst, std::abs(prop.prefactor * phase - closed));
      worst = std::max(worst, std::abs(prop.amplitude - beta_m(p, m, t, beta)));
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("propagator coefficients are regular at xi = 0") {
  const cplx f{0.3, -0.2};
  const double t = 2.5;
  const auto c0 = dho_coefficients(0.0, f, t);
  CHECK(c0.d == cplx{});
  CHECK(std::abs(c0.b - (-kI * f * t)) < 1e-15);
  CHECK(std::abs(c0.c - (-kI * std::conj(f) * t)) < 1e-15);
  CHECK(std::abs(c0.a - (-std::norm(f) * t * t / 2.0)) < 1e-15);
  const auto c1 = dho_coefficients(1e-9, f, t);
  CHECK(std::abs(c1.a - c0.a) < 1e-8);
  CHECK(std::abs(c1.b - c0.b) < 1e-8);
}

TEST_CASE("analytic state matches brute-force propagation") {
  std::mt19937_64 rng(24);
  double worst = 0.0;
  for (int trial = 0; trial < 25; ++trial) {
    const auto p = testing::random_params(rng);
    const int na = 6;
    const auto c = testing::random_fock_vector(rng, na);
    const cplx beta = testing::polar_random(rng, 0.0, 1.8);
    const double t = testing::uniform(rng, 0.0, 12.0);
    const oracle::TruncatedSpace space{na, photon_cutoff(p, beta)};

    JointPureState initial;
    for (int m = 0; m <= na; ++m) initial.terms.push_back({c.amplitudes(m), beta});
    const CVector psi0 = oracle::joint_vector(initial, space);
    const CVector numeric = oracle::propagate_numeric(psi0, oracle::build_hamiltonian(p, space), space, t);
    const CVector analytic = oracle::joint_vector(evolve_pure(c, beta, p, t), space);
    // Full vector difference, so global and relative phases are both checked.
    worst = std::max(worst, (numeric - analytic).norm());
    const double fid = std::norm(analytic.dot(numeric));
    CHECK(fid >= 1.0 - 1e-8);
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("density evolution matches pure evolution") {
  std::mt19937_64 rng(25);
  const auto p = testing::random_params(rng);
  const auto c = testing::random_fock_vector(rng, 8);
  const cplx beta{0.5, 1.0};
  const double t = 3.3;
  const auto pure = to_density(evolve_pure(c, beta, p, t));
  const auto mixed = evolve_density(DensityMatrix::from_pure(c), beta, p, t);
  CHECK((pure.coeff - mixed.coeff).cwiseAbs().maxCoeff() < 1e-13);
  for (int m = 0; m <= 8; ++m) CHECK(pure.labels[m] == mixed.labels[m]);
  CHECK(std::abs(mixed.trace() - 1.0) < 1e-10);
  CHECK(mixed.hermiticity_error() < 1e-13);

  CHECK_THROWS_AS(evolve_density(DensityMatrix(CMatrix::Identity(3, 3)), beta, p, t), DomainError);
}

TEST_CASE("coherent BEC with kappa = 0 returns at the light revival time") {
  ModelParams p;
  p.kappa = 0.0;
  p.g1 = 1.0;
  const cplx alpha = std::sqrt(3.0), beta = std::sqrt(3.0);
  const auto c = coherent_fock_vector(alpha, default_cutoff(std::sqrt(3.0)));
  const double t_l = 2.0 * kPi;
  const auto rho = reduce_to_atoms(evolve_pure(c, beta, p, t_l, Frame::rotating));
  CHECK((rho.matrix() - c.amplitudes * c.amplitudes.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
}
