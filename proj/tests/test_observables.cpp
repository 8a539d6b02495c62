#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "becprobe/dynamics.hpp"
#include "becprobe/observables.hpp"
#include "becprobe/revival.hpp"
#include "support/testing.hpp"

using namespace becprobe;

namespace {

constexpr double kPi = std::numbers::pi;

FockVector coherent(double abs2, double phase = 0.0) {
  const cplx a = std::polar(std::sqrt(abs2), phase);
  return coherent_fock_vector(a, default_cutoff(std::abs(a)));
}

// Variance of the canonical phase of a pure state by dense Simpson quadrature of
// |sum_n c_n e^{-i n theta}|^2 / 2pi over a window centred on `center`.
double quadrature_phase_variance(const FockVector& psi, double center) {
  auto density = [&](double th) {
    cplx s{};
    for (int n = 0; n <= psi.n_max(); ++n) s += psi.amplitudes(n) * std::exp(cplx(0, -n * th));
    return std::norm(s) / (2 * kPi);
  };
  const int panels = 20000;
  const double norm = testing::simpson(density, center - kPi, center + kPi, panels);
  const double mean =
      testing::simpson([&](double th) { return (th - center) * density(th); }, center - kPi, center + kPi, panels) / norm;
  return testing::simpson([&](double th) { return std::pow(th - center - mean, 2) * density(th); }, center - kPi,
                          center + kPi, panels) /
         norm;
}

}  // namespace

TEST_CASE("Husimi function of simple states") {
  const auto vac = fock_state(0, 4);
  const auto grid = husimi(vac, GridSpec::centered(0.0, 61));
  CHECK(grid.values.maxCoeff() == doctest::Approx(1 / kPi).epsilon(1e-12));
  CHECK(grid.values(30, 30) == doctest::Approx(1 / kPi).epsilon(1e-12));
  const double a = grid.re_axis[40], b = grid.im_axis[12];
  CHECK(grid.values(12, 40) == doctest::Approx(std::exp(-(a * a + b * b)) / kPi).epsilon(1e-12));
  CHECK(count_peaks(grid) == 1);

  const cplx alpha0{1.2, -0.6};
  const auto coh = DensityMatrix::from_pure(coherent_fock_vector(alpha0, 40));
  GridSpec spec{-3, 3, -3, 3, 121, 121};
  const auto g = husimi(coh, spec);
  Eigen::Index i, j;
  g.values.maxCoeff(&i, &j);
  CHECK(g.re_axis[j] == doctest::Approx(1.2));
  CHECK(g.im_axis[i] == doctest::Approx(-0.6));
  CHECK(g.values(i, j) == doctest::Approx(1 / kPi).epsilon(1e-10));

  // Normalisation once the grid covers |alpha| + 5.
  const auto wide = husimi(coh, GridSpec{-7, 7, -7, 7, 281, 281});
  CHECK(std::abs(wide.integral() - 1.0) < 1e-3);

  CHECK_THROWS_AS(husimi(DensityMatrix(0.5 * CMatrix::Identity(1, 1)), spec), CutoffError);
}

TEST_CASE("Husimi values stay within [0, 1/pi] for random states") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const auto rho = testing::random_density(rng, 8);
    const auto g = husimi(rho, GridSpec::centered(2.0, 41));
    CHECK(g.values.minCoeff() >= 0.0);
    CHECK(g.values.maxCoeff() <= 1 / kPi + 1e-12);
  }
}

TEST_CASE("phase distribution of simple states") {
  const auto fock = fock_state(3, 8);
  const auto d = phase_distribution(fock, 256);
  for (double p : d.probs) CHECK(p == doctest::Approx(1 / (2 * kPi)));
  CHECK(phase_variance(d) == doctest::Approx(kPi * kPi / 3).epsilon(1e-14));
  CHECK(std::abs(d.normalization() - 1.0) < 1e-9);
  CHECK(phase_variance(binomial_mixture(6)) == doctest::Approx(kPi * kPi / 3).epsilon(1e-14));
  CHECK_THROWS_AS(phase_distribution(fock, 100), DomainError);
}

TEST_CASE("coherent phase variance against direct quadrature") {
  const auto psi = coherent(3.0, 0.9);
  const auto dist = phase_distribution(DensityMatrix::from_pure(psi), 512);
  CHECK(dist.window_center == doctest::Approx(0.9));
  CHECK(std::abs(dist.normalization() - 1.0) < 1e-9);
  const double v = phase_variance(dist);
  CHECK(v == doctest::Approx(quadrature_phase_variance(psi, 0.9)).epsilon(1e-8));
  CHECK(v == doctest::Approx(0.12695).epsilon(1e-4));
  // Large-amplitude limit 1 / (4 |alpha|^2).
  CHECK(phase_variance(DensityMatrix::from_pure(coherent(30.0))) == doctest::Approx(1.0 / 120).epsilon(0.02));
}

TEST_CASE("phase variance is invariant under rotation") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rho = testing::random_density(rng, 10);
    const double phi = testing::uniform(rng, -kPi, kPi);
    CMatrix rotated = rho.matrix();
    for (int m = 0; m < rho.dim(); ++m)
      for (int n = 0; n < rho.dim(); ++n) rotated(m, n) *= std::exp(cplx(0, -(m - n) * phi));
    CHECK(std::abs(phase_variance(rho) - phase_variance(DensityMatrix(rotated))) < 1e-9);
  }
}

TEST_CASE("collision-only revivals sit at multiples of pi / kappa") {
  ModelParams p;
  p.kappa = 1.0;
  const auto c = coherent(3.0);
  const cplx beta = std::sqrt(3.0);
  std::vector<SeriesPoint> series;
  const double v0 = phase_variance(reduce_to_atoms(evolve_pure(c, beta, p, 0.0)));
  for (int i = 0; i <= 400; ++i) {
    const double t = i * 0.01 * kPi;
    series.push_back({t, phase_variance(reduce_to_atoms(evolve_pure(c, beta, p, t)))});
  }
  const auto rev = detect_revivals(series, 1.1 * v0);
  REQUIRE(rev.size() == 5);
  for (std::size_t k = 0; k < rev.size(); ++k) CHECK(rev[k] == doctest::Approx(k * kPi));
}

TEST_CASE("purity and number statistics") {
  CHECK(purity(fock_state(2, 5)) == doctest::Approx(1.0));
  CHECK(purity(DensityMatrix(CMatrix::Identity(4, 4) / 4.0)) == doctest::Approx(0.25));

  const auto m_fock = number_moments(fock_state(3, 6), 2);
  CHECK(m_fock[0] == 3.0);
  CHECK(m_fock[1] == 9.0);
  const auto coh = DensityMatrix::from_pure(coherent(3.0));
  CHECK(number_moments(coh, 2)[1] == doctest::Approx(12.0).epsilon(1e-11));
  CHECK(number_moments(binomial_mixture(6), 2)[1] == doctest::Approx(10.5).epsilon(1e-14));

  CHECK(mandel_q(fock_state(3, 6)) == doctest::Approx(-1.0));
  CHECK(std::abs(mandel_q(coh)) < 1e-10);
  CHECK(mandel_q(binomial_mixture(6)) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(mandel_q(fock_state(0, 3)), DomainError);
  CHECK_THROWS_AS(number_moments(coh, 0), DomainError);
}

TEST_CASE("Mandel Q ignores the attached light state") {
  std::mt19937_64 rng(33);
  const auto c = testing::random_fock_vector(rng, 7);
  const double q0 = mandel_q(DensityMatrix::from_pure(c));
  for (int trial = 0; trial < 5; ++trial) {
    JointPureState s;
    for (int m = 0; m <= 7; ++m) s.terms.push_back({c.amplitudes(m), testing::polar_random(rng, 0, 3)});
    CHECK(mandel_q(reduce_to_atoms(s)) == doctest::Approx(q0).epsilon(1e-12));
  }
}

TEST_CASE("cat overlaps") {
  const cplx a0 = 2.5;
  const auto big = DensityMatrix::from_pure(coherent_fock_vector(a0, 80));
  const auto [e, o] = cat_overlap(big, a0);
  // Analytic: |<alpha_+|alpha>|^2 = (1 + e^{-2|a|^2}) / 2.
  CHECK(e == doctest::Approx(0.5 * (1 + std::exp(-2 * 6.25))).epsilon(1e-12));
  CHECK(o == doctest::Approx(0.5 * (1 - std::exp(-2 * 6.25))).epsilon(1e-12));
  CHECK(cat_overlap(fock_state(0, 5), a0).second == 0.0);

  // Kerr evolution to half the collision revival: a cat on the imaginary axis.
  ModelParams p;
  p.kappa = 1.0;
  const auto psi = coherent(3.0);
  const auto state = evolve_pure(psi, 0.0, p, kPi / 2);
  const auto [ce, co] = cat_overlap(state, cplx(0, std::sqrt(3.0)));
  CHECK(ce + co >= 0.99);
  CHECK(fidelity(DensityMatrix::from_pure(psi), psi) == doctest::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("half light revival splits the atomic Husimi function") {
  ModelParams p;
  p.g1 = 1.0;
  const auto psi = coherent(3.0);
  const auto rho = reduce_to_atoms(evolve_pure(psi, std::sqrt(3.0), p, kPi, Frame::rotating));
  const auto g = husimi(rho, GridSpec::centered(std::sqrt(3.0)));
  CHECK(count_peaks(g) == 2);
  CHECK(std::abs(g.integral() - 1.0) < 1e-2);
}
