#pragma once

#include <utility>
#include <vector>

#include "becprobe/fock.hpp"

namespace becprobe {

// Uniform rectangular grid of complex amplitudes re + i im.
struct GridSpec {
  double re_min = -1.0;
  double re_max = 1.0;
  double im_min = -1.0;
  double im_max = 1.0;
  int n_re = 201;
  int n_im = 201;

  // 201 x 201 points over [-(|alpha| + 3), |alpha| + 3]^2.
  static GridSpec centered(double abs_alpha, int n = 201);
};

// values(i, j) = Q(re_axis[j] + i im_axis[i]); rows follow the imaginary axis.
struct HusimiGrid {
  std::vector<double> re_axis;
  std::vector<double> im_axis;
  Eigen::MatrixXd values;

  // sum Q dre dim.
  [[nodiscard]] double integral() const;
};

// Q(alpha) = <alpha|rho|alpha> / pi. Throws CutoffError when rho is missing
// more than 1e-10 of its trace.
HusimiGrid husimi(const DensityMatrix& rho, const GridSpec& grid);

// Strict local maxima (8-neighbourhood) whose value is at least rel_floor * max.
int count_peaks(const HusimiGrid& grid, double rel_floor = 0.2);

// Canonical phase distribution sampled on a 2 pi window centred at the circular mean.
struct PhaseDistribution {
  std::vector<double> thetas;
  std::vector<double> probs;
  double window_center = 0.0;
  // coherences[d] = sum_m rho(m + d, m) / tr rho.
  std::vector<cplx> coherences;

  [[nodiscard]] double normalization() const;
};

PhaseDistribution phase_distribution(const DensityMatrix& rho, int n_theta = 512);

// Variance of theta - window_center over the window, integrated exactly from the coherences.
double phase_variance(const PhaseDistribution& dist);
double phase_variance(const DensityMatrix& rho);

double purity(const DensityMatrix& rho);

// <n^r> for r = 1..r_max, element r - 1.
std::vector<double> number_moments(const DensityMatrix& rho, int r_max);

// (<n^2> - <n>^2) / <n> - 1; DomainError when <n> vanishes.
double mandel_q(const DensityMatrix& rho);

// Squared overlaps of the atomic marginal with the even and odd cats built on alpha0.
std::pair<double, double> cat_overlap(const JointPureState& state, cplx alpha0);
std::pair<double, double> cat_overlap(const DensityMatrix& rho, cplx alpha0);

// <psi|rho|psi>.
double fidelity(const DensityMatrix& rho, const FockVector& psi);

}  // namespace becprobe
