#include "becprobe/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace becprobe {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = (n == 1) ? lo : lo + (hi - lo) * i / (n - 1);
  return out;
}

}  // namespace

GridSpec GridSpec::centered(double abs_alpha, int n) {
  const double r = abs_alpha + 3.0;
  return {-r, r, -r, r, n, n};
}

double HusimiGrid::integral() const {
  if (re_axis.size() < 2 || im_axis.size() < 2) return 0.0;
  const double dre = (re_axis.back() - re_axis.front()) / (re_axis.size() - 1);
  const double dim = (im_axis.back() - im_axis.front()) / (im_axis.size() - 1);
  return values.sum() * dre * dim;
}

HusimiGrid husimi(const DensityMatrix& rho, const GridSpec& grid) {
  if (grid.n_re < 2 || grid.n_im < 2) throw DomainError("husimi: grid needs at least 2 points per axis");
  if (1.0 - rho.trace() > 1e-10)
    throw CutoffError("husimi: density matrix is missing trace " + std::to_string(1.0 - rho.trace()));
  HusimiGrid out;
  out.re_axis = linspace(grid.re_min, grid.re_max, grid.n_re);
  out.im_axis = linspace(grid.im_min, grid.im_max, grid.n_im);
  out.values.resize(grid.n_im, grid.n_re);
  const CMatrix& r = rho.matrix();
  for (int i = 0; i < grid.n_im; ++i)
    for (int j = 0; j < grid.n_re; ++j) {
      const CVector v = coherent_amplitudes({out.re_axis[j], out.im_axis[i]}, rho.n_max());
      const double q = (v.adjoint() * r * v)(0, 0).real() / kPi;
      out.values(i, j) = std::max(q, 0.0);
    }
  return out;
}

int count_peaks(const HusimiGrid& grid, double rel_floor) {
  const Eigen::MatrixXd& v = grid.values;
  const double floor = rel_floor * v.maxCoeff();
  int peaks = 0;
  for (Eigen::Index i = 0; i < v.rows(); ++i)
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      const double q = v(i, j);
      if (q < floor) continue;
      bool is_max = true;
      for (int di = -1; di <= 1 && is_max; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const Eigen::Index a = i + di, b = j + dj;
          if (a < 0 || b < 0 || a >= v.rows() || b >= v.cols()) continue;
          // Ties go to the first point in scan order so plateaus count once.
          const bool earlier = di < 0 || (di == 0 && dj < 0);
          if (v(a, b) > q || (earlier && v(a, b) == q)) {
            is_max = false;
            break;
          }
        }
      if (is_max) ++peaks;
    }
  return peaks;
}

double PhaseDistribution::normalization() const {
  if (thetas.empty()) return 0.0;
  double s = 0.0;
  for (double p : probs) s += p;
  return s * 2.0 * kPi / static_cast<double>(thetas.size());
}

PhaseDistribution phase_distribution(const DensityMatrix& rho, int n_theta) {
  if (n_theta < 256) throw DomainError("phase_distribution: n_theta must be >= 256");
  const double tr = rho.trace();
  if (!(tr > 0.0)) throw DomainError("phase_distribution: density matrix has no trace");
  PhaseDistribution out;
  const int dim = rho.dim();
  out.coherences.assign(dim, cplx{});
  for (int d = 0; d < dim; ++d) {
    cplx s{};
    for (int m = 0; m + d < dim; ++m) s += rho(m + d, m);
    out.coherences[d] = s / tr;
  }
  const cplx s1 = dim > 1 ? out.coherences[1] : cplx{};
  out.window_center = std::abs(s1) > 1e-14 ? std::arg(s1) : 0.0;
  out.thetas.resize(n_theta);
  out.probs.resize(n_theta);
  const double step = 2.0 * kPi / n_theta;
  for (int j = 0; j < n_theta; ++j) {
    const double th = out.window_center - kPi + (j + 0.5) * step;
    double acc = 1.0;
    for (int d = 1; d < dim; ++d) acc += 2.0 * (out.coherences[d] * std::exp(-kI * (d * th))).real();
    out.thetas[j] = th;
    out.probs[j] = std::max(acc, 0.0) / (2.0 * kPi);
  }
  return out;
}

double phase_variance(const PhaseDistribution& dist) {
  double ex2 = kPi * kPi / 3.0;
  double ex = 0.0;
  for (std::size_t d = 1; d < dist.coherences.size(); ++d) {
    const double dd = static_cast<double>(d);
    const cplx s = dist.coherences[d] * std::exp(-kI * (dd * dist.window_center));
    const double sign = (d % 2 == 0) ? 1.0 : -1.0;
    ex2 += 4.0 * sign * s.real() / (dd * dd);
    ex += -2.0 * sign * s.imag() / dd;
  }
  return ex2 - ex * ex;
}

double phase_variance(const DensityMatrix& rho) { return phase_variance(phase_distribution(rho, 256)); }

double purity(const DensityMatrix& rho) { return rho.matrix().squaredNorm(); }

std::vector<double> number_moments(const DensityMatrix& rho, int r_max) {
  if (r_max < 1) throw DomainError("number_moments: r_max must be >= 1");
  std::vector<double> out(r_max, 0.0);
  for (int m = 1; m < rho.dim(); ++m) {
    const double p = rho(m, m).real();
    double mr = 1.0;
    for (int r = 0; r < r_max; ++r) {
      mr *= m;
      out[r] += mr * p;
    }
  }
  return out;
}

double mandel_q(const DensityMatrix& rho) {
  const auto mom = number_moments(rho, 2);
  if (!(mom[0] > 1e-300)) throw DomainError("mandel_q: <n> vanishes (vacuum input)");
  return (mom[1] - mom[0] * mom[0]) / mom[0] - 1.0;
}

std::pair<double, double> cat_overlap(const JointPureState& state, cplx alpha0) {
  return cat_overlap(reduce_to_atoms(state), alpha0);
}

std::pair<double, double> cat_overlap(const DensityMatrix& rho, cplx alpha0) {
  const int n = std::max(rho.n_max(), default_cutoff(std::abs(alpha0)));
  const CVector c = coherent_amplitudes(alpha0, n);
  CVector even = CVector::Zero(rho.dim());
  CVector odd = CVector::Zero(rho.dim());
  for (int m = 0; m < rho.dim(); ++m) (m % 2 == 0 ? even : odd)(m) = c(m);
  // Norms of the cat components from the full (untruncated) series.
  const double a2 = std::norm(alpha0);
  const double even_norm2 = 0.5 * (1.0 + std::exp(-2.0 * a2));
  const double odd_norm2 = -0.5 * std::expm1(-2.0 * a2);
  const CMatrix& r = rho.matrix();
  const double e = (even.adjoint() * r * even)(0, 0).real() / even_norm2;
  const double o = odd_norm2 > 0.0 ? (odd.adjoint() * r * odd)(0, 0).real() / odd_norm2 : 0.0;
  return {e, o};
}

double fidelity(const DensityMatrix& rho, const FockVector& psi) {
  const int dim = std::min<int>(rho.dim(), static_cast<int>(psi.amplitudes.size()));
  const CVector v = psi.amplitudes.head(dim);
  return (v.adjoint() * rho.matrix().topLeftCorner(dim, dim) * v)(0, 0).real();
}

}  // namespace becprobe
