#include "becprobe/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

namespace becprobe::oracle {

namespace {

void check_hermitian(const CMatrix& h, const char* who) {
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw DomainError(std::string(who) + ": Hamiltonian is not Hermitian");
}

void check_dims(const CMatrix& m, const TruncatedSpace& space, const char* who) {
  if (m.rows() != space.dim() || m.cols() != space.dim())
    throw DomainError(std::string(who) + ": matrix does not match the truncated space");
}

bool block_diagonal(const CMatrix& h, const TruncatedSpace& space) {
  const int p = space.photon_dim();
  for (int m = 0; m <= space.n_atoms_max; ++m)
    for (int n = 0; n <= space.n_atoms_max; ++n)
      if (m != n && h.block(m * p, n * p, p, p).cwiseAbs().maxCoeff() != 0.0) return false;
  return true;
}

CMatrix atom_block(const CMatrix& h, const TruncatedSpace& space, int m) {
  const int p = space.photon_dim();
  return h.block(m * p, m * p, p, p);
}

// Upper-triangle atom blocks rho^{mn}, m <= n, stored row by row.
struct Blocks {
  int n_atoms;
  std::vector<CMatrix> data;

  [[nodiscard]] int slot(int m, int n) const { return m * (n_atoms + 1) - m * (m - 1) / 2 + (n - m); }
};

Blocks split(const CMatrix& rho, const TruncatedSpace& space) {
  const int p = space.photon_dim();
  Blocks b{space.n_atoms_max, {}};
  for (int m = 0; m <= space.n_atoms_max; ++m)
    for (int n = m; n <= space.n_atoms_max; ++n) b.data.push_back(rho.block(m * p, n * p, p, p));
  return b;
}

CMatrix join(const Blocks& b, const TruncatedSpace& space) {
  const int p = space.photon_dim();
  CMatrix out = CMatrix::Zero(space.dim(), space.dim());
  for (int m = 0; m <= space.n_atoms_max; ++m)
    for (int n = m; n <= space.n_atoms_max; ++n) {
      const CMatrix& blk = b.data[b.slot(m, n)];
      out.block(m * p, n * p, p, p) = blk;
      if (n != m) out.block(n * p, m * p, p, p) = blk.adjoint();
    }
  return out;
}

// gamma a X a^dag within one block.
CMatrix jump(const CMatrix& x, double gamma) {
  const Eigen::Index p = x.rows();
  CMatrix out = CMatrix::Zero(p, p);
  for (Eigen::Index i = 0; i + 1 < p; ++i)
    for (Eigen::Index j = 0; j + 1 < p; ++j)
      out(i, j) = gamma * std::sqrt(static_cast<double>((i + 1) * (j + 1))) * x(i + 1, j + 1);
  return out;
}

}  // namespace

void TruncatedSpace::validate() const {
  if (n_atoms_max < 0 || n_photons_max < 0) throw DomainError("TruncatedSpace: negative cutoff");
  if (dim() > 4096) throw DomainError("TruncatedSpace: dim " + std::to_string(dim()) + " exceeds 4096");
}

CMatrix build_hamiltonian(const ModelParams& params, const TruncatedSpace& space) {
  params.validate();
  space.validate();
  const cplx f = params.drive();
  CMatrix h = CMatrix::Zero(space.dim(), space.dim());
  for (int m = 0; m <= space.n_atoms_max; ++m) {
    const double md = m;
    for (int k = 0; k <= space.n_photons_max; ++k) {
      const int i = space.index(m, k);
      h(i, i) = params.omega_a() * md + params.kappa * md * (md - 1.0) + params.xi() * md * k;
      if (k > 0) {
        const double sq = std::sqrt(static_cast<double>(k));
        h(space.index(m, k - 1), i) = md * f * sq;
        h(i, space.index(m, k - 1)) = md * std::conj(f) * sq;
      }
    }
  }
  return h;
}

CVector propagate_numeric(const CVector& psi0, const CMatrix& h, const TruncatedSpace& space,
                          double t) {
  check_dims(h, space, "propagate_numeric");
  check_hermitian(h, "propagate_numeric");
  if (psi0.size() != space.dim()) throw DomainError("propagate_numeric: state does not match the space");
  auto evolve = [t](const CMatrix& blk, const CVector& v) -> CVector {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(blk);
    const CVector phases = (-kI * t * es.eigenvalues().cast<cplx>()).array().exp();
    return es.eigenvectors() * (phases.asDiagonal() * (es.eigenvectors().adjoint() * v));
  };
  if (!block_diagonal(h, space)) return evolve(h, psi0);
  const int p = space.photon_dim();
  CVector out(space.dim());
  for (int m = 0; m <= space.n_atoms_max; ++m)
    out.segment(m * p, p) = evolve(atom_block(h, space, m), psi0.segment(m * p, p));
  return out;
}

CVector joint_vector(const JointPureState& state, const TruncatedSpace& space) {
  if (state.n_max() > space.n_atoms_max) throw DomainError("joint_vector: atom cutoff too small");
  const int p = space.photon_dim();
  CVector out = CVector::Zero(space.dim());
  for (int m = 0; m <= state.n_max(); ++m)
    out.segment(m * p, p) = state.terms[m].weight * coherent_amplitudes(state.terms[m].probe_amp, space.n_photons_max);
  return out;
}

CMatrix joint_matrix(const JointDensity& state, const TruncatedSpace& space) {
  if (state.n_max() > space.n_atoms_max) throw DomainError("joint_matrix: atom cutoff too small");
  const int p = space.photon_dim();
  std::vector<CVector> labels;
  for (const cplx b : state.labels) labels.push_back(coherent_amplitudes(b, space.n_photons_max));
  CMatrix out = CMatrix::Zero(space.dim(), space.dim());
  for (int m = 0; m <= state.n_max(); ++m)
    for (int n = 0; n <= state.n_max(); ++n)
      if (state.coeff(m, n) != cplx{})
        out.block(m * p, n * p, p, p) = state.coeff(m, n) * labels[m] * labels[n].adjoint();
  return out;
}

DensityMatrix atom_marginal(const CMatrix& joint, const TruncatedSpace& space) {
  check_dims(joint, space, "atom_marginal");
  const int p = space.photon_dim();
  CMatrix out(space.n_atoms_max + 1, space.n_atoms_max + 1);
  for (int m = 0; m <= space.n_atoms_max; ++m)
    for (int n = 0; n <= space.n_atoms_max; ++n) out(m, n) = joint.block(m * p, n * p, p, p).trace();
  return DensityMatrix(out);
}

double lindblad_max_step(const CMatrix& h, const TruncatedSpace& space, double gamma) {
  // Generator scale in the interaction frame of diag(H): coupling row sums,
  // the neighbouring-level rotation carried by the jump term, and the decay.
  double scale = 0.5 * gamma * space.n_photons_max;
  const int p = space.photon_dim();
  for (int m = 0; m <= space.n_atoms_max; ++m) {
    const CMatrix blk = atom_block(h, space, m);
    CMatrix off = blk;
    off.diagonal().setZero();
    double rows = 0.0, rot = 0.0;
    for (int i = 0; i < p; ++i) rows = std::max(rows, off.row(i).cwiseAbs().sum());
    for (int i = 0; i + 1 < p; ++i) rot = std::max(rot, std::abs(blk(i, i) - blk(i + 1, i + 1)));
    scale = std::max(scale, 2.0 * rows + rot + 0.5 * gamma * space.n_photons_max);
  }
  return 0.01 / std::max({scale, gamma, 1e-300});
}

CMatrix lindblad_integrate(const CMatrix& rho0, const CMatrix& h, const TruncatedSpace& space,
                           double gamma, double t, double dt) {
  space.validate();
  check_dims(h, space, "lindblad_integrate");
  check_dims(rho0, space, "lindblad_integrate");
  check_hermitian(h, "lindblad_integrate");
  if (!block_diagonal(h, space)) throw DomainError("lindblad_integrate: H mixes atom-number sectors");
  if (!(gamma >= 0.0) || !(t >= 0.0)) throw DomainError("lindblad_integrate: gamma and t must be >= 0");
  if (!(dt > 0.0) || dt > lindblad_max_step(h, space, gamma) * (1.0 + 1e-12))
    throw DomainError("lindblad_integrate: dt exceeds 0.01 / spectral scale");

  const int p = space.photon_dim();
  const int na = space.n_atoms_max;
  std::vector<Eigen::VectorXd> diag(na + 1);
  std::vector<CMatrix> coupling(na + 1);
  std::vector<bool> has_coupling(na + 1);
  for (int m = 0; m <= na; ++m) {
    const CMatrix blk = atom_block(h, space, m);
    diag[m] = blk.diagonal().real();
    coupling[m] = blk;
    coupling[m].diagonal().setZero();
    has_coupling[m] = coupling[m].cwiseAbs().maxCoeff() != 0.0;
  }

  // Interaction-frame coupling V~_ij(s) = V_ij e^{i (d_i - d_j) s}; the jump term
  // picks up e^{i (theta^m_i - theta^n_j)} with theta^m_i = (d^m_i - d^m_{i+1}) s.
  const int q = p - 1;
  const Eigen::ArrayXd idx = Eigen::ArrayXd::LinSpaced(p, 0.0, q);
  const Eigen::ArrayXXd decay = -0.5 * gamma * (idx.replicate(1, p) + idx.transpose().replicate(p, 1));
  const Eigen::ArrayXd sq = idx.tail(q).sqrt();
  const Eigen::ArrayXXd feed = gamma * (sq.matrix() * sq.matrix().transpose()).array();

  std::vector<CMatrix> v(na + 1);
  std::vector<CVector> rot(na + 1, CVector::Ones(p));
  auto rhs = [&](double s, const Blocks& x, Blocks& out) {
    for (int m = 0; m <= na; ++m) {
      for (int i = 0; i < q; ++i) rot[m](i) = std::exp(kI * ((diag[m](i) - diag[m](i + 1)) * s));
      if (!has_coupling[m]) continue;
      CVector ph(p);
      for (int i = 0; i < p; ++i) ph(i) = std::exp(kI * (diag[m](i) * s));
      v[m] = ph.asDiagonal() * coupling[m] * ph.conjugate().asDiagonal();
    }
    for (int m = 0; m <= na; ++m)
      for (int n = m; n <= na; ++n) {
        const int sl = x.slot(m, n);
        const CMatrix& r = x.data[sl];
        CMatrix& d = out.data[sl];
        d.array() = decay * r.array();
        if (q > 0 && gamma != 0.0) {
          const CMatrix phase = rot[m].head(q) * rot[n].head(q).adjoint();
          d.topLeftCorner(q, q).array() += feed * r.bottomRightCorner(q, q).array() * phase.array();
        }
        if (has_coupling[m]) d.noalias() -= kI * (v[m] * r);
        if (has_coupling[n]) d.noalias() += kI * (r * v[n]);
      }
  };

  Blocks x = split(rho0, space);
  Blocks k1 = x, k2 = x, k3 = x, k4 = x, tmp = x;
  auto axpy = [&](const Blocks& k, double a) {
    for (std::size_t i = 0; i < x.data.size(); ++i) tmp.data[i] = x.data[i] + a * k.data[i];
  };
  const long n_steps = t == 0.0 ? 0 : static_cast<long>(std::ceil(t / dt - 1e-9));
  const double hstep = n_steps == 0 ? 0.0 : t / static_cast<double>(n_steps);
  for (long step = 0; step < n_steps; ++step) {
    const double s = step * hstep;
    rhs(s, x, k1);
    axpy(k1, 0.5 * hstep);
    rhs(s + 0.5 * hstep, tmp, k2);
    axpy(k2, 0.5 * hstep);
    rhs(s + 0.5 * hstep, tmp, k3);
    axpy(k3, hstep);
    rhs(s + hstep, tmp, k4);
    for (std::size_t i = 0; i < x.data.size(); ++i)
      x.data[i] += (hstep / 6.0) * (k1.data[i] + 2.0 * k2.data[i] + 2.0 * k3.data[i] + k4.data[i]);
  }

  for (int m = 0; m <= na; ++m)
    for (int n = m; n <= na; ++n) {
      CMatrix& r = x.data[x.slot(m, n)];
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) r(i, j) *= std::exp(-kI * ((diag[m](i) - diag[n](j)) * t));
    }
  return join(x, space);
}

CMatrix counting_operation_numeric(const CMatrix& rho0, const CMatrix& h,
                                   const TruncatedSpace& space, double gamma, int k, double t,
                                   int n_steps, bool diagonal_only) {
  space.validate();
  check_dims(h, space, "counting_operation_numeric");
  check_dims(rho0, space, "counting_operation_numeric");
  check_hermitian(h, "counting_operation_numeric");
  if (!block_diagonal(h, space)) throw DomainError("counting_operation_numeric: H mixes atom-number sectors");
  if (k < 0 || k > 2) throw DomainError("counting_operation_numeric: only k <= 2 is supported");
  if (n_steps < 200) throw DomainError("counting_operation_numeric: n_steps must be >= 200");
  if (!(gamma >= 0.0) || !(t >= 0.0)) throw DomainError("counting_operation_numeric: gamma and t must be >= 0");

  const int p = space.photon_dim();
  const int na = space.n_atoms_max;
  const double hstep = t / n_steps;
  std::vector<CMatrix> u(na + 1);
  for (int m = 0; m <= na; ++m) {
    CMatrix y = -kI * atom_block(h, space, m);
    for (int i = 0; i < p; ++i) y(i, i) -= 0.5 * gamma * i;
    u[m] = (y * hstep).exp();
  }

  Blocks level0 = split(rho0, space);
  const auto skip = [&](int m, int n) { return diagonal_only && m != n; };
  // levels[l] holds N_s(l) rho at the current grid time s.
  std::vector<Blocks> levels(k + 1, Blocks{na, std::vector<CMatrix>(level0.data.size(), CMatrix::Zero(p, p))});
  levels[0] = level0;
  for (int step = 0; step < n_steps; ++step) {
    for (int m = 0; m <= na; ++m)
      for (int n = m; n <= na; ++n) {
        if (skip(m, n)) continue;
        const int sl = level0.slot(m, n);
        auto s_h = [&](const CMatrix& x) -> CMatrix { return u[m] * x * u[n].adjoint(); };
        std::vector<CMatrix> next(k + 1);
        next[0] = s_h(levels[0].data[sl]);
        for (int l = 1; l <= k; ++l)
          next[l] = s_h(levels[l].data[sl]) +
                    0.5 * hstep * (s_h(jump(levels[l - 1].data[sl], gamma)) + jump(next[l - 1], gamma));
        for (int l = 0; l <= k; ++l) levels[l].data[sl] = std::move(next[l]);
      }
  }
  if (diagonal_only)
    for (int m = 0; m <= na; ++m)
      for (int n = m + 1; n <= na; ++n) levels[k].data[levels[k].slot(m, n)].setZero();
  return join(levels[k], space);
}

CMatrix counting_operation_extrapolated(const CMatrix& rho0, const CMatrix& h,
                                        const TruncatedSpace& space, double gamma, int k, double t,
                                        int n_steps, bool diagonal_only) {
  const CMatrix coarse = counting_operation_numeric(rho0, h, space, gamma, k, t, n_steps, diagonal_only);
  const CMatrix fine = counting_operation_numeric(rho0, h, space, gamma, k, t, 2 * n_steps, diagonal_only);
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace becprobe::oracle
