#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "spinchain/floquet.hpp"
#include "spinchain/model.hpp"
#include "spinchain/parallel.hpp"

namespace spinchain {

/// Basis {|0,0>, |k,-k>, |k,0>, |0,-k>}; the odd pair (rows 2, 3) never
/// mixes with the even pair.
struct BlockState {
  double phi = 0.0;
  Mat4 rho = Mat4::Identity() / 4.0;
};

/// Nearest-neighbour correlators. Q = i<A_l A_l+1>, S = -i<B_l B_l+1>, so
/// both are real.
struct CorrelatorSet {
  double mz = 0.0;
  double G = 0.0;
  double Gp = 0.0;
  double Q = 0.0;
  double S = 0.0;
  double txx = 0.0;
  double tyy = 0.0;
  double tzz = 0.0;
  double txy = 0.0;
};

struct ModeExpectations {
  cplx XK;   // <c+c+ - cc>, real
  cplx XKp;  // <c+c+ + cc>, imaginary
  double mz = 0.0;
};

inline BlockState thermal_block(double phi, double h, double beta, double gamma = 1.0, double J = 1.0) {
  if (!(beta >= 0.0)) throw DomainError("thermal_block: beta must be >= 0");
  const Vec3 f = block_field(phi, h, gamma, J);
  const double e = f.norm();
  const Vec3 n = e > 0.0 ? Vec3(f / e) : Vec3::UnitZ();
  // scaled by exp(beta (c0 - e)) so nothing overflows
  const double x = std::exp(-2.0 * beta * e);
  const double odd = std::exp(-beta * e);
  const double z = (1.0 + x) + 2.0 * odd;
  BlockState s;
  s.phi = phi;
  s.rho.setZero();
  s.rho.topLeftCorner<2, 2>() = (0.5 * (1.0 + x) * Mat2::Identity() - 0.5 * (1.0 - x) * pauli::dot(n)) / z;
  s.rho(2, 2) = odd / z;
  s.rho(3, 3) = odd / z;
  return s;
}

/// Same state via a 4x4 Hermitian eigen-decomposition; independent route.
inline BlockState thermal_block_eig(double phi, double h, double beta, double gamma = 1.0, double J = 1.0) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(block_hamiltonian_4x4(phi, h, gamma, J));
  const Eigen::Vector4d ev = es.eigenvalues();
  Eigen::Vector4d w = (-beta * (ev.array() - ev.minCoeff())).exp();
  w /= w.sum();
  BlockState s;
  s.phi = phi;
  s.rho = es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  return s;
}

inline Mat2 su2_power(const FloquetData& f, long long n) {
  const double th = static_cast<double>(n) * f.angle();
  return std::cos(th) * Mat2::Identity() - kI * std::sin(th) * pauli::dot(f.axis);
}

inline BlockState evolve(const BlockState& s, const FloquetData& f, long long n) {
  if (n < 0) throw DomainError("evolve: n must be >= 0");
  BlockState out = s;
  if (n == 0) return out;
  const Mat2 u = su2_power(f, n);
  out.rho.topLeftCorner<2, 2>() = u * s.rho.topLeftCorner<2, 2>() * u.adjoint();
  out.rho.topRightCorner<2, 2>() = u * s.rho.topRightCorner<2, 2>();
  out.rho.bottomLeftCorner<2, 2>() = s.rho.bottomLeftCorner<2, 2>() * u.adjoint();
  return out;
}

inline ModeExpectations mode_expectations(const BlockState& s) {
  const Mat2 r = s.rho.topLeftCorner<2, 2>();
  ModeExpectations m;
  m.XK = (r * pauli::x()).trace();
  m.XKp = (r * (-kI * pauli::y())).trace();
  m.mz = (r(1, 1) - r(0, 0)).real();
  return m;
}

/// Even-pair Bloch vector scaled by the even weight: rho_even = (p I + s.sigma)/2.
inline Vec3 scaled_bloch(const BlockState& s) {
  const Mat2 r = s.rho.topLeftCorner<2, 2>();
  return {2.0 * r(0, 1).real(), -2.0 * r(0, 1).imag(), (r(0, 0) - r(1, 1)).real()};
}

/// Closed-form scaled Bloch vector of the thermal block.
inline Vec3 thermal_bloch(double phi, double h, double beta, double gamma, double J) {
  const Vec3 f = block_field(phi, h, gamma, J);
  const double e = f.norm();
  if (e == 0.0) return Vec3::Zero();
  const double x = std::exp(-2.0 * beta * e);
  const double z = (1.0 + x) + 2.0 * std::exp(-beta * e);
  return -((1.0 - x) / z) * (f / e);
}

/// Per-mode contributions, already weighted. Index: mz, G, Gp, q.
using ModeTerms = std::array<double, 4>;

inline ModeTerms mode_terms(const KMode& m, const Vec3& s) {
  const double sp = 2.0 * std::sin(m.phi), cp = 2.0 * std::cos(m.phi);
  const double mzk = -s(2);
  return {m.weight * 2.0 * mzk, m.weight * (sp * s(1) + cp * mzk), m.weight * (sp * s(1) - cp * mzk),
          m.weight * sp * s(0)};
}

inline CorrelatorSet assemble(const ModeTerms& t) {
  CorrelatorSet c;
  c.mz = t[0];
  c.G = t[1];
  c.Gp = t[2];
  c.Q = -t[3];
  c.S = t[3];
  c.txx = c.G;
  c.tyy = -c.Gp;
  c.tzz = c.mz * c.mz + c.Gp * c.G - c.Q * c.S;
  c.txy = -c.Q;
  return c;
}

/// Fixed chunking so the summation order is independent of the worker count.
inline constexpr std::size_t kSumChunks = 64;

template <class F>
ModeTerms sum_modes(const KGrid& grid, F&& per_mode) {
  const std::size_t n = grid.size();
  const std::size_t chunks = std::min(kSumChunks, std::max<std::size_t>(n, 1));
  std::vector<ModeTerms> part(chunks, ModeTerms{0, 0, 0, 0});
  parallel_for(chunks, [&](std::size_t c) {
    ModeTerms acc{0, 0, 0, 0};
    for (std::size_t i = n * c / chunks; i < n * (c + 1) / chunks; ++i) {
      const ModeTerms t = mode_terms(grid[i], per_mode(grid[i]));
      for (int j = 0; j < 4; ++j) acc[j] += t[j];
    }
    part[c] = acc;
  });
  ModeTerms tot{0, 0, 0, 0};
  for (const auto& p : part)
    for (int j = 0; j < 4; ++j) tot[j] += p[j];
  return tot;
}

/// Rodrigues rotation of s by angle alpha about unit axis m.
inline Vec3 rotate(const Vec3& s, const Vec3& m, double alpha) {
  const double c = std::cos(alpha), sn = std::sin(alpha);
  return c * s + sn * m.cross(s) + (1.0 - c) * m.dot(s) * m;
}

/// Equilibrium correlators of field h at inverse temperature beta.
inline CorrelatorSet thermal_correlators(double h, double beta, const KGrid& grid, double gamma = 1.0,
                                         double J = 1.0) {
  return assemble(sum_modes(grid, [&](const KMode& m) { return thermal_bloch(m.phi, h, beta, gamma, J); }));
}

/// Bloch vector after n cycles: U^n rotates it by 2 n eps_F tau about the axis.
inline Vec3 evolved_bloch(const KMode& m, const ModelParams& p, long long n) {
  const Vec3 s0 = thermal_bloch(m.phi, p.a, p.beta, p.gamma, p.J);
  if (n == 0) return s0;
  const FloquetData f = floquet_unitary(m.phi, p);
  return rotate(s0, f.axis, 2.0 * static_cast<double>(n) * f.angle());
}

inline Vec3 dephased_bloch(const KMode& m, const ModelParams& p) {
  const Vec3 s0 = thermal_bloch(m.phi, p.a, p.beta, p.gamma, p.J);
  const FloquetData f = floquet_unitary(m.phi, p);
  if (f.degenerate) return s0;
  return f.axis.dot(s0) * f.axis;
}

inline CorrelatorSet correlators_at_cycle(const ModelParams& p, const KGrid& grid, long long n) {
  if (n < 0) throw DomainError("correlators_at_cycle: n must be >= 0");
  return assemble(sum_modes(grid, [&](const KMode& m) { return evolved_bloch(m, p, n); }));
}

inline CorrelatorSet steady_state_correlators(const ModelParams& p, const KGrid& grid) {
  return assemble(sum_modes(grid, [&](const KMode& m) { return dephased_bloch(m, p); }));
}

inline double max_abs_diff(const CorrelatorSet& x, const CorrelatorSet& y) {
  const double d[] = {x.mz - y.mz, x.G - y.G, x.Gp - y.Gp, x.Q - y.Q, x.S - y.S,
                      x.txx - y.txx, x.tyy - y.tyy, x.tzz - y.tzz, x.txy - y.txy};
  double m = 0.0;
  for (double v : d) m = std::max(m, std::abs(v));
  return m;
}

struct QuadratureControl {
  int start_nodes = 4096;
  int max_nodes = 1 << 20;
  double tol = 1e-9;
};

struct Converged {
  CorrelatorSet value;
  int nodes = 0;
  double change = 0.0;
};

/// Doubles the node count of thermo_kgrid until every correlator moves by
/// less than tol.
template <class Eval>
Converged converge_nodes(Eval&& eval, const QuadratureControl& qc = {}) {
  int nodes = qc.start_nodes;
  CorrelatorSet prev = eval(thermo_kgrid(nodes));
  while (true) {
    if (2 * nodes > qc.max_nodes)
      throw ConvergenceError("quadrature not converged: last change at " + std::to_string(nodes) + " nodes, cap " +
                             std::to_string(qc.max_nodes));
    nodes *= 2;
    const CorrelatorSet next = eval(thermo_kgrid(nodes));
    const double d = max_abs_diff(prev, next);
    if (d < qc.tol) return {next, nodes, d};
    prev = next;
  }
}

inline Converged correlators_at_cycle(const ModelParams& p, long long n, const QuadratureControl& qc = {}) {
  return converge_nodes([&](const KGrid& g) { return correlators_at_cycle(p, g, n); }, qc);
}

inline Converged steady_state_correlators(const ModelParams& p, const QuadratureControl& qc = {}) {
  return converge_nodes([&](const KGrid& g) { return steady_state_correlators(p, g); }, qc);
}

inline Converged thermal_correlators(double h, double beta, double gamma = 1.0, double J = 1.0,
                                     const QuadratureControl& qc = {}) {
  return converge_nodes([&](const KGrid& g) { return thermal_correlators(h, beta, g, gamma, J); }, qc);
}

/// Correlators for every cycle 0..n_max on a fixed grid. Each mode's Bloch
/// vector is advanced by a precomputed rotation matrix.
inline std::vector<CorrelatorSet> correlator_series(const ModelParams& p, const KGrid& grid, long long n_max) {
  if (n_max < 0) throw DomainError("correlator_series: n_max must be >= 0");
  const std::size_t steps = static_cast<std::size_t>(n_max) + 1;
  const std::size_t n = grid.size();
  const std::size_t chunks = std::min(kSumChunks, std::max<std::size_t>(n, 1));
  std::vector<std::vector<ModeTerms>> part(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    std::vector<ModeTerms> acc(steps, ModeTerms{0, 0, 0, 0});
    for (std::size_t i = n * c / chunks; i < n * (c + 1) / chunks; ++i) {
      const KMode& m = grid[i];
      Vec3 s = thermal_bloch(m.phi, p.a, p.beta, p.gamma, p.J);
      const FloquetData f = floquet_unitary(m.phi, p);
      const double al = 2.0 * f.angle();
      const double ca = std::cos(al), sa = std::sin(al);
      const Vec3& u = f.axis;
      Eigen::Matrix3d cross;
      cross << 0, -u(2), u(1), u(2), 0, -u(0), -u(1), u(0), 0;
      const Eigen::Matrix3d R = ca * Eigen::Matrix3d::Identity() + sa * cross + (1.0 - ca) * u * u.transpose();
      for (std::size_t k = 0; k < steps; ++k) {
        const ModeTerms t = mode_terms(m, s);
        for (int j = 0; j < 4; ++j) acc[k][j] += t[j];
        s = R * s;
      }
    }
    part[c] = std::move(acc);
  });
  std::vector<CorrelatorSet> out(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    ModeTerms tot{0, 0, 0, 0};
    for (std::size_t c = 0; c < chunks; ++c)
      for (int j = 0; j < 4; ++j) tot[j] += part[c][k][j];
    out[k] = assemble(tot);
  }
  return out;
}

/// Node count at which the cycle-n_max correlators are converged; reused for
/// the whole series since lower cycles oscillate more slowly in phi.
inline int series_nodes(const ModelParams& p, long long n_max, const QuadratureControl& qc = {}) {
  return correlators_at_cycle(p, n_max, qc).nodes;
}

// ---------------------------------------------------------------------------
// Two-site state

inline Mat4 kron(const Mat2& A, const Mat2& B) {
  Mat4 m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m.block<2, 2>(2 * i, 2 * j) = A(i, j) * B;
  return m;
}

struct TwoSiteState {
  Mat4 rho = Mat4::Identity() / 4.0;
  double clipped = 0.0;  // most negative eigenvalue removed by clipping
};

inline constexpr double kPositivityFloor = 1e-10;

/// Clips eigenvalues in (-floor, 0) and renormalizes; deeper negatives throw.
inline Mat4 enforce_positivity(const Mat4& rho, double& clipped, double floor = kPositivityFloor) {
  const Mat4 h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat4> es(h);
  Eigen::Vector4d ev = es.eigenvalues();
  clipped = std::min(0.0, ev.minCoeff());
  if (clipped < -floor) throw PositivityError("two-site state eigenvalue " + std::to_string(clipped) + " below floor");
  if (clipped == 0.0) return h;
  ev = ev.cwiseMax(0.0);
  ev /= ev.sum();
  return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

/// rho = 1/4 [II + mz(ZI + IZ) + txx XX + tyy YY + tzz ZZ + txy (XY + YX)].
inline TwoSiteState two_site_state(const CorrelatorSet& c) {
  using namespace pauli;
  Mat4 r = kron(id(), id()) + c.mz * (kron(z(), id()) + kron(id(), z())) + c.txx * kron(x(), x()) +
           c.tyy * kron(y(), y()) + c.tzz * kron(z(), z()) + c.txy * (kron(x(), y()) + kron(y(), x()));
  r /= 4.0;
  TwoSiteState s;
  s.rho = enforce_positivity(r, s.clipped);
  return s;
}

}  // namespace spinchain
