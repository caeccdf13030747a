#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "spinchain/model.hpp"
#include "spinchain/optimize.hpp"
#include "spinchain/parallel.hpp"

namespace spinchain {

/// exp(-i H_k dt) = exp(-i phase) * u with u in SU(2).
struct HalfCycle {
  Mat2 u;
  double phase = 0.0;
};

/// U = cos(eps_F tau) I - i sin(eps_F tau) axis.sigma, with the c0 phase
/// dropped. eps_F tau in [0, pi].
struct FloquetData {
  double phi = 0.0;
  double tau = 0.0;
  Mat2 U;
  double eps_F = 0.0;
  Vec3 axis{0.0, 0.0, 1.0};
  bool degenerate = false;  // U = +-I, axis undefined
  double angle() const { return eps_F * tau; }
};

inline Vec3 block_field(double phi, double h, double gamma, double J) {
  const BlockCoefficients c = block_coefficients(phi, h, gamma, J);
  return {0.0, c.c1, c.c2};
}

inline HalfCycle half_cycle_unitary(double phi, double h, double dt, double gamma = 1.0, double J = 1.0) {
  const BlockCoefficients c = block_coefficients(phi, h, gamma, J);
  const double e = std::hypot(c.c1, c.c2);
  HalfCycle hc;
  hc.phase = c.c0 * dt;
  if (e == 0.0) {
    hc.u = Mat2::Identity();
    return hc;
  }
  const double s = std::sin(e * dt) / e;
  hc.u = std::cos(e * dt) * Mat2::Identity() - kI * s * (c.c1 * pauli::y() + c.c2 * pauli::z());
  return hc;
}

/// Angle and axis from the Pauli components of an SU(2) matrix.
inline void su2_decompose(const Mat2& U, double& theta, Vec3& axis, bool& degenerate) {
  const double ct = 0.5 * (U(0, 0) + U(1, 1)).real();
  const Vec3 s{-0.5 * (pauli::x() * U).trace().imag(), -0.5 * (pauli::y() * U).trace().imag(),
               -0.5 * (pauli::z() * U).trace().imag()};
  const double sn = s.norm();
  theta = std::atan2(sn, ct);
  degenerate = sn < 1e-14;
  axis = degenerate ? Vec3(0.0, 0.0, 1.0) : Vec3(s / sn);
}

inline FloquetData floquet_unitary(double phi, const ModelParams& p) {
  const HalfCycle ua = half_cycle_unitary(phi, p.a, 0.5 * p.tau, p.gamma, p.J);
  const HalfCycle ub = half_cycle_unitary(phi, p.b, 0.5 * p.tau, p.gamma, p.J);
  FloquetData f;
  f.phi = phi;
  f.tau = p.tau;
  f.U = ub.u * ua.u;
  double theta = 0.0;
  su2_decompose(f.U, theta, f.axis, f.degenerate);
  f.eps_F = theta / p.tau;
  return f;
}

/// Standard SU(2) composition of the two half-cycle rotations.
/// Returns (cos(eps_F tau), sin(eps_F tau) * axis).
inline std::pair<double, Vec3> floquet_closed_form(double phi, const ModelParams& p) {
  const Vec3 fa = block_field(phi, p.a, p.gamma, p.J);
  const Vec3 fb = block_field(phi, p.b, p.gamma, p.J);
  const double ea = fa.norm(), eb = fb.norm();
  const Vec3 na = ea > 0 ? Vec3(fa / ea) : Vec3::UnitZ();
  const Vec3 nb = eb > 0 ? Vec3(fb / eb) : Vec3::UnitZ();
  const double ca = std::cos(0.5 * ea * p.tau), sa = std::sin(0.5 * ea * p.tau);
  const double cb = std::cos(0.5 * eb * p.tau), sb = std::sin(0.5 * eb * p.tau);
  const double c = cb * ca - sb * sa * nb.dot(na);
  const Vec3 v = cb * sa * na + sb * ca * nb + sb * sa * nb.cross(na);
  return {c, v};
}

/// Quasi-energy from a numerical eigen-decomposition of U.
inline std::pair<double, Vec3> floquet_eigen(const Mat2& U, double tau) {
  Eigen::ComplexEigenSolver<Mat2> es(U);
  const cplx l0 = es.eigenvalues()(0);
  const cplx l1 = es.eigenvalues()(1);
  // eigenvalue exp(-i theta) carries axis expectation +1
  const int k = std::arg(l0) <= std::arg(l1) ? 0 : 1;
  const double theta = std::abs(std::arg(es.eigenvalues()(k)));
  Eigen::Vector2cd v = es.eigenvectors().col(k).normalized();
  Vec3 n{(v.adjoint() * pauli::x() * v)(0).real(), (v.adjoint() * pauli::y() * v)(0).real(),
         (v.adjoint() * pauli::z() * v)(0).real()};
  return {theta / tau, n};
}

inline std::vector<std::pair<double, double>> band(const ModelParams& p, const KGrid& grid) {
  std::vector<std::pair<double, double>> out(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { out[i] = {grid[i].phi, floquet_unitary(grid[i].phi, p).eps_F}; });
  return out;
}

/// Uniform grid on [0, pi] including both endpoints.
inline std::vector<double> uniform_phi(int npts) {
  if (npts < 3) throw DomainError("uniform_phi: need >= 3 points");
  std::vector<double> x(npts);
  for (int i = 0; i < npts; ++i) x[i] = kPi * i / (npts - 1);
  return x;
}

/// |d eps_F / d phi| by central differences; one-sided at the ends.
inline std::vector<std::pair<double, double>> group_velocity(const ModelParams& p, const std::vector<double>& phis) {
  const std::size_t n = phis.size();
  if (n < 3) throw DomainError("group_velocity: grid too small");
  std::vector<double> e(n);
  parallel_for(n, [&](std::size_t i) { e[i] = floquet_unitary(phis[i], p).eps_F; });
  std::vector<std::pair<double, double>> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
    v[i] = {phis[i], std::abs((e[hi] - e[lo]) / (phis[hi] - phis[lo]))};
  }
  return v;
}

inline double max_group_velocity(const ModelParams& p, int npts = 2048) {
  double m = 0.0;
  for (const auto& [phi, v] : group_velocity(p, uniform_phi(npts))) m = std::max(m, v);
  return m;
}

inline double revival_time(int N, const ModelParams& p, int npts = 2048) {
  if (N < 8) throw DomainError("revival_time: N must be >= 8");
  const double vmax = max_group_velocity(p, npts);
  if (vmax < 1e-12) throw NoTransportError("flat quasi-energy band: no quasi-particle transport");
  return N / (2.0 * vmax);
}

/// Smallest distance of eps_F tau to {0, pi} over the open zone (0, pi).
/// Modes at phi = 0, pi carry no pairing and are excluded.
struct ZoneGap {
  double gap = 0.0;
  double phi = 0.0;
};

inline ZoneGap zone_gap(const ModelParams& p, int npts = 2048) {
  auto g = [&](double phi) {
    const double th = floquet_unitary(phi, p).angle();
    return std::min(th, kPi - th);
  };
  const double h = kPi / npts;
  int best = 0;
  double gbest = g(0.5 * h);
  for (int j = 1; j < npts; ++j) {
    const double v = g((j + 0.5) * h);
    if (v < gbest) {
      gbest = v;
      best = j;
    }
  }
  ZoneGap z{gbest, (best + 0.5) * h};
  if (best > 0 && best + 1 < npts) {
    const auto [x, fx] = golden_section(g, (best - 0.5) * h, (best + 1.5) * h, 1e-13);
    if (fx < z.gap) z = {fx, x};
  }
  return z;
}

struct BandCrossing {
  double tau = 0.0;
  double phi = 0.0;
  double gap = 0.0;
  bool closed = false;
};

/// Local minima in tau of the zone gap, refined by golden section; `closed`
/// when the refined gap is below tol.
inline std::vector<BandCrossing> band_crossings(ModelParams p, const std::vector<double>& taus, double tol = 1e-6,
                                                int npts = 2048) {
  const std::size_t n = taus.size();
  std::vector<double> g(n);
  parallel_for(n, [&](std::size_t i) {
    ModelParams q = p;
    q.tau = taus[i];
    g[i] = zone_gap(q, npts).gap;
  });
  std::vector<std::size_t> idx;
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (g[i] <= g[i - 1] && g[i] <= g[i + 1]) idx.push_back(i);
  std::vector<BandCrossing> out(idx.size());
  parallel_for(idx.size(), [&](std::size_t m) {
    const std::size_t i = idx[m];
    ModelParams q = p;
    auto f = [&](double t) {
      q.tau = t;
      return zone_gap(q, npts).gap;
    };
    const auto [t, gt] = golden_section(f, taus[i - 1], taus[i + 1], 1e-10);
    q.tau = t;
    const ZoneGap z = zone_gap(q, npts);
    out[m] = {t, z.phi, z.gap, z.gap < tol};
  });
  return out;
}

}  // namespace spinchain
