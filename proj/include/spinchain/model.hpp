#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "spinchain/quadrature.hpp"
#include "spinchain/types.hpp"

namespace spinchain {

/// Driven XY chain. Energies in units of J, times in hbar/J.
struct ModelParams {
  double J = 1.0;
  double gamma = 1.0;
  double a = 1.4;
  double b = 0.0;
  double tau = 0.3;
  double beta = 20.0;

  void validate() const {
    if (!(J > 0.0)) throw DomainError("J must be > 0");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("gamma must lie in [0, 1]");
    if (!(tau > 0.0)) throw DomainError("tau must be > 0");
    if (!(beta >= 0.0)) throw DomainError("beta must be >= 0");
    if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("fields must be finite");
  }
};

/// One momentum pair (phi, -phi). Weights of a full grid sum to 1/2,
/// i.e. (1/N) per pair, or (1/2pi) dphi in the continuum.
struct KMode {
  double phi = 0.0;
  double weight = 0.0;
};

using KGrid = std::vector<KMode>;

/// H_k = c0 I + c1 sigma_y + c2 sigma_z on span{|0,0>, |k,-k>}.
struct BlockCoefficients {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

/// Boundary sector of a finite ring. Antiperiodic phi = 2pi(k - 1/2)/N is the
/// even-parity sector holding the paramagnetic ground state; Periodic is
/// phi = 2pi k/N, k = 1..N/2.
enum class KSector { Antiperiodic, Periodic };

inline double pulse_field(double t, const ModelParams& p) {
  if (t <= 0.0) return p.a;
  const double r = std::fmod(t, p.tau);
  return r < 0.5 * p.tau ? p.a : p.b;
}

inline BlockCoefficients block_coefficients(double phi, double h, double gamma = 1.0, double J = 1.0) {
  return {J * std::cos(phi), J * gamma * std::sin(phi), h - J * std::cos(phi)};
}

/// Basis {|0,0>, |k,-k>, |k,0>, |0,-k>}.
inline Mat4 block_hamiltonian_4x4(double phi, double h, double gamma = 1.0, double J = 1.0) {
  const double c = J * std::cos(phi);
  const double delta = -2.0 * J * gamma * std::sin(phi);
  Mat4 m = Mat4::Zero();
  m(0, 0) = h;
  m(1, 1) = 2.0 * c - h;
  m(2, 2) = c;
  m(3, 3) = c;
  m(0, 1) = kI * delta / 2.0;
  m(1, 0) = -kI * delta / 2.0;
  return m;
}

inline KGrid finite_kgrid(int N, KSector sector = KSector::Antiperiodic) {
  if (N < 4) throw DomainError("finite_kgrid: N must be >= 4");
  if (N % 2 != 0) throw DomainError("finite_kgrid: odd N rejected");
  KGrid g;
  g.reserve(N / 2);
  const double shift = sector == KSector::Antiperiodic ? 0.5 : 0.0;
  for (int k = 1; k <= N / 2; ++k) g.push_back({2.0 * kPi * (k - shift) / N, 1.0 / N});
  return g;
}

/// Composite 16-point Gauss-Legendre over [0, pi]; node count rounded up to a
/// multiple of 16.
inline KGrid thermo_kgrid(int nodes) {
  if (nodes < 16) throw DomainError("thermo_kgrid: nodes must be >= 16");
  const std::size_t panels = (static_cast<std::size_t>(nodes) + 15) / 16;
  const QuadratureRule q = composite_gauss_legendre(0.0, kPi, panels, 16);
  KGrid g(q.x.size());
  for (std::size_t i = 0; i < q.x.size(); ++i) g[i] = {q.x[i], q.w[i] / (2.0 * kPi)};
  return g;
}

/// sum_k weight * f(phi), scaled to the integral over [0, pi].
template <class F>
double integrate_pi(const KGrid& g, F&& f) {
  double s = 0.0;
  for (const auto& m : g) s += m.weight * f(m.phi);
  return 2.0 * kPi * s;
}

}  // namespace spinchain
