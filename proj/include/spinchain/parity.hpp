#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "spinchain/evolution.hpp"
#include "spinchain/model.hpp"

namespace spinchain {

/// Exact nearest-neighbour correlators of a finite periodic ring.
///
/// The spin Hamiltonian is P+ H_NS P+ + P- H_R P-, with P+- the fermion-parity
/// projectors, H_NS on antiperiodic momenta and H_R on periodic momenta
/// (including the unpaired modes phi = 0, pi). Each projected trace splits into
/// a plain and a parity-twisted Gaussian ensemble, and Wick's theorem holds in
/// each, so the ring state is a signed mixture of four Gaussian ensembles.
namespace parity {

struct Ensemble {
  ModeTerms terms{0, 0, 0, 0};  // weighted mz, G, Gp, q sums
  double log_abs_z = 0.0;
  int sign = 1;
};

/// log(2 cosh x + 2) and log(2 cosh x - 2) for x >= 0.
inline double log_plain(double x) { return x + 2.0 * std::log1p(std::exp(-x)); }
inline double log_twisted(double x) { return x + 2.0 * std::log(-std::expm1(-x)); }

/// Unpaired mode with single-particle energy eps and constant h/2.
/// Returns log|Z|, sign and <2n - 1>.
inline void single_mode(double eps, double beta, bool twisted, double& logz, int& sign, double& m) {
  const double x = beta * eps;
  if (!twisted) {
    // Z = 1 + exp(-x)
    logz = x >= 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
    sign = 1;
    const double n = x >= 0 ? std::exp(-x) / (1.0 + std::exp(-x)) : 1.0 / (1.0 + std::exp(x));
    m = 2.0 * n - 1.0;
  } else {
    // Z = 1 - exp(-x); <n> = -1 / expm1(x)
    if (x == 0.0) throw DomainError("parity ensemble: zero-energy unpaired mode at finite beta");
    logz = x > 0 ? std::log(-std::expm1(-x)) : -x + std::log(-std::expm1(x));
    sign = x > 0 ? 1 : -1;
    m = -2.0 / std::expm1(x) - 1.0;
  }
}

inline Ensemble build(int N, const ModelParams& p, long long n, bool periodic, bool twisted) {
  Ensemble e;
  const double w = 1.0 / N;
  std::vector<double> phis;
  if (periodic) {
    for (int k = 1; k < N / 2; ++k) phis.push_back(2.0 * kPi * k / N);
  } else {
    for (int k = 1; k <= N / 2; ++k) phis.push_back(2.0 * kPi * (k - 0.5) / N);
  }
  for (double phi : phis) {
    const Vec3 f = block_field(phi, p.a, p.gamma, p.J);
    const double E = f.norm();
    const double x = p.beta * E;
    const double c0 = p.J * std::cos(phi);
    if (twisted && x == 0.0) throw DomainError("parity ensemble: twisted weight vanishes");
    e.log_abs_z += -p.beta * c0 + (twisted ? log_twisted(x) : log_plain(x));
    const double mag = twisted ? 1.0 / std::tanh(0.5 * x) : std::tanh(0.5 * x);
    Vec3 s = E > 0.0 ? Vec3(-mag * f / E) : Vec3::Zero();
    if (n > 0) {
      const FloquetData fd = floquet_unitary(phi, p);
      s = rotate(s, fd.axis, 2.0 * static_cast<double>(n) * fd.angle());
    }
    const ModeTerms t = mode_terms({phi, w}, s);
    for (int j = 0; j < 4; ++j) e.terms[j] += t[j];
  }
  if (periodic) {
    for (double phi : {0.0, kPi}) {
      const double c = p.J * std::cos(phi);
      double lz = 0.0, m = 0.0;
      int sg = 1;
      single_mode(c - p.a, p.beta, twisted, lz, sg, m);
      e.log_abs_z += -0.5 * p.beta * p.a + lz;
      e.sign *= sg;
      e.terms[0] += w * m;
      e.terms[1] += w * std::cos(phi) * m;
      e.terms[2] -= w * std::cos(phi) * m;
    }
  }
  return e;
}

inline CorrelatorSet ring_correlators(int N, const ModelParams& p, long long n) {
  if (N < 4 || N % 2 != 0) throw DomainError("ring_correlators: N must be even and >= 4");
  p.validate();
  if (p.beta == 0.0) return assemble(ModeTerms{0, 0, 0, 0});
  // P+ pairs with the antiperiodic sector, P- with the periodic one:
  // Tr[P+- X] = (Tr X +- Tr[Pi X]) / 2.
  const std::array<Ensemble, 4> ens{build(N, p, n, false, false), build(N, p, n, false, true),
                                    build(N, p, n, true, false), build(N, p, n, true, true)};
  const std::array<int, 4> proj{1, 1, 1, -1};
  double lmax = -1e300;
  for (const auto& e : ens) lmax = std::max(lmax, e.log_abs_z);
  std::array<double, 4> wt{};
  double z = 0.0;
  for (int i = 0; i < 4; ++i) {
    wt[i] = proj[i] * ens[i].sign * std::exp(ens[i].log_abs_z - lmax);
    z += wt[i];
  }
  CorrelatorSet out;
  for (int i = 0; i < 4; ++i) {
    const CorrelatorSet c = assemble(ens[i].terms);
    const double f = wt[i] / z;
    out.mz += f * c.mz;
    out.G += f * c.G;
    out.Gp += f * c.Gp;
    out.Q += f * c.Q;
    out.S += f * c.S;
    out.txx += f * c.txx;
    out.tyy += f * c.tyy;
    out.tzz += f * c.tzz;
    out.txy += f * c.txy;
  }
  return out;
}

}  // namespace parity

}  // namespace spinchain
