#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "generators.hpp"
#include "spinchain/ed_oracle.hpp"
#include "spinchain/evolution.hpp"

using namespace spinchain;

TEST(Thermal, InfiniteTemperatureIsMaximallyMixed) {
  const CorrelatorSet c = thermal_correlators(1.3, 0.0, thermo_kgrid(256));
  const Mat4 rho = two_site_state(c).rho;
  EXPECT_LT((rho - Mat4::Identity() / 4.0).cwiseAbs().maxCoeff(), 1e-15);
  const BlockState b = thermal_block(0.7, 1.3, 0.0);
  EXPECT_LT((b.rho - Mat4::Identity() / 4.0).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Thermal, ClosedFormMatchesEigenRoute) {
  gen::Rng r(31);
  for (int i = 0; i < 500; ++i) {
    const double phi = gen::uniform(r, 0, kPi), h = gen::uniform(r, -2.4, 2.4), beta = gen::uniform(r, 0, 40);
    const double g = gen::uniform(r, 0, 1);
    const BlockState a = thermal_block(phi, h, beta, g), b = thermal_block_eig(phi, h, beta, g);
    ASSERT_LT((a.rho - b.rho).cwiseAbs().maxCoeff(), 1e-12) << phi << " " << h << " " << beta;
    ASSERT_LT((scaled_bloch(a) - thermal_bloch(phi, h, beta, g, 1.0)).norm(), 1e-12);
  }
}

// High-temperature expansion: <sz> = beta h / 2, <XX> = -beta J (1 + g)/4,
// <YY> = -beta J (1 - g)/4 to first order.
TEST(Thermal, HighTemperatureExpansion) {
  const double beta = 1e-5, h = 0.9, g = 0.6;
  const CorrelatorSet c = thermal_correlators(h, beta, thermo_kgrid(1024), g);
  EXPECT_NEAR(c.mz / beta, h / 2, 1e-4);
  EXPECT_NEAR(c.txx / beta, -(1 + g) / 4, 1e-4);
  EXPECT_NEAR(c.tyy / beta, -(1 - g) / 4, 1e-4);
  EXPECT_NEAR(c.txy, 0.0, 1e-15);
}

// h = 0, g = 1: the chain is classical Ising in x with gap J on every mode,
// so <XX> = -tanh(beta J / 2).
TEST(Thermal, ZeroFieldIsingCorrelator) {
  for (double beta : {0.3, 2.0, 25.0}) {
    const CorrelatorSet c = thermal_correlators(0.0, beta, thermo_kgrid(512));
    EXPECT_NEAR(c.txx, -std::tanh(beta / 2), 1e-13);
    EXPECT_NEAR(c.mz, 0.0, 1e-13);
  }
}

TEST(Thermal, StrongFieldPolarizesUp) {
  const CorrelatorSet c = thermal_correlators(200.0, 40.0, thermo_kgrid(512));
  EXPECT_NEAR(c.mz, 1.0, 1e-4);
}

// At beta = 1 the ring approaches the infinite chain exponentially in N; the
// residual at 12 sites is a few 1e-5.
TEST(Thermal, ExactDiagonalisationConvergesToInfiniteChain) {
  ModelParams p;
  p.beta = 1.0;
  p.a = p.b = 1.1;
  const CorrelatorSet c = thermal_correlators(p.a, p.beta, p.gamma, p.J).value;
  double prev = 1e300;
  for (int N : {8, 10, 12}) {
    const ed::EdCorrelators e = ed::MomentumOracle(N, p).at(0);
    const double err = std::max({std::abs(c.mz - e.mz), std::abs(c.txx - e.txx), std::abs(c.tyy - e.tyy),
                                 std::abs(c.tzz - e.tzz)});
    EXPECT_LT(err, prev) << "N=" << N;
    prev = err;
  }
  EXPECT_LT(prev, 2e-4);
}

TEST(Evolution, BlockAndBlochRoutesAgree) {
  gen::Rng r(32);
  for (int i = 0; i < 300; ++i) {
    const ModelParams p = gen::params(r);
    const KMode m{gen::uniform(r, 0, kPi), 0.1};
    const long long n = gen::integer(r, 0, 400);
    const BlockState s = evolve(thermal_block(m.phi, p.a, p.beta, p.gamma, p.J), floquet_unitary(m.phi, p), n);
    ASSERT_LT((scaled_bloch(s) - evolved_bloch(m, p, n)).norm(), 1e-11);
  }
}

TEST(Evolution, SemigroupProperty) {
  gen::Rng r(33);
  for (int i = 0; i < 200; ++i) {
    const ModelParams p = gen::params(r);
    const double phi = gen::uniform(r, 0, kPi);
    const FloquetData f = floquet_unitary(phi, p);
    const long long n1 = gen::integer(r, 0, 300), n2 = gen::integer(r, 0, 300);
    const BlockState s0 = thermal_block(phi, p.a, p.beta, p.gamma, p.J);
    const BlockState x = evolve(evolve(s0, f, n1), f, n2), y = evolve(s0, f, n1 + n2);
    ASSERT_LT((x.rho - y.rho).cwiseAbs().maxCoeff(), 1e-11);
  }
}

TEST(Evolution, PreservesTraceHermiticityPositivity) {
  gen::Rng r(34);
  for (int i = 0; i < 300; ++i) {
    const ModelParams p = gen::params(r);
    const double phi = gen::uniform(r, 0, kPi);
    const BlockState s =
        evolve(thermal_block(phi, p.a, p.beta, p.gamma, p.J), floquet_unitary(phi, p), gen::integer(r, 1, 5000));
    ASSERT_NEAR(s.rho.trace().real(), 1.0, 1e-13);
    ASSERT_LT((s.rho - s.rho.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
    ASSERT_GT(Eigen::SelfAdjointEigenSolver<Mat4>(s.rho).eigenvalues().minCoeff(), -1e-14);
  }
}

TEST(Evolution, EqualFieldsAreStationary) {
  gen::Rng r(35);
  for (int i = 0; i < 20; ++i) {
    ModelParams p = gen::params(r);
    p.b = p.a;
    const KGrid g = thermo_kgrid(256);
    const CorrelatorSet c0 = correlators_at_cycle(p, g, 0);
    for (long long n : {1LL, 33LL, 4000LL}) ASSERT_LT(max_abs_diff(c0, correlators_at_cycle(p, g, n)), 1e-12);
    ASSERT_LT(max_abs_diff(c0, steady_state_correlators(p, g)), 1e-12);
  }
}

TEST(Evolution, SeriesMatchesPointwiseEvaluation) {
  ModelParams p;
  p.tau = 0.7;
  const KGrid g = finite_kgrid(64);
  const auto s = correlator_series(p, g, 300);
  ASSERT_EQ(s.size(), 301u);
  for (long long n : {0LL, 1LL, 77LL, 300LL}) EXPECT_LT(max_abs_diff(s[n], correlators_at_cycle(p, g, n)), 1e-11);
}

// Long-time average of the Bloch vector on a finite grid equals the dephased
// projection onto the Floquet axis.
TEST(Evolution, TimeAverageEqualsDephasedState) {
  ModelParams p;
  p.tau = 0.9;
  for (const KMode& m : finite_kgrid(12)) {
    Vec3 avg = Vec3::Zero();
    const int T = 20000;
    for (int n = 0; n < T; ++n) avg += evolved_bloch(m, p, n);
    avg /= T;
    EXPECT_LT((avg - dephased_bloch(m, p)).norm(), 2e-3) << "phi=" << m.phi;
  }
}

TEST(Evolution, SteadyStateCloseToLongEvolution) {
  for (double tau : {0.3, 0.7, 0.9, 1.5}) {
    ModelParams p;
    p.tau = tau;
    const CorrelatorSet s = steady_state_correlators(p).value;
    const CorrelatorSet c = correlators_at_cycle(p, 2000).value;
    EXPECT_LT(max_abs_diff(s, c), 1e-3) << "tau=" << tau;
  }
}

TEST(Evolution, QuadratureDoublingIsStable) {
  ModelParams p;
  const Converged c = correlators_at_cycle(p, 500);
  EXPECT_LT(c.change, 1e-9);
  EXPECT_LT(max_abs_diff(c.value, correlators_at_cycle(p, thermo_kgrid(2 * c.nodes), 500)), 1e-9);
}

TEST(Evolution, QuadratureCapRaises) {
  ModelParams p;
  QuadratureControl qc;
  qc.start_nodes = 64;
  qc.max_nodes = 256;
  EXPECT_THROW(correlators_at_cycle(p, 5000, qc), ConvergenceError);
}

TEST(TwoSite, StateIsPhysical) {
  gen::Rng r(36);
  for (int i = 0; i < 30; ++i) {
    const ModelParams p = gen::params(r);
    const TwoSiteState s = two_site_state(correlators_at_cycle(p, thermo_kgrid(2048), gen::integer(r, 0, 50)));
    ASSERT_NEAR(s.rho.trace().real(), 1.0, 1e-13);
    ASSERT_LT((s.rho - s.rho.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
    ASSERT_GE(Eigen::SelfAdjointEigenSolver<Mat4>(s.rho).eigenvalues().minCoeff(), -1e-15);
  }
}

TEST(TwoSite, ReproducesPauliExpectations) {
  CorrelatorSet c;
  c.mz = 0.2;
  c.txx = -0.3;
  c.tyy = 0.1;
  c.tzz = 0.15;
  c.txy = 0.05;
  const Mat4 rho = two_site_state(c).rho;
  using namespace pauli;
  EXPECT_NEAR((rho * kron(z(), id())).trace().real(), 0.2, 1e-15);
  EXPECT_NEAR((rho * kron(id(), z())).trace().real(), 0.2, 1e-15);
  EXPECT_NEAR((rho * kron(x(), x())).trace().real(), -0.3, 1e-15);
  EXPECT_NEAR((rho * kron(y(), y())).trace().real(), 0.1, 1e-15);
  EXPECT_NEAR((rho * kron(z(), z())).trace().real(), 0.15, 1e-15);
  EXPECT_NEAR((rho * kron(x(), y())).trace().real(), 0.05, 1e-15);
}

TEST(TwoSite, DeepNegativityRejected) {
  CorrelatorSet c;
  c.txx = c.tyy = c.tzz = 1.0;  // eigenvalue -1/2
  EXPECT_THROW(two_site_state(c), PositivityError);
}
