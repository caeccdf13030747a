#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "spinchain/measures.hpp"

using namespace spinchain;

namespace {

Mat4 projector(const Eigen::Vector4cd& v) { return v * v.adjoint(); }

Mat4 bell_phi_plus() {
  Eigen::Vector4cd v(1, 0, 0, 1);
  return projector(v / std::sqrt(2.0));
}

Mat4 werner(double p) { return p * bell_phi_plus() + (1 - p) * Mat4::Identity() / 4.0; }

double h2(double x) { return x <= 0 || x >= 1 ? 0.0 : -x * std::log2(x) - (1 - x) * std::log2(1 - x); }

}  // namespace

TEST(Concurrence, BellStateIsOne) { EXPECT_NEAR(concurrence(bell_phi_plus()), 1.0, 1e-12); }

TEST(Concurrence, ProductStatesAreZero) {
  gen::Rng r(41);
  for (int i = 0; i < 100; ++i) ASSERT_NEAR(concurrence(kron(gen::density2(r), gen::density2(r))), 0.0, 1e-10);
}

TEST(Concurrence, WernerClosedForm) {
  EXPECT_NEAR(concurrence(werner(0.5)), 0.25, 1e-12);
  for (double p = 0.0; p <= 1.0; p += 0.05) EXPECT_NEAR(concurrence(werner(p)), std::max(0.0, (3 * p - 1) / 2), 1e-10);
}

// X states: C = 2 max(0, |r03| - sqrt(r11 r22), |r12| - sqrt(r00 r33)).
TEST(Concurrence, XStateFormula) {
  gen::Rng r(42);
  for (int i = 0; i < 300; ++i) {
    Eigen::Vector4d d;
    for (int k = 0; k < 4; ++k) d(k) = gen::uniform(r, 0.01, 1.0);
    d /= d.sum();
    const double m03 = std::sqrt(d(0) * d(3)) * gen::uniform(r, 0, 1);
    const double m12 = std::sqrt(d(1) * d(2)) * gen::uniform(r, 0, 1);
    const double a = gen::uniform(r, 0, 2 * kPi), b = gen::uniform(r, 0, 2 * kPi);
    Mat4 rho = d.cast<cplx>().asDiagonal();
    rho(0, 3) = std::polar(m03, a);
    rho(3, 0) = std::conj(rho(0, 3));
    rho(1, 2) = std::polar(m12, b);
    rho(2, 1) = std::conj(rho(1, 2));
    const double expect = 2 * std::max({0.0, m03 - std::sqrt(d(1) * d(2)), m12 - std::sqrt(d(0) * d(3))});
    ASSERT_NEAR(concurrence(rho), expect, 1e-10);
  }
}

TEST(Concurrence, LocalUnitaryInvariance) {
  gen::Rng r(43);
  for (int i = 0; i < 200; ++i) {
    const Mat4 rho = gen::density4(r, gen::integer(r, 1, 4));
    const Mat4 u = kron(gen::unitary2(r), gen::unitary2(r));
    ASSERT_NEAR(concurrence(rho), concurrence(u * rho * u.adjoint()), 1e-10);
  }
}

TEST(Concurrence, BoundsAndRejection) {
  gen::Rng r(44);
  for (int i = 0; i < 200; ++i) {
    const double c = concurrence(gen::density4(r, gen::integer(r, 1, 4)));
    ASSERT_GE(c, 0.0);
    ASSERT_LE(c, 1.0);
  }
  Mat4 bad = Mat4::Identity();
  EXPECT_THROW(concurrence(bad), DomainError);
}

TEST(Discord, BellStateIsOne) { EXPECT_NEAR(quantum_discord(bell_phi_plus()), 1.0, 1e-8); }

TEST(Discord, ProductStatesAreZero) {
  gen::Rng r(45);
  for (int i = 0; i < 30; ++i) ASSERT_NEAR(quantum_discord(kron(gen::density2(r), gen::density2(r))), 0.0, 1e-8);
}

TEST(Discord, ClassicallyCorrelatedIsZero) {
  Mat4 rho = Mat4::Zero();
  rho(0, 0) = rho(3, 3) = 0.5;
  EXPECT_NEAR(quantum_discord(rho), 0.0, 1e-8);
}

// Pure states: discord equals the entanglement entropy of either half.
TEST(Discord, PureStatesEqualEntanglementEntropy) {
  gen::Rng r(46);
  for (int i = 0; i < 20; ++i) {
    const Mat4 rho = projector(gen::pure4(r));
    ASSERT_NEAR(quantum_discord(rho), entropy2(partial_trace_B(rho)), 1e-6);
  }
}

// Werner states: D = (1-p)/4 log(1-p) - (1+p)/2 log(1+p) + (1+3p)/4 log(1+3p).
TEST(Discord, WernerClosedForm) {
  for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double expect = (1 - p) / 4 * std::log2(1 - p) - (1 + p) / 2 * std::log2(1 + p) +
                          (1 + 3 * p) / 4 * std::log2(1 + 3 * p);
    EXPECT_NEAR(quantum_discord(werner(p)), expect, 1e-7) << "p=" << p;
  }
}

TEST(Discord, NonNegativeOnRandomStates) {
  gen::Rng r(47);
  for (int i = 0; i < 40; ++i) ASSERT_GE(quantum_discord(gen::density4(r, gen::integer(r, 1, 4))), -1e-9);
}

// Symmetric X state with the z basis optimal: conditional entropy is a sum
// of binary entropies and can be checked by hand.
TEST(Discord, ConditionalEntropyInZBasis) {
  Mat4 rho = Mat4::Zero();
  rho(0, 0) = 0.4;
  rho(1, 1) = 0.1;
  rho(2, 2) = 0.1;
  rho(3, 3) = 0.4;
  // outcome 0 on B: A in {0: .4, 1: .1}; outcome 1: {0: .1, 1: .4}
  EXPECT_NEAR(conditional_entropy(rho, 0.0, 0.0), h2(0.2), 1e-12);
}

TEST(Entropy, ClosedFormTwoByTwoMatchesEigenRoute) {
  gen::Rng r(48);
  for (int i = 0; i < 100; ++i) {
    const Mat2 m = gen::density2(r);
    ASSERT_NEAR(entropy2(m), von_neumann_entropy(m), 1e-12);
  }
  EXPECT_NEAR(entropy2(Mat2::Identity() / 2), 1.0, 1e-15);
}

TEST(PartialTrace, ProductStateFactors) {
  gen::Rng r(49);
  const Mat2 a = gen::density2(r), b = gen::density2(r);
  EXPECT_LT((partial_trace_B(kron(a, b)) - a).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((partial_trace_A(kron(a, b)) - b).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(TraceDistance, BasicValues) {
  Mat2 up = Mat2::Zero(), dn = Mat2::Zero();
  up(0, 0) = 1;
  dn(1, 1) = 1;
  EXPECT_NEAR(trace_distance(up, dn), 2.0, 1e-15);
  EXPECT_NEAR(trace_distance(up, dn, true), 1.0, 1e-15);
  EXPECT_NEAR(trace_distance(up, up), 0.0, 1e-15);
}

TEST(TraceDistance, MetricProperties) {
  gen::Rng r(50);
  for (int i = 0; i < 200; ++i) {
    const Mat4 a = gen::density4(r), b = gen::density4(r), c = gen::density4(r);
    const double ab = trace_distance(a, b), ba = trace_distance(b, a);
    ASSERT_NEAR(ab, ba, 1e-12);
    ASSERT_LE(ab, trace_distance(a, c) + trace_distance(c, b) + 1e-12);
    ASSERT_GE(ab, 0.0);
  }
}

TEST(Purity, Bounds) {
  EXPECT_NEAR(purity(Mat4::Identity() / 4.0), 0.25, 1e-15);
  EXPECT_NEAR(purity(bell_phi_plus()), 1.0, 1e-15);
  gen::Rng r(51);
  for (int i = 0; i < 100; ++i) {
    const double p = purity(gen::density4(r, gen::integer(r, 1, 4)));
    ASSERT_GE(p, 0.25 - 1e-15);
    ASSERT_LE(p, 1.0 + 1e-12);
  }
}

TEST(PowerLaw, RecoversExactExponent) {
  std::vector<double> n, d;
  for (int i = 0; i <= 5000; ++i) {
    n.push_back(i);
    d.push_back(i == 0 ? 1.0 : 3.0 * std::pow(i, -1.5));
  }
  const PowerLawFit f = fit_power_law(n, d);
  EXPECT_NEAR(f.B, 1.5, 1e-6);
  EXPECT_NEAR(f.A, 3.0, 1e-5);
}

TEST(PowerLaw, RecoversPlantedExponentsUnderNoise) {
  gen::Rng r(52);
  std::normal_distribution<double> noise(0.0, 0.05);
  for (int trial = 0; trial < 40; ++trial) {
    const double B = gen::uniform(r, 0.2, 3.0), A = gen::uniform(r, 0.1, 10.0);
    std::vector<double> n, d;
    for (int i = 1; i <= 5000; ++i) {
      n.push_back(i);
      d.push_back(A * std::pow(i, -B) * (1.0 + noise(r)));
    }
    ASSERT_NEAR(fit_power_law(n, d).B, B, 0.02) << "planted " << B;
  }
}

TEST(PowerLaw, Errors) {
  std::vector<double> n(10, 1.0), d(10, 1.0);
  EXPECT_THROW(fit_power_law(n, d), DomainError);
  std::vector<double> n2, z;
  for (int i = 0; i <= 100; ++i) {
    n2.push_back(i);
    z.push_back(0.0);
  }
  try {
    fit_power_law(n2, z);
    FAIL() << "expected an error";
  } catch (const ConvergenceError& e) {
    EXPECT_NE(std::string(e.what()).find("converged below floor"), std::string::npos);
  }
}
