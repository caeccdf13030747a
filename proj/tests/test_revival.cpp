#include <gtest/gtest.h>

#include <cmath>

#include "spinchain/experiments.hpp"
#include "spinchain/revival.hpp"

using namespace spinchain;

namespace {

// Decaying oscillation that resurges at n = start.
std::vector<double> synthetic(int len, int start) {
  std::vector<double> c(len);
  for (int n = 0; n < len; ++n) {
    const double env = n < start ? std::exp(-n / 15.0) : 0.5;
    c[n] = 0.1 + 0.05 * env * std::cos(0.9 * n);
  }
  return c;
}

}  // namespace

TEST(Revival, WindowedAmplitudeOfConstantIsZero) {
  const std::vector<double> c(50, 0.3);
  for (double a : windowed_amplitude(c, 20)) EXPECT_EQ(a, 0.0);
}

TEST(Revival, DetectsSyntheticResurgence) {
  const auto n = detect_revival(synthetic(600, 300));
  ASSERT_TRUE(n.has_value());
  EXPECT_NEAR(static_cast<double>(*n), 300.0, 15.0);
}

TEST(Revival, FlatSeriesHasNoRevival) {
  std::vector<double> c(500);
  for (int n = 0; n < 500; ++n) c[n] = 0.2 + 1e-16 * ((n * 7919) % 13);
  EXPECT_FALSE(detect_revival(c).has_value());
}

TEST(Revival, ShortBeatIsNotARevival) {
  auto c = synthetic(600, 10000);
  for (int n = 200; n < 210; ++n) c[n] += 0.01 * ((n % 2) ? 1 : -1);
  EXPECT_FALSE(detect_revival(c).has_value());
}

TEST(Revival, BadOptionsRejected) {
  RevivalOptions o;
  o.threshold = 1.0;
  EXPECT_THROW(detect_revival({0.0, 1.0}, o), DomainError);
}

TEST(Revival, EqualFieldsGiveNoRevival) {
  ModelParams p;
  p.b = p.a;
  const RevivalResult r = run_revival(p, {100}, 600);
  ASSERT_EQ(r.runs.size(), 1u);
  EXPECT_FALSE(r.runs[0].n_detected.has_value());
}

TEST(Revival, RingOfHundredDetectedNearPrediction) {
  ModelParams p;
  const RevivalResult r = run_revival(p, {100}, 0, {}, false);
  ASSERT_TRUE(r.runs[0].n_detected.has_value());
  EXPECT_NEAR(r.runs[0].T_detected, r.runs[0].T_predicted, 0.1 * r.runs[0].T_predicted);
}

TEST(Revival, DetectionGrowsWithRingSize) {
  ModelParams p;
  const RevivalResult r = run_revival(p, {100, 150, 200}, 0, {}, false);
  ASSERT_TRUE(r.runs[0].n_detected && r.runs[1].n_detected && r.runs[2].n_detected);
  EXPECT_LT(*r.runs[0].n_detected, *r.runs[1].n_detected);
  EXPECT_LT(*r.runs[1].n_detected, *r.runs[2].n_detected);
}
