#include <gtest/gtest.h>

#include <cmath>

#include "spinchain/ergodicity.hpp"

using namespace spinchain;

TEST(Ergodicity, AveragedField) {
  ModelParams p;
  EXPECT_DOUBLE_EQ(averaged_field(p), 0.7);
  p.a = p.b = 0.9;
  EXPECT_DOUBLE_EQ(averaged_field(p), 0.9);
  p.a = 0.0;
  p.b = 1.4;
  EXPECT_DOUBLE_EQ(averaged_field(p), 0.7);
}

TEST(Ergodicity, LogBetaGrid) {
  const auto b = log_beta_grid();
  ASSERT_EQ(b.size(), 400u);
  EXPECT_NEAR(b.front(), 0.01, 1e-15);
  EXPECT_NEAR(b.back(), 40.0, 1e-12);
  for (std::size_t i = 1; i < b.size(); ++i) ASSERT_GT(b[i], b[i - 1]);
  EXPECT_THROW(log_beta_grid(0.0, 1.0, 10), DomainError);
}

TEST(Ergodicity, GibbsCurveInfiniteTemperatureEndpoint) {
  EXPECT_NEAR(gibbs_value(0.7, 0.0, Measure::Concurrence), 0.0, 1e-15);
  EXPECT_NEAR(gibbs_value(0.7, 0.0, Measure::Discord), 0.0, 1e-9);
}

TEST(Ergodicity, GibbsCurveRejectsUnsortedGrid) {
  EXPECT_THROW(gibbs_curve(0.7, {1.0, 0.5}, Measure::Concurrence), DomainError);
  EXPECT_THROW(gibbs_curve(0.7, {}, Measure::Concurrence), DomainError);
}

TEST(Ergodicity, ScoreClampsAtZero) {
  GibbsCurve c{0.7, Measure::Concurrence, {1.0, 2.0, 3.0}, {0.1, 0.3, 0.2}};
  const ErgodicityReport lo = ergodicity_score(0.25, c);
  EXPECT_EQ(lo.eta, 0.0);
  EXPECT_EQ(lo.Q_G_max, 0.3);
  EXPECT_EQ(lo.beta_at_max, 2.0);
  ASSERT_EQ(lo.intersections.size(), 2u);
  EXPECT_NEAR(lo.intersections[0], 1.75, 1e-15);
  EXPECT_NEAR(lo.intersections[1], 2.5, 1e-15);
  const ErgodicityReport hi = ergodicity_score(0.4, c);
  EXPECT_NEAR(hi.eta, 0.1, 1e-15);
  EXPECT_TRUE(hi.intersections.empty());
}

// With a = b and beta~ equal to the initial beta the canonical state is the
// initial state itself.
TEST(Ergodicity, GibbsMatchesInitialStateAtEqualFields) {
  ModelParams p;
  p.a = p.b = 0.9;
  p.beta = 5.0;
  for (Measure m : {Measure::Concurrence, Measure::Discord}) {
    const double g = gibbs_value(averaged_field(p), p.beta, m);
    const double s = evaluate(m, two_site_state(correlators_at_cycle(p, 0).value).rho);
    EXPECT_NEAR(g, s, 1e-9);
  }
}

// Stationary drive: the steady state is the initial Gibbs state, so the
// score is exactly zero.
TEST(Ergodicity, StationaryDriveIsErgodic) {
  ModelParams p;
  p.a = p.b = 0.7;
  const ErgodicityScan s = ergodicity_scan(p, {0.5, 1.0}, Measure::Discord, log_beta_grid(0.01, 40, 100));
  for (const auto& r : s.reports) EXPECT_EQ(r.eta, 0.0);
}

TEST(Ergodicity, MaxInsensitiveToGridDoubling) {
  for (Measure m : {Measure::Concurrence, Measure::Discord}) {
    const GibbsCurve a = gibbs_curve(0.7, log_beta_grid(0.01, 40, 400), m);
    const GibbsCurve b = gibbs_curve(0.7, log_beta_grid(0.01, 40, 799), m);
    EXPECT_NEAR(curve_max(a).value, curve_max(b).value, 1e-6) << measure_name(m);
  }
}

TEST(Ergodicity, CriticalTauBookkeeping) {
  std::vector<ErgodicityReport> r(4);
  const double taus[] = {0.5, 1.0, 1.5, 2.0}, etas[] = {0.1, 0.05, 0.0, 0.0};
  for (int i = 0; i < 4; ++i) {
    r[i].tau = taus[i];
    r[i].eta = etas[i];
  }
  ASSERT_TRUE(critical_tau(r).has_value());
  EXPECT_DOUBLE_EQ(*critical_tau(r), 1.25);
  for (auto& x : r) x.eta = 0.0;
  EXPECT_FALSE(critical_tau(r).has_value());
}

TEST(Ergodicity, CriticalBBookkeeping) {
  std::vector<BSweepPoint> pts{{0.0, false, 0.1}, {0.4, false, 0.02}, {0.8, true, 0.0}, {1.2, true, 0.0}};
  ASSERT_TRUE(critical_b(pts).has_value());
  EXPECT_DOUBLE_EQ(*critical_b(pts), 0.6);
  pts[0].ergodic = pts[1].ergodic = true;
  EXPECT_FALSE(critical_b(pts).has_value());
}
