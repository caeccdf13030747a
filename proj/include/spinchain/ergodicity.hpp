#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "spinchain/evolution.hpp"
#include "spinchain/measures.hpp"
#include "spinchain/optimize.hpp"
#include "spinchain/parallel.hpp"

namespace spinchain {

enum class Measure { Concurrence, Discord };

inline const char* measure_name(Measure m) { return m == Measure::Concurrence ? "concurrence" : "discord"; }

inline double evaluate(Measure m, const Mat4& rho) {
  return m == Measure::Concurrence ? concurrence(rho) : quantum_discord(rho);
}

/// Period average of the square pulse (equal half-cycles).
inline double averaged_field(const ModelParams& p) { return 0.5 * (p.a + p.b); }

struct GibbsCurve {
  double hbar0 = 0.0;
  Measure measure = Measure::Concurrence;
  std::vector<double> betas;
  std::vector<double> values;
};

/// Logarithmic grid in J beta.
inline std::vector<double> log_beta_grid(double lo = 0.01, double hi = 40.0, int points = 400) {
  if (!(lo > 0.0 && hi > lo && points >= 2)) throw DomainError("log_beta_grid: bad range");
  std::vector<double> b(points);
  const double r = std::log(hi / lo);
  for (int i = 0; i < points; ++i) b[i] = lo * std::exp(r * i / (points - 1));
  return b;
}

/// Canonical two-site measure at inverse temperature beta and field h.
inline double gibbs_value(double h, double beta, Measure m, double gamma = 1.0, double J = 1.0,
                          const QuadratureControl& qc = {}) {
  return evaluate(m, two_site_state(thermal_correlators(h, beta, gamma, J, qc).value).rho);
}

inline GibbsCurve gibbs_curve(double hbar0, const std::vector<double>& betas, Measure m, double gamma = 1.0,
                              double J = 1.0, const QuadratureControl& qc = {}) {
  if (betas.empty()) throw DomainError("gibbs_curve: empty beta grid");
  for (std::size_t i = 1; i < betas.size(); ++i)
    if (!(betas[i] > betas[i - 1])) throw DomainError("gibbs_curve: betas must increase strictly");
  GibbsCurve c{hbar0, m, betas, std::vector<double>(betas.size())};
  parallel_for(betas.size(), [&](std::size_t i) { c.values[i] = gibbs_value(hbar0, betas[i], m, gamma, J, qc); });
  return c;
}

struct CurveMax {
  double beta = 0.0;
  double value = 0.0;
};

/// Global max over the grid, refined by golden section in log beta between
/// the neighbours of the discrete argmax. Lowest beta wins ties.
inline CurveMax curve_max(const GibbsCurve& c, double gamma = 1.0, double J = 1.0, const QuadratureControl& qc = {}) {
  std::size_t k = 0;
  for (std::size_t i = 1; i < c.values.size(); ++i)
    if (c.values[i] > c.values[k]) k = i;
  CurveMax best{c.betas[k], c.values[k]};
  if (k == 0 || k + 1 == c.values.size()) return best;
  auto f = [&](double lb) { return -gibbs_value(c.hbar0, std::exp(lb), c.measure, gamma, J, qc); };
  const auto [x, fx] = golden_section(f, std::log(c.betas[k - 1]), std::log(c.betas[k + 1]), 1e-7);
  if (-fx > best.value) best = {std::exp(x), -fx};
  return best;
}

struct ErgodicityReport {
  double tau = 0.0;
  double Q_S = 0.0;
  double Q_G_max = 0.0;
  double beta_at_max = 0.0;
  double eta = 0.0;
  std::vector<double> intersections;  // beta where the canonical curve crosses Q_S
};

inline ErgodicityReport ergodicity_score(double Q_S, const GibbsCurve& curve, const CurveMax& mx) {
  ErgodicityReport r;
  r.Q_S = Q_S;
  r.Q_G_max = mx.value;
  r.beta_at_max = mx.beta;
  r.eta = std::max(0.0, Q_S - mx.value);
  for (std::size_t i = 1; i < curve.values.size(); ++i) {
    const double u = curve.values[i - 1] - Q_S, v = curve.values[i] - Q_S;
    if ((u < 0.0 && v >= 0.0) || (u >= 0.0 && v < 0.0)) {
      const double t = u / (u - v);
      r.intersections.push_back(curve.betas[i - 1] + t * (curve.betas[i] - curve.betas[i - 1]));
    }
  }
  return r;
}

inline ErgodicityReport ergodicity_score(double Q_S, const GibbsCurve& curve) {
  std::size_t k = 0;
  for (std::size_t i = 1; i < curve.values.size(); ++i)
    if (curve.values[i] > curve.values[k]) k = i;
  return ergodicity_score(Q_S, curve, CurveMax{curve.betas[k], curve.values[k]});
}

inline double steady_value(const ModelParams& p, Measure m, const QuadratureControl& qc = {}) {
  return evaluate(m, two_site_state(steady_state_correlators(p, qc).value).rho);
}

/// Midpoint of the first positive-to-zero step of eta along the tau grid.
inline std::optional<double> critical_tau(const std::vector<ErgodicityReport>& reports) {
  for (std::size_t i = 1; i < reports.size(); ++i)
    if (reports[i - 1].eta > 0.0 && reports[i].eta == 0.0) return 0.5 * (reports[i - 1].tau + reports[i].tau);
  return std::nullopt;
}

struct ErgodicityScan {
  Measure measure = Measure::Concurrence;
  double hbar0 = 0.0;
  CurveMax gibbs_max;
  std::vector<ErgodicityReport> reports;
  std::optional<double> tau_c;  // first tau where eta vanishes after a positive run
};

/// eta(tau) over a tau grid at fixed (a, b, beta, gamma, J).
inline ErgodicityScan ergodicity_scan(const ModelParams& base, const std::vector<double>& taus, Measure m,
                                      const std::vector<double>& betas = log_beta_grid(),
                                      const QuadratureControl& qc = {}) {
  ErgodicityScan s;
  s.measure = m;
  s.hbar0 = averaged_field(base);
  const GibbsCurve curve = gibbs_curve(s.hbar0, betas, m, base.gamma, base.J, qc);
  s.gibbs_max = curve_max(curve, base.gamma, base.J, qc);
  s.reports.resize(taus.size());
  parallel_for(taus.size(), [&](std::size_t i) {
    ModelParams p = base;
    p.tau = taus[i];
    s.reports[i] = ergodicity_score(steady_value(p, m, qc), curve, s.gibbs_max);
    s.reports[i].tau = taus[i];
  });
  s.tau_c = critical_tau(s.reports);
  return s;
}

inline bool all_ergodic(const ErgodicityScan& s) {
  return std::all_of(s.reports.begin(), s.reports.end(), [](const ErgodicityReport& r) { return r.eta == 0.0; });
}

struct BSweepPoint {
  double b = 0.0;
  bool ergodic = false;  // eta == 0 on the whole tau grid
  double max_eta = 0.0;
};

struct BSweep {
  std::vector<BSweepPoint> points;
  std::optional<double> b_c;  // smallest b from which eta vanishes for every tau
};

/// Midpoint before the trailing run of fully ergodic b values, provided a
/// non-ergodic value precedes it.
inline std::optional<double> critical_b(const std::vector<BSweepPoint>& pts) {
  std::size_t i = pts.size();
  while (i > 0 && pts[i - 1].ergodic) --i;
  if (i > 0 && i < pts.size()) return 0.5 * (pts[i - 1].b + pts[i].b);
  return std::nullopt;
}

inline BSweep b_sweep(const ModelParams& base, const std::vector<double>& bs, const std::vector<double>& taus,
                      Measure m, const std::vector<double>& betas = log_beta_grid(),
                      const QuadratureControl& qc = {}) {
  BSweep out;
  for (double b : bs) {
    ModelParams p = base;
    p.b = b;
    const ErgodicityScan s = ergodicity_scan(p, taus, m, betas, qc);
    double me = 0.0;
    for (const auto& r : s.reports) me = std::max(me, r.eta);
    out.points.push_back({b, me == 0.0, me});
  }
  out.b_c = critical_b(out.points);
  return out;
}

}  // namespace spinchain
