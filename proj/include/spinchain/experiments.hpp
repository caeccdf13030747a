#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "spinchain/ed_oracle.hpp"
#include "spinchain/ergodicity.hpp"
#include "spinchain/evolution.hpp"
#include "spinchain/floquet.hpp"
#include "spinchain/measures.hpp"
#include "spinchain/parallel.hpp"
#include "spinchain/parity.hpp"
#include "spinchain/revival.hpp"

namespace spinchain {

/// Ordinary least squares y = c0 + c1 x.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("fit_line: need >= 2 matching points");
  const double k = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = k * sxx - sx * sx;
  if (den == 0.0) throw DomainError("fit_line: degenerate abscissa");
  const double s = (k * sxy - sx * sy) / den;
  return {(sy - s * sx) / k, s};
}

struct MeasurePair {
  double C = 0.0;
  double D = 0.0;
};

/// Concurrence and discord per state, evaluated in parallel.
inline std::vector<MeasurePair> measure_series(const std::vector<CorrelatorSet>& cs, bool with_discord = true) {
  std::vector<MeasurePair> out(cs.size());
  parallel_for(cs.size(), [&](std::size_t i) {
    const Mat4 rho = two_site_state(cs[i]).rho;
    out[i].C = concurrence(rho);
    out[i].D = with_discord ? quantum_discord(rho) : 0.0;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Revival

struct RevivalRun {
  int N = 0;
  std::vector<MeasurePair> series;  // index = cycle
  std::optional<long long> n_detected;
  double T_detected = 0.0;  // n_detected * tau, NaN when nothing was found
  double T_predicted = 0.0;
};

struct RevivalResult {
  ModelParams params;
  double vmax = 0.0;
  double slope_predicted = 0.0;  // 1 / (2 vmax)
  std::optional<double> slope_detected;
  std::vector<RevivalRun> runs;
};

/// Cycles needed to cover the predicted revival of the largest ring with margin.
inline long long revival_n_max(const std::vector<int>& Ns, const ModelParams& p) {
  const int nmax = *std::max_element(Ns.begin(), Ns.end());
  return static_cast<long long>(std::ceil(1.6 * revival_time(nmax, p) / p.tau)) + 60;
}

inline RevivalResult run_revival(const ModelParams& p, const std::vector<int>& Ns, long long n_max = 0,
                                 const RevivalOptions& ro = {}, bool with_discord = true) {
  if (Ns.empty()) throw DomainError("revival: empty N list");
  p.validate();
  RevivalResult r;
  r.params = p;
  r.vmax = max_group_velocity(p);
  r.slope_predicted = r.vmax > 1e-12 ? 0.5 / r.vmax : std::numeric_limits<double>::infinity();
  if (n_max <= 0) n_max = r.vmax > 1e-12 ? revival_n_max(Ns, p) : 1000;
  std::vector<double> xs, ys;
  for (int N : Ns) {
    RevivalRun run;
    run.N = N;
    run.series = measure_series(correlator_series(p, finite_kgrid(N), n_max), with_discord);
    std::vector<double> c(run.series.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = run.series[i].C;
    run.n_detected = detect_revival(c, ro);
    run.T_detected = run.n_detected ? static_cast<double>(*run.n_detected) * p.tau : std::nan("");
    run.T_predicted = r.vmax > 1e-12 ? N * r.slope_predicted : std::numeric_limits<double>::infinity();
    if (run.n_detected) {
      xs.push_back(N);
      ys.push_back(run.T_detected);
    }
    r.runs.push_back(std::move(run));
  }
  if (xs.size() >= 2) r.slope_detected = fit_line(xs, ys).slope;
  return r;
}

// ---------------------------------------------------------------------------
// Relaxation

struct RelaxRun {
  double tau = 0.0;
  int nodes = 0;
  std::vector<MeasurePair> series;
  std::vector<double> d;
  MeasurePair steady;
  std::optional<PowerLawFit> fit;
  std::string fit_error;
};

struct RelaxOptions {
  long long n_max = 5000;
  int nodes = 0;  // 0: converged at n_max
  bool measures = true;
  bool trace_half = false;
  FitOptions fit;
  QuadratureControl qc;
};

inline RelaxRun run_relax(const ModelParams& p, const RelaxOptions& o = {}) {
  p.validate();
  RelaxRun r;
  r.tau = p.tau;
  r.nodes = o.nodes > 0 ? o.nodes : series_nodes(p, o.n_max, o.qc);
  const KGrid g = thermo_kgrid(r.nodes);
  const std::vector<CorrelatorSet> cs = correlator_series(p, g, o.n_max);
  const Mat4 rs = two_site_state(steady_state_correlators(p, g)).rho;
  r.steady = {concurrence(rs), o.measures ? quantum_discord(rs) : 0.0};
  r.d.resize(cs.size());
  parallel_for(cs.size(), [&](std::size_t i) { r.d[i] = trace_distance(two_site_state(cs[i]).rho, rs, o.trace_half); });
  r.series = o.measures ? measure_series(cs) : std::vector<MeasurePair>(cs.size());
  std::vector<double> ns(cs.size());
  for (std::size_t i = 0; i < ns.size(); ++i) ns[i] = static_cast<double>(i);
  try {
    r.fit = fit_power_law(ns, r.d, o.fit);
  } catch (const ConvergenceError& e) {
    r.fit_error = e.what();
  }
  return r;
}

// ---------------------------------------------------------------------------
// Steady-state sweep

struct SweepPoint {
  double tau = 0.0;
  double Cs = 0.0, Ds = 0.0, purity = 0.0;
  double min_zone_gap = 0.0;
  int nodes = 0;
};

struct Kink {
  double tau = 0.0;
  std::string measure;
  double curvature = 0.0;  // |second difference|
  std::optional<double> crossing_tau;  // nearest closed band crossing within the match window
};

struct SweepResult {
  ModelParams params;
  std::vector<SweepPoint> points;
  std::vector<BandCrossing> crossings;
  std::vector<Kink> kinks;
};

struct KinkOptions {
  double factor = 20.0;        // multiple of the median |second difference|
  double abs_floor = 1e-6;     // below this nothing is a kink
  double match_window = 0.5;   // tau distance to a flagged crossing
};

/// Strict local maxima of |second difference| above max(factor * median, floor).
inline std::vector<std::size_t> detect_kinks(const std::vector<double>& y, const KinkOptions& o = {}) {
  const std::size_t n = y.size();
  std::vector<std::size_t> out;
  if (n < 5) return out;
  std::vector<double> c(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) c[i] = std::abs(y[i + 1] - 2.0 * y[i] + y[i - 1]);
  std::vector<double> inner(c.begin() + 1, c.end() - 1);
  std::nth_element(inner.begin(), inner.begin() + inner.size() / 2, inner.end());
  const double thr = std::max(o.factor * inner[inner.size() / 2], o.abs_floor);
  for (std::size_t i = 2; i + 2 < n; ++i)
    if (c[i] > thr && c[i] > c[i - 1] && c[i] >= c[i + 1]) out.push_back(i);
  return out;
}

inline SweepResult run_sweep(const ModelParams& base, const std::vector<double>& taus, int nodes = 0,
                             const KinkOptions& ko = {}, const QuadratureControl& qc = {}) {
  if (taus.size() < 3) throw DomainError("sweep: need >= 3 tau points");
  base.validate();
  SweepResult r;
  r.params = base;
  r.points.resize(taus.size());
  parallel_for(taus.size(), [&](std::size_t i) {
    ModelParams p = base;
    p.tau = taus[i];
    SweepPoint& s = r.points[i];
    s.tau = taus[i];
    CorrelatorSet c;
    if (nodes > 0) {
      c = steady_state_correlators(p, thermo_kgrid(nodes));
      s.nodes = nodes;
    } else {
      const Converged cv = steady_state_correlators(p, qc);
      c = cv.value;
      s.nodes = cv.nodes;
    }
    const Mat4 rho = two_site_state(c).rho;
    s.Cs = concurrence(rho);
    s.Ds = quantum_discord(rho);
    s.purity = purity(rho);
    s.min_zone_gap = zone_gap(p).gap;
  });
  r.crossings = band_crossings(base, taus);
  auto add = [&](const char* name, auto get) {
    std::vector<double> y(taus.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = get(r.points[i]);
    std::vector<double> c(taus.size(), 0.0);
    for (std::size_t i : detect_kinks(y, ko)) {
      Kink k{taus[i], name, std::abs(y[i + 1] - 2.0 * y[i] + y[i - 1]), std::nullopt};
      double best = ko.match_window;
      for (const auto& bc : r.crossings)
        if (bc.closed && std::abs(bc.tau - k.tau) <= best) {
          best = std::abs(bc.tau - k.tau);
          k.crossing_tau = bc.tau;
        }
      r.kinks.push_back(k);
    }
  };
  add("C_s", [](const SweepPoint& s) { return s.Cs; });
  add("D_s", [](const SweepPoint& s) { return s.Ds; });
  std::stable_sort(r.kinks.begin(), r.kinks.end(), [](const Kink& x, const Kink& y) { return x.tau < y.tau; });
  return r;
}

// ---------------------------------------------------------------------------
// Finite-ring oracle comparison

/// Largest deviation over mz and the nearest-neighbour tensor between the
/// single-sector momentum route and exact diagonalisation.
inline double oracle_discrepancy(const CorrelatorSet& m, const ed::EdCorrelators& e) {
  return std::max({std::abs(m.mz - e.mz), std::abs(m.txx - e.txx), std::abs(m.tyy - e.tyy), std::abs(m.tzz - e.tzz),
                   std::abs(m.txy - e.txy), std::abs(m.txy - e.tyx)});
}

inline double oracle_discrepancy(const CorrelatorSet& m, const CorrelatorSet& e) {
  return std::max({std::abs(m.mz - e.mz), std::abs(m.txx - e.txx), std::abs(m.tyy - e.tyy), std::abs(m.tzz - e.tzz),
                   std::abs(m.txy - e.txy)});
}

struct OracleTuple {
  ModelParams p;
  long long n = 0;
};

/// Fixed-seed draws over a, b in [0, 2.4], tau in [0.1, 2.5], beta in [1, 20],
/// n in [0, 20].
inline std::vector<OracleTuple> random_oracle_tuples(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> fa(0.0, 2.4), ft(0.1, 2.5), fb(1.0, 20.0);
  std::uniform_int_distribution<int> fn(0, 20);
  std::vector<OracleTuple> out;
  for (int i = 0; i < count; ++i) {
    OracleTuple t;
    t.p.a = fa(rng);
    t.p.b = fa(rng);
    t.p.tau = ft(rng);
    t.p.beta = fb(rng);
    t.n = fn(rng);
    out.push_back(t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation suite

struct Check {
  std::string name;
  double value = 0.0;  // observed deviation or statistic
  double tol = 0.0;
  bool pass = false;
};

struct ValidateReport {
  std::vector<Check> checks;
  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
};

struct ValidateOptions {
  int N = 8;
  std::uint64_t seed = 20240607;
  int random_states = 200;
  QuadratureControl qc;
};

namespace detail {

inline Mat4 random_density(std::mt19937_64& rng, int rank = 4) {
  std::normal_distribution<double> g;
  Eigen::Matrix<cplx, 4, Eigen::Dynamic> A(4, rank);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < rank; ++j) A(i, j) = cplx(g(rng), g(rng));
  Mat4 r = A * A.adjoint();
  return r / r.trace().real();
}

inline Mat2 random_unitary2(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Matrix2cd A;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) A(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<Eigen::Matrix2cd> qr(A);
  return qr.householderQ();
}

inline Mat2 random_density2(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Matrix2cd A;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) A(i, j) = cplx(g(rng), g(rng));
  Mat2 r = A * A.adjoint();
  return r / r.trace().real();
}

inline ModelParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> fa(0.0, 2.4), ft(0.1, 2.5), fb(0.5, 20.0), fg(0.2, 1.0);
  ModelParams p;
  p.a = fa(rng);
  p.b = fa(rng);
  p.tau = ft(rng);
  p.beta = fb(rng);
  p.gamma = fg(rng);
  return p;
}

}  // namespace detail

/// Invariant suite plus oracle comparisons at ring size o.N. Throws
/// ResourceError before doing any work if N exceeds the oracle limit.
inline ValidateReport run_validate(const ModelParams& base, const ValidateOptions& o = {}) {
  ed::check_size(o.N, 4);
  base.validate();
  ValidateReport rep;
  auto add = [&](std::string name, double value, double tol) {
    rep.checks.push_back({std::move(name), value, tol, value <= tol});
  };
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> uphi(0.0, kPi);

  // unitarity of the cycle operator and of its k-space powers
  {
    double dev = 0.0;
    for (int i = 0; i < o.random_states; ++i) {
      const ModelParams p = detail::random_params(rng);
      const FloquetData f = floquet_unitary(uphi(rng), p);
      dev = std::max(dev, (f.U * f.U.adjoint() - Mat2::Identity()).cwiseAbs().maxCoeff());
      const Mat2 un = su2_power(f, 1 + static_cast<long long>(uphi(rng) * 500));
      dev = std::max(dev, (un * un.adjoint() - Mat2::Identity()).cwiseAbs().maxCoeff());
    }
    add("unitarity", dev, 1e-12);
  }

  // trace, Hermiticity, positivity of evolved blocks and two-site states
  {
    double tr = 0.0, herm = 0.0, neg = 0.0;
    for (int i = 0; i < o.random_states; ++i) {
      const ModelParams p = detail::random_params(rng);
      const double phi = uphi(rng);
      const BlockState s0 = thermal_block(phi, p.a, p.beta, p.gamma, p.J);
      const BlockState s = evolve(s0, floquet_unitary(phi, p), 1 + static_cast<long long>(uphi(rng) * 300));
      tr = std::max(tr, std::abs(s.rho.trace() - 1.0));
      herm = std::max(herm, (s.rho - s.rho.adjoint()).cwiseAbs().maxCoeff());
      neg = std::max(neg, -std::min(0.0, Eigen::SelfAdjointEigenSolver<Mat4>(s.rho).eigenvalues().minCoeff()));
    }
    for (int i = 0; i < 20; ++i) {
      const ModelParams p = detail::random_params(rng);
      const long long n = static_cast<long long>(uphi(rng) * 100);
      const Mat4 r = two_site_state(correlators_at_cycle(p, thermo_kgrid(4096), n)).rho;
      tr = std::max(tr, std::abs(r.trace() - 1.0));
      herm = std::max(herm, (r - r.adjoint()).cwiseAbs().maxCoeff());
      neg = std::max(neg, -std::min(0.0, Eigen::SelfAdjointEigenSolver<Mat4>(r).eigenvalues().minCoeff()));
    }
    add("trace preservation", tr, 1e-12);
    add("hermiticity preservation", herm, 1e-12);
    add("positivity preservation", neg, 1e-10);
  }

  // a = b: the initial Gibbs state is stationary
  {
    double dev = 0.0, dev_ed = 0.0;
    for (int i = 0; i < 5; ++i) {
      ModelParams p = detail::random_params(rng);
      p.b = p.a;
      const KGrid g = thermo_kgrid(1024);
      const CorrelatorSet c0 = correlators_at_cycle(p, g, 0);
      for (long long n : {1LL, 17LL, 250LL, 5000LL}) dev = std::max(dev, max_abs_diff(c0, correlators_at_cycle(p, g, n)));
      const ed::MomentumOracle orc(o.N, p);
      const auto e = orc.series({0, 3, 40});
      for (const auto& x : e)
        for (int pp = 0; pp < 4; ++pp)
          for (int qq = 0; qq < 4; ++qq) dev_ed = std::max(dev_ed, std::abs(x.table[pp][qq] - e[0].table[pp][qq]));
    }
    add("a=b stationarity", dev, 1e-12);
    // dense matrix powers carry O(n eps) rounding
    add("a=b stationarity (ED oracle)", dev_ed, 1e-10);
  }

  // measure bounds
  {
    double viol = 0.0;
    for (int i = 0; i < o.random_states / 4; ++i) {
      std::uniform_int_distribution<int> rk(1, 4);
      const Mat4 r = detail::random_density(rng, rk(rng));
      const double C = concurrence(r), D = quantum_discord(r), P = purity(r);
      viol = std::max({viol, -C, C - 1.0, -D, 0.25 - P, P - 1.0});
    }
    add("measure bounds", std::max(0.0, viol), 1e-9);
  }

  // local-unitary invariance of concurrence
  {
    double dev = 0.0;
    for (int i = 0; i < o.random_states / 4; ++i) {
      const Mat4 r = detail::random_density(rng, 2);
      const Mat4 u = kron(detail::random_unitary2(rng), detail::random_unitary2(rng));
      dev = std::max(dev, std::abs(concurrence(r) - concurrence(u * r * u.adjoint())));
    }
    add("concurrence local-unitary invariance", dev, 1e-10);
  }

  // discord on product states
  {
    double dmax = 0.0;
    for (int i = 0; i < 20; ++i)
      dmax = std::max(dmax, std::abs(quantum_discord(kron(detail::random_density2(rng), detail::random_density2(rng)))));
    add("discord of product states", dmax, 1e-8);
  }

  // dephased steady state vs long evolution
  {
    double dev = 0.0;
    for (double tau : {0.3, 0.7, 0.9, 1.5}) {
      ModelParams p = base;
      p.tau = tau;
      const CorrelatorSet s = steady_state_correlators(p, o.qc).value;
      const CorrelatorSet c = correlators_at_cycle(p, 2000, o.qc).value;
      dev = std::max(dev, max_abs_diff(s, c));
    }
    add("steady state vs n=2000", dev, 1e-3);
  }

  // quadrature doubling stability
  {
    double dev = 0.0;
    ModelParams p = base;
    const Converged c = correlators_at_cycle(p, 100, o.qc);
    dev = std::max(dev, max_abs_diff(c.value, correlators_at_cycle(p, thermo_kgrid(2 * c.nodes), 100)));
    const Converged t = thermal_correlators(averaged_field(p), p.beta, p.gamma, p.J, o.qc);
    dev = std::max(dev, max_abs_diff(t.value, thermal_correlators(averaged_field(p), p.beta, thermo_kgrid(2 * t.nodes),
                                                                  p.gamma, p.J)));
    add("quadrature doubling stability", dev, 1e-9);
  }

  // oracle comparisons at ring size N
  {
    const std::vector<long long> ns{0, 1, 5, 10, 20};
    const ed::MomentumOracle orc(o.N, base);
    const auto ed = orc.series(ns);
    const KGrid g = finite_kgrid(o.N);
    double dev = 0.0, exact = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      dev = std::max(dev, oracle_discrepancy(correlators_at_cycle(base, g, ns[i]), ed[i]));
      exact = std::max(exact, oracle_discrepancy(parity::ring_correlators(o.N, base, ns[i]), ed[i]));
    }
    add("momentum route vs ED (N=" + std::to_string(o.N) + ")", dev, 0.1);
    add("parity-resolved ring vs ED (N=" + std::to_string(o.N) + ")", exact, 1e-9);
    if (o.N <= 8) {
      double dd = 0.0;
      for (std::size_t i = 0; i < 3; ++i) {
        const auto dn = ed::dense_two_site(o.N, base, ns[i]);
        dd = std::max(dd, oracle_discrepancy(parity::ring_correlators(o.N, base, ns[i]), dn));
      }
      add("dense ED vs momentum-sector ED (N=" + std::to_string(o.N) + ")", dd, 1e-9);
    }

    // mutation: flipping the sign of the pairing amplitude must be caught as
    // a txx mismatch
    ModelParams bad = base;
    bad.gamma = -base.gamma;
    double txx = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i)
      txx = std::max(txx, std::abs(correlators_at_cycle(bad, g, ns[i]).txx - ed[i].txx));
    rep.checks.push_back({"mutation (pairing sign flip) detected by txx", txx, 0.1, txx > 0.1});
  }
  return rep;
}

}  // namespace spinchain
