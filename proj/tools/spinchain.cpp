// spinchain: experiment driver for the driven XY chain.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinchain/experiments.hpp"
#include "spinchain/io.hpp"

namespace fs = std::filesystem;
using namespace spinchain;
using io::fmt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitTolerance = 2;
constexpr int kExitResource = 3;

struct Flags {
  std::string config;
  std::optional<double> a, b, tau, beta;
  std::optional<long long> n_max;
  std::optional<int> nodes, threads;
  std::optional<std::string> N, out;
  std::vector<std::string> set;
};

/// Per-command defaults, then the config file, then flags. Flags win.
io::KeyValues merged(const std::string& command, const Flags& f) {
  io::KeyValues kv;
  io::KeyValues file = f.config.empty() ? io::KeyValues{} : io::read_config_file(f.config);
  auto put = [&](const std::string& k, const std::string& v) { file[k] = v; };
  if (f.a) put("a", fmt(*f.a));
  if (f.b) put("b", fmt(*f.b));
  if (f.beta) put("beta", fmt(*f.beta));
  if (f.n_max) put("n_max", std::to_string(*f.n_max));
  if (f.nodes) put("nodes", std::to_string(*f.nodes));
  if (f.threads) put("threads", std::to_string(*f.threads));
  if (f.N) put("N", *f.N);
  if (f.out) put("out", *f.out);
  for (const auto& s : f.set) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw DomainError("--set expects key=value, got '" + s + "'");
    put(io::trim(s.substr(0, eq)), io::trim(s.substr(eq + 1)));
  }
  if (f.tau) {
    put("tau", fmt(*f.tau));
    put("taus", fmt(*f.tau));
  }
  const bool user_tau = file.count("tau") || file.count("taus");
  if (command == "relax") {
    kv["n_max"] = "5000";
    if (!user_tau) kv["taus"] = "0.3,0.7,0.9,2.0,2.5";
  } else if (command == "sweep") {
    if (!user_tau) kv["taus"] = "0.1:30:0.05";
  } else if (command == "ergodicity") {
    if (!user_tau) kv["taus"] = "0.05:3:0.05";
  } else if (command == "validate") {
    kv["N"] = "8";
  }
  for (const auto& [k, v] : file) kv[k] = v;
  return kv;
}

nlohmann::json cmd_revival(const io::RunConfig& c, std::vector<std::string>& files) {
  const RevivalResult r = run_revival(c.params, c.Ns, c.n_max, c.revival, c.measures);
  const fs::path dir(c.out);
  {
    io::CsvWriter w(dir / "revival.csv", {"N [sites]", "n [cycles]", "C [ebits]", "D [bits]"});
    for (const auto& run : r.runs)
      for (std::size_t n = 0; n < run.series.size(); ++n)
        w.row({std::to_string(run.N), std::to_string(n), fmt(run.series[n].C), fmt(run.series[n].D)});
  }
  {
    io::CsvWriter w(dir / "revival_summary.csv",
                    {"N [sites]", "n_detected [cycles]", "T_r_detected [hbar/J]", "T_r_predicted [hbar/J]"});
    for (const auto& run : r.runs)
      w.row({std::to_string(run.N), run.n_detected ? std::to_string(*run.n_detected) : "nan", fmt(run.T_detected),
             fmt(run.T_predicted)});
  }
  files.insert(files.end(), {"revival.csv", "revival_summary.csv"});
  nlohmann::json s;
  s["vmax"] = r.vmax;
  s["slope_predicted"] = r.slope_predicted;
  s["slope_detected"] = r.slope_detected ? nlohmann::json(*r.slope_detected) : nlohmann::json();
  for (const auto& run : r.runs) {
    std::cout << "N=" << run.N << "  T_r detected " << fmt(run.T_detected) << "  predicted " << fmt(run.T_predicted)
              << '\n';
  }
  std::cout << "slope detected " << (r.slope_detected ? fmt(*r.slope_detected) : "n/a") << "  predicted "
            << fmt(r.slope_predicted) << '\n';
  return s;
}

nlohmann::json cmd_relax(const io::RunConfig& c, std::vector<std::string>& files) {
  RelaxOptions o;
  o.n_max = c.n_max;
  o.nodes = c.nodes;
  o.measures = c.measures;
  o.trace_half = c.trace_half;
  o.fit = c.fit;
  o.qc = c.qc;
  const fs::path dir(c.out);
  io::CsvWriter series(dir / "relax.csv", {"tau [hbar/J]", "n [cycles]", "C [ebits]", "D [bits]", "d [trace norm]"});
  io::CsvWriter fits(dir / "relax_fit.csv", {"tau [hbar/J]", "nodes [count]", "A [trace norm]", "B [1]",
                                             "n_min [cycles]", "n_max [cycles]", "residual [log]", "blocks [count]",
                                             "C_s [ebits]", "D_s [bits]"});
  nlohmann::json s = nlohmann::json::array();
  for (double tau : c.taus) {
    ModelParams p = c.params;
    p.tau = tau;
    const RelaxRun r = run_relax(p, o);
    for (std::size_t n = 0; n < r.d.size(); ++n)
      series.row({fmt(tau), std::to_string(n), fmt(r.series[n].C), fmt(r.series[n].D), fmt(r.d[n])});
    if (r.fit) {
      const auto& f = *r.fit;
      fits.row({fmt(tau), std::to_string(r.nodes), fmt(f.A), fmt(f.B), fmt(f.n_min), fmt(f.n_max), fmt(f.residual),
                std::to_string(f.points), fmt(r.steady.C), fmt(r.steady.D)});
      std::cout << "tau=" << fmt(tau) << "  B=" << fmt(f.B) << "  A=" << fmt(f.A) << "  nodes=" << r.nodes << '\n';
      s.push_back({{"tau", tau}, {"A", f.A}, {"B", f.B}, {"nodes", r.nodes}});
    } else {
      fits.row({fmt(tau), std::to_string(r.nodes), "nan", "nan", "nan", "nan", "nan", "0", fmt(r.steady.C),
                fmt(r.steady.D)});
      std::cout << "tau=" << fmt(tau) << "  fit: " << r.fit_error << '\n';
      s.push_back({{"tau", tau}, {"fit_error", r.fit_error}, {"nodes", r.nodes}});
    }
  }
  files.insert(files.end(), {"relax.csv", "relax_fit.csv"});
  return s;
}

nlohmann::json cmd_sweep(const io::RunConfig& c, std::vector<std::string>& files) {
  const SweepResult r = run_sweep(c.params, c.taus, c.nodes, c.kink, c.qc);
  const fs::path dir(c.out);
  {
    io::CsvWriter w(dir / "sweep.csv", {"tau [hbar/J]", "C_s [ebits]", "D_s [bits]", "purity [1]",
                                        "min_zone_gap [rad]", "nodes [count]"});
    for (const auto& p : r.points)
      w.row({fmt(p.tau), fmt(p.Cs), fmt(p.Ds), fmt(p.purity), fmt(p.min_zone_gap), std::to_string(p.nodes)});
  }
  {
    io::CsvWriter w(dir / "sweep_crossings.csv", {"tau [hbar/J]", "phi [rad]", "gap [rad]", "closed [bool]"});
    for (const auto& x : r.crossings) w.row({fmt(x.tau), fmt(x.phi), fmt(x.gap), x.closed ? "1" : "0"});
  }
  {
    io::CsvWriter w(dir / "sweep_kinks.csv",
                    {"tau [hbar/J]", "measure [name]", "curvature [1]", "crossing_tau [hbar/J]"});
    for (const auto& k : r.kinks)
      w.row({fmt(k.tau), k.measure, fmt(k.curvature), k.crossing_tau ? fmt(*k.crossing_tau) : "nan"});
  }
  files.insert(files.end(), {"sweep.csv", "sweep_crossings.csv", "sweep_kinks.csv"});
  nlohmann::json s;
  s["closed_crossings"] = nlohmann::json::array();
  for (const auto& x : r.crossings)
    if (x.closed) {
      s["closed_crossings"].push_back(x.tau);
      std::cout << "band crossing at tau=" << fmt(x.tau) << " phi=" << fmt(x.phi) << '\n';
    }
  s["kinks"] = nlohmann::json::array();
  for (const auto& k : r.kinks) {
    s["kinks"].push_back({{"tau", k.tau}, {"measure", k.measure}, {"at_crossing", k.crossing_tau.has_value()}});
    std::cout << "kink in " << k.measure << " at tau=" << fmt(k.tau) << (k.crossing_tau ? " (band crossing)" : "")
              << '\n';
  }
  return s;
}

nlohmann::json cmd_ergodicity(const io::RunConfig& c, std::vector<std::string>& files) {
  std::vector<Measure> ms;
  if (c.measure != "discord") ms.push_back(Measure::Concurrence);
  if (c.measure != "concurrence") ms.push_back(Measure::Discord);
  const std::vector<double> betas = log_beta_grid(c.beta_min, c.beta_max, c.beta_points);
  const fs::path dir(c.out);
  nlohmann::json s;
  for (Measure m : ms) {
    const std::string name = measure_name(m);
    const ErgodicityScan scan = ergodicity_scan(c.params, c.taus, m, betas, c.qc);
    const GibbsCurve curve = gibbs_curve(scan.hbar0, betas, m, c.params.gamma, c.params.J, c.qc);
    const std::string unit = m == Measure::Concurrence ? " [ebits]" : " [bits]";
    {
      io::CsvWriter w(dir / ("gibbs_" + name + ".csv"), {"beta [1/J]", "Q_G" + unit});
      for (std::size_t i = 0; i < curve.betas.size(); ++i) w.row({fmt(curve.betas[i]), fmt(curve.values[i])});
    }
    {
      io::CsvWriter w(dir / ("ergodicity_" + name + ".csv"),
                      {"tau [hbar/J]", "Q_S" + unit, "Q_G_max" + unit, "beta_at_max [1/J]", "eta" + unit,
                       "intersections [count]", "beta_intersect_first [1/J]"});
      for (const auto& r : scan.reports)
        w.row({fmt(r.tau), fmt(r.Q_S), fmt(r.Q_G_max), fmt(r.beta_at_max), fmt(r.eta),
               std::to_string(r.intersections.size()), r.intersections.empty() ? "nan" : fmt(r.intersections[0])});
    }
    files.push_back("gibbs_" + name + ".csv");
    files.push_back("ergodicity_" + name + ".csv");
    double me = 0.0;
    for (const auto& r : scan.reports) me = std::max(me, r.eta);
    s[name] = {{"hbar0", scan.hbar0},
               {"Q_G_max", scan.gibbs_max.value},
               {"beta_at_max", scan.gibbs_max.beta},
               {"max_eta", me},
               {"tau_c", scan.tau_c ? nlohmann::json(*scan.tau_c) : nlohmann::json()}};
    std::cout << name << ": Q_G_max=" << fmt(scan.gibbs_max.value) << " at beta=" << fmt(scan.gibbs_max.beta)
              << "  max eta=" << fmt(me) << "  tau_c=" << (scan.tau_c ? fmt(*scan.tau_c) : "none") << '\n';
    if (!c.bs.empty()) {
      const BSweep bsw = b_sweep(c.params, c.bs, c.taus, m, betas, c.qc);
      io::CsvWriter w(dir / ("bsweep_" + name + ".csv"), {"b [J]", "max_eta" + unit, "ergodic [bool]"});
      for (const auto& p : bsw.points) w.row({fmt(p.b), fmt(p.max_eta), p.ergodic ? "1" : "0"});
      files.push_back("bsweep_" + name + ".csv");
      s[name]["b_c"] = bsw.b_c ? nlohmann::json(*bsw.b_c) : nlohmann::json();
      std::cout << name << ": b_c=" << (bsw.b_c ? fmt(*bsw.b_c) : "none") << '\n';
    }
  }
  return s;
}

nlohmann::json cmd_validate(const io::RunConfig& c, std::vector<std::string>& files, bool& ok) {
  if (c.Ns.size() != 1) throw DomainError("validate takes a single N");
  ValidateOptions o;
  o.N = c.Ns.front();
  o.seed = c.seed;
  o.qc = c.qc;
  const ValidateReport rep = run_validate(c.params, o);
  io::CsvWriter w(fs::path(c.out) / "validate.csv", {"check [name]", "value [1]", "tol [1]", "pass [bool]"});
  nlohmann::json s = nlohmann::json::array();
  for (const auto& ch : rep.checks) {
    w.row({"\"" + ch.name + "\"", fmt(ch.value), fmt(ch.tol), ch.pass ? "1" : "0"});
    std::cout << (ch.pass ? "PASS  " : "FAIL  ") << ch.name << "  value=" << fmt(ch.value) << "  tol=" << fmt(ch.tol)
              << '\n';
    s.push_back({{"check", ch.name}, {"value", ch.value}, {"tol", ch.tol}, {"pass", ch.pass}});
  }
  files.push_back("validate.csv");
  ok = rep.all_pass();
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floquet free-fermion simulator for two-site correlations in a driven XY chain"};
  app.set_version_flag("--version", SPINCHAIN_VERSION);
  app.require_subcommand(1);
  Flags f;
  const std::vector<std::pair<std::string, std::string>> cmds{
      {"revival", "finite-ring revivals of C(n) and their scaling with N"},
      {"relax", "relaxation of C, D and trace distance; power-law fits"},
      {"sweep", "steady-state C_s, D_s, purity and zone gap versus tau"},
      {"ergodicity", "canonical ergodicity scores versus tau (optional b-sweep)"},
      {"validate", "invariant suite and exact-diagonalisation comparisons"}};
  for (const auto& [name, help] : cmds) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", f.config, "key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--a", f.a, "field a/J in the first half-cycle");
    sub->add_option("--b", f.b, "field b/J in the second half-cycle");
    sub->add_option("--tau", f.tau, "period J tau / hbar");
    sub->add_option("--beta", f.beta, "initial inverse temperature J beta");
    sub->add_option("--n-max", f.n_max, "last stroboscopic cycle");
    sub->add_option("--nodes", f.nodes, "fixed quadrature nodes (default: converge)");
    sub->add_option("--N", f.N, "ring sizes, comma separated");
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--threads", f.threads, "worker threads (default: SPINCHAIN_THREADS or hardware)");
    sub->add_option("--set", f.set, "extra key=value, repeatable");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  io::RunConfig cfg;
  try {
    cfg = io::resolve(command, merged(command, f));
  } catch (const Error& e) {
    std::cerr << "spinchain: " << e.what() << '\n';
    return kExitUsage;
  }
  set_default_threads(cfg.threads);

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::string> files;
  nlohmann::json summary;
  bool ok = true;
  try {
    fs::create_directories(cfg.out);
    if (command == "revival") summary = cmd_revival(cfg, files);
    else if (command == "relax") summary = cmd_relax(cfg, files);
    else if (command == "sweep") summary = cmd_sweep(cfg, files);
    else if (command == "ergodicity") summary = cmd_ergodicity(cfg, files);
    else summary = cmd_validate(cfg, files, ok);
  } catch (const ResourceError& e) {
    std::cerr << "spinchain: resource guard: " << e.what() << '\n';
    return kExitResource;
  } catch (const ConvergenceError& e) {
    std::cerr << "spinchain: " << e.what() << '\n';
    return kExitTolerance;
  } catch (const Error& e) {
    std::cerr << "spinchain: " << e.what() << '\n';
    return kExitUsage;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  io::write_manifest(fs::path(cfg.out) / (command + "_manifest.json"), cfg, secs, summary, files);
  if (!ok) {
    std::cerr << "spinchain: validation failed\n";
    return kExitTolerance;
  }
  return kExitOk;
}
