// imreg: scenario-driven front end for synthesis, simulation and analysis.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>

#include <CLI11.hpp>

#include "imreg/analysis.hpp"
#include "imreg/closedloop.hpp"
#include "imreg/io.hpp"
#include "imreg/synthesis.hpp"

using namespace imreg;
using std::numbers::pi;

namespace {

enum Exit { kOk = 0, kGeneric = 1, kConfig = 2, kSynthesis = 3, kSimulation = 4, kAnalysis = 5 };

/// Failure carrying the exit code of the stage it came from.
struct StageFailure {
  int code;
  std::string message;
};

struct Flags {
  std::string scenario;
  std::string out;
  std::string variant;
  int grid = 0;
  int modes = 0;
  std::optional<unsigned> seed;
};

Scenario load(const Flags& f, bool reuse_stored = false) {
  Scenario s;
  if (!f.scenario.empty()) {
    s = load_scenario(f.scenario);
  } else if (reuse_stored) {
    const fs::path stored = fs::path(f.out.empty() ? "out" : f.out) / "scenario.json";
    if (fs::exists(stored)) s = load_scenario(stored);
  }
  if (!f.variant.empty()) {
    try {
      s.params.variant = variant_from_string(f.variant);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  if (f.grid) {
    if (f.grid < 4) throw ConfigError("--grid must be at least 4");
    s.plant_kind = "heat2d";
    s.grid = f.grid;
  }
  if (f.modes) {
    if (f.modes < 4) throw ConfigError("--modes must be at least 4");
    s.exo_kind = "heat-example";
    s.modes = f.modes;
  }
  if (!f.out.empty()) s.output = fs::absolute(f.out).string();
  return s;
}

fs::path out_dir(const Scenario& s) {
  fs::path p(s.output);
  if (p.is_relative() && !s.base_dir.empty() && s.output != "out") p = s.base_dir / p;
  fs::create_directories(p);
  return p;
}

template <class F>
auto stage(int code, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const StageFailure&) {
    throw;
  } catch (const PreconditionError& e) {
    throw StageFailure{kSynthesis, e.what()};
  } catch (const SelfCheckError& e) {
    throw StageFailure{kSynthesis, e.what()};
  } catch (const std::exception& e) {
    throw StageFailure{code, e.what()};
  }
}

void print_self_checks(const ControllerRealization& c) {
  for (const SelfCheckResult& r : c.self_checks)
    std::printf("  self-check %-60s residual %.3e  %s\n", r.name.c_str(), r.residual,
                r.pass ? "ok" : "FAIL");
}

ControllerRealization do_synthesize(const Scenario& s, const PlantModel& plant,
                                    const StabilizationGains& gains, const TruncatedExosystem& exo) {
  return stage(kSynthesis, [&] { return synthesize(plant, gains, exo, s.params, s.family); });
}

struct Setup {
  PlantModel plant;
  StabilizationGains gains;
  TruncatedExosystem exo;
};

Setup build(const Scenario& s) {
  Setup st;
  st.plant = stage(kConfig, [&] { return scenario_plant(s); });
  st.gains = stage(kConfig, [&] { return scenario_gains(s, st.plant); });
  st.exo = stage(kConfig, [&] { return scenario_exosystem(s); });
  return st;
}

int cmd_synthesize(const Flags& f) {
  const Scenario s = load(f);
  const fs::path out = out_dir(s);
  const Setup st = build(s);
  const ControllerRealization c = do_synthesize(s, st.plant, st.gains, st.exo);
  write_controller_bundle(out / "controller", c);
  write_plant_bundle(out / "plant", st.plant);
  write_gains_bundle(out / "gains", st.gains);
  write_json(out / "exosystem.json", exosystem_to_json(st.exo));
  write_json(out / "scenario.json", scenario_to_json(s));
  std::printf("synthesized %s controller: %zu modes, internal model dim %ld, controller dim %ld\n",
              to_string(c.variant).c_str(), c.blocks.size(), static_cast<long>(c.z0_dim),
              static_cast<long>(c.dim()));
  print_self_checks(c);
  std::printf("bundle written to %s\n", (out / "controller").string().c_str());
  return kOk;
}

struct SimulationResult {
  double abscissa = 0.0;
  Trajectory traj;
  DecaySamples decay;
  double seconds = 0.0;
};

SimulationResult run_simulation(const Scenario& s, const Setup& st, const ControllerRealization& c,
                                const fs::path& out) {
  return stage(kSimulation, [&] {
    const auto t0 = std::chrono::steady_clock::now();
    SimulationResult r;
    const ClosedLoopModel cl = assemble(st.plant, c, st.exo);
    r.abscissa = spectral_abscissa(cl.Ae);
    if (!(r.abscissa < 0.0))
      throw Error("closed loop is not Hurwitz (spectral abscissa " + std::to_string(r.abscissa) + ")");
    SimulationOptions so;
    so.T = s.T;
    so.dt = s.dt;
    so.probe_stride = s.probe_stride;
    r.traj = simulate(cl, st.exo, so);
    r.decay = error_metrics(r.traj);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_trajectory_csv(out / "trajectory.csv", r.traj);
    write_decay_csv(out / "error_integrals.csv", r.decay);
    if (st.plant.geometry) write_gamma3_csv(out / "gamma3.csv", r.traj, *st.plant.geometry);
    write_json(out / "run_report.json",
               {{"variant", to_string(c.variant)},
                {"closed_loop_dim", cl.dim()},
                {"spectral_abscissa", r.abscissa},
                {"max_imag_residue", r.traj.max_imag_residue},
                {"T", s.T},
                {"dt", s.dt},
                {"I_pi", decay_value_at(r.decay, pi)},
                {"I_final", decay_value_at(r.decay, s.T - 1.0)},
                {"wall_clock_s", r.seconds}});
    return r;
  });
}

int cmd_simulate(const Flags& f) {
  const Scenario s = load(f, true);
  const fs::path out = out_dir(s);
  const ControllerRealization c = read_controller_bundle(out / "controller");
  const Setup st = build(s);
  const SimulationResult r = run_simulation(s, st, c, out);
  std::printf("simulated %s closed loop: abscissa %.6g, imag residue %.2e, %.1f s\n",
              to_string(c.variant).c_str(), r.abscissa, r.traj.max_imag_residue, r.seconds);
  std::printf("I(pi) = %.6g, I(T-1) = %.6g\n", decay_value_at(r.decay, pi),
              decay_value_at(r.decay, s.T - 1.0));
  return kOk;
}

/// 100 seeded random diagonal internal models; largest identity deviation.
double random_im_identity(unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> Nd(1, 8), pd(1, 3);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int N = Nd(rng);
    const int p = pd(rng);
    std::vector<ModeBlock> blocks;
    const Eigen::Index dim = (2 * N + 1) * p;
    CMatrix G1 = CMatrix::Zero(dim, dim);
    CMatrix G2(dim, p);
    for (int k = -N; k <= N; ++k) {
      const Eigen::Index off = (k + N) * p;
      blocks.push_back({k, 0.7 * k, off, p});
      for (int i = 0; i < p; ++i) G1(off + i, off + i) = kI * (0.7 * k);
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) G2(off + i, j) = Complex(nd(rng), nd(rng)) + (i == j ? 2.0 : 0.0);
    }
    worst = std::max(worst, max_deviation(im_norm_identity(G1, G2, blocks)));
  }
  return worst;
}

int cmd_analyze(const Flags& f) {
  const Scenario s = load(f, true);
  const fs::path out = out_dir(s);
  const ControllerRealization c = read_controller_bundle(out / "controller");
  const Setup st = build(s);
  std::vector<std::string> failures;
  json rep;
  rep["variant"] = to_string(c.variant);

  stage(kAnalysis, [&] {
    const ClosedLoopModel cl = assemble(st.plant, c, st.exo);
    const double abscissa = spectral_abscissa(cl.Ae);
    rep["spectral_abscissa"] = abscissa;
    if (!(abscissa < 0.0)) failures.push_back("closed-loop stability");

    if (!s.check_g && !s.check_regulator && !s.check_im_norm && !s.check_similarity) {
      // scan only
    } else {
      json checks = json::array();
      for (const SelfCheckResult& r : verify_self_checks(st.plant, c)) {
        checks.push_back({{"name", r.name}, {"residual", r.residual}, {"pass", r.pass}});
        if (!r.pass) failures.push_back(r.name);
      }
      rep["self_checks"] = checks;
    }
    if (s.check_similarity && cl.blocks.copy_dim == cl.blocks.plant_dim) {
      const TriangularizationReport t = similarity_triangularization(cl, c);
      rep["similarity"] = {{"zero_blocks", t.zero_blocks},
                           {"relative", t.relative},
                           {"involution_residual", t.involution_residual},
                           {"diagonal_abscissa", t.diagonal_abscissa}};
      if (t.relative > 1e-8) failures.push_back("similarity triangularization");
    }
    if (s.check_g) {
      const GConditionReport g = check_g_conditions(c);
      json modes = json::array();
      for (const GConditionMode& m : g.modes) {
        modes.push_back({{"k", m.k}, {"pass", m.pass}, {"rank_shifted", m.rank_shifted},
                         {"rank_joint", m.rank_joint}, {"rank_block", m.rank_block}});
        if (!m.pass) failures.push_back("G-conditions at mode k=" + std::to_string(m.k));
      }
      rep["g_conditions"] = {{"pass", g.pass}, {"ker_trivial", g.ker_trivial}, {"modes", modes}};
      if (!g.ker_trivial) failures.push_back("G-conditions kernel");
    }
    if (s.check_regulator) {
      const RegulatorSolution r = regulator_residuals(cl, st.exo);
      rep["regulator"] = {{"max_residual", r.max_residual}, {"relative", r.relative}};
      if (r.relative > 1e-8) failures.push_back("regulator equations");
    }
    if (s.check_im_norm) {
      const auto rows = im_norm_identity(c.G1, c.G2, c.blocks);
      json modes = json::array();
      for (const ImNormMode& m : rows)
        modes.push_back({{"k", m.k}, {"lhs", m.lhs}, {"rhs", m.rhs}, {"deviation", m.deviation},
                         {"square", m.square}});
      const double dev = max_deviation(rows);
      const double rnd = random_im_identity(f.seed.value_or(0));
      rep["im_norm_identity"] = {{"max_deviation", dev}, {"random_max_deviation", rnd},
                                 {"seed", f.seed.value_or(0)}, {"modes", modes}};
      if (dev > 1e-8) failures.push_back("internal-model norm identity");
      if (rnd > 1e-8) failures.push_back("internal-model norm identity (random suite)");
    }
    std::optional<GrowthFit> growth;
    if (s.scan) {
      const auto scan = resolvent_scan(cl.Ae, peak_and_midpoint_grid(st.exo), st.exo.omega);
      write_scan_csv(out / "resolvent_scan.csv", scan);
      const auto im_scan = resolvent_scan(c.G1 - c.G2 * c.G2.adjoint(), st.exo.omega, st.exo.omega);
      bool im_finite = true;
      for (const ScanPoint& p : im_scan) im_finite = im_finite && std::isfinite(p.norm);
      if (!im_finite) failures.push_back("internal-model resolvent finite at i omega_k");
      try {
        growth = fit_growth(scan, s.growth_kmin, s.growth_kmax);
        rep["growth"] = {{"alpha", growth->alpha},
                         {"rate", growth->rate},
                         {"law", growth->law == GrowthFit::Law::Polynomial ? "polynomial" : "exponential"},
                         {"r2_polynomial", growth->r2_polynomial},
                         {"r2_exponential", growth->r2_exponential},
                         {"M0", growth->M0},
                         {"omega_range", {s.growth_kmin, s.growth_kmax}}};
      } catch (const Error& e) {
        rep["growth"] = {{"skipped", e.what()}};
      }
    }
    const fs::path decay_csv = out / "error_integrals.csv";
    if (s.decay && growth && fs::exists(decay_csv)) {
      const DecaySamples d = read_decay_csv(decay_csv);
      const double t1 = s.decay_t1 > 0.0 ? s.decay_t1 : d.t.back();
      const DecayFit df = fit_decay(d.t, d.I, s.decay_t0, t1, growth->alpha);
      const json dj = {{"t0", df.t0}, {"t1", df.t1}, {"slope", df.slope}, {"r2", df.r2},
                       {"alpha", df.alpha}, {"predicted_slope", df.predicted_slope},
                       {"band", {df.band_lo, df.band_hi}}, {"within_band", df.within_band},
                       {"Mee", df.Mee}, {"respects_bound", df.respects_bound},
                       {"short_window", df.short_window},
                       {"v0_DS_norm", (Eigen::Map<const Eigen::VectorXd>(st.exo.omega.data(),
                                                                          st.exo.mode_count())
                                           .cast<Complex>()
                                           .cwiseProduct(st.exo.v0))
                                          .norm()}};
      write_json(out / "decay_fit.json", dj);
      rep["decay_fit"] = dj;
    } else {
      rep["decay_fit"] = "skipped";
    }
    return 0;
  });

  rep["failures"] = failures;
  write_json(out / "analysis_report.json", rep);
  if (!failures.empty()) {
    for (const std::string& name : failures) std::fprintf(stderr, "check failed: %s\n", name.c_str());
    return kAnalysis;
  }
  std::printf("all static checks passed\n");
  if (rep.contains("growth") && rep["growth"].contains("alpha"))
    std::printf("fitted resolvent growth exponent %.4f\n", rep["growth"]["alpha"].get<double>());
  return kOk;
}

int cmd_reproduce_heat(const Flags& f) {
  Scenario s = load(f);
  s.T = 12.0 * pi;
  s.dt = 1e-3;
  const fs::path out = out_dir(s);
  const Setup st = build(s);
  const ControllerRealization c = do_synthesize(s, st.plant, st.gains, st.exo);
  write_controller_bundle(out / "controller", c);
  print_self_checks(c);
  const SimulationResult r = run_simulation(s, st, c, out);
  write_trajectory_csv(out / "tracking.csv", r.traj, 4.0 * pi, 12.0 * pi);
  const double i0 = decay_value_at(r.decay, pi);
  const double i1 = decay_value_at(r.decay, 10.0 * pi);
  const bool pass = i1 <= 0.05 * i0;
  write_json(out / "report.json", {{"variant", to_string(c.variant)},
                                   {"grid", s.grid},
                                   {"modes", s.modes},
                                   {"spectral_abscissa", r.abscissa},
                                   {"I_pi", i0},
                                   {"I_10pi", i1},
                                   {"ratio", i1 / i0},
                                   {"tracking_pass", pass},
                                   {"wall_clock_s", r.seconds}});
  std::printf("closed-loop spectral abscissa %.6g\n", r.abscissa);
  std::printf("AC-2 %s: I(10pi) = %.4g, I(pi) = %.4g, ratio %.4f (threshold 0.05)\n",
              pass ? "PASS" : "FAIL", i1, i0, i1 / i0);
  std::printf("outputs in %s (tracking.csv, error_integrals.csv, gamma3.csv)\n", out.string().c_str());
  return kOk;
}

int cmd_robustness(const Flags& f) {
  const Scenario s = load(f, true);
  const fs::path out = out_dir(s);
  const Setup st = build(s);
  const fs::path bundle = out / "controller";
  const ControllerRealization c = fs::exists(bundle / "manifest.json")
                                      ? read_controller_bundle(bundle)
                                      : do_synthesize(s, st.plant, st.gains, st.exo);
  const std::vector<PerturbationSpec> specs =
      s.robustness.empty() ? default_robustness_specs() : s.robustness;
  RobustnessOptions ro;
  ro.T = s.T;
  ro.dt = s.dt;
  const auto rows = stage(kSimulation, [&] { return robustness_suite(st.plant, c, st.exo, specs, ro); });
  json arr = json::array();
  std::printf("%-22s %14s %12s %14s  %s\n", "perturbation", "abscissa", "ratio", "regulator", "status");
  for (const RobustnessRow& r : rows) {
    std::printf("%-22s %14.6g %12.4g %14.3e  %s\n", r.label.c_str(), r.abscissa, r.ratio,
                r.regulator_relative, r.status.c_str());
    arr.push_back({{"label", r.label}, {"abscissa", r.abscissa}, {"stable", r.stable},
                   {"I_initial", r.I_initial}, {"I_final", r.I_final}, {"ratio", r.ratio},
                   {"regulator_relative", r.regulator_relative}, {"status", r.status}});
  }
  write_json(out / "robustness_report.json", {{"variant", to_string(c.variant)}, {"rows", arr}});
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"imreg: internal-model output regulation toolkit"};
  app.require_subcommand(1);
  Flags flags;
  unsigned seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", flags.scenario, "scenario JSON file");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--variant", flags.variant, "new-structure | reduced-im | non-robust | observer");
    sub->add_option("--grid", flags.grid, "heat grid points per side");
    sub->add_option("--modes", flags.modes, "exosystem truncation order N");
    sub->add_option("--seed", seed, "seed for randomized checks");
  };
  struct Command {
    const char* name;
    const char* help;
    int (*fn)(const Flags&);
  };
  const Command commands[] = {
      {"synthesize", "build the controller and write its bundle", cmd_synthesize},
      {"simulate", "simulate the closed loop with the stored controller", cmd_simulate},
      {"analyze", "static checks, resolvent scan and decay fit", cmd_analyze},
      {"reproduce-heat", "full heat study pipeline", cmd_reproduce_heat},
      {"robustness", "perturbation suite with a fixed controller", cmd_robustness},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_common(sub);
    subs.emplace_back(sub, &c);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfig;
  }

  for (auto& [sub, cmd] : subs) {
    if (!sub->parsed()) continue;
    if (sub->count("--seed")) flags.seed = seed;
    try {
      return cmd->fn(flags);
    } catch (const ConfigError& e) {
      std::fprintf(stderr, "config error: %s\n", e.what());
      return kConfig;
    } catch (const StageFailure& e) {
      std::fprintf(stderr, "%s\n", e.message.c_str());
      return e.code;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return kGeneric;
    }
  }
  return kGeneric;
}
