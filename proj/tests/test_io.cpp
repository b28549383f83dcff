#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "imreg/io.hpp"
#include "testbeds.hpp"

using namespace imreg;
using std::numbers::pi;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("imreg_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("matrix files round trip exactly") {
  TempDir d("matrix");
  CMatrix M(2, 3);
  M << Complex(1.0 / 3.0, -2.0), 0.0, 1e-300, Complex(0.0, pi), -7.25, Complex(1e17, 3.0);
  write_matrix(d.path / "M.txt", M);
  CHECK(first_line(d.path / "M.txt") == "2 3");
  CHECK((read_matrix(d.path / "M.txt") - M).norm() == 0.0);

  std::ofstream(d.path / "bad.txt") << "2 2\n1 0\n";
  CHECK_THROWS_AS(read_matrix(d.path / "bad.txt"), ConfigError);
  CHECK_THROWS_AS(read_matrix(d.path / "missing.txt"), ConfigError);
}

TEST_CASE("plant and gains bundles") {
  TempDir d("plant");
  const PlantModel P = build_heat2d(5);
  const StabilizationGains G = heat_stabilizers(P);
  write_plant_bundle(d.path / "plant", P);
  write_gains_bundle(d.path / "gains", G);
  const PlantModel Q = read_plant_bundle(d.path / "plant");
  CHECK((Q.A - P.A).norm() == 0.0);
  CHECK((Q.C - P.C).norm() == 0.0);
  REQUIRE(Q.geometry);
  CHECK(Q.geometry->gamma3 == P.geometry->gamma3);
  CHECK((Q.geometry->mass - P.geometry->mass).norm() == 0.0);
  const StabilizationGains H = read_gains_bundle(d.path / "gains");
  CHECK((H.K2 - G.K2).norm() == 0.0);
  CHECK((H.L1 - G.L1).norm() == 0.0);
}

TEST_CASE("controller bundle round trip") {
  TempDir d("controller");
  const auto h = testbed::heat(5, 4);
  for (Variant v : {Variant::NewStructure, Variant::Observer}) {
    SynthesisParams p;
    p.variant = v;
    const ControllerRealization c = synthesize(h.plant, h.gains, h.exo, p);
    write_controller_bundle(d.path / "c", c);
    const ControllerRealization r = read_controller_bundle(d.path / "c");
    CHECK(r.variant == v);
    CHECK(r.blocks.size() == c.blocks.size());
    CHECK(r.z0_dim == c.z0_dim);
    CHECK((r.calG1 - c.calG1).norm() == 0.0);
    CHECK((r.K - c.K).norm() == 0.0);
    CHECK((r.H - c.H).norm() == 0.0);
    CHECK(r.self_checks.size() == c.self_checks.size());
    const json m = read_json(d.path / "c" / "manifest.json");
    CHECK(m["variant"] == to_string(v));
    CHECK(m["mode_count"] == 9);
    fs::remove_all(d.path / "c");
  }
  CHECK_THROWS_AS(read_controller_bundle(d.path / "none"), ConfigError);
}

TEST_CASE("exosystem and params json") {
  const TruncatedExosystem e = heat_example_profiles(5);
  const TruncatedExosystem f = exosystem_from_json(exosystem_to_json(e));
  CHECK(f.N == 5);
  CHECK((f.F - e.F).norm() == 0.0);
  CHECK((f.v0 - e.v0).norm() == 0.0);
  CHECK(f.omega == e.omega);

  SynthesisParams p;
  p.variant = Variant::Observer;
  p.law = GainLaw::Power;
  p.gamma0 = 3.5;
  p.g2_profile = {Complex(1.0, 2.0)};
  const SynthesisParams q = params_from_json(params_to_json(p));
  CHECK(q.variant == Variant::Observer);
  CHECK(q.law == GainLaw::Power);
  CHECK(q.gamma0 == 3.5);
  CHECK(q.g2_profile.size() == 1);
  CHECK_THROWS_AS(params_from_json({{"gamma0", -1.0}}), ConfigError);
  CHECK_THROWS_AS(params_from_json({{"law", "cubic"}}), ConfigError);
  CHECK_THROWS_AS(params_from_json({{"variant", "pid"}}), ConfigError);

  PerturbationSpec s;
  s.label = "B x1.1";
  s.B_scale = 1.1;
  const PerturbationSpec t = perturbation_from_json(perturbation_to_json(s));
  CHECK(t.label == "B x1.1");
  CHECK(t.B_scale == 1.1);
}

TEST_CASE("csv outputs") {
  TempDir d("csv");
  Trajectory tr;
  tr.dt = 0.5;
  tr.y = Eigen::MatrixXd::Zero(1, 5);
  tr.y_ref = Eigen::MatrixXd::Ones(1, 5);
  tr.u = Eigen::MatrixXd::Zero(1, 5);
  for (int j = 0; j < 5; ++j) {
    tr.t.push_back(0.5 * j);
    tr.e_norm.push_back(1.0);
  }
  write_trajectory_csv(d.path / "traj.csv", tr);
  CHECK(first_line(d.path / "traj.csv") == "t,y,y_ref,e_norm,u");
  CHECK(line_count(d.path / "traj.csv") == 6);
  write_trajectory_csv(d.path / "win.csv", tr, 0.5, 1.5);
  CHECK(line_count(d.path / "win.csv") == 4);

  tr.y = Eigen::MatrixXd::Zero(2, 5);
  tr.y_ref = Eigen::MatrixXd::Zero(2, 5);
  write_trajectory_csv(d.path / "multi.csv", tr);
  CHECK(first_line(d.path / "multi.csv") == "t,y0,y1,y_ref0,y_ref1,e_norm,u");

  DecaySamples ds{{0.0, 0.1, 0.2}, {1.0, 0.5, 0.25}};
  write_decay_csv(d.path / "I.csv", ds);
  CHECK(first_line(d.path / "I.csv") == "t,I");
  const DecaySamples back = read_decay_csv(d.path / "I.csv");
  CHECK(back.t == ds.t);
  CHECK(back.I == ds.I);

  write_scan_csv(d.path / "scan.csv", {{1.0, 2.0, true}, {1.5, kInfinity, false}});
  CHECK(first_line(d.path / "scan.csv") == "omega,norm,peak");
  CHECK(line_count(d.path / "scan.csv") == 3);

  const PlantModel P = build_heat2d(4);
  tr.probe_t = {0.0, 1.0};
  tr.gamma3 = {RVector::Zero(4), RVector::Ones(4)};
  write_gamma3_csv(d.path / "g3.csv", tr, *P.geometry);
  CHECK(first_line(d.path / "g3.csv") == "t,xi2,x");
  CHECK(line_count(d.path / "g3.csv") == 9);
}

TEST_CASE("scenario parsing and validation") {
  TempDir d("scenario");
  const json j = {{"schema_version", 1},
                  {"plant", {{"kind", "heat2d"}, {"n", 12}}},
                  {"exosystem", {{"kind", "heat-example"}, {"N", 6}}},
                  {"controller", {{"variant", "observer"}, {"gamma0", 10.0}}},
                  {"run", {{"T", 5.0}, {"dt", 5e-4}, {"v0", "zero"}}},
                  {"analysis", {{"scan_only", true}}},
                  {"robustness", {{{"label", "A x0.9"}, {"A_scale", 0.9}}}},
                  {"output", "res"}};
  const Scenario s = scenario_from_json(j, d.path);
  CHECK(s.grid == 12);
  CHECK(s.modes == 6);
  CHECK(s.params.variant == Variant::Observer);
  CHECK(s.params.gamma0 == 10.0);
  CHECK(s.T == 5.0);
  CHECK(s.zero_exo);
  CHECK(s.scan);
  CHECK_FALSE(s.check_g);
  CHECK_FALSE(s.decay);
  CHECK(s.robustness.size() == 1);
  CHECK(scenario_exosystem(s).v0.norm() == 0.0);

  const Scenario t = scenario_from_json(scenario_to_json(s), d.path);
  CHECK(t.grid == s.grid);
  CHECK(t.T == s.T);
  CHECK(t.params.variant == s.params.variant);

  auto bad = [&](json patch) {
    json k = j;
    k.merge_patch(patch);
    return k;
  };
  CHECK_THROWS_AS(scenario_from_json(bad({{"schema_version", 2}})), ConfigError);
  CHECK_THROWS_AS(scenario_from_json(bad({{"run", {{"T", 0.5}}}})), ConfigError);
  CHECK_THROWS_AS(scenario_from_json(bad({{"run", {{"dt", 0.1}}}})), ConfigError);
  CHECK_THROWS_AS(scenario_from_json(bad({{"plant", {{"n", 2}}}})), ConfigError);
  CHECK_THROWS_AS(scenario_from_json(bad({{"plant", {{"kind", "beam"}}}})), ConfigError);
  CHECK_THROWS_AS(scenario_from_json(bad({{"plant", {{"kind", "bundle"}, {"path", "nowhere"}}}}), d.path),
                  ConfigError);
  CHECK_THROWS_AS(scenario_from_json(bad({{"run", {{"T", "long"}}}})), ConfigError);
  CHECK_THROWS_AS(load_scenario(d.path / "missing.json"), ConfigError);
}

TEST_CASE("scenario with bundles") {
  TempDir d("bundles");
  const PlantModel P = testbed::two_channel_plant();
  write_plant_bundle(d.path / "plant", P);
  write_gains_bundle(d.path / "gains", testbed::zero_gains(P));
  write_json(d.path / "exo.json", exosystem_to_json(testbed::two_channel_exosystem()));
  write_json(d.path / "scenario.json",
             {{"plant", {{"kind", "bundle"}, {"path", "plant"}}},
              {"gains", {{"kind", "bundle"}, {"path", "gains"}}},
              {"exosystem", {{"kind", "json"}, {"path", "exo.json"}}}});
  const Scenario s = load_scenario(d.path / "scenario.json");
  const PlantModel Q = scenario_plant(s);
  CHECK(Q.output_dim() == 2);
  CHECK(scenario_gains(s, Q).K2.rows() == 2);
  CHECK(scenario_exosystem(s).N == 2);
  const Scenario h = scenario_from_json(json::object());
  CHECK(scenario_gains(h, scenario_plant(h)).L1.rows() == 256);
}

TEST_CASE("default robustness perturbations") {
  const auto specs = default_robustness_specs();
  REQUIRE(specs.size() == 4);
  CHECK(specs[0].A_scale == 0.95);
  CHECK(specs[1].A_scale == 1.05);
  CHECK(specs[2].B_scale == 0.9);
  CHECK(specs[3].B_scale == 1.1);
}

}
