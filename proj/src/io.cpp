#include "imreg/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace imreg {

namespace {

std::string fmt(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string g15(double x) { return fmt(x, 15); }

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  return in;
}

json complex_list(const CVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back({v(i).real(), v(i).imag()});
  return a;
}

CVector complex_list_from(const json& a, const char* what) {
  if (!a.is_array()) throw ConfigError(std::string("exosystem: ") + what + " must be an array");
  CVector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    const json& e = a[i];
    if (e.is_number()) {
      v(static_cast<Eigen::Index>(i)) = e.get<double>();
    } else if (e.is_array() && e.size() == 2) {
      v(static_cast<Eigen::Index>(i)) = Complex(e[0].get<double>(), e[1].get<double>());
    } else {
      throw ConfigError(std::string("exosystem: entries of ") + what + " must be [re, im]");
    }
  }
  return v;
}

json decay_law_json(const DecayLaw& d) {
  const char* kind = d.kind == DecayLaw::Kind::Polynomial    ? "polynomial"
                     : d.kind == DecayLaw::Kind::Exponential ? "exponential"
                                                             : "none";
  return {{"kind", kind}, {"exponent", d.exponent}, {"scale", d.scale}};
}

DecayLaw decay_law_from(const json& j) {
  DecayLaw d;
  const std::string kind = j.value("kind", "none");
  if (kind == "polynomial") d.kind = DecayLaw::Kind::Polynomial;
  else if (kind == "exponential") d.kind = DecayLaw::Kind::Exponential;
  else if (kind != "none") throw ConfigError("exosystem: unknown decay law '" + kind + "'");
  d.exponent = j.value("exponent", 0.0);
  d.scale = j.value("scale", 1.0);
  return d;
}

const char* law_name(GainLaw l) { return l == GainLaw::Heat ? "heat" : "power"; }

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

void write_matrix(const fs::path& path, const CMatrix& M) {
  std::ofstream out = open_out(path);
  out << M.rows() << ' ' << M.cols() << '\n';
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j)
      out << fmt(M(i, j).real(), 17) << ' ' << fmt(M(i, j).imag(), 17) << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

CMatrix read_matrix(const fs::path& path) {
  std::ifstream in = open_in(path);
  long rows = -1, cols = -1;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0)
    throw ConfigError("matrix file " + path.string() + ": bad dims header");
  CMatrix M(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) {
      double re = 0, im = 0;
      if (!(in >> re >> im))
        throw ConfigError("matrix file " + path.string() + ": truncated data");
      M(i, j) = Complex(re, im);
    }
  return M;
}

void write_plant_bundle(const fs::path& dir, const PlantModel& p) {
  fs::create_directories(dir);
  write_matrix(dir / "A.txt", p.A);
  write_matrix(dir / "B.txt", p.B);
  write_matrix(dir / "Bd.txt", p.Bd);
  write_matrix(dir / "C.txt", p.C);
  write_matrix(dir / "D.txt", p.D);
  json side = {{"state_dim", p.state_dim()},
               {"input_dim", p.input_dim()},
               {"output_dim", p.output_dim()},
               {"disturbance_dim", p.disturbance_dim()}};
  if (p.geometry) {
    const HeatGeometry& g = *p.geometry;
    side["geometry"] = {{"n", g.n},
                        {"h", g.h},
                        {"gamma1", g.gamma1},
                        {"gamma2", g.gamma2},
                        {"gamma3", g.gamma3},
                        {"mass", std::vector<double>(g.mass.data(), g.mass.data() + g.mass.size())}};
  }
  write_json(dir / "plant.json", side);
}

PlantModel read_plant_bundle(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("plant bundle not found: " + dir.string());
  PlantModel p;
  p.A = read_matrix(dir / "A.txt");
  p.B = read_matrix(dir / "B.txt");
  p.Bd = read_matrix(dir / "Bd.txt");
  p.C = read_matrix(dir / "C.txt");
  p.D = read_matrix(dir / "D.txt");
  if (fs::exists(dir / "plant.json")) {
    const json side = read_json(dir / "plant.json");
    if (side.contains("geometry")) {
      const json& g = side["geometry"];
      HeatGeometry geo;
      geo.n = g.at("n").get<int>();
      geo.h = g.at("h").get<double>();
      geo.gamma1 = g.at("gamma1").get<std::vector<int>>();
      geo.gamma2 = g.at("gamma2").get<std::vector<int>>();
      geo.gamma3 = g.at("gamma3").get<std::vector<int>>();
      const auto mass = g.at("mass").get<std::vector<double>>();
      geo.mass = Eigen::Map<const RVector>(mass.data(), static_cast<Eigen::Index>(mass.size()));
      p.geometry = std::move(geo);
    }
  }
  try {
    validate(p);
  } catch (const Error& e) {
    throw ConfigError(std::string("plant bundle: ") + e.what());
  }
  return p;
}

void write_gains_bundle(const fs::path& dir, const StabilizationGains& g) {
  fs::create_directories(dir);
  write_matrix(dir / "K2.txt", g.K2);
  write_matrix(dir / "L1.txt", g.L1);
}

StabilizationGains read_gains_bundle(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("gains bundle not found: " + dir.string());
  return {read_matrix(dir / "K2.txt"), read_matrix(dir / "L1.txt")};
}

namespace {

struct NamedMatrix {
  const char* name;
  CMatrix ControllerRealization::*member;
};

constexpr NamedMatrix kControllerMatrices[] = {
    {"G1", &ControllerRealization::G1},       {"G2", &ControllerRealization::G2},
    {"K1", &ControllerRealization::K1},       {"K2", &ControllerRealization::K2},
    {"K21", &ControllerRealization::K21},     {"L", &ControllerRealization::L},
    {"L1", &ControllerRealization::L1},       {"H", &ControllerRealization::H},
    {"calG1", &ControllerRealization::calG1}, {"calG2", &ControllerRealization::calG2},
    {"K", &ControllerRealization::K},
};

}  // namespace

void write_controller_bundle(const fs::path& dir, const ControllerRealization& c) {
  fs::create_directories(dir);
  json mats = json::array();
  for (const NamedMatrix& nm : kControllerMatrices) {
    const CMatrix& M = c.*(nm.member);
    if (M.size() == 0) continue;
    write_matrix(dir / (std::string(nm.name) + ".txt"), M);
    mats.push_back(nm.name);
  }
  json blocks = json::array();
  for (const ModeBlock& b : c.blocks)
    blocks.push_back({{"k", b.k}, {"omega", b.omega}, {"offset", b.offset}, {"size", b.size}});
  json checks = json::array();
  for (const SelfCheckResult& r : c.self_checks)
    checks.push_back({{"name", r.name}, {"residual", r.residual}, {"pass", r.pass}});
  const json manifest = {{"variant", to_string(c.variant)},
                         {"params", params_to_json(c.params)},
                         {"mode_count", c.blocks.size()},
                         {"block_sizes", [&] {
                            std::vector<Eigen::Index> s;
                            for (const ModeBlock& b : c.blocks) s.push_back(b.size);
                            return s;
                          }()},
                         {"z0_dim", c.z0_dim},
                         {"plant_dim", c.plant_dim},
                         {"blocks", blocks},
                         {"matrices", mats},
                         {"self_checks", checks}};
  write_json(dir / "manifest.json", manifest);
}

ControllerRealization read_controller_bundle(const fs::path& dir) {
  if (!fs::exists(dir / "manifest.json"))
    throw ConfigError("controller bundle not found: " + dir.string());
  const json m = read_json(dir / "manifest.json");
  ControllerRealization c;
  try {
    c.variant = variant_from_string(m.at("variant").get<std::string>());
    c.params = params_from_json(m.at("params"));
    c.params.variant = c.variant;
    c.z0_dim = m.at("z0_dim").get<Eigen::Index>();
    c.plant_dim = m.at("plant_dim").get<Eigen::Index>();
    for (const json& b : m.at("blocks"))
      c.blocks.push_back({b.at("k").get<int>(), b.at("omega").get<double>(),
                          b.at("offset").get<Eigen::Index>(), b.at("size").get<Eigen::Index>()});
    for (const json& r : m.value("self_checks", json::array()))
      c.self_checks.push_back(
          {r.at("name").get<std::string>(), r.at("residual").get<double>(), r.at("pass").get<bool>()});
  } catch (const json::exception& e) {
    throw ConfigError(std::string("controller manifest: ") + e.what());
  }
  for (const NamedMatrix& nm : kControllerMatrices) {
    const fs::path f = dir / (std::string(nm.name) + ".txt");
    if (fs::exists(f)) c.*(nm.member) = read_matrix(f);
  }
  if (c.calG1.size() == 0 || c.calG2.size() == 0 || c.K.size() == 0)
    throw ConfigError("controller bundle " + dir.string() + " lacks calG1, calG2 or K");
  return c;
}

json exosystem_to_json(const TruncatedExosystem& exo) {
  json E = json::array();
  for (Eigen::Index r = 0; r < exo.E.rows(); ++r) E.push_back(complex_list(exo.E.row(r).transpose()));
  json F = json::array();
  for (Eigen::Index r = 0; r < exo.F.rows(); ++r) F.push_back(complex_list(exo.F.row(r).transpose()));
  return {{"tau", exo.tau},
          {"N", exo.N},
          {"omega", exo.omega},
          {"v0", complex_list(exo.v0)},
          {"E", E},
          {"F", F},
          {"profile",
           {{"v0", decay_law_json(exo.profile.v0)},
            {"E", decay_law_json(exo.profile.E)},
            {"F", decay_law_json(exo.profile.F)}}}};
}

TruncatedExosystem exosystem_from_json(const json& j) {
  try {
    TruncatedExosystem exo;
    const int N = j.at("N").get<int>();
    const double tau = j.value("tau", 0.0);
    const json& E = j.at("E");
    const json& F = j.at("F");
    if (j.contains("omega")) {
      exo = build_from_frequencies(j.at("omega").get<std::vector<double>>(),
                                   static_cast<Eigen::Index>(F.size()),
                                   static_cast<Eigen::Index>(E.size()));
      exo.tau = tau;
    } else {
      exo = build_periodic(tau, N, static_cast<Eigen::Index>(F.size()),
                           static_cast<Eigen::Index>(E.size()));
    }
    if (exo.N != N) throw ConfigError("exosystem: N does not match the frequency list");
    exo.v0 = complex_list_from(j.at("v0"), "v0");
    if (exo.v0.size() != exo.mode_count()) throw ConfigError("exosystem: v0 has wrong length");
    for (std::size_t r = 0; r < E.size(); ++r) {
      const CVector row = complex_list_from(E[r], "E");
      if (row.size() != exo.mode_count()) throw ConfigError("exosystem: E row has wrong length");
      exo.E.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    for (std::size_t r = 0; r < F.size(); ++r) {
      const CVector row = complex_list_from(F[r], "F");
      if (row.size() != exo.mode_count()) throw ConfigError("exosystem: F row has wrong length");
      exo.F.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    if (j.contains("profile")) {
      const json& p = j["profile"];
      exo.profile.v0 = decay_law_from(p.value("v0", json::object()));
      exo.profile.E = decay_law_from(p.value("E", json::object()));
      exo.profile.F = decay_law_from(p.value("F", json::object()));
    }
    return exo;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("exosystem json: ") + e.what());
  }
}

json params_to_json(const SynthesisParams& p) {
  json g2 = json::array();
  for (const Complex& c : p.g2_profile) g2.push_back({c.real(), c.imag()});
  return {{"variant", to_string(p.variant)},
          {"law", law_name(p.law)},
          {"gamma0", p.gamma0},
          {"kappa", p.kappa},
          {"beta", p.beta},
          {"g2_profile", g2}};
}

SynthesisParams params_from_json(const json& j, SynthesisParams p) {
  try {
    if (j.contains("variant")) p.variant = variant_from_string(j["variant"].get<std::string>());
    if (j.contains("law")) {
      const std::string law = j["law"].get<std::string>();
      if (law == "heat") p.law = GainLaw::Heat;
      else if (law == "power") p.law = GainLaw::Power;
      else throw ConfigError("controller: unknown gain law '" + law + "'");
    }
    p.gamma0 = j.value("gamma0", p.gamma0);
    p.kappa = j.value("kappa", p.kappa);
    p.beta = j.value("beta", p.beta);
    if (j.contains("g2_profile")) {
      p.g2_profile.clear();
      const CVector v = complex_list_from(j["g2_profile"], "g2_profile");
      for (Eigen::Index i = 0; i < v.size(); ++i) p.g2_profile.push_back(v(i));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("controller params: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (!(p.gamma0 > 0.0)) throw ConfigError("controller: gamma0 must be positive");
  if (!(p.kappa > 0.0)) throw ConfigError("controller: kappa must be positive");
  if (!(p.beta > 0.0)) throw ConfigError("controller: beta must be positive");
  return p;
}

json perturbation_to_json(const PerturbationSpec& s) {
  return {{"label", s.label},       {"A_scale", s.A_scale}, {"B_scale", s.B_scale},
          {"Bd_scale", s.Bd_scale}, {"C_scale", s.C_scale}, {"D_scale", s.D_scale},
          {"E_scale", s.E_scale},   {"F_scale", s.F_scale}};
}

PerturbationSpec perturbation_from_json(const json& j) {
  PerturbationSpec s;
  try {
    s.label = j.value("label", std::string("perturbation"));
    s.A_scale = j.value("A_scale", 1.0);
    s.B_scale = j.value("B_scale", 1.0);
    s.Bd_scale = j.value("Bd_scale", 1.0);
    s.C_scale = j.value("C_scale", 1.0);
    s.D_scale = j.value("D_scale", 1.0);
    s.E_scale = j.value("E_scale", 1.0);
    s.F_scale = j.value("F_scale", 1.0);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("perturbation: ") + e.what());
  }
  return s;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
}

void write_trajectory_csv(const fs::path& path, const Trajectory& tr, double t_from, double t_to) {
  std::ofstream out = open_out(path);
  const Eigen::Index p = tr.y.rows();
  const Eigen::Index m = tr.u.rows();
  auto names = [](const char* base, Eigen::Index count) {
    std::string s;
    for (Eigen::Index i = 0; i < count; ++i)
      s += std::string(",") + base + (count > 1 ? std::to_string(i) : "");
    return s;
  };
  out << "t" << names("y", p) << names("y_ref", p) << ",e_norm" << names("u", m) << '\n';
  const double eps = 1e-9 * tr.dt;
  for (std::size_t s = 0; s < tr.t.size(); ++s) {
    if (tr.t[s] < t_from - eps || tr.t[s] > t_to + eps) continue;
    const auto c = static_cast<Eigen::Index>(s);
    out << g15(tr.t[s]);
    for (Eigen::Index i = 0; i < p; ++i) out << ',' << g15(tr.y(i, c));
    for (Eigen::Index i = 0; i < p; ++i) out << ',' << g15(tr.y_ref(i, c));
    out << ',' << g15(tr.e_norm[s]);
    for (Eigen::Index i = 0; i < m; ++i) out << ',' << g15(tr.u(i, c));
    out << '\n';
  }
}

void write_decay_csv(const fs::path& path, const DecaySamples& d) {
  std::ofstream out = open_out(path);
  out << "t,I\n";
  for (std::size_t j = 0; j < d.t.size(); ++j) out << g15(d.t[j]) << ',' << g15(d.I[j]) << '\n';
}

DecaySamples read_decay_csv(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,I", 0) != 0)
    throw ConfigError(path.string() + ": expected header t,I");
  DecaySamples d;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    double t = 0, I = 0;
    char comma = 0;
    if (!(ss >> t >> comma >> I) || comma != ',') throw ConfigError(path.string() + ": bad row");
    d.t.push_back(t);
    d.I.push_back(I);
  }
  return d;
}

void write_gamma3_csv(const fs::path& path, const Trajectory& tr, const HeatGeometry& geo) {
  std::ofstream out = open_out(path);
  out << "t,xi2,x\n";
  for (std::size_t s = 0; s < tr.probe_t.size(); ++s)
    for (Eigen::Index j = 0; j < tr.gamma3[s].size(); ++j)
      out << g15(tr.probe_t[s]) << ',' << g15(static_cast<double>(j) * geo.h) << ','
          << g15(tr.gamma3[s](j)) << '\n';
}

void write_scan_csv(const fs::path& path, const std::vector<ScanPoint>& scan) {
  std::ofstream out = open_out(path);
  out << "omega,norm,peak\n";
  for (const ScanPoint& p : scan)
    out << g15(p.omega) << ',' << (std::isfinite(p.norm) ? g15(p.norm) : std::string("inf")) << ','
        << (p.peak ? 1 : 0) << '\n';
}

std::vector<PerturbationSpec> default_robustness_specs() {
  PerturbationSpec a, b, c, d;
  a.label = "diffusion x0.95";
  a.A_scale = 0.95;
  b.label = "diffusion x1.05";
  b.A_scale = 1.05;
  c.label = "B x0.9";
  c.B_scale = 0.9;
  d.label = "B x1.1";
  d.B_scale = 1.1;
  return {a, b, c, d};
}

Scenario scenario_from_json(const json& j, const fs::path& base_dir) {
  Scenario s;
  s.base_dir = base_dir;
  try {
    s.schema_version = j.value("schema_version", 1);
    if (s.schema_version != 1)
      throw ConfigError("scenario: unsupported schema_version " + std::to_string(s.schema_version));
    if (j.contains("plant")) {
      const json& p = j["plant"];
      s.plant_kind = p.value("kind", s.plant_kind);
      s.grid = p.value("n", s.grid);
      s.plant_path = p.value("path", std::string());
    }
    if (j.contains("gains")) {
      const json& g = j["gains"];
      s.gains_kind = g.value("kind", s.gains_kind);
      s.gains_path = g.value("path", std::string());
    }
    if (j.contains("exosystem")) {
      const json& e = j["exosystem"];
      s.exo_kind = e.value("kind", s.exo_kind);
      s.modes = e.value("N", s.modes);
      s.exo_path = e.value("path", std::string());
    }
    if (j.contains("controller")) {
      const json& c = j["controller"];
      s.params = params_from_json(c, s.params);
      for (const json& f : c.value("family", json::array())) s.family.push_back(perturbation_from_json(f));
    }
    if (j.contains("run")) {
      const json& r = j["run"];
      s.T = r.value("T", s.T);
      s.dt = r.value("dt", s.dt);
      s.zero_exo = r.value("v0", std::string("profile")) == "zero";
      s.probe_stride = r.value("probe_stride", s.probe_stride);
    }
    if (j.contains("analysis")) {
      const json& a = j["analysis"];
      s.check_g = a.value("g_conditions", s.check_g);
      s.check_regulator = a.value("regulator", s.check_regulator);
      s.check_im_norm = a.value("im_norm", s.check_im_norm);
      s.check_similarity = a.value("similarity", s.check_similarity);
      s.scan = a.value("scan", s.scan);
      s.decay = a.value("decay", s.decay);
      if (a.value("scan_only", false)) {
        s.check_g = s.check_regulator = s.check_im_norm = s.check_similarity = s.decay = false;
        s.scan = true;
      }
      s.growth_kmin = a.value("growth_kmin", s.growth_kmin);
      s.growth_kmax = a.value("growth_kmax", s.growth_kmax);
      s.decay_t0 = a.value("decay_t0", s.decay_t0);
      s.decay_t1 = a.value("decay_t1", s.decay_t1);
    }
    if (j.contains("robustness"))
      for (const json& f : j["robustness"]) s.robustness.push_back(perturbation_from_json(f));
    s.output = j.value("output", s.output);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  if (s.plant_kind != "heat2d" && s.plant_kind != "bundle")
    throw ConfigError("scenario: plant.kind must be heat2d or bundle");
  if (s.gains_kind != "heat" && s.gains_kind != "bundle")
    throw ConfigError("scenario: gains.kind must be heat or bundle");
  if (s.exo_kind != "heat-example" && s.exo_kind != "json")
    throw ConfigError("scenario: exosystem.kind must be heat-example or json");
  if (s.plant_kind == "heat2d" && s.grid < 4) throw ConfigError("scenario: plant.n must be >= 4");
  if (s.exo_kind == "heat-example" && s.modes < 4) throw ConfigError("scenario: exosystem.N must be >= 4");
  if (!(s.dt > 0.0) || s.dt > 1e-2) throw ConfigError("scenario: run.dt must lie in (0, 1e-2]");
  if (s.T < 2.0) throw ConfigError("scenario: run.T must be at least 2 (one metric window plus margin)");
  auto need = [&](const std::string& p, const char* what) {
    if (p.empty()) throw ConfigError(std::string("scenario: ") + what + " needs a path");
    if (!fs::exists(resolve(s.base_dir, p)))
      throw ConfigError(std::string("scenario: ") + what + " path does not exist: " + p);
  };
  if (s.plant_kind == "bundle") need(s.plant_path, "plant bundle");
  if (s.gains_kind == "bundle") need(s.gains_path, "gains bundle");
  if (s.exo_kind == "json") need(s.exo_path, "exosystem json");
  return s;
}

json scenario_to_json(const Scenario& s) {
  const auto stored = [&](const std::string& p) {
    return p.empty() ? p : fs::absolute(resolve(s.base_dir, p)).string();
  };
  json fam = json::array();
  for (const PerturbationSpec& f : s.family) fam.push_back(perturbation_to_json(f));
  json rob = json::array();
  for (const PerturbationSpec& f : s.robustness) rob.push_back(perturbation_to_json(f));
  json ctrl = params_to_json(s.params);
  ctrl["family"] = fam;
  return {{"schema_version", s.schema_version},
          {"plant", {{"kind", s.plant_kind}, {"n", s.grid}, {"path", stored(s.plant_path)}}},
          {"gains", {{"kind", s.gains_kind}, {"path", stored(s.gains_path)}}},
          {"exosystem", {{"kind", s.exo_kind}, {"N", s.modes}, {"path", stored(s.exo_path)}}},
          {"controller", ctrl},
          {"run",
           {{"T", s.T},
            {"dt", s.dt},
            {"v0", s.zero_exo ? "zero" : "profile"},
            {"probe_stride", s.probe_stride}}},
          {"analysis",
           {{"g_conditions", s.check_g},
            {"regulator", s.check_regulator},
            {"im_norm", s.check_im_norm},
            {"similarity", s.check_similarity},
            {"scan", s.scan},
            {"decay", s.decay},
            {"growth_kmin", s.growth_kmin},
            {"growth_kmax", s.growth_kmax},
            {"decay_t0", s.decay_t0},
            {"decay_t1", s.decay_t1}}},
          {"robustness", rob},
          {"output", s.output}};
}

Scenario load_scenario(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("scenario file not found: " + path.string());
  return scenario_from_json(read_json(path), path.parent_path());
}

PlantModel scenario_plant(const Scenario& s) {
  if (s.plant_kind == "bundle") return read_plant_bundle(resolve(s.base_dir, s.plant_path));
  return build_heat2d(s.grid);
}

StabilizationGains scenario_gains(const Scenario& s, const PlantModel& plant) {
  if (s.gains_kind == "bundle") {
    StabilizationGains g = read_gains_bundle(resolve(s.base_dir, s.gains_path));
    validate(plant, g);
    return g;
  }
  return heat_stabilizers(plant);
}

TruncatedExosystem scenario_exosystem(const Scenario& s) {
  TruncatedExosystem exo = s.exo_kind == "json"
                               ? exosystem_from_json(read_json(resolve(s.base_dir, s.exo_path)))
                               : heat_example_profiles(s.modes);
  if (s.zero_exo) exo.v0.setZero();
  return exo;
}

}  // namespace imreg
