#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "imreg/analysis.hpp"
#include "imreg/closedloop.hpp"
#include "imreg/exosystem.hpp"
#include "imreg/plant.hpp"
#include "imreg/synthesis.hpp"

namespace imreg {

namespace fs = std::filesystem;
using json = nlohmann::json;

/// Invalid or missing configuration (scenario fields, paths, bundles).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Matrix text format: first line "rows cols", then one "re im" pair per
// entry in row-major order, 17 significant digits.
void write_matrix(const fs::path& path, const CMatrix& M);
CMatrix read_matrix(const fs::path& path);

/// A.txt, B.txt, Bd.txt, C.txt, D.txt and plant.json (geometry sidecar).
void write_plant_bundle(const fs::path& dir, const PlantModel& plant);
PlantModel read_plant_bundle(const fs::path& dir);

/// K2.txt and L1.txt.
void write_gains_bundle(const fs::path& dir, const StabilizationGains& gains);
StabilizationGains read_gains_bundle(const fs::path& dir);

/// One file per controller operator plus manifest.json.
void write_controller_bundle(const fs::path& dir, const ControllerRealization& ctrl);
ControllerRealization read_controller_bundle(const fs::path& dir);

json exosystem_to_json(const TruncatedExosystem& exo);
TruncatedExosystem exosystem_from_json(const json& j);

json params_to_json(const SynthesisParams& p);
SynthesisParams params_from_json(const json& j, SynthesisParams base = {});

json perturbation_to_json(const PerturbationSpec& s);
PerturbationSpec perturbation_from_json(const json& j);

void write_json(const fs::path& path, const json& j);
json read_json(const fs::path& path);

// CSV outputs, 15 significant digits.
/// Columns t,y,y_ref,e_norm,u (indexed y0,y1,... when multi-channel), rows with t in [t_from, t_to].
void write_trajectory_csv(const fs::path& path, const Trajectory& traj, double t_from = 0.0,
                          double t_to = kInfinity);
/// Columns t,I.
void write_decay_csv(const fs::path& path, const DecaySamples& d);
DecaySamples read_decay_csv(const fs::path& path);
/// Long format t,xi2,x of the Gamma3 probes.
void write_gamma3_csv(const fs::path& path, const Trajectory& traj, const HeatGeometry& geo);
/// Columns omega,norm,peak.
void write_scan_csv(const fs::path& path, const std::vector<ScanPoint>& scan);

/// Scenario document, see README for the schema.
struct Scenario {
  int schema_version = 1;
  fs::path base_dir;

  std::string plant_kind = "heat2d";  // heat2d | bundle
  int grid = 16;
  std::string plant_path;

  std::string gains_kind = "heat";  // heat | bundle
  std::string gains_path;

  std::string exo_kind = "heat-example";  // heat-example | json
  int modes = 10;
  std::string exo_path;

  SynthesisParams params;
  std::vector<PerturbationSpec> family;

  double T = 12.0 * 3.141592653589793;
  double dt = 1e-3;
  bool zero_exo = false;
  double probe_stride = 0.1;

  bool check_g = true;
  bool check_regulator = true;
  bool check_im_norm = true;
  bool check_similarity = true;
  bool scan = true;
  bool decay = true;
  double growth_kmin = 3.0;
  double growth_kmax = 10.0;
  double decay_t0 = 2.0;
  double decay_t1 = 0.0;  // 0: T - 1

  std::vector<PerturbationSpec> robustness;
  std::string output = "out";
};

Scenario scenario_from_json(const json& j, const fs::path& base_dir = {});
json scenario_to_json(const Scenario& s);
Scenario load_scenario(const fs::path& path);

/// The four perturbations of the heat robustness study.
std::vector<PerturbationSpec> default_robustness_specs();

PlantModel scenario_plant(const Scenario& s);
StabilizationGains scenario_gains(const Scenario& s, const PlantModel& plant);
TruncatedExosystem scenario_exosystem(const Scenario& s);

}  // namespace imreg
