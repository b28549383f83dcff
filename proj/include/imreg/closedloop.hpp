#pragma once

#include <optional>
#include <vector>

#include "imreg/exosystem.hpp"
#include "imreg/numerics.hpp"
#include "imreg/plant.hpp"
#include "imreg/synthesis.hpp"

namespace imreg {

/// Offsets of the state blocks inside x_e = (x, z0, z1).
struct BlockIndex {
  Eigen::Index plant_offset = 0;
  Eigen::Index plant_dim = 0;
  Eigen::Index im_offset = 0;  // internal model Z0
  Eigen::Index im_dim = 0;
  Eigen::Index copy_offset = 0;  // plant-sized controller part
  Eigen::Index copy_dim = 0;
};

/// Composite system x_e' = Ae x_e + Be v, e = Ce x_e + De v with v the
/// exosystem state. U maps x_e to the plant input u = K z.
struct ClosedLoopModel {
  CMatrix Ae;
  CMatrix Be;
  CMatrix Ce;
  CMatrix De;
  CMatrix U;
  BlockIndex blocks;
  std::optional<HeatGeometry> geometry;

  Eigen::Index dim() const { return Ae.rows(); }
};

/// Ae = [[A, B K], [calG2 C, calG1 + calG2 D K]], Be = [[Bd E], [calG2 F]],
/// Ce = [C, D K], De = F. When the plant is the one the controller was
/// built for, cross-checks the expanded 3x3 block form to 1e-12 and throws
/// on mismatch.
ClosedLoopModel assemble(const PlantModel& plant, const ControllerRealization& ctrl,
                         const TruncatedExosystem& exo);

/// Q_e Ae Q_e with the involution Q_e of the controller structure, which
/// is block upper triangular for a correct synthesis.
struct TriangularizationReport {
  double ae_norm = 0.0;
  double involution_residual = 0.0;    // ||Q_e^2 - I||
  std::vector<double> zero_blocks;     // norms of blocks (2,1), (3,1), (3,2)
  double max_zero_block = 0.0;
  double relative = 0.0;               // max_zero_block / ||Ae||
  std::vector<double> diagonal_abscissa;  // three diagonal blocks
};

TriangularizationReport similarity_triangularization(const ClosedLoopModel& cl,
                                                     const ControllerRealization& ctrl);

struct SimulationOptions {
  double T = 1.0;
  double dt = 1e-3;
  CVector xe0;                 // empty means zero
  double probe_stride = 0.0;   // Gamma3 snapshots every probe_stride s (0: off)
  double state_stride = 0.0;   // store x_e every state_stride s (0: off)
};

struct Trajectory {
  double dt = 0.0;
  std::vector<double> t;
  Eigen::MatrixXd y;       // p x samples
  Eigen::MatrixXd y_ref;   // p x samples
  Eigen::MatrixXd e;       // p x samples
  std::vector<double> e_norm;
  Eigen::MatrixXd u;       // m x samples
  double max_imag_residue = 0.0;

  std::vector<double> probe_t;
  std::vector<RVector> gamma3;
  std::vector<double> state_t;
  std::vector<CVector> states;
};

/// Trapezoidal integration with the exosystem forcing evaluated exactly.
/// Throws if the imaginary residue of the outputs exceeds 1e-8 relative.
Trajectory simulate(const ClosedLoopModel& cl, const TruncatedExosystem& exo,
                    const SimulationOptions& opts);

struct DecaySamples {
  std::vector<double> t;
  std::vector<double> I;
};

/// I(t) = int_t^{t+window} ||e(s)|| ds sampled at the given stride.
DecaySamples error_metrics(const Trajectory& traj, double stride = 0.1, double window = 1.0);

/// I at the sample closest to t.
double decay_value_at(const DecaySamples& d, double t);

}  // namespace imreg
