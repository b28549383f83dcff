#pragma once

#include <optional>
#include <string>
#include <vector>

#include "imreg/exosystem.hpp"
#include "imreg/numerics.hpp"
#include "imreg/plant.hpp"

namespace imreg {

/// Raised when a synthesis precondition fails (singular transfer at an
/// exosystem frequency, untrackable mode, ...). The message names the mode.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Raised when a construction-time identity check exceeds kSelfCheckTol.
class SelfCheckError : public Error {
 public:
  using Error::Error;
};

enum class Variant { NewStructure, ReducedIM, NonRobust, Observer };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);

/// gamma_k sequence used to scale the internal-model gains.
///   Heat:  gamma0 / (1 + |k|^{1/2 + kappa})
///   Power: gamma0 * |omega_k|^{-beta} (gamma0 when omega_k = 0)
enum class GainLaw { Heat, Power };

struct SynthesisParams {
  Variant variant = Variant::NewStructure;
  GainLaw law = GainLaw::Heat;
  double gamma0 = 12.0;
  double kappa = 0.125;
  double beta = 0.625;
  /// Observer variant: G2k = g2k I. Defaults to the gamma_k law when empty.
  std::vector<Complex> g2_profile;
};

/// gamma_k for mode k with frequency omega.
double gain_sequence(const SynthesisParams& params, int k, double omega);

/// Internal-model block of one exosystem mode inside Z0.
struct ModeBlock {
  int k = 0;
  double omega = 0.0;
  Eigen::Index offset = 0;
  Eigen::Index size = 0;
};

struct SelfCheckResult {
  std::string name;
  double residual = 0.0;  // relative
  bool pass = false;
};

/// Controller (calG1, calG2, K) on Z = Z0 x X together with its parts.
///
/// New-structure family (NewStructure, ReducedIM, NonRobust):
///   calG1 = [[G1, G2 (C + D K2)], [0, A + B K2 + L (C + D K2)]]
///   calG2 = [G2; L],  K = [K1, -K2],  L = L1 + H G2,  H : Z0 -> X.
/// Observer:
///   calG1 = [[G1, 0], [(B + L D) K1, A + B K2 + L (C + D K2)]]
///   calG2 = [G2; -L],  K = [K1, K2],  K2 = K21 + K1 H,  H : X -> Z0.
struct ControllerRealization {
  Variant variant = Variant::NewStructure;
  SynthesisParams params;
  std::vector<ModeBlock> blocks;
  Eigen::Index z0_dim = 0;
  Eigen::Index plant_dim = 0;

  CMatrix G1;
  CMatrix G2;
  CMatrix K1;
  CMatrix K2;   // plant-sized gain used in K (K2_full for the observer)
  CMatrix K21;  // observer only: stabilizing part of K2
  CMatrix L;
  CMatrix L1;   // new-structure family: output injection of the stabilized plant
  CMatrix H;

  CMatrix calG1;
  CMatrix calG2;
  CMatrix K;

  std::vector<SelfCheckResult> self_checks;

  Eigen::Index dim() const { return calG1.rows(); }
  const ModeBlock* block_for_mode(int k) const;
};

/// Tolerance of the construction-time identity checks.
inline constexpr double kSelfCheckTol = 1e-8;

ControllerRealization synth_new_structure(const PlantModel& plant, const StabilizationGains& gains,
                                          const TruncatedExosystem& exo,
                                          const SynthesisParams& params);

ControllerRealization synth_observer_based(const PlantModel& plant,
                                           const StabilizationGains& gains,
                                           const TruncatedExosystem& exo,
                                           const SynthesisParams& params);

/// Reduced-order internal model for the class of perturbations `family`
/// (the nominal plant is always included).
ControllerRealization synth_reduced_im(const PlantModel& plant, const StabilizationGains& gains,
                                       const TruncatedExosystem& exo,
                                       const std::vector<PerturbationSpec>& family,
                                       const SynthesisParams& params);

ControllerRealization synth_nonrobust(const PlantModel& plant, const StabilizationGains& gains,
                                      const TruncatedExosystem& exo,
                                      const SynthesisParams& params);

/// Dispatch on params.variant.
ControllerRealization synthesize(const PlantModel& plant, const StabilizationGains& gains,
                                 const TruncatedExosystem& exo, const SynthesisParams& params,
                                 const std::vector<PerturbationSpec>& family = {});

/// Recomputes the structural identities of a realization against the plant
/// (adjoint coupling, Sylvester equation for H, observer B1 identity).
std::vector<SelfCheckResult> verify_self_checks(const PlantModel& plant,
                                                const ControllerRealization& ctrl);

enum class TransferKind { PL, PK, P };

struct ModeInvertibility {
  int k = 0;
  double omega = 0.0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  bool pole = false;        // i omega_k in the spectrum of the relevant matrix
  bool invertible = false;  // sigma_min > 1e-10 sigma_max and not a pole
};

std::vector<ModeInvertibility> check_mode_invertibility(const PlantModel& plant,
                                                        const StabilizationGains& gains,
                                                        const TruncatedExosystem& exo,
                                                        TransferKind which);

}  // namespace imreg
