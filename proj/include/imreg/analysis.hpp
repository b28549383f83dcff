#pragma once

#include <functional>
#include <string>
#include <vector>

#include "imreg/closedloop.hpp"
#include "imreg/exosystem.hpp"
#include "imreg/numerics.hpp"
#include "imreg/plant.hpp"
#include "imreg/synthesis.hpp"

namespace imreg {

// ---- G-conditions ---------------------------------------------------------

struct GConditionMode {
  int k = 0;
  double omega = 0.0;
  int rank_shifted = 0;  // rank(i omega_k - calG1)
  int rank_joint = 0;    // rank([i omega_k - calG1 | calG2])
  int rank_block = 0;    // rank(G2k)
  bool intersection_trivial = false;
  bool block_injective = false;
  bool pass = false;
};

struct GConditionReport {
  std::vector<GConditionMode> modes;
  int rank_calG2 = 0;
  bool ker_trivial = false;  // full column rank of calG2
  bool pass = false;
};

/// Rank tests with singular-value threshold rel_tol relative to the
/// largest singular value of each tested matrix.
GConditionReport check_g_conditions(const ControllerRealization& ctrl, double rel_tol = 1e-10);

// ---- Regulator equations --------------------------------------------------

struct RegulatorMode {
  int k = 0;
  double omega = 0.0;
  double residual = 0.0;  // ||Ce Sigma phi_k + De phi_k||
  double scale = 0.0;     // ||Ce Sigma phi_k|| + ||De phi_k||
};

struct RegulatorSolution {
  CMatrix Sigma;  // columns Sigma phi_k
  std::vector<RegulatorMode> modes;
  double max_residual = 0.0;
  double relative = 0.0;  // max residual / max scale
};

/// Solves (i omega_k - Ae) Sigma phi_k = Be phi_k mode by mode. Throws
/// Error naming the mode if i omega_k is in the spectrum of Ae.
RegulatorSolution regulator_residuals(const ClosedLoopModel& cl, const TruncatedExosystem& exo);

// ---- Internal-model norm identity ----------------------------------------

struct ImNormMode {
  int k = 0;
  double lhs = 0.0;  // ||R(i omega_k, G1 - G2 G2*) G2||
  double rhs = 0.0;  // ||G2k^{-1}|| (pseudoinverse for non-square blocks)
  double deviation = 0.0;  // |lhs - rhs| / max(1, rhs)
  bool square = true;
};

std::vector<ImNormMode> im_norm_identity(const CMatrix& G1, const CMatrix& G2,
                                         const std::vector<ModeBlock>& blocks);

/// Largest deviation over square blocks.
double max_deviation(const std::vector<ImNormMode>& rows);

// ---- Resolvent scan and growth fit ---------------------------------------

struct ScanPoint {
  double omega = 0.0;
  double norm = 0.0;  // kInfinity on the spectrum
  bool peak = false;  // omega is an exosystem frequency
};

/// ||R(i omega, M)|| over the given frequencies.
std::vector<ScanPoint> resolvent_scan(const CMatrix& M, const std::vector<double>& omegas,
                                      const std::vector<double>& peaks = {});

/// Frequencies omega_k together with the midpoints between neighbours.
std::vector<double> peak_and_midpoint_grid(const TruncatedExosystem& exo);

struct GrowthFit {
  enum class Law { Polynomial, Exponential };
  Law law = Law::Polynomial;
  double alpha = 0.0;  // log-log slope
  double rate = 0.0;   // semilog slope
  double r2_polynomial = 0.0;
  double r2_exponential = 0.0;
  double M0 = 0.0;  // max value / g(omega) for the selected law
  std::size_t points = 0;
};

/// Fits value ~ omega^alpha and value ~ exp(rate omega) to (omega, value)
/// pairs with omega > 0 and finite value; picks the law with larger R^2.
/// Needs at least 6 usable points.
GrowthFit fit_growth(const std::vector<double>& omegas, const std::vector<double>& values);

/// Peak points (omega > 0) of a scan within [omega_min, omega_max].
GrowthFit fit_growth(const std::vector<ScanPoint>& scan, double omega_min, double omega_max);

// ---- Decay fits ------------------------------------------------------------

struct DecayFit {
  double t0 = 0.0;
  double t1 = 0.0;
  std::size_t points = 0;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  bool log_corrected = false;
  double alpha = 0.0;
  double predicted_slope = 0.0;  // -1/alpha
  double band_lo = 0.0;
  double band_hi = 0.0;
  bool within_band = false;
  double Mee = 0.0;            // envelope constant fitted on the first half of the window
  bool respects_bound = false;  // second half stays below Mee * rate(t)
  bool short_window = false;    // window shorter than one decade
};

/// Least-squares slope of log I against log t (or log(t / log t) when
/// log_correction is set) over [t0, t1]. The band is the predicted slope
/// -1/alpha widened by rel_band on each side.
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& I, double t0,
                   double t1, double alpha, bool log_correction = false, double rel_band = 0.25);

// ---- Robustness suite ----------------------------------------------------

struct RobustnessRow {
  std::string label;
  double abscissa = 0.0;
  bool stable = false;
  double I_initial = 0.0;
  double I_final = 0.0;
  double ratio = 0.0;  // I(T - 1) / I(pi)
  double regulator_relative = 0.0;
  std::string status;
};

struct RobustnessOptions {
  double T = 12.0 * 3.141592653589793;
  double dt = 1e-3;
  double t_initial = 3.141592653589793;
  unsigned workers = 0;  // 0: hardware concurrency
};

/// For every spec the plant and exosystem are perturbed, the controller is
/// kept, and the closed loop is checked, simulated from zero and measured.
std::vector<RobustnessRow> robustness_suite(const PlantModel& plant,
                                            const ControllerRealization& ctrl,
                                            const TruncatedExosystem& exo,
                                            const std::vector<PerturbationSpec>& specs,
                                            const RobustnessOptions& opts);

/// Spectral abscissa of the closed loop for a sequence of truncation orders.
struct MarginPoint {
  int N = 0;
  double abscissa = 0.0;
};

std::vector<MarginPoint> margin_versus_truncation(
    const PlantModel& plant, const StabilizationGains& gains, const SynthesisParams& params,
    const std::function<TruncatedExosystem(int)>& make_exo, const std::vector<int>& orders);

}  // namespace imreg
