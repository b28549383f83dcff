#pragma once

#include <span>
#include <string>
#include <vector>

#include "imreg/numerics.hpp"

namespace imreg {

/// Decay law of a coefficient sequence c_k (k != 0): |c_k| = scale * |k|^-exponent
/// for kind Polynomial, scale * exp(-exponent |k|) for kind Exponential.
struct DecayLaw {
  enum class Kind { None, Polynomial, Exponential };
  Kind kind = Kind::None;
  double exponent = 0.0;
  double scale = 1.0;
};

/// Declared decay laws of the stored coefficient sequences.
struct SignalProfile {
  DecayLaw v0;
  DecayLaw E;
  DecayLaw F;
};

/// Diagonal exosystem S = diag(i omega_k) truncated to modes k = -N..N.
///
/// Vectors over modes are ordered k = -N, ..., 0, ..., N; mode k sits at
/// position k + N. Column j of E (resp. F) is E phi_k (resp. F phi_k).
/// The generated signals are w(t) = E v(t) and y_ref(t) = -F v(t).
struct TruncatedExosystem {
  double tau = 0.0;  // period, 0 when frequencies were user-supplied
  int N = 0;
  std::vector<double> omega;
  CVector v0;
  CMatrix E;  // disturbance_dim x (2N+1)
  CMatrix F;  // output_dim x (2N+1)
  SignalProfile profile;

  int mode_count() const { return 2 * N + 1; }
  int index_of(int k) const { return k + N; }
  int mode_of(int index) const { return index - N; }
  Eigen::Index output_dim() const { return F.rows(); }
  Eigen::Index disturbance_dim() const { return E.rows(); }
};

/// omega_k = 2 pi k / tau, k = -N..N; v0, E, F zero.
TruncatedExosystem build_periodic(double tau, int N, Eigen::Index output_dim = 1,
                                  Eigen::Index disturbance_dim = 1);

/// User-supplied frequency list (length 2N+1, ordered by mode index).
/// Frequencies must be distinct.
TruncatedExosystem build_from_frequencies(std::vector<double> omega,
                                          Eigen::Index output_dim = 1,
                                          Eigen::Index disturbance_dim = 1);

/// Smallest gap inf_{k != l} |omega_k - omega_l|.
double frequency_gap(const TruncatedExosystem& exo);

/// v(t) = exp(S t) v0.
CVector exo_state(const TruncatedExosystem& exo, double t);

/// Phases exp(i omega_k t) for all modes.
CVector exo_phases(const TruncatedExosystem& exo, double t);

/// y_ref(t) = -F v(t).
CVector reference_signal(const TruncatedExosystem& exo, double t);

/// w(t) = E v(t).
CVector disturbance_signal(const TruncatedExosystem& exo, double t);

/// Largest |c_{-k} - conj(c_k)| over the mode-weighted columns (E phi_k v0_k and
/// F phi_k v0_k), relative to the largest column norm. Zero for real signals.
double conjugate_symmetry_defect(const TruncatedExosystem& exo);

/// Throws unless the weighted E and F columns are conjugate symmetric to
/// 1e-12 relative and the frequencies satisfy omega_{-k} = -omega_k.
void require_real_signals(const TruncatedExosystem& exo);

/// Complex Fourier coefficients c_k, k = -N..N, in the exp(i omega_k t)
/// convention, from samples (times[j], values[j]) uniformly covering one
/// period [t0, t0 + tau). Requires at least 4N + 4 samples.
CVector fourier_ingest(std::span<const double> times, std::span<const double> values, double tau,
                       int N);

/// Fourier synthesis sum_k c_k exp(2 pi i k t / tau) of real-valued signals.
double fourier_synthesize(const CVector& coeffs, double tau, double t);

/// Default reference of the heat study: the 2 pi-periodic C^1 piecewise
/// cubic y(t) = (2 pi^2 t - 3 pi t^2 + t^3) / 12 on [0, 2 pi), whose Fourier
/// series is sum_{k>=1} sin(k t) / k^3.
double heat_reference_waveform(double t);

/// Disturbance of the heat study, d(t) = cos(4t) + sin(t) / 2.
double heat_disturbance_waveform(double t);

/// Exosystem of the heat study (tau = 2 pi, N >= 4): v0_0 = 1,
/// v0_k = |k|^{-3/5}; F phi_k = -y_r(k) |k|^{3/5} (F phi_0 = 0) with y_r the
/// Fourier coefficients of heat_reference_waveform obtained by
/// fourier_ingest; E reproduces heat_disturbance_waveform.
TruncatedExosystem heat_example_profiles(int N);

/// Least-squares slope of log|c_k| versus log|k| over kmin <= |k| <= kmax
/// for one row of a coefficient matrix (columns ordered by mode).
double loglog_decay_exponent(const TruncatedExosystem& exo, const CMatrix& coeffs, int row,
                             int kmin, int kmax);

}  // namespace imreg
