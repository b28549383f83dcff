#include "imreg/exosystem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace imreg {

using std::numbers::pi;

TruncatedExosystem build_periodic(double tau, int N, Eigen::Index output_dim,
                                  Eigen::Index disturbance_dim) {
  if (!(tau > 0.0)) throw Error("exosystem: period must be positive");
  if (N < 0) throw Error("exosystem: truncation order must be nonnegative");
  std::vector<double> omega(2 * N + 1);
  for (int k = -N; k <= N; ++k) omega[k + N] = 2.0 * pi * k / tau;
  TruncatedExosystem exo = build_from_frequencies(std::move(omega), output_dim, disturbance_dim);
  exo.tau = tau;
  return exo;
}

TruncatedExosystem build_from_frequencies(std::vector<double> omega, Eigen::Index output_dim,
                                          Eigen::Index disturbance_dim) {
  if (omega.empty() || omega.size() % 2 == 0)
    throw Error("exosystem: frequency list must have odd length 2N+1");
  TruncatedExosystem exo;
  exo.N = static_cast<int>(omega.size() / 2);
  exo.omega = std::move(omega);
  const auto m = static_cast<Eigen::Index>(exo.omega.size());
  exo.v0 = CVector::Zero(m);
  exo.E = CMatrix::Zero(disturbance_dim, m);
  exo.F = CMatrix::Zero(output_dim, m);
  if (exo.omega.size() > 1 && !(frequency_gap(exo) > 0.0))
    throw Error("exosystem: frequencies must be distinct");
  return exo;
}

double frequency_gap(const TruncatedExosystem& exo) {
  std::vector<double> w = exo.omega;
  std::sort(w.begin(), w.end());
  double gap = kInfinity;
  for (std::size_t i = 1; i < w.size(); ++i) gap = std::min(gap, w[i] - w[i - 1]);
  return gap;
}

CVector exo_phases(const TruncatedExosystem& exo, double t) {
  CVector ph(exo.mode_count());
  for (int j = 0; j < exo.mode_count(); ++j) ph(j) = std::polar(1.0, exo.omega[j] * t);
  return ph;
}

CVector exo_state(const TruncatedExosystem& exo, double t) {
  return exo_phases(exo, t).cwiseProduct(exo.v0);
}

CVector reference_signal(const TruncatedExosystem& exo, double t) {
  return -(exo.F * exo_state(exo, t));
}

CVector disturbance_signal(const TruncatedExosystem& exo, double t) {
  return exo.E * exo_state(exo, t);
}

double conjugate_symmetry_defect(const TruncatedExosystem& exo) {
  const CMatrix We = exo.E * exo.v0.asDiagonal();
  const CMatrix Wf = exo.F * exo.v0.asDiagonal();
  double scale = 0.0;
  double worst = 0.0;
  for (int k = -exo.N; k <= exo.N; ++k) {
    const int a = exo.index_of(k);
    const int b = exo.index_of(-k);
    scale = std::max({scale, We.col(a).norm(), Wf.col(a).norm()});
    worst = std::max(worst, (We.col(b) - We.col(a).conjugate()).norm());
    worst = std::max(worst, (Wf.col(b) - Wf.col(a).conjugate()).norm());
  }
  return scale > 0.0 ? worst / scale : 0.0;
}

void require_real_signals(const TruncatedExosystem& exo) {
  for (int k = 0; k <= exo.N; ++k) {
    const double a = exo.omega[exo.index_of(k)];
    const double b = exo.omega[exo.index_of(-k)];
    if (std::abs(a + b) > 1e-12 * std::max(1.0, std::abs(a)))
      throw Error("exosystem: frequencies are not symmetric (omega_{-k} != -omega_k)");
  }
  if (conjugate_symmetry_defect(exo) > 1e-12)
    throw Error("exosystem: coefficients are not conjugate symmetric");
}

CVector fourier_ingest(std::span<const double> times, std::span<const double> values, double tau,
                       int N) {
  if (times.size() != values.size()) throw Error("fourier_ingest: times/values size mismatch");
  if (!(tau > 0.0) || N < 0) throw Error("fourier_ingest: need tau > 0 and N >= 0");
  const std::size_t M = times.size();
  if (M < static_cast<std::size_t>(4 * N + 4))
    throw Error("fourier_ingest: need at least 4N+4 samples");
  const double h = tau / static_cast<double>(M);
  for (std::size_t j = 1; j < M; ++j) {
    if (std::abs((times[j] - times[j - 1]) - h) > 1e-9 * h)
      throw Error("fourier_ingest: samples are not uniform over one period");
  }
  CVector c = CVector::Zero(2 * N + 1);
  for (int k = -N; k <= N; ++k) {
    const double w = 2.0 * pi * k / tau;
    Complex acc{0.0, 0.0};
    for (std::size_t j = 0; j < M; ++j) acc += values[j] * std::polar(1.0, -w * times[j]);
    c(k + N) = acc / static_cast<double>(M);
  }
  return c;
}

double fourier_synthesize(const CVector& coeffs, double tau, double t) {
  const int N = static_cast<int>(coeffs.size() / 2);
  Complex acc{0.0, 0.0};
  for (int k = -N; k <= N; ++k) acc += coeffs(k + N) * std::polar(1.0, 2.0 * pi * k * t / tau);
  return acc.real();
}

double heat_reference_waveform(double t) {
  const double s = t - 2.0 * pi * std::floor(t / (2.0 * pi));
  return (2.0 * pi * pi * s - 3.0 * pi * s * s + s * s * s) / 12.0;
}

double heat_disturbance_waveform(double t) { return std::cos(4.0 * t) + 0.5 * std::sin(t); }

TruncatedExosystem heat_example_profiles(int N) {
  if (N < 4) throw Error("heat exosystem: N must be at least 4");
  TruncatedExosystem exo = build_periodic(2.0 * pi, N, 1, 1);

  for (int k = -N; k <= N; ++k)
    exo.v0(exo.index_of(k)) = k == 0 ? 1.0 : std::pow(std::abs(k), -0.6);

  // Reference coefficients from samples; 4096 points keep aliasing far below 1e-10.
  const std::size_t M = 4096;
  std::vector<double> ts(M);
  std::vector<double> ys(M);
  for (std::size_t j = 0; j < M; ++j) {
    ts[j] = 2.0 * pi * static_cast<double>(j) / static_cast<double>(M);
    ys[j] = heat_reference_waveform(ts[j]);
  }
  const CVector yr = fourier_ingest(ts, ys, 2.0 * pi, N);
  for (int k = -N; k <= N; ++k) {
    if (k == 0) continue;  // F phi_0 = 0
    exo.F(0, exo.index_of(k)) = -yr(k + N) * std::pow(std::abs(k), 0.6);
  }

  // d(t) = cos 4t + sin(t)/2: coefficients 1/2 at k = +-4 and -+i/4 at k = +-1.
  auto set_disturbance = [&](int k, Complex coeff) {
    exo.E(0, exo.index_of(k)) = coeff / exo.v0(exo.index_of(k));
  };
  set_disturbance(4, 0.5);
  set_disturbance(-4, 0.5);
  set_disturbance(1, Complex(0.0, -0.25));
  set_disturbance(-1, Complex(0.0, 0.25));

  exo.profile.v0 = {DecayLaw::Kind::Polynomial, 0.6, 1.0};
  exo.profile.F = {DecayLaw::Kind::Polynomial, 2.4, 0.5};
  exo.profile.E = {DecayLaw::Kind::None, 0.0, 1.0};
  return exo;
}

double loglog_decay_exponent(const TruncatedExosystem& exo, const CMatrix& coeffs, int row,
                             int kmin, int kmax) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (int k = -exo.N; k <= exo.N; ++k) {
    const int ak = std::abs(k);
    if (ak < kmin || ak > kmax) continue;
    const double mag = std::abs(coeffs(row, exo.index_of(k)));
    if (mag <= 0.0) continue;
    xs.push_back(std::log(static_cast<double>(ak)));
    ys.push_back(std::log(mag));
  }
  if (xs.size() < 2) throw Error("decay exponent: not enough nonzero coefficients");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace imreg
