#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "imreg/analysis.hpp"
#include "imreg/closedloop.hpp"
#include "imreg/exosystem.hpp"
#include "imreg/plant.hpp"
#include "imreg/synthesis.hpp"

namespace testbed {

using namespace imreg;

struct Heat {
  PlantModel plant;
  StabilizationGains gains;
  TruncatedExosystem exo;
};

inline Heat heat(int grid = 8, int N = 10) {
  Heat h;
  h.plant = build_heat2d(grid);
  h.gains = heat_stabilizers(h.plant);
  h.exo = heat_example_profiles(N);
  return h;
}

// Stable 3-state plant with two inputs, two outputs and feedthrough.
inline PlantModel two_channel_plant() {
  PlantModel P;
  P.A = CMatrix::Zero(3, 3);
  P.A.diagonal() << -1.0, -2.0, -3.0;
  P.B.resize(3, 2);
  P.B << 1.0, 0.0, 0.5, 1.0, 0.0, 0.8;
  P.C.resize(2, 3);
  P.C << 1.0, 0.3, 0.0, 0.0, 1.0, 0.6;
  P.D.resize(2, 2);
  P.D << 0.2, 0.0, 0.1, 0.3;
  P.Bd.resize(3, 1);
  P.Bd << 0.4, 0.2, 1.0;
  return P;
}

inline StabilizationGains zero_gains(const PlantModel& P) {
  return {CMatrix::Zero(P.input_dim(), P.state_dim()), CMatrix::Zero(P.state_dim(), P.output_dim())};
}

// Real signals on modes k = -2..2 with frequency k.
inline TruncatedExosystem two_channel_exosystem() {
  TruncatedExosystem exo = build_periodic(2.0 * std::numbers::pi, 2, 2, 1);
  for (int k = -2; k <= 2; ++k) {
    const int j = exo.index_of(k);
    exo.v0(j) = 1.0;
    exo.E(0, j) = k == 0 ? Complex(0.5) : Complex(0.3 / std::abs(k), 0.1 * k);
    exo.F(0, j) = k == 0 ? Complex(-0.2) : Complex(0.4, -0.2 * k);
    exo.F(1, j) = k == 0 ? Complex(0.1) : Complex(-0.1 * std::abs(k), 0.3 * k);
  }
  return exo;
}

// Decay-rate bench: P_L(i w) = 1 / (1 + i w), frequencies +-2 pi k for
// k = kmin..kmax plus an unforced zero mode, reference coefficients
// -k^{-3/2} with unit-modulus data of random phase.
struct DecayBench {
  PlantModel plant;
  StabilizationGains gains;
  TruncatedExosystem exo;
  SynthesisParams params;
  double alpha = 0.0;
};

inline DecayBench decay_bench(int kmin = 6, int kmax = 60, double gamma0 = 182.0,
                              unsigned seed = 7) {
  DecayBench b;
  b.plant.A = CMatrix::Constant(1, 1, -1.0);
  b.plant.B = CMatrix::Constant(1, 1, 1.0);
  b.plant.Bd = CMatrix::Zero(1, 1);
  b.plant.C = CMatrix::Constant(1, 1, 1.0);
  b.plant.D = CMatrix::Zero(1, 1);
  b.gains = zero_gains(b.plant);

  std::vector<double> w;
  std::vector<int> kk;
  for (int k = kmax; k >= kmin; --k) {
    w.push_back(-2.0 * std::numbers::pi * k);
    kk.push_back(k);
  }
  w.push_back(0.0);
  kk.push_back(0);
  for (int k = kmin; k <= kmax; ++k) {
    w.push_back(2.0 * std::numbers::pi * k);
    kk.push_back(k);
  }
  b.exo = build_from_frequencies(w, 1, 1);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  const int M = b.exo.N;
  b.exo.v0(M) = 0.0;
  b.exo.F(0, M) = 0.0;
  for (int i = M + 1; i < b.exo.mode_count(); ++i) {
    b.exo.v0(i) = std::polar(1.0, phase(rng));
    b.exo.v0(2 * M - i) = std::conj(b.exo.v0(i));
  }
  for (int i = 0; i < b.exo.mode_count(); ++i)
    if (kk[i] != 0) b.exo.F(0, i) = -std::pow(kk[i], -1.5);

  b.params.variant = Variant::ReducedIM;
  b.params.law = GainLaw::Power;
  b.params.gamma0 = gamma0;
  b.params.beta = 0.625;
  b.alpha = 2.0 * (1.0 + b.params.beta);
  return b;
}

inline double relative_error(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

}  // namespace testbed
