#include <doctest.h>

#include <cmath>
#include <numbers>

#include "imreg/exosystem.hpp"

using namespace imreg;
using std::numbers::pi;

TEST_SUITE("exosystem") {

TEST_CASE("periodic frequencies and gap") {
  const TruncatedExosystem e = build_periodic(2.0 * pi, 3);
  CHECK(e.mode_count() == 7);
  CHECK(e.omega[e.index_of(-3)] == doctest::Approx(-3.0));
  CHECK(e.omega[e.index_of(2)] == doctest::Approx(2.0));
  CHECK(frequency_gap(e) == doctest::Approx(1.0));
  CHECK(frequency_gap(build_periodic(1.0, 2)) == doctest::Approx(2.0 * pi));
}

TEST_CASE("user frequencies must be distinct and odd in number") {
  CHECK_THROWS_AS(build_from_frequencies({-1.0, 0.0, 1.0, 2.0}), Error);
  CHECK_THROWS_AS(build_from_frequencies({-1.0, 1.0, 1.0}), Error);
  const TruncatedExosystem e = build_from_frequencies({-2.5, 0.0, 2.5});
  CHECK(e.N == 1);
  CHECK(frequency_gap(e) == doctest::Approx(2.5));
}

TEST_CASE("exosystem state rotates each mode") {
  TruncatedExosystem e = build_periodic(2.0 * pi, 2);
  e.v0.setOnes();
  const CVector v = exo_state(e, 0.7);
  for (int k = -2; k <= 2; ++k)
    CHECK(std::abs(v(e.index_of(k)) - std::exp(Complex(0.0, 0.7 * k))) < 1e-15);
}

TEST_CASE("cubic reference waveform") {
  CHECK(heat_reference_waveform(0.0) == doctest::Approx(0.0));
  // sum sin(k t) / k^3 at t = pi / 2 is 1 - 1/27 + 1/125 - ... = pi^3 / 32.
  CHECK(heat_reference_waveform(pi / 2.0) == doctest::Approx(pi * pi * pi / 32.0).epsilon(1e-12));
  CHECK(heat_reference_waveform(2.0 * pi + 1.0) == doctest::Approx(heat_reference_waveform(1.0)));
  CHECK(heat_reference_waveform(-1.0) == doctest::Approx(-heat_reference_waveform(1.0)));
}

TEST_CASE("Fourier coefficients of the cubic are -i / (2 k^3)") {
  const std::size_t M = 2048;
  std::vector<double> ts(M), ys(M);
  for (std::size_t j = 0; j < M; ++j) {
    ts[j] = 2.0 * pi * static_cast<double>(j) / static_cast<double>(M);
    ys[j] = heat_reference_waveform(ts[j]);
  }
  const int N = 10;
  const CVector c = fourier_ingest(ts, ys, 2.0 * pi, N);
  CHECK(std::abs(c(N)) < 1e-12);
  for (int k = 1; k <= N; ++k) {
    const Complex expected(0.0, -0.5 / (k * k * k));
    CHECK(std::abs(c(N + k) - expected) < 1e-7);
    CHECK(std::abs(c(N - k) - std::conj(expected)) < 1e-7);
  }
  CHECK(fourier_synthesize(c, 2.0 * pi, 1.3) == doctest::Approx(heat_reference_waveform(1.3)).epsilon(1e-3));
}

TEST_CASE("fourier ingest rejects short or irregular samples") {
  std::vector<double> ts{0.0, 1.0, 2.0}, ys{0.0, 0.0, 0.0};
  CHECK_THROWS_AS(fourier_ingest(ts, ys, 3.0, 2), Error);
}

TEST_CASE("heat exosystem reproduces its signals") {
  const TruncatedExosystem e = heat_example_profiles(10);
  CHECK(e.v0(e.index_of(0)) == Complex(1.0));
  CHECK(std::abs(e.v0(e.index_of(-5))) == doctest::Approx(std::pow(5.0, -0.6)));
  CHECK(std::abs(e.F(0, e.index_of(0))) == 0.0);
  CHECK(conjugate_symmetry_defect(e) < 1e-12);
  CHECK_NOTHROW(require_real_signals(e));
  for (double t : {0.0, 0.4, 2.9, 5.5}) {
    CHECK(std::abs(disturbance_signal(e, t)(0).real() - heat_disturbance_waveform(t)) < 1e-12);
    CHECK(std::abs(disturbance_signal(e, t)(0).imag()) < 1e-12);
    // Truncation at N = 10 leaves a tail below sum_{k>10} 1/k^3.
    CHECK(std::abs(reference_signal(e, t)(0) - heat_reference_waveform(t)) < 5e-3);
  }
  CHECK_THROWS_AS(heat_example_profiles(3), Error);
}

TEST_CASE("decay exponent of the heat reference coefficients") {
  const TruncatedExosystem e = heat_example_profiles(10);
  // |F phi_k| = |k|^{-3} |k|^{3/5} / 2
  CHECK(loglog_decay_exponent(e, e.F, 0, 2, 10) == doctest::Approx(-2.4).epsilon(1e-6));
}

TEST_CASE("complex signals are rejected") {
  TruncatedExosystem e = build_periodic(2.0 * pi, 2);
  e.v0.setOnes();
  e.F(0, e.index_of(1)) = 1.0;
  CHECK(conjugate_symmetry_defect(e) > 0.5);
  CHECK_THROWS_AS(require_real_signals(e), Error);
}

}
