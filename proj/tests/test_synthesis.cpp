#include <doctest.h>

#include <cmath>
#include <numbers>

#include "imreg/synthesis.hpp"
#include "testbeds.hpp"

using namespace imreg;
using std::numbers::pi;

TEST_SUITE("synthesis") {

TEST_CASE("gain sequences") {
  SynthesisParams p;
  CHECK(gain_sequence(p, 0, 0.0) == doctest::Approx(12.0));
  CHECK(gain_sequence(p, 4, 4.0) == doctest::Approx(12.0 / (1.0 + std::pow(4.0, 0.625))));
  p.law = GainLaw::Power;
  p.gamma0 = 3.0;
  CHECK(gain_sequence(p, 2, 8.0) == doctest::Approx(3.0 * std::pow(8.0, -0.625)));
  CHECK(gain_sequence(p, 0, 0.0) == doctest::Approx(3.0));
}

TEST_CASE("variant names round trip") {
  for (Variant v : {Variant::NewStructure, Variant::ReducedIM, Variant::NonRobust, Variant::Observer})
    CHECK(variant_from_string(to_string(v)) == v);
  CHECK_THROWS_AS(variant_from_string("pid"), Error);
}

TEST_CASE("heat gains match the closed forms") {
  const auto h = testbed::heat(16, 10);
  const ControllerRealization c = synth_new_structure(h.plant, h.gains, h.exo, {});
  REQUIRE(c.blocks.size() == 21);
  for (const ModeBlock& b : c.blocks) {
    const double k = b.k;
    const double g = 12.0 / (1.0 + std::pow(std::abs(k), 0.625));
    const double r = std::sqrt(k * k + pi * pi * pi * pi);
    const Complex K1k = g * Complex(pi * pi, k) / r;
    const Complex G2k = -g / r;
    CHECK(testbed::relative_error(c.K1(0, b.offset), K1k) <= 0.02);
    CHECK(testbed::relative_error(c.G2(b.offset, 0), G2k) <= 0.02);
  }
}

TEST_CASE("heat realizations pass their self-checks") {
  const auto h = testbed::heat(8, 6);
  for (Variant v : {Variant::NewStructure, Variant::ReducedIM, Variant::NonRobust, Variant::Observer}) {
    SynthesisParams p;
    p.variant = v;
    const ControllerRealization c = synthesize(h.plant, h.gains, h.exo, p);
    CAPTURE(to_string(v));
    CHECK(c.variant == v);
    CHECK(c.self_checks.size() == 2);
    for (const SelfCheckResult& r : c.self_checks) CHECK(r.residual <= kSelfCheckTol);
    CHECK(c.calG1.rows() == c.dim());
    CHECK(c.calG2.rows() == c.dim());
    CHECK(c.K.cols() == c.dim());
  }
}

TEST_CASE("new structure block layout") {
  const auto h = testbed::heat(8, 5);
  const ControllerRealization c = synth_new_structure(h.plant, h.gains, h.exo, {});
  CHECK(c.z0_dim == 11);
  CHECK(c.dim() == 11 + 64);
  CHECK((c.G1.diagonal() - CVector::LinSpaced(11, Complex(0.0, -5.0), Complex(0.0, 5.0))).norm() < 1e-14);
  CHECK((c.L - c.L1 - c.H * c.G2).norm() < 1e-12);
  CHECK((c.calG2.topRows(11) - c.G2).norm() == 0.0);
  CHECK((c.K.rightCols(64) + c.K2).norm() == 0.0);
  REQUIRE(c.block_for_mode(3) != nullptr);
  CHECK(c.block_for_mode(3)->omega == doctest::Approx(3.0));
  CHECK(c.block_for_mode(9) == nullptr);
}

TEST_CASE("observer gains") {
  const auto h = testbed::heat(8, 5);
  SynthesisParams p;
  p.variant = Variant::Observer;
  std::vector<Complex> prof(11);
  for (int k = -5; k <= 5; ++k) prof[k + 5] = 0.5 / (1.0 + k * k);
  p.g2_profile = prof;
  const ControllerRealization c = synth_observer_based(h.plant, h.gains, h.exo, p);
  for (const ModeBlock& b : c.blocks) CHECK(c.G2(b.offset, 0) == prof[b.k + 5]);
  CHECK((c.K2 - c.K21 - c.K1 * c.H).norm() < 1e-12);
  p.g2_profile.pop_back();
  CHECK_THROWS_AS(synth_observer_based(h.plant, h.gains, h.exo, p), Error);
}

TEST_CASE("reduced internal model drops unforced modes") {
  const auto h = testbed::heat(8, 6);
  SynthesisParams p;
  p.variant = Variant::ReducedIM;
  const ControllerRealization c = synthesize(h.plant, h.gains, h.exo, p);
  CHECK(c.blocks.size() == 12);
  CHECK(c.block_for_mode(0) == nullptr);
}

TEST_CASE("reduced internal model grows with the perturbation class") {
  const PlantModel P = testbed::two_channel_plant();
  const auto G = testbed::zero_gains(P);
  const TruncatedExosystem e = testbed::two_channel_exosystem();
  SynthesisParams p;
  p.variant = Variant::ReducedIM;
  p.gamma0 = 1.0;
  const ControllerRealization nominal = synthesize(P, G, e, p);
  PerturbationSpec s;
  s.label = "B x1.1";
  s.B_scale = 1.1;
  PerturbationSpec d;
  d.label = "D x0.5";
  d.D_scale = 0.5;
  const ControllerRealization wide = synthesize(P, G, e, p, {s, d});
  CHECK(nominal.z0_dim == 5);
  CHECK(wide.z0_dim > nominal.z0_dim);
  CHECK(wide.z0_dim <= 10);
}

TEST_CASE("non-surjective P_L is a precondition failure naming the mode") {
  PlantModel P = testbed::two_channel_plant();
  P.B.col(1) = P.B.col(0);
  P.D.col(1) = P.D.col(0);
  const auto G = testbed::zero_gains(P);
  const TruncatedExosystem e = testbed::two_channel_exosystem();
  CHECK_THROWS_WITH_AS(synth_new_structure(P, G, e, {}), doctest::Contains("k="), PreconditionError);
}

TEST_CASE("non-robust synthesis rejects a forced mode at a transfer pole") {
  const auto h = testbed::heat(8, 5);
  SynthesisParams p;
  p.variant = Variant::NonRobust;
  TruncatedExosystem e = h.exo;
  e.F(0, e.index_of(0)) = 0.3;
  CHECK_THROWS_WITH_AS(synth_nonrobust(h.plant, h.gains, e, p), doctest::Contains("untrackable"),
                       PreconditionError);
  CHECK_NOTHROW(synth_nonrobust(h.plant, h.gains, h.exo, p));
}

TEST_CASE("mode invertibility report") {
  const auto h = testbed::heat(8, 4);
  const auto rows = check_mode_invertibility(h.plant, h.gains, h.exo, TransferKind::P);
  REQUIRE(rows.size() == 9);
  CHECK(rows[4].pole);
  CHECK_FALSE(rows[4].invertible);
  CHECK(rows[5].invertible);
  for (const auto& r : check_mode_invertibility(h.plant, h.gains, h.exo, TransferKind::PL))
    CHECK(r.invertible);
}

TEST_CASE("self-checks detect a corrupted H") {
  const auto h = testbed::heat(8, 4);
  ControllerRealization c = synth_new_structure(h.plant, h.gains, h.exo, {});
  c.H.setZero();
  const auto checks = verify_self_checks(h.plant, c);
  CHECK_FALSE(checks[0].pass);
  CHECK_FALSE(checks[1].pass);
}

}
