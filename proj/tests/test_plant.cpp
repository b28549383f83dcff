#include <doctest.h>

#include <cmath>
#include <numbers>

#include "imreg/plant.hpp"
#include "testbeds.hpp"

using namespace imreg;
using std::numbers::pi;

TEST_SUITE("plant") {

TEST_CASE("heat grid geometry") {
  const PlantModel P = build_heat2d(8);
  REQUIRE(P.geometry);
  const HeatGeometry& g = *P.geometry;
  CHECK(P.state_dim() == 64);
  CHECK(P.input_dim() == 1);
  CHECK(P.output_dim() == 1);
  CHECK(g.h == doctest::Approx(1.0 / 7.0));
  CHECK(g.gamma1.size() == 8);
  CHECK(g.gamma3.size() == 8);
  CHECK(g.mass.sum() == doctest::Approx(1.0));
  CHECK(P.D.norm() == 0.0);
  CHECK_THROWS_AS(build_heat2d(3), Error);
}

TEST_CASE("heat operator conserves mass and has a zero mode") {
  const PlantModel P = build_heat2d(10);
  const RVector& w = P.geometry->mass;
  // Neumann Laplacian: constants are in the kernel, mass-weighted A is symmetric.
  CHECK((P.A * CVector::Ones(100)).norm() < 1e-9);
  const CMatrix WA = w.cast<Complex>().asDiagonal() * P.A;
  CHECK((WA - WA.transpose()).norm() < 1e-9 * WA.norm());
  CHECK(spectral_abscissa(P.A) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("heat transfer functions match 1/lambda and 1/(lambda + pi^2)") {
  const PlantModel P = build_heat2d(16);
  const StabilizationGains G = heat_stabilizers(P);
  for (Complex l : {Complex(1.0), Complex(0.0, 1.0), Complex(0.0, 2.0), Complex(0.0, 4.0)})
    CHECK(testbed::relative_error(transfer(P, l)(0, 0), 1.0 / l) <= 0.02);
  for (Complex l : {Complex(0.0), Complex(0.0, 1.0), Complex(0.0, 4.0)})
    CHECK(testbed::relative_error(transfer_PL(P, G, l)(0, 0), 1.0 / (l + pi * pi)) <= 0.02);
  CHECK_THROWS_WITH_AS(transfer(P, Complex(0.0)), doctest::Contains("transfer pole"), Error);
}

TEST_CASE("stabilizers of the heat plant") {
  const PlantModel P = build_heat2d(8);
  const StabilizationGains G = heat_stabilizers(P);
  CHECK((G.K2 * CVector::Ones(64))(0).real() == doctest::Approx(-pi * pi));
  CHECK((G.L1 - CMatrix::Constant(64, 1, -pi * pi)).norm() == 0.0);
  CHECK_NOTHROW(validate(P, G));
  CHECK(spectral_abscissa(P.A + P.B * G.K2) < 0.0);
  CHECK(spectral_abscissa(P.A + G.L1 * P.C) < 0.0);
  CHECK_THROWS_AS(validate(P, testbed::zero_gains(P)), Error);
}

TEST_CASE("P_K equals P_L for the heat plant") {
  const PlantModel P = build_heat2d(8);
  const StabilizationGains G = heat_stabilizers(P);
  const Complex l(0.0, 3.0);
  CHECK(std::abs(transfer_PK(P, G, l)(0, 0) - transfer_PL(P, G, l)(0, 0)) < 1e-10);
}

TEST_CASE("dimension checks") {
  PlantModel P = testbed::two_channel_plant();
  CHECK_NOTHROW(validate(P));
  P.D = CMatrix::Zero(3, 2);
  CHECK_THROWS_AS(validate(P), Error);
}

TEST_CASE("perturbations") {
  const PlantModel P = testbed::two_channel_plant();
  PerturbationSpec id;
  CHECK(id.is_identity());
  const PlantModel Q = perturb(P, id);
  CHECK((Q.A - P.A).norm() == 0.0);

  PerturbationSpec s;
  s.B_scale = 1.1;
  s.dA = CMatrix::Identity(3, 3) * 0.01;
  CHECK_FALSE(s.is_identity());
  const PlantModel R = perturb(P, s);
  CHECK((R.B - 1.1 * P.B).norm() < 1e-15);
  CHECK((R.A - P.A - s.dA).norm() < 1e-15);

  PerturbationSpec f;
  f.F_scale = 2.0;
  const TruncatedExosystem e = testbed::two_channel_exosystem();
  CHECK((perturb(e, f).F - 2.0 * e.F).norm() < 1e-15);
}

TEST_CASE("gamma3 trace follows the observation edge") {
  const PlantModel P = build_heat2d(6);
  CVector x = CVector::Zero(36);
  for (int idx : P.geometry->gamma3) x(idx) = 2.0;
  const RVector tr = gamma3_trace(P, x);
  CHECK(tr.size() == 6);
  CHECK(tr.minCoeff() == 2.0);
  CHECK((P.C * x)(0).real() == doctest::Approx(2.0));
}

}
