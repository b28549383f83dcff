#pragma once

#include <optional>
#include <string>
#include <vector>

#include "imreg/exosystem.hpp"
#include "imreg/numerics.hpp"

namespace imreg {

/// Grid metadata of the finite-difference heat plant. Node (i, j) sits at
/// xi = (i h, j h) and has state index j * n + i.
struct HeatGeometry {
  int n = 0;
  double h = 0.0;
  std::vector<int> gamma1;  // control edge xi2 = 0
  std::vector<int> gamma2;  // disturbance edge xi1 = 0, xi2 <= 1/2
  std::vector<int> gamma3;  // observation edge xi1 = 1 (ordered by xi2)
  RVector mass;             // 2D trapezoid quadrature weights, sum = 1
};

/// Dense realization (A, B, Bd, C, D) of a truncated regular linear system.
struct PlantModel {
  CMatrix A;
  CMatrix B;
  CMatrix Bd;
  CMatrix C;
  CMatrix D;
  std::optional<HeatGeometry> geometry;

  Eigen::Index state_dim() const { return A.rows(); }
  Eigen::Index input_dim() const { return B.cols(); }
  Eigen::Index disturbance_dim() const { return Bd.cols(); }
  Eigen::Index output_dim() const { return C.rows(); }
};

/// Throws if the operator dimensions are inconsistent.
void validate(const PlantModel& plant);

/// Stabilizing state feedback K2 (A + B K2 Hurwitz) and output injection
/// L1 (A + L1 C Hurwitz).
struct StabilizationGains {
  CMatrix K2;
  CMatrix L1;
};

/// Checks both Hurwitz conditions; throws Error naming the failing one.
void validate(const PlantModel& plant, const StabilizationGains& gains);

/// Neumann-controlled heat equation on the unit square, 5-point stencil on
/// an n x n node grid (h = 1/(n-1)), boundary data entering through ghost
/// node reflection with weight 2/h.
PlantModel build_heat2d(int n);

/// K2 = -pi^2 * (integral over the square), L1 = -pi^2 * ones.
StabilizationGains heat_stabilizers(const PlantModel& plant);

/// P(lambda) = C (lambda - A)^{-1} B + D. Throws Error("transfer pole") if
/// lambda is in the spectrum of A.
CMatrix transfer(const PlantModel& plant, Complex lambda);

/// P_d(lambda) = C (lambda - A)^{-1} Bd.
CMatrix transfer_disturbance(const PlantModel& plant, Complex lambda);

/// P_L(lambda) = C (lambda - A - L1 C)^{-1} (B + L1 D) + D.
CMatrix transfer_PL(const PlantModel& plant, const StabilizationGains& gains, Complex lambda);

/// P_K(lambda) = (C + D K2) (lambda - A - B K2)^{-1} B + D.
CMatrix transfer_PK(const PlantModel& plant, const StabilizationGains& gains, Complex lambda);

/// (lambda - A)^{-1} X via one LU factorization. Throws Error("transfer pole")
/// when the shifted matrix is numerically singular.
CMatrix resolvent_apply(const CMatrix& A, Complex lambda, const CMatrix& X);

/// Multiplicative factors and additive deltas applied to the plant and
/// exosystem operators. Empty deltas mean "no additive change".
struct PerturbationSpec {
  std::string label = "nominal";
  double A_scale = 1.0;
  double B_scale = 1.0;
  double Bd_scale = 1.0;
  double C_scale = 1.0;
  double D_scale = 1.0;
  double E_scale = 1.0;
  double F_scale = 1.0;
  CMatrix dA, dB, dBd, dC, dD;

  bool is_identity() const;
};

/// New plant with the perturbation applied. Gains are not re-derived.
PlantModel perturb(const PlantModel& plant, const PerturbationSpec& spec);

/// New exosystem with E and F perturbed.
TruncatedExosystem perturb(const TruncatedExosystem& exo, const PerturbationSpec& spec);

/// Values of the state at the observation edge, ordered by xi2.
RVector gamma3_trace(const PlantModel& plant, const CVector& x);

}  // namespace imreg
