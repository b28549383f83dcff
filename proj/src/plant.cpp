#include "imreg/plant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace imreg {

using std::numbers::pi;

void validate(const PlantModel& p) {
  const Eigen::Index n = p.A.rows();
  if (p.A.cols() != n) throw Error("plant: A must be square");
  if (p.B.rows() != n) throw Error("plant: B must have A's row count");
  if (p.Bd.rows() != n) throw Error("plant: Bd must have A's row count");
  if (p.C.cols() != n) throw Error("plant: C must have A's column count");
  if (p.D.rows() != p.C.rows() || p.D.cols() != p.B.cols())
    throw Error("plant: D must be output_dim x input_dim");
}

void validate(const PlantModel& plant, const StabilizationGains& g) {
  validate(plant);
  if (g.K2.rows() != plant.input_dim() || g.K2.cols() != plant.state_dim())
    throw Error("gains: K2 must be input_dim x state_dim");
  if (g.L1.rows() != plant.state_dim() || g.L1.cols() != plant.output_dim())
    throw Error("gains: L1 must be state_dim x output_dim");
  auto hurwitz = [](const CMatrix& M) {
    return spectral_abscissa(M) < -1e-10 * std::max(1.0, op_norm(M));
  };
  if (!hurwitz(plant.A + plant.B * g.K2)) throw Error("gains: A + B K2 is not Hurwitz");
  if (!hurwitz(plant.A + g.L1 * plant.C)) throw Error("gains: A + L1 C is not Hurwitz");
}

PlantModel build_heat2d(int n) {
  if (n < 4) throw Error("heat2d: need at least 4 grid points per side");
  const double h = 1.0 / (n - 1);
  const int dim = n * n;
  auto idx = [n](int i, int j) { return j * n + i; };

  // 1D Neumann second-difference with ghost-node reflection.
  Eigen::MatrixXd D1 = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    D1(i, i) = -2.0;
    if (i == 0) {
      D1(i, 1) = 2.0;
    } else if (i == n - 1) {
      D1(i, n - 2) = 2.0;
    } else {
      D1(i, i - 1) = 1.0;
      D1(i, i + 1) = 1.0;
    }
  }
  D1 /= h * h;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) {
        A(idx(i, j), idx(l, j)) += D1(i, l);  // xi1 direction
        A(idx(i, j), idx(i, l)) += D1(j, l);  // xi2 direction
      }

  Eigen::VectorXd w1 = Eigen::VectorXd::Constant(n, h);
  w1(0) = w1(n - 1) = 0.5 * h;

  HeatGeometry geo;
  geo.n = n;
  geo.h = h;
  geo.mass.resize(dim);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) geo.mass(idx(i, j)) = w1(i) * w1(j);

  PlantModel p;
  p.A = A.cast<Complex>();
  p.B = CMatrix::Zero(dim, 1);
  p.Bd = CMatrix::Zero(dim, 1);
  p.C = CMatrix::Zero(1, dim);
  p.D = CMatrix::Zero(1, 1);

  for (int i = 0; i < n; ++i) {
    geo.gamma1.push_back(idx(i, 0));
    p.B(idx(i, 0), 0) = 2.0 / h;
  }
  for (int j = 0; j < n; ++j) {
    const double xi2 = j * h;
    const double half_tol = 1e-12;
    if (xi2 < 0.5 - half_tol) {
      p.Bd(idx(0, j), 0) = 2.0 / h;
      geo.gamma2.push_back(idx(0, j));
    } else if (std::abs(xi2 - 0.5) <= half_tol) {
      p.Bd(idx(0, j), 0) = 1.0 / h;  // half weight at the segment end
      geo.gamma2.push_back(idx(0, j));
    }
  }
  for (int j = 0; j < n; ++j) {
    geo.gamma3.push_back(idx(n - 1, j));
    p.C(0, idx(n - 1, j)) = w1(j);
  }
  p.geometry = std::move(geo);
  return p;
}

StabilizationGains heat_stabilizers(const PlantModel& plant) {
  if (!plant.geometry) throw Error("heat stabilizers: plant was not built by build_heat2d");
  const HeatGeometry& geo = *plant.geometry;
  StabilizationGains g;
  g.K2 = (-pi * pi) * geo.mass.transpose().cast<Complex>();
  g.L1 = CMatrix::Constant(plant.state_dim(), 1, Complex(-pi * pi, 0.0));
  validate(plant, g);
  return g;
}

CMatrix resolvent_apply(const CMatrix& A, Complex lambda, const CMatrix& X) {
  CMatrix shifted = -A;
  shifted.diagonal().array() += lambda;
  Eigen::PartialPivLU<CMatrix> lu(shifted);
  if (!(lu.rcond() > 1e-14)) {
    throw Error("transfer pole: lambda = (" + std::to_string(lambda.real()) + ", " +
                std::to_string(lambda.imag()) + ") is in the spectrum");
  }
  return lu.solve(X);
}

CMatrix transfer(const PlantModel& p, Complex lambda) {
  return p.C * resolvent_apply(p.A, lambda, p.B) + p.D;
}

CMatrix transfer_disturbance(const PlantModel& p, Complex lambda) {
  return p.C * resolvent_apply(p.A, lambda, p.Bd);
}

CMatrix transfer_PL(const PlantModel& p, const StabilizationGains& g, Complex lambda) {
  const CMatrix AL = p.A + g.L1 * p.C;
  const CMatrix BL = p.B + g.L1 * p.D;
  return p.C * resolvent_apply(AL, lambda, BL) + p.D;
}

CMatrix transfer_PK(const PlantModel& p, const StabilizationGains& g, Complex lambda) {
  const CMatrix AK = p.A + p.B * g.K2;
  const CMatrix CK = p.C + p.D * g.K2;
  return CK * resolvent_apply(AK, lambda, p.B) + p.D;
}

bool PerturbationSpec::is_identity() const {
  return A_scale == 1.0 && B_scale == 1.0 && Bd_scale == 1.0 && C_scale == 1.0 &&
         D_scale == 1.0 && E_scale == 1.0 && F_scale == 1.0 && dA.size() == 0 &&
         dB.size() == 0 && dBd.size() == 0 && dC.size() == 0 && dD.size() == 0;
}

namespace {

CMatrix apply(const CMatrix& M, double scale, const CMatrix& delta, const char* name) {
  CMatrix out = M;
  if (scale != 1.0) out *= scale;
  if (delta.size() != 0) {
    if (delta.rows() != M.rows() || delta.cols() != M.cols())
      throw Error(std::string("perturb: dimension mismatch in delta for ") + name);
    out += delta;
  }
  return out;
}

}  // namespace

PlantModel perturb(const PlantModel& plant, const PerturbationSpec& s) {
  PlantModel out;
  out.A = apply(plant.A, s.A_scale, s.dA, "A");
  out.B = apply(plant.B, s.B_scale, s.dB, "B");
  out.Bd = apply(plant.Bd, s.Bd_scale, s.dBd, "Bd");
  out.C = apply(plant.C, s.C_scale, s.dC, "C");
  out.D = apply(plant.D, s.D_scale, s.dD, "D");
  out.geometry = plant.geometry;
  validate(out);
  return out;
}

TruncatedExosystem perturb(const TruncatedExosystem& exo, const PerturbationSpec& s) {
  TruncatedExosystem out = exo;
  if (s.E_scale != 1.0) out.E *= s.E_scale;
  if (s.F_scale != 1.0) out.F *= s.F_scale;
  return out;
}

RVector gamma3_trace(const PlantModel& plant, const CVector& x) {
  if (!plant.geometry) throw Error("gamma3_trace: plant has no heat geometry");
  const auto& g3 = plant.geometry->gamma3;
  RVector out(static_cast<Eigen::Index>(g3.size()));
  for (std::size_t j = 0; j < g3.size(); ++j) out(static_cast<Eigen::Index>(j)) = x(g3[j]).real();
  return out;
}

}  // namespace imreg
