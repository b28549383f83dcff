#include "imreg/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace imreg {

namespace {

void require_finite(const CMatrix& M, const char* what) {
  if (!M.allFinite()) throw Error(std::string(what) + ": matrix has non-finite entries");
}

}  // namespace

SvdResult svd(const CMatrix& M) {
  require_finite(M, "svd");
  SvdResult out;
  if (M.size() == 0) {
    out.U = CMatrix::Zero(M.rows(), 0);
    out.V = CMatrix::Zero(M.cols(), 0);
    return out;
  }
  Eigen::BDCSVD<CMatrix> dec(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.singular_values = dec.singularValues();
  out.U = dec.matrixU();
  out.V = dec.matrixV();
  return out;
}

RVector singular_values(const CMatrix& M) {
  require_finite(M, "singular_values");
  if (M.size() == 0) return RVector();
  Eigen::BDCSVD<CMatrix> dec(M);
  return dec.singularValues();
}

double op_norm(const CMatrix& M) {
  if (M.size() == 0) return 0.0;
  return singular_values(M)(0);
}

double sigma_min(const CMatrix& M) {
  if (M.size() == 0) return 0.0;
  const RVector s = singular_values(M);
  return s(s.size() - 1);
}

CMatrix pseudoinverse(const CMatrix& M, double tol) {
  if (!(tol > 0.0 && tol < 1.0)) throw Error("pseudoinverse: tol must lie in (0, 1)");
  const SvdResult d = svd(M);
  CMatrix out = CMatrix::Zero(M.cols(), M.rows());
  if (d.singular_values.size() == 0 || d.singular_values(0) == 0.0) return out;
  const double cutoff = tol * d.singular_values(0);
  for (Eigen::Index i = 0; i < d.singular_values.size(); ++i) {
    const double s = d.singular_values(i);
    if (s <= cutoff) break;
    out.noalias() += (d.V.col(i) / s) * d.U.col(i).adjoint();
  }
  return out;
}

int numerical_rank(const CMatrix& M, double rel_tol) {
  const RVector s = singular_values(M);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++r;
  return r;
}

double resolvent_norm(const CMatrix& A, Complex lambda) {
  if (A.rows() != A.cols()) throw Error("resolvent_norm: matrix must be square");
  CMatrix shifted = -A;
  shifted.diagonal().array() += lambda;
  const RVector s = singular_values(shifted);
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (smin <= 1e-14 * smax) return kInfinity;
  return 1.0 / smin;
}

std::vector<Complex> eigenvalues(const CMatrix& A) {
  if (A.rows() != A.cols()) throw Error("eigenvalues: matrix must be square");
  require_finite(A, "eigenvalues");
  if (A.rows() == 0) return {};
  Eigen::ComplexEigenSolver<CMatrix> es(A, /*computeEigenvectors=*/false);
  const CVector ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double spectral_abscissa(const CMatrix& A) {
  double best = -kInfinity;
  for (const Complex& l : eigenvalues(A)) best = std::max(best, l.real());
  return best;
}

double eigen_residual(const CMatrix& A) {
  Eigen::ComplexEigenSolver<CMatrix> es(A, true);
  const double scale = std::max(op_norm(A), 1e-300);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const CVector v = es.eigenvectors().col(i);
    const double r = (A * v - es.eigenvalues()(i) * v).norm() / v.norm();
    worst = std::max(worst, r / scale);
  }
  return worst;
}

TrapezoidalStepper::TrapezoidalStepper(const CMatrix& A, double dt) : A_(A), dt_(dt) {
  if (!(dt > 0.0)) throw Error("integrator: dt must be positive");
  if (A.rows() != A.cols()) throw Error("integrator: matrix must be square");
  CMatrix lhs = CMatrix::Identity(A.rows(), A.cols()) - 0.5 * dt * A;
  lu_.compute(lhs);
  if (A.rows() > 0 && !(lu_.rcond() > 1e-14))
    throw Error("step size resonance: I - dt/2 A is singular, halve dt");
}

CVector TrapezoidalStepper::step(const CVector& x, const CVector& f_now,
                                 const CVector& f_next) const {
  CVector rhs = x + 0.5 * dt_ * (A_ * x + f_now + f_next);
  return lu_.solve(rhs);
}

CMatrix TrapezoidalStepper::state_map() const {
  CMatrix rhs = CMatrix::Identity(A_.rows(), A_.cols()) + 0.5 * dt_ * A_;
  return lu_.solve(rhs);
}

CMatrix TrapezoidalStepper::input_map(const CMatrix& Bf) const {
  return lu_.solve(0.5 * dt_ * Bf);
}

std::size_t step_count(double T, double dt) {
  if (!(dt > 0.0) || !(T >= 0.0)) throw Error("integrator: need dt > 0 and T >= 0");
  return static_cast<std::size_t>(std::llround(T / dt));
}

TrajectorySamples integrate_trajectory(const CMatrix& A, const Forcing& forcing,
                                       const CVector& x0, double T, double dt,
                                       const StepObserver& observer) {
  if (x0.size() != A.rows()) throw Error("integrator: initial state has wrong dimension");
  const TrapezoidalStepper stepper(A, dt);
  const std::size_t steps = step_count(T, dt);

  TrajectorySamples out;
  CVector x = x0;
  CVector f_now = forcing(0.0);
  auto emit = [&](std::size_t n, double t) {
    if (observer) {
      observer(n, t, x);
    } else {
      out.t.push_back(t);
      out.x.push_back(x);
    }
  };
  emit(0, 0.0);
  for (std::size_t n = 0; n < steps; ++n) {
    const double t_next = static_cast<double>(n + 1) * dt;
    CVector f_next = forcing(t_next);
    x = stepper.step(x, f_now, f_next);
    f_now = std::move(f_next);
    emit(n + 1, t_next);
  }
  return out;
}

std::vector<double> sliding_window_integral(std::span<const double> samples, double dt,
                                            double window) {
  if (!(dt > 0.0) || !(window > 0.0)) throw Error("sliding window: dt and window must be positive");
  const double ratio = window / dt;
  const auto w = static_cast<std::size_t>(std::llround(ratio));
  if (w == 0 || std::abs(ratio - static_cast<double>(w)) > 1e-6 * ratio)
    throw Error("sliding window: window must be an integer multiple of dt");
  if (samples.size() < w + 1)
    throw Error("sliding window: horizon shorter than the window");

  // cumulative trapezoid sums; differences give each window integral
  std::vector<double> cum(samples.size(), 0.0);
  for (std::size_t j = 1; j < samples.size(); ++j)
    cum[j] = cum[j - 1] + 0.5 * dt * (samples[j - 1] + samples[j]);

  std::vector<double> out(samples.size() - w);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = cum[j + w] - cum[j];
  return out;
}

}  // namespace imreg
