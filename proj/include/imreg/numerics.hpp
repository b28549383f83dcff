#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace imreg {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Base class for all errors raised by the library. `what()` carries a
/// short machine-friendly tag followed by details.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thin SVD with singular values sorted in descending order.
struct SvdResult {
  RVector singular_values;
  CMatrix U;
  CMatrix V;
};

SvdResult svd(const CMatrix& M);

/// Singular values only (descending).
RVector singular_values(const CMatrix& M);

/// Operator 2-norm (largest singular value). Zero for empty matrices.
double op_norm(const CMatrix& M);

/// Smallest singular value; for non-square matrices this is the
/// min(rows, cols)-th singular value.
double sigma_min(const CMatrix& M);

/// Moore-Penrose pseudoinverse. Singular values below tol * sigma_max are
/// treated as zero. An all-zero matrix yields the zero matrix of the
/// transposed shape.
CMatrix pseudoinverse(const CMatrix& M, double tol = 1e-12);

/// Numerical rank with threshold rel_tol * sigma_max.
int numerical_rank(const CMatrix& M, double rel_tol);

/// ||(lambda I - A)^{-1}||_2 = 1 / sigma_min(lambda I - A). Returns
/// kInfinity when sigma_min <= 1e-14 * ||lambda I - A||.
double resolvent_norm(const CMatrix& A, Complex lambda);

/// Full spectrum of a square matrix (multiplicities included).
std::vector<Complex> eigenvalues(const CMatrix& A);

/// max Re(lambda) over the spectrum.
double spectral_abscissa(const CMatrix& A);

/// Max residual ||A v - lambda v|| / ||A|| over all eigenpairs, for
/// diagnostics of the eigen solver.
double eigen_residual(const CMatrix& A);

/// Fixed-step implicit trapezoidal scheme for x' = A x + f(t).
///
/// The factorization of (I - dt/2 A) is computed once on construction.
/// Throws Error("step size resonance: ...") if that matrix is singular;
/// the caller is expected to halve dt and retry.
class TrapezoidalStepper {
 public:
  TrapezoidalStepper(const CMatrix& A, double dt);

  double dt() const { return dt_; }
  Eigen::Index dim() const { return A_.rows(); }

  /// One step: returns x_{n+1} given x_n, f(t_n), f(t_{n+1}).
  CVector step(const CVector& x, const CVector& f_now, const CVector& f_next) const;

  /// Propagators for input-affine forcing f(t) = Bf * w(t):
  /// x_{n+1} = state_map * x_n + input_map * (w_n + w_{n+1}).
  /// state_map = (I - dt/2 A)^{-1} (I + dt/2 A),
  /// input_map = dt/2 (I - dt/2 A)^{-1} Bf.
  CMatrix state_map() const;
  CMatrix input_map(const CMatrix& Bf) const;

 private:
  CMatrix A_;
  double dt_;
  Eigen::PartialPivLU<CMatrix> lu_;
};

using Forcing = std::function<CVector(double)>;
/// Called with the step index, time, and state after each step (and once
/// for the initial state with index 0).
using StepObserver = std::function<void(std::size_t, double, const CVector&)>;

struct TrajectorySamples {
  std::vector<double> t;
  std::vector<CVector> x;
};

/// Integrates x' = A x + f(t) on [0, T] with step dt. When `observer` is
/// given the states are streamed to it and not stored; otherwise every
/// state is returned.
TrajectorySamples integrate_trajectory(const CMatrix& A, const Forcing& forcing,
                                       const CVector& x0, double T, double dt,
                                       const StepObserver& observer = {});

/// Number of steps used for horizon T at step dt (T/dt rounded).
std::size_t step_count(double T, double dt);

/// Sliding integral t -> int_t^{t+window} g(s) ds of uniformly sampled
/// g(j dt) by the composite trapezoid rule. Entry j corresponds to
/// t = j dt, for t in [0, T - window]. window must be an integer multiple
/// of dt; the horizon must be at least one window.
std::vector<double> sliding_window_integral(std::span<const double> samples, double dt,
                                            double window = 1.0);

}  // namespace imreg
