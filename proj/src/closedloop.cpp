#include "imreg/closedloop.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace imreg {

namespace {

void require_shape(const CMatrix& M, Eigen::Index r, Eigen::Index c, const char* name) {
  if (M.rows() != r || M.cols() != c)
    throw Error(std::string("assemble: block ") + name + " has shape " + std::to_string(M.rows()) +
                "x" + std::to_string(M.cols()) + ", expected " + std::to_string(r) + "x" +
                std::to_string(c));
}

/// Expanded (x, z0, z1) form of Ae written out block by block.
CMatrix expanded_form(const PlantModel& p, const ControllerRealization& c) {
  const Eigen::Index n = p.state_dim();
  const Eigen::Index q = c.z0_dim;
  CMatrix M = CMatrix::Zero(2 * n + q, 2 * n + q);
  const CMatrix& A = p.A;
  const CMatrix& B = p.B;
  const CMatrix& C = p.C;
  const CMatrix& D = p.D;
  if (c.variant == Variant::Observer) {
    M.block(0, 0, n, n) = A;
    M.block(0, n, n, q) = B * c.K1;
    M.block(0, n + q, n, n) = B * c.K2;
    M.block(n, 0, q, n) = c.G2 * C;
    M.block(n, n, q, q) = c.G1 + c.G2 * D * c.K1;
    M.block(n, n + q, q, n) = c.G2 * D * c.K2;
    M.block(n + q, 0, n, n) = -c.L * C;
    M.block(n + q, n, n, q) = B * c.K1;
    M.block(n + q, n + q, n, n) = A + B * c.K2 + c.L * C;
  } else {
    M.block(0, 0, n, n) = A;
    M.block(0, n, n, q) = B * c.K1;
    M.block(0, n + q, n, n) = -B * c.K2;
    M.block(n, 0, q, n) = c.G2 * C;
    M.block(n, n, q, q) = c.G1 + c.G2 * D * c.K1;
    M.block(n, n + q, q, n) = c.G2 * C;
    M.block(n + q, 0, n, n) = c.L * C;
    M.block(n + q, n, n, q) = c.L * D * c.K1;
    M.block(n + q, n + q, n, n) = A + B * c.K2 + c.L * C;
  }
  return M;
}

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& M) {
  return M.size() ? static_cast<double>(M.cwiseAbs().maxCoeff()) : 0.0;
}

// The plant-dependent controller blocks agree with this plant, i.e. the
// plant is the one the controller was built for.
bool designed_for(const PlantModel& p, const ControllerRealization& c) {
  const Eigen::Index n = p.state_dim();
  const Eigen::Index q = c.z0_dim;
  if (c.plant_dim != n || c.dim() != q + n) return false;
  const CMatrix CK = p.C + p.D * c.K2;
  const CMatrix copy = p.A + p.B * c.K2 + c.L * CK;
  CMatrix off;
  if (c.variant == Variant::Observer)
    off = c.calG1.bottomLeftCorner(n, q) - (p.B + c.L * p.D) * c.K1;
  else
    off = c.calG1.topRightCorner(q, n) - c.G2 * CK;
  const double tol = 1e-12 * std::max(1.0, max_abs(c.calG1));
  return max_abs(c.calG1.bottomRightCorner(n, n) - copy) <= tol && max_abs(off) <= tol;
}

}  // namespace

ClosedLoopModel assemble(const PlantModel& plant, const ControllerRealization& ctrl,
                         const TruncatedExosystem& exo) {
  validate(plant);
  const Eigen::Index n = plant.state_dim();
  const Eigen::Index m = plant.input_dim();
  const Eigen::Index p = plant.output_dim();
  const Eigen::Index nz = ctrl.dim();
  const Eigen::Index modes = exo.mode_count();
  if (ctrl.plant_dim != 0 && ctrl.plant_dim != n)
    throw Error("assemble: controller was built for plant dimension " +
                std::to_string(ctrl.plant_dim) + ", plant has " + std::to_string(n));
  require_shape(ctrl.calG1, nz, nz, "calG1");
  require_shape(ctrl.calG2, nz, p, "calG2");
  require_shape(ctrl.K, m, nz, "K");
  require_shape(exo.E, plant.disturbance_dim(), modes, "E");
  require_shape(exo.F, p, modes, "F");

  ClosedLoopModel cl;
  const Eigen::Index ne = n + nz;
  cl.Ae.resize(ne, ne);
  cl.Ae << plant.A, plant.B * ctrl.K, ctrl.calG2 * plant.C, ctrl.calG1 + ctrl.calG2 * plant.D * ctrl.K;
  cl.Be.resize(ne, modes);
  cl.Be << plant.Bd * exo.E, ctrl.calG2 * exo.F;
  cl.Ce.resize(p, ne);
  cl.Ce << plant.C, plant.D * ctrl.K;
  cl.De = exo.F;
  cl.U = CMatrix::Zero(m, ne);
  cl.U.rightCols(nz) = ctrl.K;
  cl.blocks.plant_offset = 0;
  cl.blocks.plant_dim = n;
  cl.blocks.im_offset = n;
  cl.blocks.im_dim = ctrl.z0_dim;
  cl.blocks.copy_offset = n + ctrl.z0_dim;
  cl.blocks.copy_dim = nz - ctrl.z0_dim;
  cl.geometry = plant.geometry;

  if (designed_for(plant, ctrl)) {
    const CMatrix X = expanded_form(plant, ctrl);
    const double dev = max_abs(X - cl.Ae);
    if (dev > 1e-12 * std::max(1.0, max_abs(cl.Ae)))
      throw Error("assemble: closed loop disagrees with the expanded block form (deviation " +
                  std::to_string(dev) + ")");
  }
  return cl;
}

TriangularizationReport similarity_triangularization(const ClosedLoopModel& cl,
                                                     const ControllerRealization& ctrl) {
  const Eigen::Index n = cl.blocks.plant_dim;
  const Eigen::Index q = cl.blocks.im_dim;
  const Eigen::Index ne = cl.dim();
  if (cl.blocks.copy_dim != n) throw Error("triangularization: controller copy must be plant sized");

  CMatrix Q = CMatrix::Zero(ne, ne);
  const CMatrix In = CMatrix::Identity(n, n);
  if (ctrl.variant == Variant::Observer) {
    Q.block(0, 0, n, n) = -In;
    Q.block(n, 0, q, n) = ctrl.H;
    Q.block(n, n, q, q) = CMatrix::Identity(q, q);
    Q.block(n + q, 0, n, n) = -In;
    Q.block(n + q, n + q, n, n) = In;
  } else {
    Q.block(0, 0, n, n) = In;
    Q.block(n, n, q, q) = CMatrix::Identity(q, q);
    Q.block(n + q, 0, n, n) = -In;
    Q.block(n + q, n, n, q) = ctrl.H;
    Q.block(n + q, n + q, n, n) = -In;
  }

  TriangularizationReport r;
  r.ae_norm = op_norm(cl.Ae);
  r.involution_residual = op_norm(Q * Q - CMatrix::Identity(ne, ne));
  const CMatrix T = Q * cl.Ae * Q;
  r.zero_blocks = {op_norm(T.block(n, 0, q, n)), op_norm(T.block(n + q, 0, n, n)),
                   op_norm(T.block(n + q, n, n, q))};
  r.max_zero_block = *std::max_element(r.zero_blocks.begin(), r.zero_blocks.end());
  r.relative = r.ae_norm > 0.0 ? r.max_zero_block / r.ae_norm : r.max_zero_block;
  r.diagonal_abscissa = {spectral_abscissa(T.block(0, 0, n, n)),
                         q > 0 ? spectral_abscissa(T.block(n, n, q, q)) : -kInfinity,
                         spectral_abscissa(T.block(n + q, n + q, n, n))};
  return r;
}

Trajectory simulate(const ClosedLoopModel& cl, const TruncatedExosystem& exo,
                    const SimulationOptions& opts) {
  if (!(opts.dt > 0.0)) throw Error("simulate: dt must be positive");
  if (!(opts.T > 0.0)) throw Error("simulate: horizon must be positive");
  const Eigen::Index ne = cl.dim();
  if (cl.Be.cols() != exo.mode_count()) throw Error("simulate: exosystem does not match Be");
  CVector x = opts.xe0.size() == 0 ? CVector::Zero(ne) : opts.xe0;
  if (x.size() != ne) throw Error("simulate: initial state has wrong dimension");

  const TrapezoidalStepper stepper(cl.Ae, opts.dt);
  const CMatrix Phi = stepper.state_map();
  const CMatrix Gam = stepper.input_map(cl.Be);
  const std::size_t steps = step_count(opts.T, opts.dt);
  const std::size_t samples = steps + 1;
  const Eigen::Index p = cl.Ce.rows();
  const Eigen::Index m = cl.U.rows();

  Trajectory tr;
  tr.dt = opts.dt;
  tr.t.resize(samples);
  tr.y.resize(p, static_cast<Eigen::Index>(samples));
  tr.y_ref.resize(p, static_cast<Eigen::Index>(samples));
  tr.e.resize(p, static_cast<Eigen::Index>(samples));
  tr.u.resize(m, static_cast<Eigen::Index>(samples));
  tr.e_norm.resize(samples);

  auto stride_steps = [&](double stride) -> std::size_t {
    if (stride <= 0.0) return 0;
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(stride / opts.dt)));
  };
  const std::size_t probe_every = cl.geometry ? stride_steps(opts.probe_stride) : 0;
  const std::size_t state_every = stride_steps(opts.state_stride);

  double imag = 0.0;
  double scale = 1.0;
  CVector v = exo_state(exo, 0.0);
  CVector xn(ne);
  for (std::size_t s = 0; s < samples; ++s) {
    const double t = static_cast<double>(s) * opts.dt;
    if (s > 0) {
      const CVector vn = exo_state(exo, t);
      xn.noalias() = Phi * x;
      xn.noalias() += Gam * (v + vn);
      x.swap(xn);
      v = vn;
    }
    const CVector y = cl.Ce * x;
    const CVector yref = -(exo.F * v);
    const CVector e = y + cl.De * v;
    const CVector u = cl.U * x;
    const auto col = static_cast<Eigen::Index>(s);
    tr.t[s] = t;
    tr.y.col(col) = y.real();
    tr.y_ref.col(col) = yref.real();
    tr.e.col(col) = e.real();
    tr.u.col(col) = u.real();
    tr.e_norm[s] = e.real().norm();
    imag = std::max({imag, max_abs(y.imag()), max_abs(yref.imag()), max_abs(e.imag()),
                     max_abs(u.imag())});
    scale = std::max({scale, max_abs(y.real()), max_abs(yref.real()), max_abs(u.real())});
    if (probe_every && s % probe_every == 0) {
      RVector trace(static_cast<Eigen::Index>(cl.geometry->gamma3.size()));
      for (std::size_t j = 0; j < cl.geometry->gamma3.size(); ++j)
        trace(static_cast<Eigen::Index>(j)) = x(cl.blocks.plant_offset + cl.geometry->gamma3[j]).real();
      tr.probe_t.push_back(t);
      tr.gamma3.push_back(std::move(trace));
    }
    if (state_every && s % state_every == 0) {
      tr.state_t.push_back(t);
      tr.states.push_back(x);
    }
    if (!x.allFinite()) throw Error("simulate: state became non-finite at t = " + std::to_string(t));
  }
  tr.max_imag_residue = imag / scale;
  if (tr.max_imag_residue > 1e-8)
    throw Error("simulate: imaginary residue " + std::to_string(tr.max_imag_residue) +
                " exceeds 1e-8 (signals are not conjugate symmetric)");
  return tr;
}

DecaySamples error_metrics(const Trajectory& traj, double stride, double window) {
  if (traj.t.empty()) throw Error("error_metrics: empty trajectory");
  if (traj.t.back() < 2.0 - 1e-9) throw Error("error_metrics: horizon must be at least 2 s");
  const std::vector<double> I = sliding_window_integral(traj.e_norm, traj.dt, window);
  const std::size_t every =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(stride / traj.dt)));
  DecaySamples d;
  for (std::size_t j = 0; j < I.size(); j += every) {
    d.t.push_back(traj.t[j]);
    d.I.push_back(I[j]);
  }
  return d;
}

double decay_value_at(const DecaySamples& d, double t) {
  if (d.t.empty()) throw Error("decay_value_at: no samples");
  std::size_t best = 0;
  for (std::size_t j = 1; j < d.t.size(); ++j)
    if (std::abs(d.t[j] - t) < std::abs(d.t[best] - t)) best = j;
  return d.I[best];
}

}  // namespace imreg
