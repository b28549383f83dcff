#include "imreg/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

namespace imreg {

namespace {

int rank_of(const CMatrix& M, double rel_tol) {
  if (M.size() == 0) return 0;
  return numerical_rank(M, rel_tol);
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  if (sxx == 0.0) throw Error("fit: abscissae are all equal");
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    sse += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return f;
}

}  // namespace

GConditionReport check_g_conditions(const ControllerRealization& ctrl, double rel_tol) {
  GConditionReport rep;
  const Eigen::Index nz = ctrl.dim();
  const Eigen::Index p = ctrl.calG2.cols();
  rep.rank_calG2 = rank_of(ctrl.calG2, rel_tol);
  rep.ker_trivial = rep.rank_calG2 == p;
  rep.pass = rep.ker_trivial;
  for (const ModeBlock& b : ctrl.blocks) {
    GConditionMode m;
    m.k = b.k;
    m.omega = b.omega;
    CMatrix shifted = -ctrl.calG1;
    shifted.diagonal().array() += kI * b.omega;
    CMatrix joint(nz, nz + p);
    joint << shifted, ctrl.calG2;
    m.rank_shifted = rank_of(shifted, rel_tol);
    m.rank_joint = rank_of(joint, rel_tol);
    m.intersection_trivial = m.rank_joint == m.rank_shifted + rep.rank_calG2;
    const CMatrix G2k = ctrl.G2.middleRows(b.offset, b.size);
    m.rank_block = rank_of(G2k, rel_tol);
    m.block_injective = m.rank_block == std::min<Eigen::Index>(b.size, G2k.cols());
    m.pass = m.intersection_trivial && m.block_injective;
    rep.pass = rep.pass && m.pass;
    rep.modes.push_back(m);
  }
  return rep;
}

RegulatorSolution regulator_residuals(const ClosedLoopModel& cl, const TruncatedExosystem& exo) {
  const Eigen::Index ne = cl.dim();
  if (cl.Be.cols() != exo.mode_count()) throw Error("regulator: exosystem does not match Be");
  RegulatorSolution sol;
  sol.Sigma = CMatrix::Zero(ne, exo.mode_count());
  double max_scale = 0.0;
  for (int j = 0; j < exo.mode_count(); ++j) {
    RegulatorMode r;
    r.k = exo.mode_of(j);
    r.omega = exo.omega[j];
    CMatrix shifted = -cl.Ae;
    shifted.diagonal().array() += kI * r.omega;
    Eigen::PartialPivLU<CMatrix> lu(shifted);
    if (!(lu.rcond() > 1e-14))
      throw Error("regulator: i omega_k in the spectrum of Ae at mode k=" + std::to_string(r.k));
    const CVector s = lu.solve(cl.Be.col(j));
    sol.Sigma.col(j) = s;
    const CVector Cs = cl.Ce * s;
    r.residual = (Cs + cl.De.col(j)).norm();
    r.scale = Cs.norm() + cl.De.col(j).norm();
    sol.max_residual = std::max(sol.max_residual, r.residual);
    max_scale = std::max(max_scale, r.scale);
    sol.modes.push_back(r);
  }
  sol.relative = max_scale > 0.0 ? sol.max_residual / max_scale : sol.max_residual;
  return sol;
}

std::vector<ImNormMode> im_norm_identity(const CMatrix& G1, const CMatrix& G2,
                                         const std::vector<ModeBlock>& blocks) {
  if (G1.rows() != G1.cols() || G2.rows() != G1.rows())
    throw Error("im_norm_identity: G1 must be square with G2 of matching rows");
  const CMatrix M = G1 - G2 * G2.adjoint();
  std::vector<ImNormMode> out;
  for (const ModeBlock& b : blocks) {
    ImNormMode r;
    r.k = b.k;
    CMatrix shifted = -M;
    shifted.diagonal().array() += kI * b.omega;
    Eigen::PartialPivLU<CMatrix> lu(shifted);
    if (!(lu.rcond() > 1e-14))
      throw Error("im_norm_identity: i omega_k in the spectrum of G1 - G2 G2* at mode k=" +
                  std::to_string(b.k));
    r.lhs = op_norm(lu.solve(G2));
    const CMatrix G2k = G2.middleRows(b.offset, b.size);
    r.square = G2k.rows() == G2k.cols();
    r.rhs = op_norm(pseudoinverse(G2k));
    r.deviation = std::abs(r.lhs - r.rhs) / std::max(1.0, r.rhs);
    out.push_back(r);
  }
  return out;
}

double max_deviation(const std::vector<ImNormMode>& rows) {
  double d = 0.0;
  for (const ImNormMode& r : rows)
    if (r.square) d = std::max(d, r.deviation);
  return d;
}

std::vector<ScanPoint> resolvent_scan(const CMatrix& M, const std::vector<double>& omegas,
                                      const std::vector<double>& peaks) {
  std::vector<ScanPoint> out;
  out.reserve(omegas.size());
  for (double w : omegas) {
    ScanPoint p;
    p.omega = w;
    p.norm = resolvent_norm(M, kI * w);
    p.peak = std::any_of(peaks.begin(), peaks.end(), [w](double q) {
      return std::abs(q - w) <= 1e-12 * std::max(1.0, std::abs(w));
    });
    out.push_back(p);
  }
  return out;
}

std::vector<double> peak_and_midpoint_grid(const TruncatedExosystem& exo) {
  std::vector<double> w = exo.omega;
  std::sort(w.begin(), w.end());
  std::vector<double> grid;
  for (std::size_t i = 0; i < w.size(); ++i) {
    grid.push_back(w[i]);
    if (i + 1 < w.size()) grid.push_back(0.5 * (w[i] + w[i + 1]));
  }
  return grid;
}

GrowthFit fit_growth(const std::vector<double>& omegas, const std::vector<double>& values) {
  if (omegas.size() != values.size()) throw Error("fit_growth: size mismatch");
  std::vector<double> lw, w, lv;
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    if (!(omegas[i] > 0.0) || !std::isfinite(values[i]) || !(values[i] > 0.0)) continue;
    lw.push_back(std::log(omegas[i]));
    w.push_back(omegas[i]);
    lv.push_back(std::log(values[i]));
  }
  if (lw.size() < 6) throw Error("fit_growth: need at least 6 peak samples");
  const LineFit poly = least_squares(lw, lv);
  const LineFit expo = least_squares(w, lv);
  GrowthFit g;
  g.points = lw.size();
  g.alpha = poly.slope;
  g.rate = expo.slope;
  g.r2_polynomial = poly.r2;
  g.r2_exponential = expo.r2;
  g.law = poly.r2 >= expo.r2 ? GrowthFit::Law::Polynomial : GrowthFit::Law::Exponential;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double model = g.law == GrowthFit::Law::Polynomial ? std::pow(w[i], g.alpha)
                                                             : std::exp(g.rate * w[i]);
    g.M0 = std::max(g.M0, std::exp(lv[i]) / model);
  }
  return g;
}

GrowthFit fit_growth(const std::vector<ScanPoint>& scan, double omega_min, double omega_max) {
  std::vector<double> w, v;
  for (const ScanPoint& p : scan) {
    if (!p.peak || p.omega < omega_min || p.omega > omega_max) continue;
    w.push_back(p.omega);
    v.push_back(p.norm);
  }
  return fit_growth(w, v);
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& I, double t0,
                   double t1, double alpha, bool log_correction, double rel_band) {
  if (t.size() != I.size()) throw Error("fit_decay: size mismatch");
  if (!(alpha > 0.0)) throw Error("fit_decay: alpha must be positive");
  if (!(t1 > t0) || !(t0 > 0.0)) throw Error("fit_decay: need 0 < t0 < t1");
  if (log_correction && !(t0 > std::numbers::e)) throw Error("fit_decay: log correction needs t0 > e");
  DecayFit f;
  f.t0 = t0;
  f.t1 = t1;
  f.alpha = alpha;
  f.log_corrected = log_correction;
  f.short_window = t1 / t0 < 10.0;
  f.predicted_slope = -1.0 / alpha;
  f.band_lo = f.predicted_slope * (1.0 + rel_band);
  f.band_hi = f.predicted_slope * (1.0 - rel_band);

  auto abscissa = [&](double s) { return log_correction ? std::log(s / std::log(s)) : std::log(s); };
  auto rate = [&](double s) {
    return log_correction ? std::pow(std::log(s) / s, 1.0 / alpha) : std::pow(s, -1.0 / alpha);
  };
  std::vector<double> x, y, ts, is;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t0 || t[i] > t1 || !(I[i] > 0.0)) continue;
    x.push_back(abscissa(t[i]));
    y.push_back(std::log(I[i]));
    ts.push_back(t[i]);
    is.push_back(I[i]);
  }
  if (x.size() < 3) throw Error("fit_decay: fewer than 3 positive samples in the window");
  const LineFit lf = least_squares(x, y);
  f.points = x.size();
  f.slope = lf.slope;
  f.intercept = lf.intercept;
  f.r2 = lf.r2;
  f.within_band = f.slope >= f.band_lo && f.slope <= f.band_hi;

  const double split = std::sqrt(t0 * t1);
  f.respects_bound = true;
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (ts[i] <= split) f.Mee = std::max(f.Mee, is[i] / rate(ts[i]));
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (ts[i] > split && is[i] > f.Mee * rate(ts[i]) * (1.0 + 1e-12)) f.respects_bound = false;
  return f;
}

std::vector<RobustnessRow> robustness_suite(const PlantModel& plant,
                                            const ControllerRealization& ctrl,
                                            const TruncatedExosystem& exo,
                                            const std::vector<PerturbationSpec>& specs,
                                            const RobustnessOptions& opts) {
  std::vector<RobustnessRow> rows(specs.size());
  auto run = [&](std::size_t i) {
    const PerturbationSpec& s = specs[i];
    RobustnessRow& r = rows[i];
    r.label = s.label;
    try {
      const PlantModel pp = perturb(plant, s);
      const TruncatedExosystem pe = perturb(exo, s);
      const ClosedLoopModel cl = assemble(pp, ctrl, pe);
      r.abscissa = spectral_abscissa(cl.Ae);
      r.stable = r.abscissa < 0.0;
      if (!r.stable) {
        r.status = "destabilizing perturbation, outside guarantee";
        return;
      }
      r.regulator_relative = regulator_residuals(cl, pe).relative;
      SimulationOptions so;
      so.T = opts.T;
      so.dt = opts.dt;
      const DecaySamples d = error_metrics(simulate(cl, pe, so));
      r.I_initial = decay_value_at(d, opts.t_initial);
      r.I_final = decay_value_at(d, opts.T - 1.0);
      r.ratio = r.I_initial > 0.0 ? r.I_final / r.I_initial : 0.0;
      r.status = "ok";
    } catch (const Error& e) {
      r.status = std::string("error: ") + e.what();
    }
  };

  unsigned workers = opts.workers ? opts.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, specs.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < specs.size(); ++i) run(i);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < specs.size(); i = next++) run(i);
    });
  for (std::thread& th : pool) th.join();
  return rows;
}

std::vector<MarginPoint> margin_versus_truncation(
    const PlantModel& plant, const StabilizationGains& gains, const SynthesisParams& params,
    const std::function<TruncatedExosystem(int)>& make_exo, const std::vector<int>& orders) {
  std::vector<MarginPoint> out;
  for (int N : orders) {
    const TruncatedExosystem exo = make_exo(N);
    const ControllerRealization c = synthesize(plant, gains, exo, params);
    out.push_back({N, spectral_abscissa(assemble(plant, c, exo).Ae)});
  }
  return out;
}

}  // namespace imreg
