#include "imreg/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace imreg {

namespace {

constexpr double kInvertTol = 1e-10;

std::string mode_label(int k, double omega) {
  return "mode k=" + std::to_string(k) + " (omega=" + std::to_string(omega) + ")";
}

CMatrix shifted(const CMatrix& A, Complex lambda) {
  CMatrix M = -A;
  M.diagonal().array() += lambda;
  return M;
}

bool full_rank(const CMatrix& M) {
  if (M.size() == 0) return false;
  const RVector s = singular_values(M);
  return s(0) > 0.0 && s(s.size() - 1) > kInvertTol * s(0);
}

CMatrix block_diag_frequencies(const std::vector<ModeBlock>& blocks, Eigen::Index dim) {
  CMatrix G1 = CMatrix::Zero(dim, dim);
  for (const ModeBlock& b : blocks)
    for (Eigen::Index i = 0; i < b.size; ++i) G1(b.offset + i, b.offset + i) = kI * b.omega;
  return G1;
}

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : num; }

/// Assembly shared by the new structure, the reduced-order internal model
/// and the non-robust variant: given K1k per mode (m x d_k, d_k may be 0 to
/// omit the mode) build H, G2, L and the controller operators.
ControllerRealization assemble_new_family(const PlantModel& plant, const StabilizationGains& gains,
                                          const TruncatedExosystem& exo,
                                          const SynthesisParams& params, Variant variant,
                                          const std::vector<CMatrix>& k1_blocks) {
  const Eigen::Index n = plant.state_dim();
  const Eigen::Index m = plant.input_dim();
  const Eigen::Index p = plant.output_dim();
  const CMatrix AL = plant.A + gains.L1 * plant.C;
  const CMatrix BL = plant.B + gains.L1 * plant.D;

  ControllerRealization c;
  c.variant = variant;
  c.params = params;
  c.params.variant = variant;
  c.plant_dim = n;
  c.L1 = gains.L1;
  c.K2 = gains.K2;

  Eigen::Index offset = 0;
  for (int j = 0; j < exo.mode_count(); ++j) {
    const Eigen::Index d = k1_blocks[j].cols();
    if (d == 0) continue;
    c.blocks.push_back({exo.mode_of(j), exo.omega[j], offset, d});
    offset += d;
  }
  c.z0_dim = offset;

  c.G2 = CMatrix::Zero(c.z0_dim, p);
  c.K1 = CMatrix::Zero(m, c.z0_dim);
  c.H = CMatrix::Zero(n, c.z0_dim);
  for (const ModeBlock& b : c.blocks) {
    const CMatrix& K1k = k1_blocks[exo.index_of(b.k)];
    CMatrix RBL;
    try {
      RBL = resolvent_apply(AL, kI * b.omega, BL);
    } catch (const Error&) {
      throw PreconditionError("synthesis: i omega in spectrum of A + L1 C at " +
                              mode_label(b.k, b.omega));
    }
    const CMatrix PL = plant.C * RBL + plant.D;
    c.K1.middleCols(b.offset, b.size) = K1k;
    c.H.middleCols(b.offset, b.size) = RBL * K1k;
    c.G2.middleRows(b.offset, b.size) = -(PL * K1k).adjoint();
  }
  c.G1 = block_diag_frequencies(c.blocks, c.z0_dim);
  c.L = gains.L1 + c.H * c.G2;

  const CMatrix CK = plant.C + plant.D * gains.K2;
  const Eigen::Index dz = c.z0_dim + n;
  c.calG1 = CMatrix::Zero(dz, dz);
  c.calG1.topLeftCorner(c.z0_dim, c.z0_dim) = c.G1;
  c.calG1.topRightCorner(c.z0_dim, n) = c.G2 * CK;
  c.calG1.bottomRightCorner(n, n) = plant.A + plant.B * gains.K2 + c.L * CK;
  c.calG2.resize(dz, p);
  c.calG2 << c.G2, c.L;
  c.K.resize(m, dz);
  c.K << c.K1, -gains.K2;

  c.self_checks = verify_self_checks(plant, c);
  return c;
}

void enforce_self_checks(const ControllerRealization& c) {
  for (const SelfCheckResult& r : c.self_checks)
    if (!r.pass)
      throw SelfCheckError("self-check failed: " + r.name + " residual " + std::to_string(r.residual));
}

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::NewStructure: return "new-structure";
    case Variant::ReducedIM: return "reduced-im";
    case Variant::NonRobust: return "non-robust";
    case Variant::Observer: return "observer";
  }
  return "unknown";
}

Variant variant_from_string(const std::string& name) {
  if (name == "new-structure" || name == "new") return Variant::NewStructure;
  if (name == "reduced-im" || name == "reduced") return Variant::ReducedIM;
  if (name == "non-robust" || name == "nonrobust") return Variant::NonRobust;
  if (name == "observer" || name == "observer-based") return Variant::Observer;
  throw Error("unknown controller variant '" + name + "'");
}

double gain_sequence(const SynthesisParams& params, int k, double omega) {
  switch (params.law) {
    case GainLaw::Heat:
      return params.gamma0 / (1.0 + std::pow(std::abs(k), 0.5 + params.kappa));
    case GainLaw::Power:
      if (omega == 0.0) return params.gamma0;
      return params.gamma0 * std::pow(std::abs(omega), -params.beta);
  }
  return params.gamma0;
}

const ModeBlock* ControllerRealization::block_for_mode(int k) const {
  for (const ModeBlock& b : blocks)
    if (b.k == k) return &b;
  return nullptr;
}

ControllerRealization synth_new_structure(const PlantModel& plant, const StabilizationGains& gains,
                                          const TruncatedExosystem& exo,
                                          const SynthesisParams& params) {
  validate(plant);
  std::vector<CMatrix> k1(exo.mode_count());
  for (int j = 0; j < exo.mode_count(); ++j) {
    const int k = exo.mode_of(j);
    const double w = exo.omega[j];
    CMatrix PL;
    try {
      PL = transfer_PL(plant, gains, kI * w);
    } catch (const Error&) {
      throw PreconditionError("synthesis: P_L undefined at " + mode_label(k, w));
    }
    if (PL.rows() > PL.cols() || !full_rank(PL))
      throw PreconditionError("synthesis: P_L(i omega) not surjective (transmission zero) at " +
                              mode_label(k, w));
    const CMatrix PLdag = pseudoinverse(PL);
    k1[j] = gain_sequence(params, k, w) * PLdag / op_norm(PLdag);
  }
  ControllerRealization c =
      assemble_new_family(plant, gains, exo, params, Variant::NewStructure, k1);
  enforce_self_checks(c);
  return c;
}

ControllerRealization synth_reduced_im(const PlantModel& plant, const StabilizationGains& gains,
                                       const TruncatedExosystem& exo,
                                       const std::vector<PerturbationSpec>& family,
                                       const SynthesisParams& params) {
  validate(plant);
  const Eigen::Index p = plant.output_dim();
  const Eigen::Index m = plant.input_dim();

  std::vector<PerturbationSpec> members{PerturbationSpec{}};
  for (const PerturbationSpec& s : family)
    if (!s.is_identity()) members.push_back(s);
  std::vector<PlantModel> plants;
  std::vector<TruncatedExosystem> exos;
  for (const PerturbationSpec& s : members) {
    plants.push_back(perturb(plant, s));
    exos.push_back(perturb(exo, s));
  }

  std::vector<CMatrix> k1(exo.mode_count());
  for (int j = 0; j < exo.mode_count(); ++j) {
    const int k = exo.mode_of(j);
    const double w = exo.omega[j];
    CMatrix V = CMatrix::Zero(m, static_cast<Eigen::Index>(members.size()));
    for (std::size_t f = 0; f < members.size(); ++f) {
      const CVector Ephi = exos[f].E.col(j);
      const CVector Fphi = exos[f].F.col(j);
      if (Ephi.norm() == 0.0 && Fphi.norm() == 0.0) continue;  // no forcing at this mode
      const std::string where = mode_label(k, w) + " for family member " + std::to_string(f) +
                                " (" + members[f].label + ")";
      CMatrix P;
      CMatrix Pd;
      try {
        P = transfer(plants[f], kI * w);
        Pd = transfer_disturbance(plants[f], kI * w);
      } catch (const Error&) {
        throw PreconditionError("reduced internal model: transfer pole at " + where);
      }
      if (P.rows() != P.cols() || !full_rank(P))
        throw PreconditionError("reduced internal model: P singular at " + where);
      const CVector y = Pd * Ephi + Fphi;
      V.col(static_cast<Eigen::Index>(f)) = Eigen::PartialPivLU<CMatrix>(P).solve(y);
    }

    const double vmax = V.colwise().norm().maxCoeff();
    Eigen::Index pk = 0;
    CMatrix Q;
    if (vmax > 0.0) {
      Eigen::ColPivHouseholderQR<CMatrix> qr(V);
      qr.setThreshold(1e-10);
      pk = std::min<Eigen::Index>(qr.rank(), p);
      Q = CMatrix(qr.householderQ()).leftCols(pk);
    }
    const double gk = gain_sequence(params, k, w);
    if (pk == 0) {
      k1[j] = CMatrix::Zero(m, 0);
    } else if (pk < p) {
      k1[j] = gk * Q;
    } else {
      CMatrix P;
      try {
        P = transfer(plant, kI * w);
      } catch (const Error&) {
        throw PreconditionError("reduced internal model: transfer pole at " + mode_label(k, w));
      }
      const CMatrix Pinv = Eigen::PartialPivLU<CMatrix>(P).inverse();
      k1[j] = gk * Pinv / op_norm(Pinv);
    }
  }
  ControllerRealization c = assemble_new_family(plant, gains, exo, params, Variant::ReducedIM, k1);
  enforce_self_checks(c);
  return c;
}

ControllerRealization synth_nonrobust(const PlantModel& plant, const StabilizationGains& gains,
                                      const TruncatedExosystem& exo,
                                      const SynthesisParams& params) {
  validate(plant);
  std::vector<CMatrix> k1(exo.mode_count());
  for (int j = 0; j < exo.mode_count(); ++j) {
    const int k = exo.mode_of(j);
    const double w = exo.omega[j];
    const CVector Ephi = exo.E.col(j);
    const CVector Fphi = exo.F.col(j);
    const bool forced = Ephi.norm() != 0.0 || Fphi.norm() != 0.0;

    CMatrix P;
    bool regular = true;
    try {
      P = transfer(plant, kI * w);
    } catch (const Error&) {
      regular = false;
    }

    CVector u;
    if (forced) {
      if (!regular)
        throw PreconditionError("untrackable mode: transfer pole at " + mode_label(k, w));
      const CVector y = transfer_disturbance(plant, kI * w) * Ephi + Fphi;
      if (y.norm() > 0.0) {
        const CMatrix Pdag = pseudoinverse(P);
        u = Pdag * y;
        if ((P * u - y).norm() > 1e-8 * y.norm())
          throw PreconditionError("untrackable mode: y_k outside range of P at " +
                                  mode_label(k, w));
      }
    }
    if (u.size() == 0 || u.norm() == 0.0) {
      // y_k = 0: any direction outside ker P; use the dominant right singular vector
      // (of P_L when i omega_k is a pole of P, which has the same kernel elsewhere).
      const CMatrix T = regular ? P : transfer_PL(plant, gains, kI * w);
      u = svd(T).V.col(0);
    }
    k1[j] = gain_sequence(params, k, w) * u / u.norm();
  }
  ControllerRealization c = assemble_new_family(plant, gains, exo, params, Variant::NonRobust, k1);
  enforce_self_checks(c);
  return c;
}

ControllerRealization synth_observer_based(const PlantModel& plant,
                                           const StabilizationGains& gains,
                                           const TruncatedExosystem& exo,
                                           const SynthesisParams& params) {
  validate(plant);
  const Eigen::Index n = plant.state_dim();
  const Eigen::Index m = plant.input_dim();
  const Eigen::Index p = plant.output_dim();
  if (!params.g2_profile.empty() &&
      params.g2_profile.size() != static_cast<std::size_t>(exo.mode_count()))
    throw Error("observer synthesis: g2 profile must have one entry per mode");

  const CMatrix AK = plant.A + plant.B * gains.K2;
  const CMatrix CK = plant.C + plant.D * gains.K2;
  const CMatrix& L = gains.L1;

  ControllerRealization c;
  c.variant = Variant::Observer;
  c.params = params;
  c.params.variant = Variant::Observer;
  c.plant_dim = n;
  c.K21 = gains.K2;
  c.L = L;

  Eigen::Index offset = 0;
  for (int j = 0; j < exo.mode_count(); ++j) {
    c.blocks.push_back({exo.mode_of(j), exo.omega[j], offset, p});
    offset += p;
  }
  c.z0_dim = offset;
  c.G2 = CMatrix::Zero(c.z0_dim, p);
  c.K1 = CMatrix::Zero(m, c.z0_dim);
  c.H = CMatrix::Zero(c.z0_dim, n);

  for (const ModeBlock& b : c.blocks) {
    const Complex lam = kI * b.omega;
    const Complex g2 = params.g2_profile.empty() ? Complex(gain_sequence(params, b.k, b.omega))
                                                 : params.g2_profile[exo.index_of(b.k)];
    if (g2 == 0.0) throw Error("observer synthesis: g2k must be nonzero at " + mode_label(b.k, b.omega));
    const CMatrix G2k = g2 * CMatrix::Identity(p, p);

    Eigen::PartialPivLU<CMatrix> lu(shifted(AK, lam));
    if (!(lu.rcond() > 1e-14))
      throw PreconditionError("observer synthesis: i omega in spectrum of A + B K21 at " +
                              mode_label(b.k, b.omega));
    const CMatrix PK = CK * lu.solve(plant.B) + plant.D;
    if (PK.rows() != PK.cols() || !full_rank(PK))
      throw PreconditionError("observer synthesis: P_K(i omega) singular at " +
                              mode_label(b.k, b.omega));
    // H_k = G2k CK R(i omega, AK), formed through the adjoint system.
    Eigen::PartialPivLU<CMatrix> lu_adj(shifted(AK.adjoint(), std::conj(lam)));
    const CMatrix Hk = lu_adj.solve(CK.adjoint() * G2k.adjoint()).adjoint();

    c.G2.middleRows(b.offset, p) = G2k;
    c.H.middleRows(b.offset, p) = Hk;
    c.K1.middleCols(b.offset, p) = -(G2k * PK).adjoint();
  }
  c.G1 = block_diag_frequencies(c.blocks, c.z0_dim);
  c.K2 = gains.K2 + c.K1 * c.H;

  const Eigen::Index dz = c.z0_dim + n;
  c.calG1 = CMatrix::Zero(dz, dz);
  c.calG1.topLeftCorner(c.z0_dim, c.z0_dim) = c.G1;
  c.calG1.bottomLeftCorner(n, c.z0_dim) = (plant.B + L * plant.D) * c.K1;
  c.calG1.bottomRightCorner(n, n) = plant.A + plant.B * c.K2 + L * (plant.C + plant.D * c.K2);
  c.calG2.resize(dz, p);
  c.calG2 << c.G2, -L;
  c.K.resize(m, dz);
  c.K << c.K1, c.K2;

  c.self_checks = verify_self_checks(plant, c);
  enforce_self_checks(c);
  return c;
}

ControllerRealization synthesize(const PlantModel& plant, const StabilizationGains& gains,
                                 const TruncatedExosystem& exo, const SynthesisParams& params,
                                 const std::vector<PerturbationSpec>& family) {
  switch (params.variant) {
    case Variant::NewStructure: return synth_new_structure(plant, gains, exo, params);
    case Variant::ReducedIM: return synth_reduced_im(plant, gains, exo, family, params);
    case Variant::NonRobust: return synth_nonrobust(plant, gains, exo, params);
    case Variant::Observer: return synth_observer_based(plant, gains, exo, params);
  }
  throw Error("synthesize: unknown variant");
}

std::vector<SelfCheckResult> verify_self_checks(const PlantModel& plant,
                                                const ControllerRealization& c) {
  const bool observer = c.variant == Variant::Observer;
  const Eigen::Index n = plant.state_dim();
  if ((observer ? c.H.cols() : c.H.rows()) != n || (observer ? c.H.rows() : c.H.cols()) != c.G1.rows())
    throw Error("verify_self_checks: controller does not match the plant (H is " +
                std::to_string(c.H.rows()) + "x" + std::to_string(c.H.cols()) + ")");
  std::vector<SelfCheckResult> out;
  const double g1 = std::max(op_norm(c.G1), 1.0);
  if (c.variant == Variant::Observer) {
    const CMatrix AK = plant.A + plant.B * c.K21;
    const CMatrix CK = plant.C + plant.D * c.K21;
    const double b1 =
        safe_ratio((c.H * plant.B + c.G2 * plant.D + c.K1.adjoint()).norm(), op_norm(c.K1));
    out.push_back({"observer B1 identity HB + G2 D = -K1*", b1, b1 <= kSelfCheckTol});
    const CMatrix res = c.G1 * c.H - c.H * AK - c.G2 * CK;
    const double syl = safe_ratio(op_norm(res), g1 * op_norm(c.H) + op_norm(c.G2 * CK));
    out.push_back({"observer Sylvester G1 H = H (A + B K21) + G2 (C + D K21)", syl,
                   syl <= kSelfCheckTol});
    return out;
  }
  const CMatrix AL = plant.A + c.L1 * plant.C;
  const CMatrix BL = plant.B + c.L1 * plant.D;
  const double adj =
      safe_ratio(op_norm(plant.C * c.H + plant.D * c.K1 + c.G2.adjoint()), op_norm(c.G2));
  out.push_back({"adjoint coupling C H + D K1 = -G2*", adj, adj <= kSelfCheckTol});
  const CMatrix res = c.H * c.G1 - AL * c.H - BL * c.K1;
  const double syl = safe_ratio(op_norm(res), g1 * op_norm(c.H) + op_norm(BL * c.K1));
  out.push_back({"Sylvester H G1 = (A + L1 C) H + (B + L1 D) K1", syl, syl <= kSelfCheckTol});
  return out;
}

std::vector<ModeInvertibility> check_mode_invertibility(const PlantModel& plant,
                                                        const StabilizationGains& gains,
                                                        const TruncatedExosystem& exo,
                                                        TransferKind which) {
  std::vector<ModeInvertibility> out;
  for (int j = 0; j < exo.mode_count(); ++j) {
    ModeInvertibility r;
    r.k = exo.mode_of(j);
    r.omega = exo.omega[j];
    const Complex lam = kI * r.omega;
    try {
      CMatrix T;
      switch (which) {
        case TransferKind::PL: T = transfer_PL(plant, gains, lam); break;
        case TransferKind::PK: T = transfer_PK(plant, gains, lam); break;
        case TransferKind::P: T = transfer(plant, lam); break;
      }
      const RVector s = singular_values(T);
      r.sigma_max = s(0);
      r.sigma_min = s(s.size() - 1);
      r.invertible = r.sigma_max > 0.0 && r.sigma_min > kInvertTol * r.sigma_max;
    } catch (const Error&) {
      r.pole = true;
      r.sigma_min = 0.0;
      r.sigma_max = kInfinity;
      r.invertible = false;
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace imreg
