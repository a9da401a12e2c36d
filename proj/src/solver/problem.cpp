#include "gpeio/solver/problem.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "gpeio/common/error.hpp"
#include "gpeio/inertial/gpif.hpp"
#include "gpeio/inertial/gpp.hpp"
#include "gpeio/inertial/preintegration.hpp"
#include "gpeio/liegroup/se3.hpp"
#include "gpeio/liegroup/so3.hpp"
#include "gpeio/vision/reprojection.hpp"

namespace gpeio {

const char* to_string(FactorKind kind) {
  switch (kind) {
    case FactorKind::kWnojPrior: return "wnoj-prior";
    case FactorKind::kBiasPrior: return "bias-prior";
    case FactorKind::kGpif: return "gpif";
    case FactorKind::kGpp: return "gpp";
    case FactorKind::kPreint: return "preint";
    case FactorKind::kVisual: return "visual";
    case FactorKind::kZeroPrior: return "zero-prior";
    case FactorKind::kGaugePrior: return "gauge-prior";
    case FactorKind::kBiasAnchor: return "bias-anchor";
    case FactorKind::kMarginal: return "marginal";
  }
  return "?";
}

void FactorGraphProblem::sync_sizes() {
  fixed_.resize(knot_dims(), 0);
  biases.resize(num_knots());
}

void FactorGraphProblem::hold(std::size_t knot, int first, int count) {
  sync_sizes();
  if (knot >= num_knots() || first < 0 || first + count > kKnotDim)
    throw Error(ErrorCode::kInvalidArgument, "hold outside the knot block");
  for (int i = first; i < first + count; ++i) fixed_[kKnotDim * knot + i] = 1;
}

void FactorGraphProblem::hold_all_except(const std::vector<int>& free_dims) {
  sync_sizes();
  fixed_.assign(knot_dims(), 1);
  for (std::size_t k = 0; k < num_knots(); ++k)
    for (int d : free_dims) fixed_[kKnotDim * k + d] = 0;
}

FactorCounts FactorGraphProblem::counts() const {
  FactorCounts c;
  const std::size_t n = num_knots();
  if (wnoj_priors && n > 1) c.wnoj = n - 1;
  if (bias_priors && n > 1) c.bias = n - 1;
  for (const InertialSample& s : gpif_samples)
    if (trajectory.size() >= 2 && trajectory.covers(s.t)) ++c.gpif;
  for (const IncrementMeasurement& m : increments) {
    if (m.knot + 1 >= n) continue;
    (scheme == InertialScheme::kGpp ? c.gpp : c.preint) += 1;
  }
  for (const VisualMeasurement& m : visual)
    if (trajectory.size() >= 2 && trajectory.covers(m.t) && m.landmark < landmarks.size()) ++c.visual;
  if (n > 0 && (lambda_omega > 0.0 || lambda_accel > 0.0)) c.zero = 1;
  c.gauge = gauge_priors.size();
  c.anchor = bias_anchors.size();
  if (!marginal.empty()) c.marginal = 1;
  return c;
}

Vec24 knot_difference(const KinematicState& x, const BiasState& b, const KinematicState& x_lin, const BiasState& b_lin,
                      Mat24* jacobian) {
  Vec24 d;
  const Twist xi = (x_lin.T.inverse() * x.T).log();
  d << xi, x.w - x_lin.w, x.dw - x_lin.dw, b.stacked() - b_lin.stacked();
  if (jacobian) {
    jacobian->setIdentity();
    jacobian->topLeftCorner<6, 6>() = se3::right_jacobian_inv(xi);
  }
  return d;
}

namespace {

void check_finite(const FactorEval& f) {
  bool ok = f.r.allFinite() && std::isfinite(f.cost);
  for (const KnotJacobian& j : f.knots) ok = ok && j.J.allFinite();
  if (f.landmark >= 0) ok = ok && f.J_landmark.allFinite();
  if (!ok)
    throw Error(ErrorCode::kSolverFailure,
                std::string("non-finite residual in ") + to_string(f.kind) + " factor " + std::to_string(f.index));
}

MatX knot_block(const MatX& state_part, const MatX& bias_part) {
  MatX J = MatX::Zero(std::max(state_part.rows(), bias_part.rows()), kKnotDim);
  if (state_part.size()) J.leftCols<18>() = state_part;
  if (bias_part.size()) J.rightCols<6>() = bias_part;
  return J;
}

double huber_cost(double s, double k) { return s <= k ? 0.5 * s * s : k * s - 0.5 * k * k; }

std::size_t knot_at_time(const Trajectory& traj, double t) {
  for (std::size_t k = 0; k < traj.size(); ++k)
    if (std::abs(traj.time(k) - t) <= 1e-9) return k;
  throw Error(ErrorCode::kInvalidArgument, "marginal prior refers to a knot that is not in the problem");
}

}  // namespace

void evaluate_factors(const FactorGraphProblem& p, bool jacobians, const std::function<void(const FactorEval&)>& fn) {
  const Trajectory& traj = p.trajectory;
  const std::size_t n = traj.size();
  if (p.biases.size() != n) throw Error(ErrorCode::kInvalidArgument, "problem needs one bias per knot");
  FactorEval f;
  auto emit = [&]() {
    check_finite(f);
    fn(f);
  };

  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double dt = traj.time(k + 1) - traj.time(k);
    if (p.wnoj_priors) {
      const wnoj::PriorResidual pr = wnoj::prior_residual(traj.state(k), traj.state(k + 1), dt, traj.model());
      f = FactorEval{FactorKind::kWnojPrior, k};
      f.r = pr.sqrt_information * pr.residual;
      f.cost = 0.5 * f.r.squaredNorm();
      if (jacobians)
        f.knots = {{k, knot_block(pr.sqrt_information * pr.jac_k, MatX())},
                   {k + 1, knot_block(pr.sqrt_information * pr.jac_k1, MatX())}};
      emit();
    }
    if (p.bias_priors) {
      const BiasPriorResidual br = bias_prior_residual(p.biases[k], p.biases[k + 1], dt, p.imu);
      f = FactorEval{FactorKind::kBiasPrior, k};
      f.r = br.sqrt_information * br.residual;
      f.cost = 0.5 * f.r.squaredNorm();
      if (jacobians)
        f.knots = {{k, knot_block(MatX(), br.sqrt_information * br.d_bk)},
                   {k + 1, knot_block(MatX(), br.sqrt_information * br.d_bk1)}};
      emit();
    }
  }

  if (n >= 2) {
    for (std::size_t i = 0; i < p.gpif_samples.size(); ++i) {
      const InertialSample& s = p.gpif_samples[i];
      if (!traj.covers(s.t)) continue;
      const InterpolatedState st = traj.query(s.t, jacobians);
      const std::size_t k = st.k;
      const double alpha = (s.t - traj.time(k)) / (traj.time(k + 1) - traj.time(k));
      const GpifResidual g = gpif_residual(st, alpha, p.biases[k], p.biases[k + 1], s, p.imu);
      f = FactorEval{FactorKind::kGpif, i};
      f.r = g.sqrt_information * g.residual;
      f.cost = 0.5 * f.r.squaredNorm();
      if (jacobians)
        f.knots = {{k, knot_block(g.sqrt_information * g.d_xk, g.sqrt_information * g.d_bk)},
                   {k + 1, knot_block(g.sqrt_information * g.d_xk1, g.sqrt_information * g.d_bk1)}};
      emit();
    }
  }

  const FactorKind inc_kind = p.scheme == InertialScheme::kGpp ? FactorKind::kGpp : FactorKind::kPreint;
  for (std::size_t i = 0; i < p.increments.size(); ++i) {
    const std::size_t k = p.increments[i].knot;
    if (k + 1 >= n) continue;
    const IncrementResidual ir =
        increment_residual(traj.state(k), traj.state(k + 1), p.biases[k], p.increments[i].increments, p.imu.gravity);
    f = FactorEval{inc_kind, i};
    f.r = ir.sqrt_information * ir.residual;
    f.cost = 0.5 * f.r.squaredNorm();
    if (jacobians)
      f.knots = {{k, knot_block(ir.sqrt_information * ir.d_xk, ir.sqrt_information * ir.d_bk)},
                 {k + 1, knot_block(ir.sqrt_information * ir.d_xk1, MatX())}};
    emit();
  }

  const double kh = p.huber_px / p.pixel_sigma;
  for (std::size_t i = 0; i < p.visual.size(); ++i) {
    const VisualMeasurement& m = p.visual[i];
    if (n < 2 || !traj.covers(m.t) || m.landmark >= p.landmarks.size()) continue;
    f = FactorEval{FactorKind::kVisual, i};
    f.landmark = static_cast<int>(m.landmark);
    VisualResidual vr;
    try {
      vr = visual_residual(p.landmarks[m.landmark], traj, m.t, m.q, p.camera);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kBehindCamera) throw;
      // Constant cost and no gradient: the step that put the point behind
      // the camera is judged by the other factors.
      f.cost = huber_cost(p.behind_camera_px / p.pixel_sigma, kh);
      f.r = VecX();
      f.J_landmark = VecX();
      emit();
      continue;
    }
    const Vec2 e = vr.residual / p.pixel_sigma;
    const double s = e.norm();
    const double w = s <= kh ? 1.0 : std::sqrt(kh / s);
    f.cost = huber_cost(s, kh);
    f.r = w * e;
    if (jacobians) {
      const double c = w / p.pixel_sigma;
      f.knots = {{vr.anchor_knot, knot_block(c * vr.d_anchor, MatX())},
                 {vr.obs_knot, knot_block(c * vr.d_obs_k, MatX())},
                 {vr.obs_knot + 1, knot_block(c * vr.d_obs_k1, MatX())}};
      f.J_landmark = c * vr.d_rho;
    }
    emit();
  }

  if (n > 0 && (p.lambda_omega > 0.0 || p.lambda_accel > 0.0)) {
    const KinematicState& x0 = traj.state(0);
    const double a = std::sqrt(p.lambda_omega), b = std::sqrt(p.lambda_accel);
    f = FactorEval{FactorKind::kZeroPrior, 0};
    f.r = VecX(9);
    f.r << a * x0.w.head<3>(), b * x0.dw;
    f.cost = 0.5 * f.r.squaredNorm();
    if (jacobians) {
      MatX J = MatX::Zero(9, kKnotDim);
      J.block<3, 3>(0, 6) = a * Mat3::Identity();
      J.block<6, 6>(3, 12) = b * Mat6::Identity();
      f.knots = {{0, J}};
    }
    emit();
  }

  for (std::size_t i = 0; i < p.gauge_priors.size(); ++i) {
    const GaugePrior& gp = p.gauge_priors[i];
    if (gp.knot >= n) continue;
    const Pose& T = traj.state(gp.knot).T;
    const Vec3 phi = so3::log(gp.reference.C().transpose() * T.C());
    const Eigen::RowVector3d ez_ref = gp.reference.C().row(2);
    f = FactorEval{FactorKind::kGaugePrior, i};
    f.r = VecX(4);
    f.r << gp.sqrt_weight * (T.translation() - gp.reference.translation()), gp.sqrt_weight * ez_ref.dot(phi);
    f.cost = 0.5 * f.r.squaredNorm();
    if (jacobians) {
      MatX J = MatX::Zero(4, kKnotDim);
      J.block<3, 3>(0, 3) = gp.sqrt_weight * T.C();
      J.block<1, 3>(3, 0) = gp.sqrt_weight * ez_ref * so3::right_jacobian_inv(phi);
      f.knots = {{gp.knot, J}};
    }
    emit();
  }

  for (std::size_t i = 0; i < p.bias_anchors.size(); ++i) {
    const BiasAnchor& ba = p.bias_anchors[i];
    if (ba.knot >= n) continue;
    const Vec6 inv = ba.sigma.cwiseInverse();
    f = FactorEval{FactorKind::kBiasAnchor, i};
    f.r = inv.cwiseProduct(p.biases[ba.knot].stacked() - ba.mean.stacked());
    f.cost = 0.5 * f.r.squaredNorm();
    if (jacobians) {
      MatX J = MatX::Zero(6, kKnotDim);
      J.block<6, 6>(0, kBiasOffset) = inv.asDiagonal();
      f.knots = {{ba.knot, J}};
    }
    emit();
  }

  if (!p.marginal.empty()) {
    const MarginalPrior& mp = p.marginal;
    VecX d(kKnotDim * mp.knot_times.size());
    std::vector<Mat24> dj(mp.knot_times.size());
    std::vector<std::size_t> idx(mp.knot_times.size());
    for (std::size_t i = 0; i < mp.knot_times.size(); ++i) {
      idx[i] = knot_at_time(traj, mp.knot_times[i]);
      d.segment<kKnotDim>(kKnotDim * i) =
          knot_difference(traj.state(idx[i]), p.biases[idx[i]], mp.x_lin[i], mp.b_lin[i], &dj[i]);
    }
    f = FactorEval{FactorKind::kMarginal, 0};
    f.r = mp.r0 + mp.J * d;
    f.cost = 0.5 * f.r.squaredNorm();
    if (jacobians)
      for (std::size_t i = 0; i < idx.size(); ++i)
        f.knots.push_back({idx[i], mp.J.middleCols<kKnotDim>(kKnotDim * i) * dj[i]});
    emit();
  }
}

double evaluate_cost(const FactorGraphProblem& problem) {
  double c = 0.0;
  evaluate_factors(problem, false, [&](const FactorEval& f) { c += f.cost; });
  return c;
}

void dense_normal_equations(const FactorGraphProblem& problem, MatX* H, VecX* g) {
  const std::size_t nx = problem.knot_dims();
  const std::size_t n = nx + problem.landmarks.size();
  H->setZero(n, n);
  g->setZero(n);
  evaluate_factors(problem, true, [&](const FactorEval& f) {
    if (f.r.size() == 0) return;
    MatX J = MatX::Zero(f.r.size(), n);
    for (const KnotJacobian& kj : f.knots) J.middleCols<kKnotDim>(kKnotDim * kj.knot) += kj.J;
    if (f.landmark >= 0) J.col(nx + f.landmark) += f.J_landmark;
    H->noalias() += J.transpose() * J;
    g->noalias() += J.transpose() * f.r;
  });
}

int numerical_rank(const MatX& H, double rel_tol) {
  if (H.size() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (H + H.transpose()), Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  int rank = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > rel_tol * top) ++rank;
  return rank;
}

void add_inertial_factors(FactorGraphProblem& p, const std::vector<InertialSample>& imu, const SolverConfig& cfg,
                          IncrementCache* cache) {
  const Trajectory& traj = p.trajectory;
  if (traj.size() < 2 || imu.empty()) return;
  if (cfg.scheme == InertialScheme::kGpif) {
    std::size_t i = 0;
    for (const InertialSample& s : imu) {
      if (!traj.covers(s.t)) continue;
      if (i++ % cfg.gpif_stride == 0) p.gpif_samples.push_back(s);
    }
    return;
  }
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    const double t0 = traj.time(k), t1 = traj.time(k + 1);
    if (cache) {
      const auto it = cache->find(t0);
      if (it != cache->end() && std::abs(it->second.t1 - t1) < 1e-12) {
        p.increments.push_back({k, it->second});
        continue;
      }
    }
    const ImuIncrements inc = cfg.scheme == InertialScheme::kGpp
                                  ? gpp_increments(imu, t0, t1, p.biases[k], p.imu, cfg.gpp)
                                  : preintegrate_discrete(imu, t0, t1, p.biases[k], p.imu);
    if (cache) (*cache)[t0] = inc;
    p.increments.push_back({k, inc});
  }
}

FactorGraphProblem build_problem(const Trajectory& trajectory, const std::vector<BiasState>& biases,
                                 const std::vector<InertialSample>& imu,
                                 const std::vector<LandmarkObservations>& landmarks, const CameraModel& camera,
                                 const SolverConfig& cfg, IncrementCache* cache, std::size_t* dropped) {
  FactorGraphProblem p;
  p.trajectory = trajectory;
  p.biases = biases;
  p.scheme = cfg.scheme;
  p.imu = cfg.imu;
  p.camera = camera;
  p.pixel_sigma = cfg.pixel_sigma;
  p.huber_px = cfg.huber_px;
  p.behind_camera_px = cfg.behind_camera_px;
  p.rho_max = cfg.landmark.rho_max;
  p.sync_sizes();
  add_inertial_factors(p, imu, cfg, cache);
  std::size_t skipped = 0;
  for (const LandmarkObservations& lo : landmarks) {
    const std::size_t index = p.landmarks.size();
    p.landmarks.push_back(lo.landmark);
    for (const FeatureObservation& o : lo.observations) {
      if (trajectory.size() < 2 || !trajectory.covers(o.t) || o.t < lo.landmark.anchor_time - 1e-12) {
        ++skipped;
        continue;
      }
      p.visual.push_back({index, o.t, o.q});
    }
  }
  if (dropped) *dropped = skipped;
  return p;
}

}  // namespace gpeio
