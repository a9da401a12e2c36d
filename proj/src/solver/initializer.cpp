#include "gpeio/solver/initializer.hpp"

#include <algorithm>
#include <cmath>

#include "gpeio/common/error.hpp"
#include "gpeio/inertial/preintegration.hpp"
#include "gpeio/liegroup/so3.hpp"

namespace gpeio {

namespace {

constexpr int kMinTracks = 5;
constexpr int kMinFramesPerTrack = 3;
constexpr int kReweightPasses = 3;

struct FrameData {
  double t;
  Mat3 R = Mat3::Identity();
  Vec3 dp = Vec3::Zero();
};

struct InitObservation {
  std::size_t frame;
  std::size_t point;
  Vec3 bearing;  // camera frame
};

// Orthonormal basis of the plane normal to n.
Eigen::Matrix<double, 3, 2> tangent_basis(const Vec3& n) {
  const Vec3 a = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 b1 = n.cross(a).normalized();
  Eigen::Matrix<double, 3, 2> B;
  B << b1, n.cross(b1);
  return B;
}

}  // namespace

InertialSample imu_at(const std::vector<InertialSample>& imu, double t) {
  if (imu.empty()) throw Error(ErrorCode::kMissingData, "no inertial samples");
  if (t <= imu.front().t) return {t, imu.front().gyro, imu.front().accel};
  if (t >= imu.back().t) return {t, imu.back().gyro, imu.back().accel};
  const auto it = std::lower_bound(imu.begin(), imu.end(), t,
                                   [](const InertialSample& s, double v) { return s.t < v; });
  const InertialSample& b = *it;
  const InertialSample& a = *(it - 1);
  const double s = b.t > a.t ? (t - a.t) / (b.t - a.t) : 0.0;
  return {t, (1.0 - s) * a.gyro + s * b.gyro, (1.0 - s) * a.accel + s * b.accel};
}

KinematicState state_from_imu(const std::vector<InertialSample>& imu, double t, const Pose& T_wb, const Vec3& v_w,
                              const BiasState& bias, const Vec3& gravity, double half_span) {
  const InertialSample m = imu_at(imu, t);
  const Mat3& C = T_wb.C();
  KinematicState x;
  x.T = T_wb;
  const Vec3 omega = m.gyro - bias.bg;
  const Vec3 nu = C.transpose() * v_w;
  x.w << omega, nu;
  const double h = std::max(half_span, 1e-4);
  const Vec3 omega_dot = (imu_at(imu, t + h).gyro - imu_at(imu, t - h).gyro) / (2.0 * h);
  const Vec3 nu_dot = m.accel - bias.ba + C.transpose() * gravity - omega.cross(nu);
  x.dw << omega_dot, nu_dot;
  return x;
}

KinematicState predict_state(const std::vector<InertialSample>& imu, double t, const KinematicState& x, double t1,
                             const BiasState& bias, const ImuNoiseModel& model) {
  const double dt = t1 - t;
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "prediction needs t1 > t");
  const ImuIncrements inc = preintegrate_discrete(imu, t, t1, bias, model);
  const Mat3& C = x.T.C();
  const Vec3 v_w = C * x.w.tail<3>();
  const Vec3& g = model.gravity;
  const Vec3 r1 = x.T.translation() + v_w * dt + 0.5 * g * dt * dt + C * inc.dp;
  const Vec3 v1 = v_w + g * dt + C * inc.dv;
  const Pose T1(Rotation::from_approximate(C * inc.dR), r1);
  return state_from_imu(imu, t1, T1, v1, bias, g, 0.5 * dt);
}

LinearInit solve_linear_init(const std::vector<FeatureTrajectory>& tracks, const std::vector<InertialSample>& imu,
                             double t0, const CameraModel& camera, const SolverConfig& cfg) {
  if (imu.empty() || imu.back().t - t0 < cfg.init_min_duration)
    throw Error(ErrorCode::kNotReady, "not enough inertial data for initialization");
  if (imu.front().t > t0 + 1e-9) throw Error(ErrorCode::kMissingData, "initialization starts before the inertial data");
  const double t_end = std::min(t0 + cfg.init_duration, imu.back().t);
  const int n_frames = static_cast<int>(std::floor((t_end - t0) / cfg.init_frame_interval + 1e-9)) + 1;

  LinearInit out;
  out.t0 = t0;
  std::vector<FrameData> frames;
  for (int i = 0; i < n_frames; ++i) {
    FrameData f;
    f.t = t0 + i * cfg.init_frame_interval;
    if (i > 0) {
      const ImuIncrements inc = preintegrate_discrete(imu, t0, f.t, BiasState{}, cfg.imu);
      f.R = inc.dR;
      f.dp = inc.dp;
    }
    frames.push_back(f);
    out.frames.push_back(f.t);
  }

  std::vector<InitObservation> obs;
  double disparity_sum = 0.0;
  for (const FeatureTrajectory& tr : tracks) {
    if (tr.observations.size() < 2) continue;
    const double ta = tr.observations.front().t, tb = tr.observations.back().t;
    std::vector<std::size_t> seen;
    for (std::size_t i = 0; i < frames.size(); ++i)
      if (frames[i].t >= ta - 1e-9 && frames[i].t <= tb + 1e-9) seen.push_back(i);
    if (static_cast<int>(seen.size()) < kMinFramesPerTrack) continue;
    const std::size_t point = out.track_ids.size();
    out.track_ids.push_back(tr.id);
    const Vec2 q_first = interpolate_track(tr.observations, frames[seen.front()].t);
    double disparity = 0.0;
    for (std::size_t i : seen) {
      const Vec2 q = interpolate_track(tr.observations, frames[i].t);
      disparity = std::max(disparity, (q - q_first).norm());
      obs.push_back({i, point, camera.bearing(q)});
    }
    disparity_sum += disparity;
  }
  const int n_points = static_cast<int>(out.track_ids.size());
  if (n_points < kMinTracks) throw Error(ErrorCode::kNotReady, "too few tracks for initialization");
  out.mean_disparity = disparity_sum / n_points;
  if (out.mean_disparity < cfg.init_min_disparity)
    throw Error(ErrorCode::kNotReady, "not enough disparity for initialization");
  out.observations = static_cast<int>(obs.size());

  // Unknowns [v0 (3); g0 (3); P_j (3 each)], all in the first body frame.
  // Each bearing gives hat(d) (P_j - c_i) = 0 with the camera centre
  // c_i = v0 t + g0 t^2 / 2 + dp_i + R_i t_bc. The accelerometer bias is left
  // at zero here: over one second it is nearly collinear with gravity tilt.
  // Rows are reweighted by the inverse range so that residuals measure angles;
  // unweighted, noise pulls the scale towards zero.
  const int n = 6 + 3 * n_points;
  MatX A = MatX::Zero(3 * obs.size(), n);
  VecX b = VecX::Zero(A.rows());
  const Mat3& R_bc = camera.T_bc.C();
  const Vec3& t_bc = camera.T_bc.translation();
  std::vector<Vec3> centre_known(obs.size());
  for (std::size_t k = 0; k < obs.size(); ++k) {
    const FrameData& f = frames[obs[k].frame];
    const double dt = f.t - t0;
    const Mat3 M = so3::hat(f.R * R_bc * obs[k].bearing);
    const int row = static_cast<int>(3 * k);
    A.block<3, 3>(row, 0) = -M * dt;
    A.block<3, 3>(row, 3) = -M * (0.5 * dt * dt);
    A.block<3, 3>(row, 6 + 3 * static_cast<int>(obs[k].point)) = M;
    centre_known[k] = f.dp + f.R * t_bc;
    b.segment<3>(row) = M * centre_known[k];
  }

  const double g_norm = cfg.imu.gravity.norm();
  VecX y = VecX::Zero(n);
  VecX w = VecX::Ones(obs.size());
  for (int pass = 0; pass < kReweightPasses; ++pass) {
    MatX Aw = A;
    VecX bw = b;
    for (std::size_t k = 0; k < obs.size(); ++k) {
      Aw.middleRows<3>(3 * k) *= w(k);
      bw.segment<3>(3 * k) *= w(k);
    }
    y = Aw.colPivHouseholderQr().solve(bw);
    if (!y.allFinite() || !(y.segment<3>(3).norm() > 1e-6))
      throw Error(ErrorCode::kConditioning, "linear initialization is degenerate");

    // Same system with the known gravity magnitude: two tangent dofs.
    Vec3 g = y.segment<3>(3).normalized() * g_norm;
    for (int it = 0; it < 3; ++it) {
      const Eigen::Matrix<double, 3, 2> B = tangent_basis(g.normalized());
      MatX A2(Aw.rows(), n - 1);
      A2 << Aw.leftCols<3>(), Aw.middleCols<3>(3) * B, Aw.rightCols(n - 6);
      const VecX z = A2.colPivHouseholderQr().solve(bw - Aw.middleCols<3>(3) * g);
      g = (g + B * z.segment<2>(3)).normalized() * g_norm;
      y.head<3>() = z.head<3>();
      y.segment<3>(3) = g;
      y.tail(n - 6) = z.tail(n - 6);
    }

    for (std::size_t k = 0; k < obs.size(); ++k) {
      const double dt = frames[obs[k].frame].t - t0;
      const Vec3 c = y.head<3>() * dt + 0.5 * y.segment<3>(3) * dt * dt + centre_known[k];
      const double range = (y.segment<3>(6 + 3 * obs[k].point) - c).norm();
      w(k) = 1.0 / std::max(range, 0.1);
    }
  }

  out.v0 = y.head<3>();
  out.g0 = y.segment<3>(3);
  for (int j = 0; j < n_points; ++j) out.points.push_back(y.segment<3>(6 + 3 * j));
  return out;
}

BiasAnchor initial_bias_anchor(const SolverConfig& cfg) {
  BiasAnchor a;
  a.sigma << Vec3::Constant(cfg.init_bias_sigma_g), Vec3::Constant(cfg.init_bias_sigma_a);
  return a;
}

FactorGraphProblem warmup_problem(const Trajectory& trajectory, const SolverConfig& cfg) {
  FactorGraphProblem p;
  p.trajectory = trajectory;
  p.scheme = cfg.scheme;
  p.imu = cfg.imu;
  p.bias_priors = false;
  p.lambda_omega = cfg.lambda_omega;
  p.lambda_accel = cfg.lambda_accel;
  p.sync_sizes();
  p.hold_all_except({6, 7, 8, 12, 13, 14, 15, 16, 17});
  return p;
}

InitResult initialize(const std::vector<FeatureTrajectory>& tracks, const std::vector<InertialSample>& imu, double t0,
                      const CameraModel& camera, const SolverConfig& cfg) {
  InitResult res;
  res.linear = solve_linear_init(tracks, imu, t0, camera, cfg);
  const LinearInit& lin = res.linear;
  const Vec3& gravity = cfg.imu.gravity;
  res.R_world_body0 = Eigen::Quaterniond::FromTwoVectors(lin.g0, gravity).toRotationMatrix();
  const Mat3& R_w0 = res.R_world_body0;

  const double t_end = lin.frames.back();
  const int n_knots = static_cast<int>(std::floor((t_end - t0) / cfg.knot_spacing + 1e-9)) + 1;
  const BiasState bias0;
  Trajectory traj(cfg.wnoj);
  for (int k = 0; k < n_knots; ++k) {
    const double t = t0 + k * cfg.knot_spacing;
    const double dt = t - t0;
    Mat3 C = R_w0;
    Vec3 r = R_w0 * (lin.v0 * dt + 0.5 * lin.g0 * dt * dt);
    Vec3 v = R_w0 * (lin.v0 + lin.g0 * dt);
    if (k > 0) {
      const ImuIncrements inc = preintegrate_discrete(imu, t0, t, bias0, cfg.imu);
      C = R_w0 * inc.dR;
      r += R_w0 * inc.dp;
      v += R_w0 * inc.dv;
    }
    traj.add_knot(t, state_from_imu(imu, t, Pose(Rotation::from_approximate(C), r), v, bias0, gravity,
                                    0.5 * cfg.knot_spacing));
  }
  res.biases.assign(traj.size(), bias0);

  // Warm-up: rates and accelerations only, against the motion prior.
  FactorGraphProblem warm = warmup_problem(traj, cfg);
  res.warmup = optimize(warm, cfg);
  traj = warm.trajectory;

  std::vector<LandmarkObservations> los;
  std::map<int, const FeatureTrajectory*> by_id;
  for (const FeatureTrajectory& tr : tracks) by_id[tr.id] = &tr;
  for (std::size_t j = 0; j < lin.track_ids.size(); ++j) {
    const FeatureTrajectory& tr = *by_id.at(lin.track_ids[j]);
    const double ta = tr.observations.front().t;
    std::size_t anchor = 0;
    while (anchor < traj.size() && traj.time(anchor) < ta - 1e-9) ++anchor;
    if (anchor >= traj.size()) continue;
    const Pose T_wc = traj.state(anchor).T * camera.T_bc;
    const Vec3 p_c = T_wc.inverse() * (R_w0 * lin.points[j]);
    if (p_c.z() < 0.1) continue;
    LandmarkObservations lo;
    lo.landmark.id = tr.id;
    lo.landmark.anchor_knot = anchor;
    lo.landmark.anchor_time = traj.time(anchor);
    lo.landmark.kappa = p_c.normalized();
    lo.landmark.rho = std::min(1.0 / p_c.norm(), cfg.landmark.rho_max);
    lo.observations = tr.observations;
    los.push_back(std::move(lo));
  }
  if (los.size() < static_cast<std::size_t>(kMinTracks))
    throw Error(ErrorCode::kNotReady, "too few landmarks in front of the camera");

  FactorGraphProblem joint = build_problem(traj, res.biases, imu, los, camera, cfg);
  joint.gauge_priors.push_back({0, traj.state(0).T, 1e4});
  joint.bias_anchors.push_back(initial_bias_anchor(cfg));
  res.refine = optimize(joint, cfg);

  res.trajectory = joint.trajectory;
  res.biases = joint.biases;
  for (std::size_t j = 0; j < joint.landmarks.size(); ++j) {
    res.landmark_tracks.push_back(joint.landmarks[j].id);
    res.landmarks.push_back(joint.landmarks[j]);
  }
  return res;
}

}  // namespace gpeio
