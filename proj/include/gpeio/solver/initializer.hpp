#pragma once

#include <vector>

#include "gpeio/frontend/frontend.hpp"
#include "gpeio/solver/optimizer.hpp"

namespace gpeio {

// Closed-form visual-inertial alignment over uniformly spaced frames, in the
// frame of the first body pose: cross-product constraints between every
// bearing and its point give a linear system in the first-frame velocity,
// gravity and the points. Biases start at zero.
struct LinearInit {
  double t0 = 0.0;
  std::vector<double> frames;
  Vec3 v0 = Vec3::Zero();  // body velocity at t0
  Vec3 g0 = Vec3::Zero();  // gravity in the first body frame
  std::vector<int> track_ids;
  std::vector<Vec3> points;  // first body frame
  double mean_disparity = 0.0;
  int observations = 0;
};

// Throws kNotReady when the data span is shorter than init_min_duration, the
// mean track disparity is below init_min_disparity, or too few tracks see
// enough frames. Track pixels are undistorted.
LinearInit solve_linear_init(const std::vector<FeatureTrajectory>& tracks, const std::vector<InertialSample>& imu,
                             double t0, const CameraModel& camera, const SolverConfig& config);

struct InitResult {
  LinearInit linear;
  Mat3 R_world_body0 = Mat3::Identity();
  Trajectory trajectory;
  std::vector<BiasState> biases;
  std::vector<int> landmark_tracks;
  std::vector<InverseDepthLandmark> landmarks;
  OptimizeReport warmup;
  OptimizeReport refine;
};

// Linear alignment, gravity-aligned world frame with the first body pose at
// the origin, warm-up over (omega, varpi_dot) of all knots with the WNOJ
// prior and the first-knot zero priors, then joint refinement of every
// factor with a soft position and heading gauge and a bias prior on the
// first knot.
InitResult initialize(const std::vector<FeatureTrajectory>& tracks, const std::vector<InertialSample>& imu, double t0,
                      const CameraModel& camera, const SolverConfig& config);

// Zero-mean prior on the bias of knot 0 with the init.bias_sigma_* widths.
BiasAnchor initial_bias_anchor(const SolverConfig& config);

// Warm-up problem over fixed poses and body velocities.
FactorGraphProblem warmup_problem(const Trajectory& trajectory, const SolverConfig& config);

// Linearly interpolated IMU sample at t (clamped to the stream ends).
InertialSample imu_at(const std::vector<InertialSample>& imu, double t);

// Knot state from a world pose and world velocity, with rates from the
// bias-corrected IMU around t.
KinematicState state_from_imu(const std::vector<InertialSample>& imu, double t, const Pose& T_wb, const Vec3& v_w,
                              const BiasState& bias, const Vec3& gravity, double half_span);

// Propagates the knot (t, x) to t1 with discrete preintegration.
KinematicState predict_state(const std::vector<InertialSample>& imu, double t, const KinematicState& x, double t1,
                             const BiasState& bias, const ImuNoiseModel& model);

}  // namespace gpeio
