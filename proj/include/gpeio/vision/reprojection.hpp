#pragma once

#include "gpeio/trajectory/trajectory.hpp"
#include "gpeio/vision/camera.hpp"
#include "gpeio/vision/landmark.hpp"

namespace gpeio {

constexpr double kMinProjectionDepth = 1e-6;

struct Projection {
  Vec2 q = Vec2::Zero();
  Vec3 h = Vec3::Zero();                 // P T12^-1 [kappa; rho]
  Eigen::Matrix<double, 2, 6> d_anchor;  // w.r.t. anchor camera pose (right perturbation)
  Eigen::Matrix<double, 2, 6> d_obs;     // w.r.t. observing camera pose
  Vec2 d_rho = Vec2::Zero();
};

// Projects the landmark from the anchor camera T_w_c1 into the camera T_w_c2.
// Throws kBehindCamera when the depth is not above kMinProjectionDepth.
Projection project_landmark(const Vec4& kappa_rho, const Pose& T_w_c1, const Pose& T_w_c2, const CameraModel& camera);

struct VisualResidual {
  Vec2 residual = Vec2::Zero();  // predicted - observed
  std::size_t anchor_knot = 0;
  std::size_t obs_knot = 0;      // observation lies in [obs_knot, obs_knot + 1]
  Eigen::Matrix<double, 2, 18> d_anchor;
  Eigen::Matrix<double, 2, 18> d_obs_k;
  Eigen::Matrix<double, 2, 18> d_obs_k1;
  Vec2 d_rho = Vec2::Zero();
};

// Residual of one undistorted pixel observation at time t. Anchor Jacobians
// act on the anchor knot only; observation Jacobians go through the
// interpolation to the bracketing knots.
VisualResidual visual_residual(const InverseDepthLandmark& landmark, const Trajectory& trajectory, double t,
                               const Vec2& observed, const CameraModel& camera);

// Same with an already interpolated observing state.
VisualResidual visual_residual(const InverseDepthLandmark& landmark, const KinematicState& anchor,
                               const InterpolatedState& observing, const Vec2& observed, const CameraModel& camera);

}  // namespace gpeio
