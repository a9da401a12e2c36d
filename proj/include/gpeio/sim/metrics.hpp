#pragma once

#include <vector>

#include "gpeio/trajectory/tum_io.hpp"

namespace gpeio {

struct Alignment {
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();
};

// Least-squares rigid alignment (no scale) mapping `from` onto `to`.
Alignment umeyama(const std::vector<Vec3>& from, const std::vector<Vec3>& to);

struct EvalReport {
  double ate_rmse = 0.0;         // m
  double rpe_trans_short = 0.0;  // m/s over 0.1 s
  double rpe_rot_short = 0.0;    // rad/s over 0.1 s
  double rpe_trans_long = 0.0;   // m/s over 1 s
  double rpe_rot_long = 0.0;     // rad/s over 1 s
  double path_length = 0.0;      // of the truth over the compared span
  std::size_t matched = 0;
};

// Truth is interpolated at the estimate times (linear position, slerp
// rotation). Throws kInsufficientOverlap with fewer than two matched poses.
EvalReport evaluate(const std::vector<StampedPose>& estimate, const std::vector<StampedPose>& truth);

// Relative pose error RMSE over pairs `delta` seconds apart, divided by delta.
void relative_pose_error(const std::vector<StampedPose>& est, const std::vector<StampedPose>& ref, double delta,
                         double* trans, double* rot);

// Truth pose at time t by interpolation. Requires t inside the span.
Pose interpolate_pose(const std::vector<StampedPose>& traj, double t);

}  // namespace gpeio
