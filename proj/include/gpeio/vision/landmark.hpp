#pragma once

#include "gpeio/frontend/frontend.hpp"
#include "gpeio/trajectory/trajectory.hpp"
#include "gpeio/vision/camera.hpp"

namespace gpeio {

// Landmark as a unit direction in the anchor camera frame and an inverse
// distance along it: the homogeneous point [kappa; rho]. rho = 0 is a point
// at infinity.
struct InverseDepthLandmark {
  int id = -1;
  std::size_t anchor_knot = 0;
  double anchor_time = 0.0;
  Vec3 kappa = Vec3::UnitZ();
  double rho = 0.0;

  Vec4 homogeneous() const { return (Vec4() << kappa, rho).finished(); }
};

struct LandmarkInitConfig {
  double rho_max = 100.0;
  // Rays closer to parallel than this (radians) leave rho = 0.
  double min_parallax = 1e-4;
};

// Linear interpolation of the pixel track at time t (clamped to its ends).
Vec2 interpolate_track(const std::vector<FeatureObservation>& obs, double t);

// Anchors at the first knot inside the observation span, with kappa from the
// interpolated pixel there. rho comes from midpoint triangulation against the
// last observation inside the trajectory, clamped to [0, rho_max]. Pixels are
// undistorted. Throws kNotAnchorable when no knot lies inside the span.
InverseDepthLandmark init_landmark(const FeatureTrajectory& track, const Trajectory& trajectory,
                                   const CameraModel& camera, const LandmarkInitConfig& config = {});

// Midpoint of the closest points of two rays, as the distance along the first
// ray. Returns 0 for near-parallel rays or a point behind either camera.
double triangulate_midpoint(const Vec3& c1, const Vec3& b1, const Vec3& c2, const Vec3& b2, double min_parallax);

}  // namespace gpeio
