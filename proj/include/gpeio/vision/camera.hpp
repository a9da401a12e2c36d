#pragma once

#include <string>

#include "gpeio/common/types.hpp"
#include "gpeio/liegroup/se3.hpp"

namespace gpeio {

// Pinhole camera with optional radial-tangential distortion. The estimation
// pipeline works on undistorted pixels.
struct CameraModel {
  double fx = 200.0;
  double fy = 200.0;
  double cx = 120.0;
  double cy = 90.0;
  int width = 240;
  int height = 180;
  Vec4 distortion = Vec4::Zero();  // k1, k2, p1, p2
  Pose T_bc;                       // camera in the body frame

  // Throws kInvalidArgument on non-positive focal lengths or a principal
  // point outside the image.
  void validate() const;

  Mat3 K() const;
  // Pinhole projection of a camera-frame point or direction; no distortion.
  Vec2 project(const Vec3& p_c) const;
  // Unit bearing of an undistorted pixel.
  Vec3 bearing(const Vec2& q) const;

  Vec2 distort(const Vec2& q) const;
  // Inverse of distort by fixed-point iteration on normalized coordinates.
  Vec2 undistort(const Vec2& q) const;
  bool has_distortion() const { return distortion.squaredNorm() > 0.0; }
};

// YAML keys: fx fy cx cy width height, distortion: [k1, k2, p1, p2],
// T_bc: {q: [w, x, y, z], t: [x, y, z]}. Throws kDataError.
CameraModel load_camera(const std::string& path);
void save_camera(const std::string& path, const CameraModel& camera);

}  // namespace gpeio
