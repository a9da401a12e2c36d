#pragma once

#include <Eigen/Geometry>

#include "gpeio/common/types.hpp"

namespace gpeio {

namespace so3 {

// Below this angle exp/log use second-order Taylor expansions.
inline constexpr double kSmallAngle = 1e-7;
// log refuses rotations closer than this to angle pi.
inline constexpr double kBranchCutMargin = 1e-6;

Mat3 hat(const Vec3& v);
Vec3 vee(const Mat3& m);

Mat3 exp(const Vec3& phi);
// Principal-branch logarithm. Throws kBranchCut within kBranchCutMargin of pi.
Vec3 log(const Mat3& C);

Mat3 right_jacobian(const Vec3& phi);
Mat3 right_jacobian_inv(const Vec3& phi);
Mat3 left_jacobian(const Vec3& phi);
Mat3 left_jacobian_inv(const Vec3& phi);

// Closest rotation matrix (via quaternion normalization).
Mat3 normalize(const Mat3& C);

}  // namespace so3

class Rotation {
 public:
  Rotation() : C_(Mat3::Identity()) {}
  // Throws kInvalidArgument if C is not orthonormal with det +1 (tol 1e-9).
  explicit Rotation(const Mat3& C);

  static Rotation exp(const Vec3& phi);
  static Rotation from_quaternion(const Eigen::Quaterniond& q);
  // Re-orthonormalizes instead of validating.
  static Rotation from_approximate(const Mat3& C);

  Vec3 log() const { return so3::log(C_); }
  Rotation inverse() const;
  Rotation operator*(const Rotation& other) const;
  Vec3 operator*(const Vec3& v) const { return C_ * v; }
  const Mat3& matrix() const { return C_; }
  Eigen::Quaterniond quaternion() const { return Eigen::Quaterniond(C_); }

 private:
  struct Unchecked {};
  Rotation(const Mat3& C, Unchecked) : C_(C) {}

  Mat3 C_;
};

}  // namespace gpeio
