#pragma once

#include "gpeio/common/types.hpp"
#include "gpeio/liegroup/so3.hpp"

namespace gpeio {

class Pose {
 public:
  Pose() : t_(Vec3::Zero()) {}
  Pose(const Rotation& R, const Vec3& t) : R_(R), t_(t) {}

  static Pose exp(const Twist& xi);
  static Pose identity() { return Pose(); }
  // Throws kInvalidArgument if the rotation block is not a rotation.
  static Pose from_matrix(const Mat4& T);

  Twist log() const;
  Pose inverse() const;
  Pose operator*(const Pose& other) const;
  Vec3 operator*(const Vec3& p) const { return R_ * p + t_; }
  Mat4 matrix() const;

  const Rotation& rotation() const { return R_; }
  const Mat3& C() const { return R_.matrix(); }
  const Vec3& translation() const { return t_; }

  // Right perturbation: this * exp(delta^).
  Pose retract(const Twist& delta) const { return *this * Pose::exp(delta); }

 private:
  Rotation R_;
  Vec3 t_;
};

namespace se3 {

using Mat46 = Eigen::Matrix<double, 4, 6>;

Mat4 hat(const Twist& xi);
Twist vee(const Mat4& m);

// [[phi^, 0], [rho^, phi^]]
Mat6 curlyhat(const Twist& xi);
// [[C, 0], [r^ C, C]]
Mat6 adjoint(const Pose& T);
Mat6 adjoint_inv(const Pose& T);

// Right Jacobian J(xi) = sum_n (-xi curlyhat)^n / (n+1)!, and its inverse.
// Throws kBranchCut for rotation angles within the log margin of pi (inverse only).
Mat6 right_jacobian(const Twist& xi);
Mat6 right_jacobian_inv(const Twist& xi);
Mat6 left_jacobian(const Twist& xi);

// d(J(xi) v)/d xi and d(J^-1(xi) v)/d xi.
Mat6 right_jacobian_derivative(const Twist& xi, const Vec6& v);
Mat6 right_jacobian_inv_derivative(const Twist& xi, const Vec6& v);
// Same, reusing a precomputed J^-1(xi).
Mat6 right_jacobian_inv_derivative(const Twist& xi, const Mat6& J_inv, const Vec6& v);

// h = [kappa; rho] -> [[-kappa^, rho I], [0, 0]], so that xi^ h = odot(h) xi.
Mat46 odot(const Vec4& h);

}  // namespace se3

}  // namespace gpeio
