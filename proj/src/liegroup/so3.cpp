#include "gpeio/liegroup/so3.hpp"

#include <cmath>

#include "coefficients.hpp"
#include "gpeio/common/error.hpp"

namespace gpeio {

namespace so3 {

Mat3 hat(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Vec3 vee(const Mat3& m) { return Vec3(m(2, 1), m(0, 2), m(1, 0)); }

Mat3 exp(const Vec3& phi) {
  if (!phi.allFinite()) throw Error(ErrorCode::kInvalidArgument, "so3::exp of non-finite vector");
  const double t = phi.norm();
  const Mat3 P = hat(phi);
  return Mat3::Identity() + detail::coeff_a(t) * P + detail::coeff_b(t) * P * P;
}

Vec3 log(const Mat3& C) {
  if (!C.allFinite()) throw Error(ErrorCode::kInvalidArgument, "so3::log of non-finite matrix");
  const Vec3 w = 0.5 * vee(C - C.transpose());
  const double c = std::clamp(0.5 * (C.trace() - 1.0), -1.0, 1.0);
  const double s = w.norm();
  const double t = std::atan2(s, c);
  if (M_PI - t < kBranchCutMargin)
    throw Error(ErrorCode::kBranchCut, "rotation angle " + std::to_string(t) + " too close to pi");
  if (t < kSmallAngle) return (1.0 + t * t / 6.0) * w;
  return (t / s) * w;
}

Mat3 right_jacobian(const Vec3& phi) {
  const double t = phi.norm();
  const Mat3 P = hat(phi);
  return Mat3::Identity() - detail::coeff_b(t) * P + detail::coeff_c(t) * P * P;
}

Mat3 left_jacobian(const Vec3& phi) { return right_jacobian(-phi); }

Mat3 right_jacobian_inv(const Vec3& phi) {
  const double t = phi.norm();
  if (M_PI - t < kBranchCutMargin) throw Error(ErrorCode::kBranchCut, "inverse Jacobian near pi");
  const Mat3 P = hat(phi);
  return Mat3::Identity() + 0.5 * P + detail::coeff_f(t) * P * P;
}

Mat3 left_jacobian_inv(const Vec3& phi) { return right_jacobian_inv(-phi); }

Mat3 normalize(const Mat3& C) {
  Eigen::Quaterniond q(C);
  q.normalize();
  return q.toRotationMatrix();
}

}  // namespace so3

Rotation::Rotation(const Mat3& C) : C_(C) {
  if (!C.allFinite()) throw Error(ErrorCode::kInvalidArgument, "non-finite rotation matrix");
  if ((C.transpose() * C - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9 || std::abs(C.determinant() - 1.0) > 1e-9)
    throw Error(ErrorCode::kInvalidArgument, "matrix is not a rotation");
}

Rotation Rotation::exp(const Vec3& phi) { return Rotation(so3::exp(phi), Unchecked{}); }

Rotation Rotation::from_quaternion(const Eigen::Quaterniond& q) {
  if (!q.coeffs().allFinite() || q.norm() < 1e-12)
    throw Error(ErrorCode::kInvalidArgument, "invalid quaternion");
  return Rotation(q.normalized().toRotationMatrix(), Unchecked{});
}

Rotation Rotation::from_approximate(const Mat3& C) { return Rotation(so3::normalize(C), Unchecked{}); }

Rotation Rotation::inverse() const { return Rotation(C_.transpose(), Unchecked{}); }

Rotation Rotation::operator*(const Rotation& other) const { return Rotation(C_ * other.C_, Unchecked{}); }

}  // namespace gpeio
