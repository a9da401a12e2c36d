#include "gpeio/liegroup/se3.hpp"

#include <array>
#include <cmath>

#include "coefficients.hpp"
#include "gpeio/common/error.hpp"

namespace gpeio {

Pose Pose::exp(const Twist& xi) {
  if (!xi.allFinite()) throw Error(ErrorCode::kInvalidArgument, "se3::exp of non-finite twist");
  const Vec3 phi = xi.head<3>();
  return Pose(Rotation::exp(phi), so3::left_jacobian(phi) * xi.tail<3>());
}

Pose Pose::from_matrix(const Mat4& T) {
  return Pose(Rotation(Mat3(T.topLeftCorner<3, 3>())), T.topRightCorner<3, 1>());
}

Twist Pose::log() const {
  const Vec3 phi = R_.log();
  Twist xi;
  xi << phi, so3::left_jacobian_inv(phi) * t_;
  return xi;
}

Pose Pose::inverse() const {
  const Rotation Rt = R_.inverse();
  return Pose(Rt, -(Rt * t_));
}

Pose Pose::operator*(const Pose& other) const { return Pose(R_ * other.R_, R_ * other.t_ + t_); }

Mat4 Pose::matrix() const {
  Mat4 T = Mat4::Identity();
  T.topLeftCorner<3, 3>() = C();
  T.topRightCorner<3, 1>() = t_;
  return T;
}

namespace se3 {

namespace {

// Coupling block of the SE(3) left Jacobian for xi = [phi; rho].
Mat3 q_block(const Vec3& phi, const Vec3& rho) {
  const double t = phi.norm();
  const Mat3 P = so3::hat(phi);
  const Mat3 R = so3::hat(rho);
  const Mat3 PR = P * R;
  const Mat3 RP = R * P;
  const Mat3 PRP = PR * P;
  return 0.5 * R + detail::coeff_c(t) * (PR + RP + PRP) +
         detail::coeff_d(t) * (P * PR + RP * P - 3.0 * PRP) +
         detail::coeff_e(t) * (PRP * P + P * PRP);
}

}  // namespace

Mat4 hat(const Twist& xi) {
  Mat4 m = Mat4::Zero();
  m.topLeftCorner<3, 3>() = so3::hat(xi.head<3>());
  m.topRightCorner<3, 1>() = xi.tail<3>();
  return m;
}

Twist vee(const Mat4& m) {
  Twist xi;
  xi << so3::vee(m.topLeftCorner<3, 3>()), m.topRightCorner<3, 1>();
  return xi;
}

Mat6 curlyhat(const Twist& xi) {
  Mat6 m = Mat6::Zero();
  const Mat3 P = so3::hat(xi.head<3>());
  m.topLeftCorner<3, 3>() = P;
  m.bottomRightCorner<3, 3>() = P;
  m.bottomLeftCorner<3, 3>() = so3::hat(xi.tail<3>());
  return m;
}

Mat6 adjoint(const Pose& T) {
  Mat6 A = Mat6::Zero();
  const Mat3& C = T.C();
  A.topLeftCorner<3, 3>() = C;
  A.bottomRightCorner<3, 3>() = C;
  A.bottomLeftCorner<3, 3>() = so3::hat(T.translation()) * C;
  return A;
}

Mat6 adjoint_inv(const Pose& T) {
  Mat6 A = Mat6::Zero();
  const Mat3 Ct = T.C().transpose();
  A.topLeftCorner<3, 3>() = Ct;
  A.bottomRightCorner<3, 3>() = Ct;
  A.bottomLeftCorner<3, 3>() = -Ct * so3::hat(T.translation());
  return A;
}

Mat6 right_jacobian(const Twist& xi) {
  const Vec3 phi = xi.head<3>();
  const Mat3 J = so3::right_jacobian(phi);
  Mat6 out = Mat6::Zero();
  out.topLeftCorner<3, 3>() = J;
  out.bottomRightCorner<3, 3>() = J;
  out.bottomLeftCorner<3, 3>() = q_block(-phi, -Vec3(xi.tail<3>()));
  return out;
}

Mat6 left_jacobian(const Twist& xi) { return right_jacobian(-xi); }

Mat6 right_jacobian_inv(const Twist& xi) {
  const Vec3 phi = xi.head<3>();
  const Mat3 Ji = so3::right_jacobian_inv(phi);
  Mat6 out = Mat6::Zero();
  out.topLeftCorner<3, 3>() = Ji;
  out.bottomRightCorner<3, 3>() = Ji;
  out.bottomLeftCorner<3, 3>() = -Ji * q_block(-phi, -Vec3(xi.tail<3>())) * Ji;
  return out;
}

Mat6 right_jacobian_derivative(const Twist& xi, const Vec6& v) {
  // J(xi) v = sum_n c_n A^n v with A = -xi curlyhat and c_n = 1/(n+1)!.
  // Differentiating A^n v and collecting powers of A gives
  //   M = sum_i A^i (w_i curlyhat),  w_i = sum_j c_{i+j+1} A^j v,
  // evaluated in Horner form.
  constexpr int kMaxTerms = 64;
  const Mat6 A = -curlyhat(xi);
  const double a = A.norm();

  std::array<double, kMaxTerms + 2> c{};
  c[0] = 1.0;
  for (int n = 1; n < kMaxTerms + 2; ++n) c[n] = c[n - 1] / (n + 1);

  // Number of terms: stop once the bound n a^(n-1) c_n drops below 1e-18.
  int N = 2;
  double pw = 1.0;
  for (; N < kMaxTerms; ++N) {
    if (N * pw * c[N] < 1e-18) break;
    pw *= a;
  }

  std::array<Vec6, kMaxTerms> p;
  p[0] = v;
  for (int j = 1; j < N; ++j) p[j] = A * p[j - 1];

  Mat6 M = Mat6::Zero();
  for (int i = N - 1; i >= 0; --i) {
    Vec6 w = Vec6::Zero();
    for (int j = 0; i + j + 1 <= N; ++j) w += c[i + j + 1] * p[j];
    M = curlyhat(w) + A * M;
  }
  return M;
}

Mat6 right_jacobian_inv_derivative(const Twist& xi, const Mat6& J_inv, const Vec6& v) {
  return -J_inv * right_jacobian_derivative(xi, J_inv * v);
}

Mat6 right_jacobian_inv_derivative(const Twist& xi, const Vec6& v) {
  return right_jacobian_inv_derivative(xi, right_jacobian_inv(xi), v);
}

Mat46 odot(const Vec4& h) {
  Mat46 m = Mat46::Zero();
  m.topLeftCorner<3, 3>() = -so3::hat(h.head<3>());
  m.topRightCorner<3, 3>() = h(3) * Mat3::Identity();
  return m;
}

}  // namespace se3

}  // namespace gpeio
