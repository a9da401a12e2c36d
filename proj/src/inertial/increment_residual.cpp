#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "gpeio/inertial/increments.hpp"
#include "gpeio/liegroup/so3.hpp"

namespace gpeio {

Mat3 ImuIncrements::corrected_dR(const BiasState& b) const {
  return dR * so3::exp(d_bias.block<3, 3>(0, 0) * (b.bg - bias_lin.bg));
}

Vec3 ImuIncrements::corrected_dv(const BiasState& b) const {
  return dv + d_bias.block<3, 6>(3, 0) * (b.stacked() - bias_lin.stacked());
}

Vec3 ImuIncrements::corrected_dp(const BiasState& b) const {
  return dp + d_bias.block<3, 6>(6, 0) * (b.stacked() - bias_lin.stacked());
}

namespace {

Mat9 sqrt_information_of(const Mat9& cov) {
  // Symmetrize and guard against tiny negative eigenvalues before inverting.
  Eigen::SelfAdjointEigenSolver<Mat9> es(0.5 * (cov + cov.transpose()));
  const double floor = 1e-18 + 1e-12 * es.eigenvalues().maxCoeff();
  Vec9 inv_sqrt = es.eigenvalues().cwiseMax(floor).cwiseSqrt().cwiseInverse();
  return inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

IncrementResidual increment_residual(const KinematicState& xk, const KinematicState& xk1, const BiasState& bk,
                                     const ImuIncrements& inc, const Vec3& gravity) {
  const double dt = inc.dt();
  const Mat3& Ck = xk.T.C();
  const Mat3& Ck1 = xk1.T.C();
  const Vec3& rk = xk.T.translation();
  const Vec3& rk1 = xk1.T.translation();
  const Vec3 nuk = xk.w.tail<3>(), nuk1 = xk1.w.tail<3>();
  const Mat3 Ckt = Ck.transpose();
  const Mat3 Rrel = Ckt * Ck1;

  const Vec3 dbg = bk.bg - inc.bias_lin.bg;
  const Mat3 J_rg = inc.d_bias.block<3, 3>(0, 0);
  const Vec3 corr = J_rg * dbg;
  const Mat3 dR = inc.dR * so3::exp(corr);
  const Mat3 M = dR.transpose() * Rrel;
  const Vec3 e_phi = so3::log(M);
  const Mat3 Jr_inv = so3::right_jacobian_inv(e_phi);

  const Vec3 v_term = Rrel * nuk1 - Ckt * gravity * dt;
  const Vec3 p_term = Ckt * (rk1 - rk - 0.5 * gravity * dt * dt);

  IncrementResidual out;
  out.residual << e_phi, v_term - nuk - inc.corrected_dv(bk), p_term - nuk * dt - inc.corrected_dp(bk);

  out.d_xk.setZero();
  out.d_xk1.setZero();
  // Rotation rows.
  out.d_xk.block<3, 3>(0, 0) = -Jr_inv * Ck1.transpose() * Ck;
  out.d_xk1.block<3, 3>(0, 0) = Jr_inv;
  // Velocity rows.
  out.d_xk.block<3, 3>(3, 0) = so3::hat(v_term);
  out.d_xk.block<3, 3>(3, 9) = -Mat3::Identity();
  out.d_xk1.block<3, 3>(3, 0) = -Rrel * so3::hat(nuk1);
  out.d_xk1.block<3, 3>(3, 9) = Rrel;
  // Position rows.
  out.d_xk.block<3, 3>(6, 0) = so3::hat(p_term);
  out.d_xk.block<3, 3>(6, 3) = -Mat3::Identity();
  out.d_xk.block<3, 3>(6, 9) = -dt * Mat3::Identity();
  out.d_xk1.block<3, 3>(6, 3) = Rrel;

  out.d_bk.setZero();
  out.d_bk.block<3, 3>(0, 0) = -Jr_inv * M.transpose() * so3::right_jacobian(corr) * J_rg;
  out.d_bk.bottomRows<6>() = -inc.d_bias.bottomRows<6>();
  out.sqrt_information = sqrt_information_of(inc.covariance);
  return out;
}

}  // namespace gpeio
