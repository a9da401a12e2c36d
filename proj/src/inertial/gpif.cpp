#include "gpeio/inertial/gpif.hpp"

#include <Eigen/Cholesky>

#include "gpeio/common/error.hpp"

namespace gpeio {

namespace {

Mat6 block_sqrt_information(const Mat3& A, const Mat3& B) {
  Mat6 cov = Mat6::Zero();
  cov.topLeftCorner<3, 3>() = A;
  cov.bottomRightCorner<3, 3>() = B;
  const Mat6 L = Eigen::LLT<Mat6>(cov.inverse()).matrixL();
  return L.transpose();
}

}  // namespace

GpifResidual gpif_residual(const InterpolatedState& state, double alpha, const BiasState& bk, const BiasState& bk1,
                           const InertialSample& sample, const ImuNoiseModel& model) {
  const KinematicState& x = state.x;
  const Mat3& C = x.T.C();
  const Vec3 omega = x.w.head<3>(), nu = x.w.tail<3>();
  const Vec3 nu_dot = x.dw.tail<3>();
  const Vec3 bg = (1.0 - alpha) * bk.bg + alpha * bk1.bg;
  const Vec3 ba = (1.0 - alpha) * bk.ba + alpha * bk1.ba;
  const Vec3 g_body = C.transpose() * model.gravity;

  GpifResidual out;
  out.residual << sample.gyro - omega - bg, sample.accel - nu_dot - omega.cross(nu) + g_body - ba;

  // d e / d x(tau)
  Mat6x18 D = Mat6x18::Zero();
  D.block<3, 3>(0, 6) = -Mat3::Identity();
  D.block<3, 3>(3, 0) = so3::hat(g_body);
  D.block<3, 3>(3, 6) = so3::hat(nu);
  D.block<3, 3>(3, 9) = -so3::hat(omega);
  D.block<3, 3>(3, 15) = -Mat3::Identity();
  out.d_xk = D * state.d_xk;
  out.d_xk1 = D * state.d_xk1;
  out.d_bk = -(1.0 - alpha) * Mat6::Identity();
  out.d_bk1 = -alpha * Mat6::Identity();
  out.sqrt_information = block_sqrt_information(model.Q_g, model.Q_a);
  return out;
}

GpifResidual gpif_residual(const Trajectory& traj, const std::vector<BiasState>& biases, const InertialSample& sample,
                           const ImuNoiseModel& model) {
  if (biases.size() != traj.size()) throw Error(ErrorCode::kInvalidArgument, "one bias per knot required");
  const InterpolatedState s = traj.query(sample.t);
  const double t0 = traj.time(s.k), t1 = traj.time(s.k + 1);
  return gpif_residual(s, (sample.t - t0) / (t1 - t0), biases[s.k], biases[s.k + 1], sample, model);
}

BiasPriorResidual bias_prior_residual(const BiasState& bk, const BiasState& bk1, double dt, const ImuNoiseModel& model) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "bias prior needs dt > 0");
  BiasPriorResidual out;
  out.residual = bk1.stacked() - bk.stacked();
  out.d_bk = -Mat6::Identity();
  out.d_bk1 = Mat6::Identity();
  out.sqrt_information = block_sqrt_information(model.Q_bg * dt, model.Q_ba * dt);
  return out;
}

}  // namespace gpeio
