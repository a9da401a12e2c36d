#include "gpeio/gp/wnoj.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "gpeio/common/error.hpp"

namespace gpeio {

WnojModel WnojModel::diagonal(double rotational, double translational) {
  WnojModel m;
  m.Qc.setZero();
  m.Qc.diagonal() << Vec3::Constant(rotational), Vec3::Constant(translational);
  m.validate();
  return m;
}

void WnojModel::validate() const {
  if (!Qc.allFinite() || (Qc - Qc.transpose()).cwiseAbs().maxCoeff() > 1e-12 * Qc.cwiseAbs().maxCoeff())
    throw Error(ErrorCode::kInvalidArgument, "Qc must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat6> es(Qc);
  if (es.eigenvalues().minCoeff() <= 0.0) throw Error(ErrorCode::kInvalidArgument, "Qc must be positive definite");
}

namespace wnoj {

Mat3 transition_coeffs(double dt) {
  if (!(dt >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "negative transition interval");
  Mat3 s;
  s << 1.0, dt, 0.5 * dt * dt,
       0.0, 1.0, dt,
       0.0, 0.0, 1.0;
  return s;
}

Mat3 covariance_coeffs(double dt) {
  const double d2 = dt * dt, d3 = d2 * dt, d4 = d3 * dt, d5 = d4 * dt;
  Mat3 s;
  s << d5 / 20.0, d4 / 8.0, d3 / 6.0,
       d4 / 8.0, d3 / 3.0, d2 / 2.0,
       d3 / 6.0, d2 / 2.0, dt;
  return s;
}

Mat3 covariance_inv_coeffs(double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "process covariance needs dt > 0");
  const double d2 = dt * dt, d3 = d2 * dt, d4 = d3 * dt, d5 = d4 * dt;
  Mat3 s;
  s << 720.0 / d5, -360.0 / d4, 60.0 / d3,
       -360.0 / d4, 192.0 / d3, -36.0 / d2,
       60.0 / d3, -36.0 / d2, 9.0 / dt;
  return s;
}

Mat18 kron(const Mat3& s, const Mat6& B) {
  Mat18 out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.block<6, 6>(6 * i, 6 * j) = s(i, j) * B;
  return out;
}

Mat18 scalar_blocks_times(const Mat3& s, const Mat18& M) {
  Mat18 out;
  for (int i = 0; i < 3; ++i)
    out.middleRows<6>(6 * i) = s(i, 0) * M.middleRows<6>(0) + s(i, 1) * M.middleRows<6>(6) + s(i, 2) * M.middleRows<6>(12);
  return out;
}

Vec18 scalar_blocks_times(const Mat3& s, const Vec18& v) {
  Vec18 out;
  for (int i = 0; i < 3; ++i)
    out.segment<6>(6 * i) = s(i, 0) * v.segment<6>(0) + s(i, 1) * v.segment<6>(6) + s(i, 2) * v.segment<6>(12);
  return out;
}

Mat18 transition(double dt) { return kron(transition_coeffs(dt), Mat6::Identity()); }

Mat18 process_covariance(double dt, const WnojModel& model) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "process covariance needs dt > 0");
  return kron(covariance_coeffs(dt), model.Qc);
}

Mat18 process_information(double dt, const WnojModel& model) {
  return kron(covariance_inv_coeffs(dt), model.Qc.inverse());
}

Mat18 process_sqrt_information(double dt, const WnojModel& model) {
  const Mat3 Ls = Eigen::LLT<Mat3>(covariance_inv_coeffs(dt)).matrixL();
  const Mat6 Lc = Eigen::LLT<Mat6>(model.Qc.inverse()).matrixL();
  return kron(Mat3(Ls.transpose()), Mat6(Lc.transpose()));
}

ScalarGains scalar_interpolation_gains(double tau, double t_k, double t_k1) {
  if (!(tau >= t_k && tau <= t_k1 && t_k1 > t_k))
    throw Error(ErrorCode::kOutOfRange, "interpolation time outside knot interval");
  const double dt = t_k1 - t_k;
  const double s = tau - t_k;
  ScalarGains g;
  g.psi = covariance_coeffs(s) * transition_coeffs(t_k1 - tau).transpose() * covariance_inv_coeffs(dt);
  g.lambda = transition_coeffs(s) - g.psi * transition_coeffs(dt);
  return g;
}

std::pair<Mat18, Mat18> interpolation_gains(double tau, double t_k, double t_k1, const WnojModel& model) {
  if (!(tau >= t_k && tau <= t_k1 && t_k1 > t_k))
    throw Error(ErrorCode::kOutOfRange, "interpolation time outside knot interval");
  const double dt = t_k1 - t_k;
  const double s = tau - t_k;
  const Mat18 Q_tau = kron(covariance_coeffs(s), model.Qc);
  const Mat18 psi = Q_tau * transition(t_k1 - tau).transpose() * process_information(dt, model);
  const Mat18 lambda = transition(s) - psi * transition(dt);
  return {lambda, psi};
}

LocalStates local_states(const KinematicState& xk, const KinematicState& xk1, bool with_jacobians) {
  LocalStates ls;
  ls.xi = (xk.T.inverse() * xk1.T).log();
  ls.J_inv = se3::right_jacobian_inv(ls.xi);
  const Mat6& Ji = ls.J_inv;
  const Vec6 u = Ji * xk1.w;
  const Vec6 a = Ji * xk1.dw;

  ls.gamma_k << Vec6::Zero(), xk.w, xk.dw;
  ls.gamma_k1 << ls.xi, u, a + 0.5 * se3::curlyhat(u) * xk1.w;
  if (!with_jacobians) return ls;

  const Mat6 Du = se3::right_jacobian_inv_derivative(ls.xi, Ji, xk1.w);
  const Mat6 Da = se3::right_jacobian_inv_derivative(ls.xi, Ji, xk1.dw);
  const Mat6 w_curly = se3::curlyhat(xk1.w);

  // d gamma_k1 / d xi
  Eigen::Matrix<double, 18, 6> G;
  G << Mat6::Identity(), Du, Da - 0.5 * w_curly * Du;

  ls.d_gamma_k1_d_xk1.setZero();
  ls.d_gamma_k1_d_xk1.leftCols<6>() = G * Ji;
  ls.d_gamma_k1_d_xk1.block<6, 6>(6, 6) = Ji;
  ls.d_gamma_k1_d_xk1.block<6, 6>(12, 6) = -0.5 * w_curly * Ji + 0.5 * se3::curlyhat(u);
  ls.d_gamma_k1_d_xk1.block<6, 6>(12, 12) = Ji;

  ls.d_gamma_k1_d_xk.setZero();
  ls.d_gamma_k1_d_xk.leftCols<6>() = -G * Ji * se3::adjoint_inv(Pose::exp(ls.xi));
  return ls;
}

PriorResidual prior_residual(const KinematicState& xk, const KinematicState& xk1, double dt, const WnojModel& model) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "prior residual needs dt > 0");
  const LocalStates ls = local_states(xk, xk1, true);
  const Mat3 phi = transition_coeffs(dt);
  PriorResidual out;
  out.residual = scalar_blocks_times(phi, ls.gamma_k) - ls.gamma_k1;
  Mat18 d_gamma_k = Mat18::Zero();
  d_gamma_k.bottomRightCorner<12, 12>().setIdentity();
  out.jac_k = scalar_blocks_times(phi, d_gamma_k) - ls.d_gamma_k1_d_xk;
  out.jac_k1 = -ls.d_gamma_k1_d_xk1;
  out.sqrt_information = process_sqrt_information(dt, model);
  return out;
}

}  // namespace wnoj

}  // namespace gpeio
