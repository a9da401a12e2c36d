#include "gpeio/vision/reprojection.hpp"

#include "gpeio/common/error.hpp"

namespace gpeio {

Projection project_landmark(const Vec4& p, const Pose& T1, const Pose& T2, const CameraModel& cam) {
  const Pose T12 = T1.inverse() * T2;
  const Mat3 Ct = T12.C().transpose();
  // P T12^-1 [kappa; rho] = C12^T (kappa - rho t12)
  const Vec4 g = (Vec4() << Ct * (p.head<3>() - p(3) * T12.translation()), p(3)).finished();
  Projection out;
  out.h = g.head<3>();
  if (!(out.h.z() > kMinProjectionDepth))
    throw Error(ErrorCode::kBehindCamera, "landmark depth " + std::to_string(out.h.z()) + " in the observing camera");
  out.q = cam.project(out.h);

  const double iz = 1.0 / out.h.z();
  Eigen::Matrix<double, 2, 3> dq_dh;
  dq_dh << cam.fx * iz, 0, -cam.fx * out.h.x() * iz * iz, 0, cam.fy * iz, -cam.fy * out.h.y() * iz * iz;

  // T12^-1 [[-kappa^, rho I], ...] keeps only the rotation part in its top rows.
  const se3::Mat46 od = se3::odot(p);
  Eigen::Matrix<double, 3, 6> dh_d1 = Ct * od.topRows<3>();
  Eigen::Matrix<double, 3, 6> dh_d2 = -se3::odot(g).topRows<3>();
  out.d_anchor = dq_dh * dh_d1;
  out.d_obs = dq_dh * dh_d2;
  out.d_rho = dq_dh * (-Ct * T12.translation());
  return out;
}

VisualResidual visual_residual(const InverseDepthLandmark& lm, const KinematicState& anchor,
                               const InterpolatedState& obs, const Vec2& observed, const CameraModel& cam) {
  const Pose T1 = anchor.T * cam.T_bc;
  const Pose T2 = obs.x.T * cam.T_bc;
  const Projection pr = project_landmark(lm.homogeneous(), T1, T2, cam);
  // Body to camera perturbation: T_wb exp(e) T_bc = T_wc exp(Ad(T_bc^-1) e).
  const Mat6 Ad = se3::adjoint_inv(cam.T_bc);
  VisualResidual out;
  out.residual = pr.q - observed;
  out.anchor_knot = lm.anchor_knot;
  out.obs_knot = obs.k;
  out.d_anchor.setZero();
  out.d_anchor.leftCols<6>() = pr.d_anchor * Ad;
  const Eigen::Matrix<double, 2, 6> d_pose = pr.d_obs * Ad;
  out.d_obs_k = d_pose * obs.d_xk.topRows<6>();
  out.d_obs_k1 = d_pose * obs.d_xk1.topRows<6>();
  out.d_rho = pr.d_rho;
  return out;
}

VisualResidual visual_residual(const InverseDepthLandmark& lm, const Trajectory& traj, double t, const Vec2& observed,
                               const CameraModel& cam) {
  return visual_residual(lm, traj.state(lm.anchor_knot), traj.query(t), observed, cam);
}

}  // namespace gpeio
