#include "gpeio/inertial/preintegration.hpp"

#include "gpeio/liegroup/so3.hpp"

namespace gpeio {

ImuIncrements preintegrate_discrete(const std::vector<InertialSample>& samples, double t0, double t1,
                                    const BiasState& bias, const ImuNoiseModel& model) {
  const std::vector<InertialSample> pts = window_points(samples, t0, t1);

  ImuIncrements inc;
  inc.t0 = t0;
  inc.t1 = t1;
  inc.bias_lin = bias;
  inc.covariance.setZero();

  Mat3 R = Mat3::Identity();
  Vec3 v = Vec3::Zero(), p = Vec3::Zero();
  Mat3 R_bg = Mat3::Zero();
  Mat3 v_bg = Mat3::Zero(), v_ba = Mat3::Zero();
  Mat3 p_bg = Mat3::Zero(), p_ba = Mat3::Zero();
  Mat9& cov = inc.covariance;

  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double h = pts[i + 1].t - pts[i].t;
    if (h <= 0.0) continue;
    const Vec3 w = 0.5 * (pts[i].gyro + pts[i + 1].gyro) - bias.bg;
    const Vec3 a0 = pts[i].accel - bias.ba;
    const Vec3 a1 = pts[i + 1].accel - bias.ba;
    const Mat3 dR = so3::exp(w * h);
    const Mat3 R1 = R * dR;
    const Vec3 am = 0.5 * (R * a0 + R1 * a1);
    const Mat3 ab_hat = so3::hat(0.5 * (a0 + a1));
    const Mat3 Jr = so3::right_jacobian(w * h);

    // Covariance on [phi; v; p].
    Mat9 A = Mat9::Identity();
    A.block<3, 3>(0, 0) = dR.transpose();
    A.block<3, 3>(3, 0) = -R * ab_hat * h;
    A.block<3, 3>(6, 0) = -0.5 * R * ab_hat * h * h;
    A.block<3, 3>(6, 3) = h * Mat3::Identity();
    Eigen::Matrix<double, 9, 3> Bg = Eigen::Matrix<double, 9, 3>::Zero();
    Bg.topRows<3>() = Jr * h;
    Eigen::Matrix<double, 9, 3> Ba = Eigen::Matrix<double, 9, 3>::Zero();
    Ba.middleRows<3>(3) = R * h;
    Ba.bottomRows<3>() = 0.5 * R * h * h;
    cov = A * cov * A.transpose() + Bg * model.Q_g * Bg.transpose() + Ba * model.Q_a * Ba.transpose();

    // Bias Jacobians of the midpoint step; R1 carries the updated rotation Jacobian.
    const Mat3 R1_bg = dR.transpose() * R_bg - Jr * h;
    const Mat3 am_bg = -0.5 * (R * so3::hat(a0) * R_bg + R1 * so3::hat(a1) * R1_bg);
    const Mat3 am_ba = -0.5 * (R + R1);
    p_bg += v_bg * h + 0.5 * am_bg * h * h;
    p_ba += v_ba * h + 0.5 * am_ba * h * h;
    v_bg += am_bg * h;
    v_ba += am_ba * h;
    R_bg = R1_bg;

    p += v * h + 0.5 * am * h * h;
    v += am * h;
    R = so3::normalize(R1);
  }

  inc.dR = R;
  inc.dv = v;
  inc.dp = p;
  inc.d_bias.setZero();
  inc.d_bias.block<3, 3>(0, 0) = R_bg;
  inc.d_bias.block<3, 3>(3, 0) = v_bg;
  inc.d_bias.block<3, 3>(3, 3) = v_ba;
  inc.d_bias.block<3, 3>(6, 0) = p_bg;
  inc.d_bias.block<3, 3>(6, 3) = p_ba;
  return inc;
}

}  // namespace gpeio
