#pragma once

#include "gpeio/inertial/imu.hpp"
#include "gpeio/trajectory/kinematic_state.hpp"

namespace gpeio {

using Mat9x6 = Eigen::Matrix<double, 9, 6>;
using Mat9x18 = Eigen::Matrix<double, 9, 18>;

// Relative-motion pseudo-measurement between two knots, expressed in the frame
// of the first knot. Produced by both discrete preintegration and GPP.
struct ImuIncrements {
  double t0 = 0.0;
  double t1 = 0.0;
  Mat3 dR = Mat3::Identity();
  Vec3 dv = Vec3::Zero();
  Vec3 dp = Vec3::Zero();
  Mat9 covariance = Mat9::Identity();  // rows [phi; v; p]
  Mat9x6 d_bias = Mat9x6::Zero();      // d[phi; v; p] / d[b_g; b_a]
  BiasState bias_lin;                  // bias used to integrate

  double dt() const { return t1 - t0; }
  // First-order bias correction around bias_lin.
  Mat3 corrected_dR(const BiasState& b) const;
  Vec3 corrected_dv(const BiasState& b) const;
  Vec3 corrected_dp(const BiasState& b) const;
};

struct IncrementResidual {
  Vec9 residual;  // [e_phi; e_nu; e_r]
  Mat9x18 d_xk;
  Mat9x18 d_xk1;
  Mat9x6 d_bk;
  Mat9 sqrt_information;
};

// e_phi = log(dR^T C_k^T C_k1)
// e_nu  = C_k^T C_k1 nu_k1 - nu_k - C_k^T g dt - dv
// e_r   = C_k^T (r_k1 - r_k - g dt^2 / 2) - nu_k dt - dp
// with increments bias-corrected at b_k.
IncrementResidual increment_residual(const KinematicState& xk, const KinematicState& xk1, const BiasState& bk,
                                     const ImuIncrements& inc, const Vec3& gravity);

}  // namespace gpeio
