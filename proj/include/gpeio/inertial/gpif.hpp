#pragma once

#include <vector>

#include "gpeio/inertial/imu.hpp"
#include "gpeio/trajectory/trajectory.hpp"

namespace gpeio {

using Mat6x18 = Eigen::Matrix<double, 6, 18>;

// Direct inertial factor: one raw sample against the interpolated state at its
// time. Rows are [e_g; e_a]; bias columns are [b_g; b_a].
struct GpifResidual {
  Vec6 residual;
  Mat6x18 d_xk;
  Mat6x18 d_xk1;
  Mat6 d_bk;
  Mat6 d_bk1;
  Mat6 sqrt_information;
};

// alpha is the bias interpolation weight (tau - t_k) / (t_k1 - t_k).
GpifResidual gpif_residual(const InterpolatedState& state, double alpha, const BiasState& bk, const BiasState& bk1,
                           const InertialSample& sample, const ImuNoiseModel& model);

// Convenience overload; biases holds one entry per knot.
GpifResidual gpif_residual(const Trajectory& traj, const std::vector<BiasState>& biases, const InertialSample& sample,
                           const ImuNoiseModel& model);

struct BiasPriorResidual {
  Vec6 residual;  // b_k1 - b_k
  Mat6 d_bk;
  Mat6 d_bk1;
  Mat6 sqrt_information;
};

// Random-walk prior with covariance diag(Q_bg, Q_ba) * dt.
BiasPriorResidual bias_prior_residual(const BiasState& bk, const BiasState& bk1, double dt, const ImuNoiseModel& model);

}  // namespace gpeio
