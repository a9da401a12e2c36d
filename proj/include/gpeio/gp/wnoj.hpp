#pragma once

#include <utility>

#include "gpeio/common/types.hpp"
#include "gpeio/trajectory/kinematic_state.hpp"

namespace gpeio {

// White-noise-on-jerk prior. Qc is the 6x6 power spectral density.
struct WnojModel {
  Mat6 Qc = Mat6::Identity();

  static WnojModel diagonal(double rotational, double translational);
  // Throws kInvalidArgument unless Qc is symmetric positive definite.
  void validate() const;
};

namespace wnoj {

// Every WNOJ matrix is (3x3 scalar pattern) kron (6x6 block). These return the
// scalar patterns.
Mat3 transition_coeffs(double dt);
Mat3 covariance_coeffs(double dt);
Mat3 covariance_inv_coeffs(double dt);

Mat18 kron(const Mat3& s, const Mat6& B);
// (s kron I6) * M without forming the Kronecker product.
Mat18 scalar_blocks_times(const Mat3& s, const Mat18& M);
Vec18 scalar_blocks_times(const Mat3& s, const Vec18& v);

Mat18 transition(double dt);
Mat18 process_covariance(double dt, const WnojModel& model);
Mat18 process_information(double dt, const WnojModel& model);
// Upper factor U with U^T U = process_information.
Mat18 process_sqrt_information(double dt, const WnojModel& model);

struct ScalarGains {
  Mat3 lambda;
  Mat3 psi;
};

// Qc cancels in the gains, so they are scalar patterns kron I6.
ScalarGains scalar_interpolation_gains(double tau, double t_k, double t_k1);
// Full 18x18 gains evaluated from the general formula.
std::pair<Mat18, Mat18> interpolation_gains(double tau, double t_k, double t_k1, const WnojModel& model);

// Local states of the pair (k, k+1) in the tangent space of knot k, with the
// Jacobians of gamma_k(t_{k+1}) w.r.t. both knots. gamma_k(t_k) = (0, varpi_k,
// varpi_dot_k) has Jacobian diag(0, I, I) w.r.t. x_k.
struct LocalStates {
  Vec18 gamma_k;
  Vec18 gamma_k1;
  Twist xi;      // log(T_k^-1 T_k1)
  Mat6 J_inv;    // J^-1(xi)
  Mat18 d_gamma_k1_d_xk;
  Mat18 d_gamma_k1_d_xk1;
};

LocalStates local_states(const KinematicState& xk, const KinematicState& xk1, bool with_jacobians = true);

struct PriorResidual {
  Vec18 residual;
  Mat18 jac_k;
  Mat18 jac_k1;
  Mat18 sqrt_information;
};

PriorResidual prior_residual(const KinematicState& xk, const KinematicState& xk1, double dt, const WnojModel& model);

}  // namespace wnoj

}  // namespace gpeio
