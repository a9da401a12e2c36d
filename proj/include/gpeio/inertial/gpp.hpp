#pragma once

#include <vector>

#include "gpeio/inertial/increments.hpp"

namespace gpeio {

struct GppConfig {
  int num_latent = 10;
  // <= 0 selects max(10 x median sample period, window / 3).
  double lengthscale = 0.0;
  // Latent noise as a fraction of the kernel variance.
  double noise_ratio = 1e-6;
  int refinement_passes = 1;
  // Samples this many median periods outside [t_k, t_k1] also enter the fit.
  double margin_periods = 2.0;
  // Relative singular-value cutoff of the least-squares fit.
  double svd_rcond = 1e-10;
  double max_condition = 1e12;
};

// Squared-exponential GP posteriors over the local angular rate and local
// acceleration of one knot window, in the frame of the window start t0.
struct LatentImuStates {
  double t0 = 0.0;
  double t1 = 0.0;
  std::vector<double> t;     // latent times
  Eigen::Matrix3Xd rho;      // posterior rate mean at the latent times
  Eigen::Matrix3Xd alpha;    // posterior local-acceleration mean at the latent times
  double lengthscale = 0.0;
  Vec3 variance_rate = Vec3::Ones();
  Vec3 variance_acc = Vec3::Ones();
  double noise_ratio = 0.0;
  double condition = 0.0;    // of the normalized Gram matrix plus noise

  // Posterior-mean weights over [1, k(t, t_1..t_N)]: a constant mean plus
  // sum_j exp(-(t - t_j)^2 / 2l^2) w_j. The kernel variance cancels from the
  // mean, so it is reported only.
  Eigen::Matrix3Xd w_rate;
  Eigen::Matrix3Xd w_acc;
  // Fit bookkeeping used for covariance and bias Jacobians.
  std::vector<InertialSample> samples;
  std::vector<Mat3> rate_maps;   // J_r^-1(phi_i) used in the final rate targets
  std::vector<Mat3> rotations;   // exp(phi_i) used to rotate the accelerations
  MatX rate_sensitivity;         // 3M x 3M, d(final rate targets) / d(gyro samples)
  MatX pinv;                     // (N + 1) x M least-squares operator (unit-variance kernel)

  Vec3 rate(double tau) const;
  Vec3 acc(double tau) const;
};

struct GppIncrement {
  Vec3 dphi = Vec3::Zero();
  Vec3 dv = Vec3::Zero();
  Vec3 dp = Vec3::Zero();
};

// Unit-variance kernel integrals: I1_j = int_t0^tau k(s, t_j) ds and
// I2_j = int_t0^tau (tau - s) k(s, t_j) ds.
VecX gpp_kernel_integral(const std::vector<double>& latent_t, double lengthscale, double t0, double tau);
VecX gpp_kernel_double_integral(const std::vector<double>& latent_t, double lengthscale, double t0, double tau);

// Throws kMissingData with fewer than num_latent samples and kConditioning when
// the Gram matrix plus noise is too ill-conditioned.
LatentImuStates gpp_fit_latent(const std::vector<InertialSample>& samples, double t0, double t1,
                               const BiasState& bias, const GppConfig& config = {});

// Throws kOutOfRange for tau < t0.
GppIncrement gpp_query(const LatentImuStates& latent, double tau);

// Fit, query at t1, and propagate per-sample noise and bias through the fit.
ImuIncrements gpp_increments(const std::vector<InertialSample>& samples, double t0, double t1, const BiasState& bias,
                             const ImuNoiseModel& model, const GppConfig& config = {});

}  // namespace gpeio
