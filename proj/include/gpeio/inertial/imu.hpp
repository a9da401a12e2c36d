#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gpeio/common/types.hpp"

namespace gpeio {

struct InertialSample {
  double t;
  Vec3 gyro;   // rad/s
  Vec3 accel;  // m/s^2, specific force in the body frame
};

struct ImuNoiseModel {
  Mat3 Q_g = Mat3::Identity() * 0.005 * 0.005;  // per-sample gyro covariance
  Mat3 Q_a = Mat3::Identity() * 0.05 * 0.05;    // per-sample accel covariance
  Mat3 Q_bg = Mat3::Identity() * 1e-4 * 1e-4;   // gyro bias random-walk PSD
  Mat3 Q_ba = Mat3::Identity() * 1e-3 * 1e-3;   // accel bias random-walk PSD
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);

  static ImuNoiseModel isotropic(double sigma_g, double sigma_a, double sigma_bg, double sigma_ba);
  // Throws kInvalidArgument for non-PSD covariances.
  void validate() const;
};

// Stacked [b_g; b_a].
struct BiasState {
  Vec3 bg = Vec3::Zero();
  Vec3 ba = Vec3::Zero();

  Vec6 stacked() const { return (Vec6() << bg, ba).finished(); }
  static BiasState from_stacked(const Vec6& v) { return {v.head<3>(), v.tail<3>()}; }
};

// Measurement-model inversion helper for a known body state.
InertialSample ideal_sample(double t, const Mat3& C, const Twist& w, const Vec6& dw, const Vec3& gravity,
                            const BiasState& bias = {});

// Samples with times in [t0, t1] plus linearly interpolated end points at
// exactly t0 and t1. Throws kMissingData when no sample lies in [t0, t1].
std::vector<InertialSample> window_points(const std::vector<InertialSample>& samples, double t0, double t1);

// `t,gx,gy,gz,ax,ay,az` with an optional header line.
std::vector<InertialSample> read_imu_csv(std::istream& is);
std::vector<InertialSample> read_imu_csv(const std::string& path);
void write_imu_csv(std::ostream& os, const std::vector<InertialSample>& samples);
void write_imu_csv(const std::string& path, const std::vector<InertialSample>& samples);

}  // namespace gpeio
