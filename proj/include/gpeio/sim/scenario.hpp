#pragma once

#include <cstdint>
#include <string>

#include "gpeio/common/types.hpp"
#include "gpeio/vision/camera.hpp"

namespace gpeio {

enum class TrajectoryFamily { kConstantTwist, kSinusoidal, kFigureEight };

std::string to_string(TrajectoryFamily f);
// Throws kDataError for unknown names.
TrajectoryFamily family_from_string(const std::string& name);

// Position and ZYX Euler angles (yaw, pitch, roll), each a constant plus a
// linear term plus one sinusoid.
struct SinusoidalMotion {
  Vec3 position0 = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 position_amplitude = Vec3(0.3, 0.6, 0.3);
  Vec3 position_frequency = Vec3(1.1, 0.9, 1.3);  // rad/s
  Vec3 position_phase = Vec3::Zero();
  Vec3 angles0 = Vec3::Zero();                     // yaw, pitch, roll
  Vec3 angle_amplitude = Vec3(0.25, 0.12, 0.12);
  Vec3 angle_frequency = Vec3(0.8, 1.4, 1.7);
  Vec3 angle_phase = Vec3(0.0, 0.5, 1.0);
};

struct ScenarioSpec {
  TrajectoryFamily family = TrajectoryFamily::kFigureEight;
  double duration = 10.0;
  std::uint64_t seed = 1;

  // kConstantTwist: T(t) = T0 exp(t twist).
  Twist twist = (Twist() << 0.0, 0.0, 0.2, 0.5, 0.0, 0.0).finished();
  // kFigureEight: period and amplitudes of the eight in the y-z plane.
  double figure_eight_period = 5.0;
  Vec3 figure_eight_amplitude = Vec3(0.2, 1.0, 0.4);
  Vec3 figure_eight_angles = Vec3(0.3, 0.1, 0.1);  // yaw, pitch, roll amplitudes
  SinusoidalMotion sinusoid;

  int landmark_count = 60;
  Vec3 landmark_min = Vec3(2.5, -2.5, -1.5);
  Vec3 landmark_max = Vec3(5.0, 2.5, 1.5);
  CameraModel camera = default_camera();

  double imu_rate = 200.0;
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);
  double gyro_sigma = 0.005;
  double accel_sigma = 0.05;
  double gyro_walk = 1e-4;
  double accel_walk = 1e-3;
  Vec3 gyro_bias = Vec3::Zero();
  Vec3 accel_bias = Vec3::Zero();

  double event_threshold = 0.5;  // px of motion per event
  double pixel_sigma = 0.5;
  double noise_event_rate = 0.0;  // uniform background events per second

  // Throws kInvalidArgument.
  void validate() const;
  // Scales every noise level (IMU white noise, bias walks, pixel noise).
  ScenarioSpec with_noise_multiplier(double m) const;

  static CameraModel default_camera();
};

// YAML; absent keys keep their defaults. Throws kDataError.
ScenarioSpec load_scenario(const std::string& path);
void save_scenario(const std::string& path, const ScenarioSpec& spec);

}  // namespace gpeio
