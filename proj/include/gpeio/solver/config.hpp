#pragma once

#include <string>

#include "gpeio/frontend/frontend.hpp"
#include "gpeio/gp/wnoj.hpp"
#include "gpeio/inertial/gpp.hpp"
#include "gpeio/inertial/imu.hpp"
#include "gpeio/vision/landmark.hpp"

namespace gpeio {

enum class InertialScheme { kGpif, kGpp, kPreint };

std::string to_string(InertialScheme s);
// gpif | gpp | preint. Throws kDataError.
InertialScheme scheme_from_string(const std::string& name);

struct SolverConfig {
  InertialScheme scheme = InertialScheme::kGpif;

  // Sliding window.
  int window_knots = 10;
  int slide_knots = 2;
  double knot_spacing = 0.05;

  // Levenberg-Marquardt.
  double lambda_init = 1e-4;
  double lambda_factor = 10.0;
  double lambda_max = 1e12;
  int max_iterations = 30;
  double cost_tolerance = 1e-10;  // relative
  double step_tolerance = 1e-10;

  // Visual factors.
  double pixel_sigma = 1.0;
  double huber_px = 2.0;
  double outlier_px = 6.0;         // observations beyond this after a solve are dropped
  double visual_interval = 0.02;   // s between used observations of one track
  double min_track_span = 0.1;     // s
  double behind_camera_px = 50.0;  // constant cost of a factor with the point behind the camera

  // Inertial factors.
  int gpif_stride = 1;
  GppConfig gpp;

  // First-knot zero priors of the warm-up (lambda_1 on omega, lambda_2 on varpi_dot).
  double lambda_omega = 1e2;
  double lambda_accel = 1e2;
  bool gauge_hold_velocity = true;
  // Prior on the first bias; over a short start the accelerometer bias and
  // the gravity tilt are nearly indistinguishable.
  double init_bias_sigma_g = 0.01;  // rad/s
  double init_bias_sigma_a = 0.05;  // m/s^2

  // Initialization.
  double init_duration = 1.0;
  double init_min_duration = 0.5;
  double init_min_disparity = 5.0;  // px
  double init_frame_interval = 0.1;
  double init_retry_step = 0.25;

  // Noise models used by the estimator.
  WnojModel wnoj = WnojModel::diagonal(1.0, 10.0);
  ImuNoiseModel imu;
  FrontendConfig frontend;
  LandmarkInitConfig landmark;

  // Throws kInvalidArgument.
  void validate() const;
};

// YAML; absent keys keep their defaults. Throws kDataError.
SolverConfig load_solver_config(const std::string& path);
void save_solver_config(const std::string& path, const SolverConfig& config);
std::string solver_config_to_yaml(const SolverConfig& config);
SolverConfig solver_config_from_yaml(const std::string& text);
// Sets one field by dotted key, e.g. "window_knots" or "imu.sigma_g", with a
// YAML scalar or list value. Throws kDataError for unknown keys.
void apply_override(SolverConfig& config, const std::string& key, const std::string& value);

}  // namespace gpeio
