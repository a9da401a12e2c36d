#pragma once

#include <map>
#include <vector>

#include "gpeio/solver/initializer.hpp"
#include "gpeio/trajectory/tum_io.hpp"

namespace gpeio {

struct EstimateResult {
  std::vector<double> knot_times;
  std::vector<KinematicState> knots;
  std::vector<BiasState> biases;
  std::map<int, Vec3> points;  // world landmark per track id, last estimate
  FactorCounts factors;        // summed over every solved problem
  double t_init = 0.0;         // start time the initializer accepted
  int windows = 0;
  int iterations = 0;
  std::size_t outliers = 0;
  std::size_t dropped_measurements = 0;
  double runtime = 0.0;  // wall clock, s

  Trajectory trajectory(const WnojModel& model = {}) const;
  // Knot poses, or poses interpolated by the motion prior every 1/rate s.
  std::vector<StampedPose> poses(double rate = 0.0, const WnojModel& model = {}) const;
};

// Undistorts the pixels, drops tracks spanning less than min_track_span and
// keeps observations at least visual_interval apart.
std::vector<FeatureTrajectory> prepare_tracks(const std::vector<FeatureTrajectory>& tracks, const CameraModel& camera,
                                              const SolverConfig& config);

// Fixed-lag estimator: initialization (retried later on kNotReady), then
// windows of window_knots knots advanced by slide_knots, with retired knots
// and the landmarks anchored on them folded into a marginal prior. Tracks
// are raw frontend output. Throws kNotReady when initialization never
// succeeds and kSolverFailure from the optimizer.
EstimateResult estimate(const std::vector<FeatureTrajectory>& tracks, const std::vector<InertialSample>& imu,
                        const CameraModel& camera, const SolverConfig& config);

// One problem over every knot of `seed` with one landmark per track, seeded
// from its knots and points, first pose and velocity held.
EstimateResult estimate_batch(const std::vector<FeatureTrajectory>& tracks, const std::vector<InertialSample>& imu,
                              const CameraModel& camera, const SolverConfig& config, const EstimateResult& seed);

}  // namespace gpeio
