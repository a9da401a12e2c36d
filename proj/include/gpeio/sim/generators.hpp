#pragma once

#include <vector>

#include "gpeio/frontend/event.hpp"
#include "gpeio/inertial/imu.hpp"
#include "gpeio/sim/truth.hpp"

namespace gpeio {

// Sub-seeds for each modality so noise studies can vary one at a time.
enum class SeedStream : std::uint64_t { kLandmarks = 1, kImu = 2, kEvents = 3 };
std::uint64_t sub_seed(std::uint64_t seed, SeedStream stream);

struct ImuStream {
  std::vector<InertialSample> samples;
  std::vector<BiasState> biases;  // true bias at each sample
};

// Samples at spec.imu_rate from t = 0: exact measurement-model inversion,
// white noise, and Euler-Maruyama bias walks.
ImuStream gen_imu(const TruthModel& truth, const ScenarioSpec& spec);

std::vector<Vec3> gen_landmarks(const ScenarioSpec& spec);

struct EventStream {
  std::vector<Event> events;
  std::vector<int> source;  // landmark index per event, -1 for noise events
};

// One event each time a landmark's projection has moved event_threshold px
// from its previous event, at the bisected crossing time, with pixel noise
// and a fixed polarity per landmark. Plus uniform background events.
EventStream gen_events(const TruthModel& truth, const std::vector<Vec3>& landmarks, const ScenarioSpec& spec,
                       double sample_rate = 1000.0);

// Distorted pixel of a world point seen from body pose T_wb; false when the
// point is behind the camera (depth < 0.1 m) or outside the image.
bool project_world(const Vec3& p_w, const Pose& T_wb, const CameraModel& camera, Vec2* q);

}  // namespace gpeio
