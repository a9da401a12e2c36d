#pragma once

#include <string>
#include <vector>

#include "gpeio/frontend/event.hpp"
#include "gpeio/inertial/imu.hpp"
#include "gpeio/sim/generators.hpp"
#include "gpeio/sim/scenario.hpp"
#include "gpeio/trajectory/tum_io.hpp"

namespace gpeio {

struct Dataset {
  ScenarioSpec spec;
  std::vector<InertialSample> imu;
  std::vector<Event> events;
  std::vector<StampedPose> truth;        // 1 kHz poses
  std::vector<TruthState> truth_states;  // same, full states (simulated data only)
  std::vector<BiasState> true_biases;    // per IMU sample (simulated data only)
  std::vector<Vec3> landmarks;           // simulated data only
  std::vector<int> event_source;         // simulated data only
};

Dataset simulate(const ScenarioSpec& spec);

// Directory layout: events.csv, imu.csv, truth.tum, camera.yaml,
// config.snapshot (the scenario). Throws kDataError.
void write_dataset(const std::string& dir, const Dataset& data);
// Reads what write_dataset wrote; truth.tum and config.snapshot are optional.
Dataset read_dataset(const std::string& dir);

}  // namespace gpeio
