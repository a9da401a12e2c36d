#include "gpeio/sim/dataset.hpp"

#include <filesystem>
#include <fstream>

#include "gpeio/common/error.hpp"

namespace gpeio {

Dataset simulate(const ScenarioSpec& spec) {
  spec.validate();
  Dataset d;
  d.spec = spec;
  const auto truth = make_truth(spec);
  d.truth_states = gen_truth(spec);
  for (const TruthState& s : d.truth_states) d.truth.push_back({s.t, s.x.T});
  ImuStream imu = gen_imu(*truth, spec);
  d.imu = std::move(imu.samples);
  d.true_biases = std::move(imu.biases);
  d.landmarks = gen_landmarks(spec);
  EventStream ev = gen_events(*truth, d.landmarks, spec);
  d.events = std::move(ev.events);
  d.event_source = std::move(ev.source);
  return d;
}

void write_dataset(const std::string& dir, const Dataset& d) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kDataError, "cannot create directory " + dir + ": " + ec.message());
  const fs::path p(dir);
  write_events_file((p / "events.csv").string(), d.events);
  {
    std::ofstream f(p / "imu.csv");
    if (!f) throw Error(ErrorCode::kDataError, "cannot write " + (p / "imu.csv").string());
    write_imu_csv(f, d.imu);
  }
  write_tum((p / "truth.tum").string(), d.truth);
  save_camera((p / "camera.yaml").string(), d.spec.camera);
  save_scenario((p / "config.snapshot").string(), d.spec);
}

Dataset read_dataset(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path p(dir);
  if (!fs::is_directory(p)) throw Error(ErrorCode::kDataError, "dataset directory " + dir + " does not exist");
  Dataset d;
  if (fs::exists(p / "config.snapshot")) d.spec = load_scenario((p / "config.snapshot").string());
  if (fs::exists(p / "camera.yaml")) d.spec.camera = load_camera((p / "camera.yaml").string());
  d.events = read_events_file((p / "events.csv").string());
  d.imu = read_imu_csv((p / "imu.csv").string());
  if (fs::exists(p / "truth.tum")) d.truth = read_tum((p / "truth.tum").string());
  return d;
}

}  // namespace gpeio
