#include "gpeio/sim/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>

#include "gpeio/common/error.hpp"

namespace gpeio {

std::string to_string(TrajectoryFamily f) {
  switch (f) {
    case TrajectoryFamily::kConstantTwist: return "constant_twist";
    case TrajectoryFamily::kSinusoidal: return "sinusoidal";
    case TrajectoryFamily::kFigureEight: return "figure_eight";
  }
  return "?";
}

TrajectoryFamily family_from_string(const std::string& name) {
  if (name == "constant_twist" || name == "constant-twist") return TrajectoryFamily::kConstantTwist;
  if (name == "sinusoidal" || name == "sinusoidal-twist" || name == "sinusoidal_twist") return TrajectoryFamily::kSinusoidal;
  if (name == "figure_eight" || name == "figure-eight") return TrajectoryFamily::kFigureEight;
  throw Error(ErrorCode::kDataError, "unknown trajectory family '" + name + "'");
}

CameraModel ScenarioSpec::default_camera() {
  CameraModel cam;
  Mat3 R;
  R.col(0) = -Vec3::UnitY();
  R.col(1) = -Vec3::UnitZ();
  R.col(2) = Vec3::UnitX();
  cam.T_bc = Pose(Rotation(R), Vec3(0.03, 0.0, 0.01));
  return cam;
}

void ScenarioSpec::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, std::string("scenario: ") + what);
  };
  require(duration > 0.0, "duration must be positive");
  require(imu_rate > 0.0, "imu_rate must be positive");
  require(event_threshold > 0.0, "event threshold must be positive");
  require(landmark_count >= 0, "landmark count must be non-negative");
  require((landmark_max - landmark_min).minCoeff() >= 0.0, "landmark box is empty");
  require(figure_eight_period > 0.0, "figure-eight period must be positive");
  require(gyro_sigma >= 0 && accel_sigma >= 0 && gyro_walk >= 0 && accel_walk >= 0 && pixel_sigma >= 0 &&
              noise_event_rate >= 0,
          "noise levels must be non-negative");
  camera.validate();
}

ScenarioSpec ScenarioSpec::with_noise_multiplier(double m) const {
  ScenarioSpec s = *this;
  s.gyro_sigma *= m;
  s.accel_sigma *= m;
  s.gyro_walk *= m;
  s.accel_walk *= m;
  s.pixel_sigma *= m;
  return s;
}

namespace {

template <int N>
Eigen::Matrix<double, N, 1> read_vec(const YAML::Node& n, const char* key, const Eigen::Matrix<double, N, 1>& fallback) {
  if (!n[key]) return fallback;
  const auto v = n[key].as<std::vector<double>>();
  if (static_cast<int>(v.size()) != N)
    throw Error(ErrorCode::kDataError, std::string("scenario key '") + key + "' needs " + std::to_string(N) + " values");
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i) out(i) = v[i];
  return out;
}

template <typename T>
void read_scalar(const YAML::Node& n, const char* key, T* out) {
  if (n[key]) *out = n[key].as<T>();
}

template <int N>
std::vector<double> as_list(const Eigen::Matrix<double, N, 1>& v) {
  return std::vector<double>(v.data(), v.data() + N);
}

}  // namespace

ScenarioSpec load_scenario(const std::string& path) {
  ScenarioSpec s;
  try {
    const YAML::Node n = YAML::LoadFile(path);
    if (n["family"]) s.family = family_from_string(n["family"].as<std::string>());
    read_scalar(n, "duration", &s.duration);
    read_scalar(n, "seed", &s.seed);
    s.twist = read_vec<6>(n, "twist", s.twist);
    if (const YAML::Node f = n["figure_eight"]) {
      read_scalar(f, "period", &s.figure_eight_period);
      s.figure_eight_amplitude = read_vec<3>(f, "amplitude", s.figure_eight_amplitude);
      s.figure_eight_angles = read_vec<3>(f, "angles", s.figure_eight_angles);
    }
    if (const YAML::Node m = n["sinusoid"]) {
      SinusoidalMotion& q = s.sinusoid;
      q.position0 = read_vec<3>(m, "position0", q.position0);
      q.velocity = read_vec<3>(m, "velocity", q.velocity);
      q.position_amplitude = read_vec<3>(m, "position_amplitude", q.position_amplitude);
      q.position_frequency = read_vec<3>(m, "position_frequency", q.position_frequency);
      q.position_phase = read_vec<3>(m, "position_phase", q.position_phase);
      q.angles0 = read_vec<3>(m, "angles0", q.angles0);
      q.angle_amplitude = read_vec<3>(m, "angle_amplitude", q.angle_amplitude);
      q.angle_frequency = read_vec<3>(m, "angle_frequency", q.angle_frequency);
      q.angle_phase = read_vec<3>(m, "angle_phase", q.angle_phase);
    }
    if (const YAML::Node l = n["landmarks"]) {
      read_scalar(l, "count", &s.landmark_count);
      s.landmark_min = read_vec<3>(l, "min", s.landmark_min);
      s.landmark_max = read_vec<3>(l, "max", s.landmark_max);
    }
    if (const YAML::Node c = n["camera"]) {
      CameraModel& cam = s.camera;
      read_scalar(c, "fx", &cam.fx);
      read_scalar(c, "fy", &cam.fy);
      read_scalar(c, "cx", &cam.cx);
      read_scalar(c, "cy", &cam.cy);
      read_scalar(c, "width", &cam.width);
      read_scalar(c, "height", &cam.height);
      cam.distortion = read_vec<4>(c, "distortion", cam.distortion);
      if (const YAML::Node T = c["T_bc"]) {
        const Vec4 q = read_vec<4>(T, "q", Vec4(1, 0, 0, 0));
        const Vec3 t = read_vec<3>(T, "t", Vec3::Zero());
        cam.T_bc = Pose(Rotation::from_quaternion(Eigen::Quaterniond(q(0), q(1), q(2), q(3)).normalized()), t);
      }
    }
    if (const YAML::Node i = n["imu"]) {
      read_scalar(i, "rate", &s.imu_rate);
      read_scalar(i, "gyro_sigma", &s.gyro_sigma);
      read_scalar(i, "accel_sigma", &s.accel_sigma);
      read_scalar(i, "gyro_walk", &s.gyro_walk);
      read_scalar(i, "accel_walk", &s.accel_walk);
      s.gyro_bias = read_vec<3>(i, "gyro_bias", s.gyro_bias);
      s.accel_bias = read_vec<3>(i, "accel_bias", s.accel_bias);
    }
    s.gravity = read_vec<3>(n, "gravity", s.gravity);
    if (const YAML::Node e = n["events"]) {
      read_scalar(e, "threshold", &s.event_threshold);
      read_scalar(e, "pixel_sigma", &s.pixel_sigma);
      read_scalar(e, "noise_rate", &s.noise_event_rate);
    }
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kDataError, "scenario file " + path + ": " + e.what());
  }
  try {
    s.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kDataError, "scenario file " + path + ": " + e.what());
  }
  return s;
}

void save_scenario(const std::string& path, const ScenarioSpec& s) {
  YAML::Emitter o;
  o.SetDoublePrecision(17);
  o << YAML::BeginMap;
  o << YAML::Key << "family" << YAML::Value << to_string(s.family);
  o << YAML::Key << "duration" << YAML::Value << s.duration;
  o << YAML::Key << "seed" << YAML::Value << s.seed;
  o << YAML::Key << "twist" << YAML::Value << YAML::Flow << as_list<6>(s.twist);
  o << YAML::Key << "figure_eight" << YAML::Value << YAML::BeginMap;
  o << YAML::Key << "period" << YAML::Value << s.figure_eight_period;
  o << YAML::Key << "amplitude" << YAML::Value << YAML::Flow << as_list<3>(s.figure_eight_amplitude);
  o << YAML::Key << "angles" << YAML::Value << YAML::Flow << as_list<3>(s.figure_eight_angles);
  o << YAML::EndMap;
  const SinusoidalMotion& q = s.sinusoid;
  o << YAML::Key << "sinusoid" << YAML::Value << YAML::BeginMap;
  o << YAML::Key << "position0" << YAML::Value << YAML::Flow << as_list<3>(q.position0);
  o << YAML::Key << "velocity" << YAML::Value << YAML::Flow << as_list<3>(q.velocity);
  o << YAML::Key << "position_amplitude" << YAML::Value << YAML::Flow << as_list<3>(q.position_amplitude);
  o << YAML::Key << "position_frequency" << YAML::Value << YAML::Flow << as_list<3>(q.position_frequency);
  o << YAML::Key << "position_phase" << YAML::Value << YAML::Flow << as_list<3>(q.position_phase);
  o << YAML::Key << "angles0" << YAML::Value << YAML::Flow << as_list<3>(q.angles0);
  o << YAML::Key << "angle_amplitude" << YAML::Value << YAML::Flow << as_list<3>(q.angle_amplitude);
  o << YAML::Key << "angle_frequency" << YAML::Value << YAML::Flow << as_list<3>(q.angle_frequency);
  o << YAML::Key << "angle_phase" << YAML::Value << YAML::Flow << as_list<3>(q.angle_phase);
  o << YAML::EndMap;
  o << YAML::Key << "landmarks" << YAML::Value << YAML::BeginMap;
  o << YAML::Key << "count" << YAML::Value << s.landmark_count;
  o << YAML::Key << "min" << YAML::Value << YAML::Flow << as_list<3>(s.landmark_min);
  o << YAML::Key << "max" << YAML::Value << YAML::Flow << as_list<3>(s.landmark_max);
  o << YAML::EndMap;
  const CameraModel& c = s.camera;
  const Eigen::Quaterniond cq = c.T_bc.rotation().quaternion();
  o << YAML::Key << "camera" << YAML::Value << YAML::BeginMap;
  o << YAML::Key << "fx" << YAML::Value << c.fx << YAML::Key << "fy" << YAML::Value << c.fy;
  o << YAML::Key << "cx" << YAML::Value << c.cx << YAML::Key << "cy" << YAML::Value << c.cy;
  o << YAML::Key << "width" << YAML::Value << c.width << YAML::Key << "height" << YAML::Value << c.height;
  o << YAML::Key << "distortion" << YAML::Value << YAML::Flow << as_list<4>(c.distortion);
  o << YAML::Key << "T_bc" << YAML::Value << YAML::BeginMap;
  o << YAML::Key << "q" << YAML::Value << YAML::Flow << std::vector<double>{cq.w(), cq.x(), cq.y(), cq.z()};
  o << YAML::Key << "t" << YAML::Value << YAML::Flow << as_list<3>(c.T_bc.translation());
  o << YAML::EndMap << YAML::EndMap;
  o << YAML::Key << "imu" << YAML::Value << YAML::BeginMap;
  o << YAML::Key << "rate" << YAML::Value << s.imu_rate;
  o << YAML::Key << "gyro_sigma" << YAML::Value << s.gyro_sigma;
  o << YAML::Key << "accel_sigma" << YAML::Value << s.accel_sigma;
  o << YAML::Key << "gyro_walk" << YAML::Value << s.gyro_walk;
  o << YAML::Key << "accel_walk" << YAML::Value << s.accel_walk;
  o << YAML::Key << "gyro_bias" << YAML::Value << YAML::Flow << as_list<3>(s.gyro_bias);
  o << YAML::Key << "accel_bias" << YAML::Value << YAML::Flow << as_list<3>(s.accel_bias);
  o << YAML::EndMap;
  o << YAML::Key << "gravity" << YAML::Value << YAML::Flow << as_list<3>(s.gravity);
  o << YAML::Key << "events" << YAML::Value << YAML::BeginMap;
  o << YAML::Key << "threshold" << YAML::Value << s.event_threshold;
  o << YAML::Key << "pixel_sigma" << YAML::Value << s.pixel_sigma;
  o << YAML::Key << "noise_rate" << YAML::Value << s.noise_event_rate;
  o << YAML::EndMap << YAML::EndMap;
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::kDataError, "cannot write scenario file " + path);
  f << o.c_str() << "\n";
}

}  // namespace gpeio
