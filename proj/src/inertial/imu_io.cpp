#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gpeio/common/error.hpp"
#include "gpeio/inertial/imu.hpp"
#include "gpeio/liegroup/so3.hpp"

namespace gpeio {

ImuNoiseModel ImuNoiseModel::isotropic(double sigma_g, double sigma_a, double sigma_bg, double sigma_ba) {
  ImuNoiseModel m;
  m.Q_g = Mat3::Identity() * sigma_g * sigma_g;
  m.Q_a = Mat3::Identity() * sigma_a * sigma_a;
  m.Q_bg = Mat3::Identity() * sigma_bg * sigma_bg;
  m.Q_ba = Mat3::Identity() * sigma_ba * sigma_ba;
  return m;
}

void ImuNoiseModel::validate() const {
  for (const Mat3* Q : {&Q_g, &Q_a, &Q_bg, &Q_ba}) {
    if (!Q->allFinite() || (*Q - Q->transpose()).cwiseAbs().maxCoeff() > 1e-15)
      throw Error(ErrorCode::kInvalidArgument, "noise covariance must be symmetric");
    if (Eigen::SelfAdjointEigenSolver<Mat3>(*Q).eigenvalues().minCoeff() < 0.0)
      throw Error(ErrorCode::kInvalidArgument, "noise covariance must be PSD");
  }
  if (!gravity.allFinite()) throw Error(ErrorCode::kInvalidArgument, "gravity must be finite");
}

InertialSample ideal_sample(double t, const Mat3& C, const Twist& w, const Vec6& dw, const Vec3& gravity,
                            const BiasState& bias) {
  const Vec3 omega = w.head<3>(), nu = w.tail<3>();
  InertialSample s;
  s.t = t;
  s.gyro = omega + bias.bg;
  s.accel = dw.tail<3>() + omega.cross(nu) - C.transpose() * gravity + bias.ba;
  return s;
}

namespace {

InertialSample lerp_at(const std::vector<InertialSample>& s, double t) {
  auto it = std::lower_bound(s.begin(), s.end(), t, [](const InertialSample& a, double v) { return a.t < v; });
  if (it == s.begin()) return {t, s.front().gyro, s.front().accel};
  if (it == s.end()) return {t, s.back().gyro, s.back().accel};
  const InertialSample& b = *it;
  const InertialSample& a = *(it - 1);
  const double span = b.t - a.t;
  const double u = span > 0.0 ? (t - a.t) / span : 0.0;
  return {t, (1 - u) * a.gyro + u * b.gyro, (1 - u) * a.accel + u * b.accel};
}

}  // namespace

std::vector<InertialSample> window_points(const std::vector<InertialSample>& samples, double t0, double t1) {
  if (!(t1 > t0)) throw Error(ErrorCode::kInvalidArgument, "empty integration interval");
  auto lo = std::lower_bound(samples.begin(), samples.end(), t0, [](const InertialSample& a, double v) { return a.t < v; });
  auto hi = std::upper_bound(samples.begin(), samples.end(), t1, [](double v, const InertialSample& a) { return v < a.t; });
  if (lo == hi) throw Error(ErrorCode::kMissingData, "no inertial samples in [" + std::to_string(t0) + ", " + std::to_string(t1) + "]");
  std::vector<InertialSample> out;
  out.reserve(static_cast<std::size_t>(hi - lo) + 2);
  out.push_back(lerp_at(samples, t0));
  for (auto it = lo; it != hi; ++it)
    if (it->t > t0 && it->t < t1) out.push_back(*it);
  out.push_back(lerp_at(samples, t1));
  return out;
}

std::vector<InertialSample> read_imu_csv(std::istream& is) {
  std::vector<InertialSample> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    InertialSample s;
    if (!(ss >> s.t >> s.gyro.x() >> s.gyro.y() >> s.gyro.z() >> s.accel.x() >> s.accel.y() >> s.accel.z())) {
      if (lineno == 1 && out.empty()) continue;  // header
      throw Error(ErrorCode::kDataError, "malformed IMU line " + std::to_string(lineno));
    }
    if (!s.gyro.allFinite() || !s.accel.allFinite() || !std::isfinite(s.t))
      throw Error(ErrorCode::kDataError, "non-finite IMU sample at line " + std::to_string(lineno));
    if (!out.empty() && s.t < out.back().t)
      throw Error(ErrorCode::kDataError, "IMU timestamps decrease at line " + std::to_string(lineno));
    out.push_back(s);
  }
  return out;
}

std::vector<InertialSample> read_imu_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kDataError, "cannot read " + path);
  return read_imu_csv(is);
}

void write_imu_csv(std::ostream& os, const std::vector<InertialSample>& samples) {
  os << "t,gx,gy,gz,ax,ay,az\n";
  char buf[320];
  for (const InertialSample& s : samples) {
    std::snprintf(buf, sizeof(buf), "%.9f,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.gyro.x(), s.gyro.y(),
                  s.gyro.z(), s.accel.x(), s.accel.y(), s.accel.z());
    os << buf;
  }
}

void write_imu_csv(const std::string& path, const std::vector<InertialSample>& samples) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::kDataError, "cannot write " + path);
  write_imu_csv(os, samples);
}

}  // namespace gpeio
