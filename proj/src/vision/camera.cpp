#include "gpeio/vision/camera.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>

#include "gpeio/common/error.hpp"

namespace gpeio {

void CameraModel::validate() const {
  if (!(fx > 0.0 && fy > 0.0)) throw Error(ErrorCode::kInvalidArgument, "camera focal lengths must be positive");
  if (width <= 0 || height <= 0) throw Error(ErrorCode::kInvalidArgument, "camera resolution must be positive");
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height))
    throw Error(ErrorCode::kInvalidArgument, "principal point outside the image");
}

Mat3 CameraModel::K() const {
  Mat3 k;
  k << fx, 0, cx, 0, fy, cy, 0, 0, 1;
  return k;
}

Vec2 CameraModel::project(const Vec3& p) const { return Vec2(fx * p.x() / p.z() + cx, fy * p.y() / p.z() + cy); }

Vec3 CameraModel::bearing(const Vec2& q) const { return Vec3((q.x() - cx) / fx, (q.y() - cy) / fy, 1.0).normalized(); }

namespace {

Vec2 distort_normalized(const Vec4& d, const Vec2& m) {
  const double x = m.x(), y = m.y();
  const double r2 = x * x + y * y;
  const double radial = 1.0 + d(0) * r2 + d(1) * r2 * r2;
  return Vec2(x * radial + 2 * d(2) * x * y + d(3) * (r2 + 2 * x * x),
              y * radial + d(2) * (r2 + 2 * y * y) + 2 * d(3) * x * y);
}

}  // namespace

Vec2 CameraModel::distort(const Vec2& q) const {
  const Vec2 m((q.x() - cx) / fx, (q.y() - cy) / fy);
  const Vec2 md = distort_normalized(distortion, m);
  return Vec2(fx * md.x() + cx, fy * md.y() + cy);
}

Vec2 CameraModel::undistort(const Vec2& q) const {
  if (!has_distortion()) return q;
  const Vec2 md((q.x() - cx) / fx, (q.y() - cy) / fy);
  Vec2 m = md;
  for (int i = 0; i < 50; ++i) {
    const Vec2 step = md - distort_normalized(distortion, m);
    m += step;
    if (step.norm() < 1e-14) break;
  }
  return Vec2(fx * m.x() + cx, fy * m.y() + cy);
}

CameraModel load_camera(const std::string& path) {
  CameraModel cam;
  try {
    const YAML::Node n = YAML::LoadFile(path);
    cam.fx = n["fx"].as<double>();
    cam.fy = n["fy"].as<double>();
    cam.cx = n["cx"].as<double>();
    cam.cy = n["cy"].as<double>();
    cam.width = n["width"].as<int>();
    cam.height = n["height"].as<int>();
    if (n["distortion"]) {
      const auto d = n["distortion"].as<std::vector<double>>();
      if (d.size() != 4) throw Error(ErrorCode::kDataError, "camera distortion needs 4 coefficients");
      cam.distortion = Vec4(d[0], d[1], d[2], d[3]);
    }
    if (n["T_bc"]) {
      const auto q = n["T_bc"]["q"].as<std::vector<double>>();
      const auto t = n["T_bc"]["t"].as<std::vector<double>>();
      if (q.size() != 4 || t.size() != 3) throw Error(ErrorCode::kDataError, "camera T_bc needs q[4] and t[3]");
      cam.T_bc = Pose(Rotation::from_quaternion(Eigen::Quaterniond(q[0], q[1], q[2], q[3]).normalized()),
                      Vec3(t[0], t[1], t[2]));
    }
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kDataError, "camera file " + path + ": " + e.what());
  }
  try {
    cam.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kDataError, "camera file " + path + ": " + e.what());
  }
  return cam;
}

void save_camera(const std::string& path, const CameraModel& cam) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  const Eigen::Quaterniond q = cam.T_bc.rotation().quaternion();
  const Vec3& t = cam.T_bc.translation();
  out << YAML::BeginMap;
  out << YAML::Key << "fx" << YAML::Value << cam.fx << YAML::Key << "fy" << YAML::Value << cam.fy;
  out << YAML::Key << "cx" << YAML::Value << cam.cx << YAML::Key << "cy" << YAML::Value << cam.cy;
  out << YAML::Key << "width" << YAML::Value << cam.width << YAML::Key << "height" << YAML::Value << cam.height;
  out << YAML::Key << "distortion" << YAML::Value << YAML::Flow
      << std::vector<double>{cam.distortion(0), cam.distortion(1), cam.distortion(2), cam.distortion(3)};
  out << YAML::Key << "T_bc" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "q" << YAML::Value << YAML::Flow << std::vector<double>{q.w(), q.x(), q.y(), q.z()};
  out << YAML::Key << "t" << YAML::Value << YAML::Flow << std::vector<double>{t.x(), t.y(), t.z()};
  out << YAML::EndMap << YAML::EndMap;
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::kDataError, "cannot write camera file " + path);
  f << out.c_str() << "\n";
}

}  // namespace gpeio
