#include "gpeio/trajectory/tum_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "gpeio/common/error.hpp"

namespace gpeio {

void write_tum(std::ostream& os, const std::vector<StampedPose>& poses) {
  char buf[256];
  for (const StampedPose& p : poses) {
    const Eigen::Quaterniond q = p.T.rotation().quaternion();
    const Vec3& t = p.T.translation();
    std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g %.9g %.9g %.9g %.9g %.9g\n", p.t, t.x(), t.y(), t.z(), q.x(),
                  q.y(), q.z(), q.w());
    os << buf;
  }
}

void write_tum(const std::string& path, const std::vector<StampedPose>& poses) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::kDataError, "cannot write " + path);
  write_tum(os, poses);
}

std::vector<StampedPose> read_tum(std::istream& is) {
  std::vector<StampedPose> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    double t, x, y, z, qx, qy, qz, qw;
    if (!(ss >> t >> x >> y >> z >> qx >> qy >> qz >> qw))
      throw Error(ErrorCode::kDataError, "malformed TUM line " + std::to_string(lineno));
    out.push_back({t, Pose(Rotation::from_quaternion(Eigen::Quaterniond(qw, qx, qy, qz)), Vec3(x, y, z))});
  }
  return out;
}

std::vector<StampedPose> read_tum(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kDataError, "cannot read " + path);
  return read_tum(is);
}

}  // namespace gpeio
