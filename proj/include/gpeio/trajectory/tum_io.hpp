#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gpeio/liegroup/se3.hpp"

namespace gpeio {

struct StampedPose {
  double t;
  Pose T;
};

// `t tx ty tz qx qy qz qw`, 9 significant digits.
void write_tum(std::ostream& os, const std::vector<StampedPose>& poses);
void write_tum(const std::string& path, const std::vector<StampedPose>& poses);
// Skips blank lines and '#' comments. Throws kDataError on malformed lines.
std::vector<StampedPose> read_tum(std::istream& is);
std::vector<StampedPose> read_tum(const std::string& path);

}  // namespace gpeio
