#pragma once

#include <vector>

#include "gpeio/frontend/event.hpp"

namespace gpeio {

// Surface of active events: last timestamp per pixel and polarity, 0 when unset.
class Sae {
 public:
  Sae(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  // Keeps the maximum, so entries never decrease.
  void update(const Event& e);
  double at(int x, int y, int polarity) const;
  // Most recent of the two polarities.
  double latest(int x, int y) const;

 private:
  int width_;
  int height_;
  std::vector<double> pos_;
  std::vector<double> neg_;
};

}  // namespace gpeio
