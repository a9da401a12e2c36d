#include "gpeio/frontend/registration_table.hpp"

#include <algorithm>

namespace gpeio {

RegistrationTable::RegistrationTable(int width, int height)
    : width_(width), height_(height), cells_(std::size_t(width) * height, -1) {}

std::optional<int> RegistrationTable::search(int x, int y, int r, int exclude) const {
  std::optional<int> best;
  int best_d2 = 0;
  for (int yy = std::max(0, y - r); yy <= std::min(height_ - 1, y + r); ++yy) {
    for (int xx = std::max(0, x - r); xx <= std::min(width_ - 1, x + r); ++xx) {
      const int id = get(xx, yy);
      if (id < 0 || id == exclude) continue;
      const int d2 = (xx - x) * (xx - x) + (yy - y) * (yy - y);
      if (!best || d2 < best_d2 || (d2 == best_d2 && id < *best)) {
        best = id;
        best_d2 = d2;
      }
    }
  }
  return best;
}

}  // namespace gpeio
