#pragma once

#include <optional>
#include <vector>

namespace gpeio {

// Pixel grid of feature ids, -1 where empty.
class RegistrationTable {
 public:
  RegistrationTable(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  int get(int x, int y) const { return cells_[index(x, y)]; }
  void set(int x, int y, int id) { cells_[index(x, y)] = id; }
  void clear(int x, int y) { cells_[index(x, y)] = -1; }

  // Nearest id within Chebyshev radius r of (x, y). Ties go to the smaller
  // Euclidean distance, then the smaller id. `exclude` is never returned.
  std::optional<int> search(int x, int y, int r, int exclude = -1) const;

 private:
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

  int width_;
  int height_;
  std::vector<int> cells_;
};

}  // namespace gpeio
