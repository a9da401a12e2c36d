#include "gpeio/frontend/sae.hpp"

#include <algorithm>

namespace gpeio {

Sae::Sae(int width, int height)
    : width_(width), height_(height), pos_(std::size_t(width) * height, 0.0), neg_(std::size_t(width) * height, 0.0) {}

void Sae::update(const Event& e) {
  double& cell = (e.polarity > 0 ? pos_ : neg_)[std::size_t(e.y) * width_ + e.x];
  cell = std::max(cell, e.t);
}

double Sae::at(int x, int y, int polarity) const {
  return (polarity > 0 ? pos_ : neg_)[std::size_t(y) * width_ + x];
}

double Sae::latest(int x, int y) const {
  const std::size_t i = std::size_t(y) * width_ + x;
  return std::max(pos_[i], neg_[i]);
}

}  // namespace gpeio
