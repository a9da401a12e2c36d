#pragma once

#include "gpeio/frontend/sae.hpp"

namespace gpeio {

struct CornerConfig {
  // Harris window is (2 * half_width + 1)^2 gradient positions; the binarized
  // patch adds one pixel on each side for the Sobel stencil.
  int half_width = 3;
  // Newest pixels of the patch that binarize to 1, among those touched within
  // recency seconds. Fewer than min_support such pixels is never a corner.
  int recent_count = 25;
  double recency = 0.05;
  int min_support = 4;
  double harris_k = 0.04;
  double gaussian_sigma = 1.5;
  double threshold = 100.0;
};

struct CornerResult {
  bool corner = false;
  double score = 0.0;
};

// Binarizes the patch around (x, y) by recency and evaluates the Harris
// response at its center. Pixels too close to the border are never corners.
CornerResult detect_corner(const Sae& sae, int x, int y, const CornerConfig& config = {});

// Harris response of a binary (2h + 3)^2 patch, row-major, centered.
double harris_score(const std::vector<double>& patch, int half_width, double k, double sigma);

}  // namespace gpeio
