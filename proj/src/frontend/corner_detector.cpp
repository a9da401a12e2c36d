#include "gpeio/frontend/corner_detector.hpp"

#include <algorithm>
#include <cmath>

namespace gpeio {

double harris_score(const std::vector<double>& patch, int h, double k, double sigma) {
  const int n = 2 * h + 3;
  auto p = [&](int x, int y) { return patch[std::size_t(y) * n + x]; };
  double a = 0.0, b = 0.0, c = 0.0;
  for (int y = 1; y < n - 1; ++y) {
    for (int x = 1; x < n - 1; ++x) {
      const double gx = (p(x + 1, y - 1) + 2 * p(x + 1, y) + p(x + 1, y + 1)) -
                        (p(x - 1, y - 1) + 2 * p(x - 1, y) + p(x - 1, y + 1));
      const double gy = (p(x - 1, y + 1) + 2 * p(x, y + 1) + p(x + 1, y + 1)) -
                        (p(x - 1, y - 1) + 2 * p(x, y - 1) + p(x + 1, y - 1));
      const double dx = x - (h + 1), dy = y - (h + 1);
      const double w = std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
      a += w * gx * gx;
      b += w * gx * gy;
      c += w * gy * gy;
    }
  }
  return a * c - b * b - k * (a + c) * (a + c);
}

CornerResult detect_corner(const Sae& sae, int x, int y, const CornerConfig& cfg) {
  const int r = cfg.half_width + 1;
  if (x < r || y < r || x >= sae.width() - r || y >= sae.height() - r) return {};
  const int n = 2 * r + 1;
  const double now = sae.latest(x, y);
  std::vector<double> stamps(std::size_t(n) * n);
  int support = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      double s = sae.latest(x - r + i, y - r + j);
      if (s <= 0.0 || now - s > cfg.recency) s = 0.0;
      support += s > 0.0;
      stamps[std::size_t(j) * n + i] = s;
    }
  }
  if (support < cfg.min_support) return {};

  // Everything at least as new as the recent_count-th newest stamp is set.
  std::vector<double> sorted = stamps;
  const int m = std::clamp(cfg.recent_count, 1, n * n);
  std::nth_element(sorted.begin(), sorted.begin() + (m - 1), sorted.end(), std::greater<double>());
  const double cutoff = sorted[m - 1];
  std::vector<double> patch(stamps.size());
  for (std::size_t i = 0; i < stamps.size(); ++i) patch[i] = (stamps[i] > 0.0 && stamps[i] >= cutoff) ? 1.0 : 0.0;

  CornerResult out;
  out.score = harris_score(patch, cfg.half_width, cfg.harris_k, cfg.gaussian_sigma);
  out.corner = out.score >= cfg.threshold;
  return out;
}

}  // namespace gpeio
