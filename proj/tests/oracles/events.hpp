#pragma once

// Minimal event renderer for frontend tests: filled squares whose covered
// pixel set changes when the rounded center moves. Independent of the sim.

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <vector>

#include "gpeio/frontend/event.hpp"

namespace oracle {

using Center = std::function<std::pair<double, double>(double)>;

inline std::set<std::pair<int, int>> square_pixels(double u, double v, int half) {
  std::set<std::pair<int, int>> s;
  const int cu = static_cast<int>(std::lround(u)), cv = static_cast<int>(std::lround(v));
  for (int dy = -half; dy <= half; ++dy)
    for (int dx = -half; dx <= half; ++dx) s.insert({cu + dx, cv + dy});
  return s;
}

inline std::vector<gpeio::Event> render_squares(const std::vector<Center>& centers, double t0, double t1, int width,
                                                int height, int half = 2, double step = 1e-4) {
  std::vector<gpeio::Event> out;
  std::vector<std::set<std::pair<int, int>>> prev;
  for (const Center& c : centers) prev.push_back(square_pixels(c(t0).first, c(t0).second, half));
  for (double t = t0 + step; t <= t1; t += step) {
    for (std::size_t k = 0; k < centers.size(); ++k) {
      const auto [u, v] = centers[k](t);
      const auto now = square_pixels(u, v, half);
      if (now == prev[k]) continue;
      for (const auto& p : now)
        if (!prev[k].count(p)) out.push_back({t, p.first, p.second, 1});
      for (const auto& p : prev[k])
        if (!now.count(p)) out.push_back({t, p.first, p.second, -1});
      prev[k] = now;
    }
  }
  out.erase(std::remove_if(out.begin(), out.end(),
                           [&](const gpeio::Event& e) { return e.x < 0 || e.y < 0 || e.x >= width || e.y >= height; }),
            out.end());
  return out;
}

}  // namespace oracle
