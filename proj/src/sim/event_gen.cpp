#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gpeio/sim/generators.hpp"

namespace gpeio {

bool project_world(const Vec3& p_w, const Pose& T_wb, const CameraModel& cam, Vec2* q) {
  const Vec3 p_c = (T_wb * cam.T_bc).inverse() * p_w;
  if (p_c.z() < 0.1) return false;
  const Vec2 u = cam.distort(cam.project(p_c));
  if (u.x() < 0.0 || u.y() < 0.0 || u.x() > cam.width - 1.0 || u.y() > cam.height - 1.0) return false;
  *q = u;
  return true;
}

std::vector<Vec3> gen_landmarks(const ScenarioSpec& spec) {
  std::mt19937_64 rng(sub_seed(spec.seed, SeedStream::kLandmarks));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<Vec3> out;
  for (int i = 0; i < spec.landmark_count; ++i) {
    const Vec3 s(u01(rng), u01(rng), u01(rng));
    out.push_back(spec.landmark_min + s.cwiseProduct(spec.landmark_max - spec.landmark_min));
  }
  return out;
}

EventStream gen_events(const TruthModel& truth, const std::vector<Vec3>& landmarks, const ScenarioSpec& spec,
                       double rate) {
  std::mt19937_64 rng(sub_seed(spec.seed, SeedStream::kEvents));
  std::normal_distribution<double> n01(0.0, 1.0);
  const CameraModel& cam = spec.camera;
  const double theta = spec.event_threshold;

  std::vector<int> polarity(landmarks.size());
  for (int& p : polarity) p = (rng() & 1) ? 1 : -1;

  struct Raw {
    double t;
    int source;
    Vec2 q;
  };
  std::vector<Raw> raw;
  std::vector<bool> visible(landmarks.size(), false);
  std::vector<Vec2> last(landmarks.size(), Vec2::Zero());

  const long n = std::lround(spec.duration * rate);
  double t_prev = 0.0;
  for (long i = 0; i <= n; ++i) {
    const double t = i / rate;
    const Pose T = truth.at(t).x.T;
    for (std::size_t j = 0; j < landmarks.size(); ++j) {
      Vec2 q;
      if (!project_world(landmarks[j], T, cam, &q)) {
        visible[j] = false;
        continue;
      }
      if (!visible[j]) {
        visible[j] = true;
        last[j] = q;
        continue;
      }
      double lo = t_prev;
      while ((q - last[j]).norm() >= theta) {
        // Bisect |q(s) - last| = theta on [lo, t]; the distance is below
        // theta at lo by construction.
        double a = lo, b = t;
        Vec2 qb = q;
        for (int it = 0; it < 40 && b - a > 1e-10; ++it) {
          const double m = 0.5 * (a + b);
          Vec2 qm;
          if (!project_world(landmarks[j], truth.at(m).x.T, cam, &qm)) qm = q;
          if ((qm - last[j]).norm() >= theta) {
            b = m;
            qb = qm;
          } else {
            a = m;
          }
        }
        raw.push_back({b, static_cast<int>(j), qb});
        last[j] = qb;
        lo = b;
      }
    }
    t_prev = t;
  }

  EventStream out;
  out.events.reserve(raw.size());
  for (const Raw& r : raw) {
    const Vec2 q = r.q + spec.pixel_sigma * Vec2(n01(rng), n01(rng));
    const int x = static_cast<int>(std::lround(q.x())), y = static_cast<int>(std::lround(q.y()));
    if (x < 0 || y < 0 || x >= cam.width || y >= cam.height) continue;
    out.events.push_back({r.t, x, y, polarity[r.source]});
    out.source.push_back(r.source);
  }
  if (spec.noise_event_rate > 0.0) {
    std::exponential_distribution<double> gap(spec.noise_event_rate);
    std::uniform_int_distribution<int> ux(0, cam.width - 1), uy(0, cam.height - 1);
    for (double t = gap(rng); t <= spec.duration; t += gap(rng)) {
      out.events.push_back({t, ux(rng), uy(rng), (rng() & 1) ? 1 : -1});
      out.source.push_back(-1);
    }
  }

  std::vector<std::size_t> order(out.events.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return out.events[a].t < out.events[b].t; });
  EventStream sorted;
  sorted.events.reserve(order.size());
  sorted.source.reserve(order.size());
  for (std::size_t i : order) {
    sorted.events.push_back(out.events[i]);
    sorted.source.push_back(out.source[i]);
  }
  return sorted;
}

}  // namespace gpeio
