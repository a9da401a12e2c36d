#include "gpeio/vision/landmark.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "gpeio/common/error.hpp"

namespace gpeio {

Vec2 interpolate_track(const std::vector<FeatureObservation>& obs, double t) {
  if (obs.empty()) throw Error(ErrorCode::kInvalidArgument, "empty feature track");
  if (t <= obs.front().t) return obs.front().q;
  if (t >= obs.back().t) return obs.back().q;
  const auto it = std::upper_bound(obs.begin(), obs.end(), t, [](double v, const FeatureObservation& o) { return v < o.t; });
  const FeatureObservation& b = *it;
  const FeatureObservation& a = *(it - 1);
  const double s = (t - a.t) / (b.t - a.t);
  return (1.0 - s) * a.q + s * b.q;
}

double triangulate_midpoint(const Vec3& c1, const Vec3& b1, const Vec3& c2, const Vec3& b2, double min_parallax) {
  const Vec3 u = b1.normalized(), v = b2.normalized();
  const double cosang = std::clamp(u.dot(v), -1.0, 1.0);
  if (std::acos(cosang) < min_parallax) return 0.0;
  // Minimize |c1 + s u - c2 - r v|^2 over (s, r).
  const Vec3 w = c1 - c2;
  const double b = u.dot(v), d = u.dot(w), e = v.dot(w);
  const double den = 1.0 - b * b;
  if (den <= 0.0) return 0.0;
  const double s = (b * e - d) / den;
  const double r = (e - b * d) / den;
  if (s <= 0.0 || r <= 0.0) return 0.0;
  const Vec3 mid = 0.5 * ((c1 + s * u) + (c2 + r * v));
  return u.dot(mid - c1);
}

InverseDepthLandmark init_landmark(const FeatureTrajectory& track, const Trajectory& traj, const CameraModel& cam,
                                   const LandmarkInitConfig& cfg) {
  const auto& obs = track.observations;
  if (obs.size() < 2) throw Error(ErrorCode::kNotAnchorable, "feature " + std::to_string(track.id) + " has fewer than two observations");
  const double t_first = obs.front().t, t_last = obs.back().t;

  std::optional<std::size_t> anchor;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (traj.time(k) >= t_first && traj.time(k) <= t_last) {
      anchor = k;
      break;
    }
  }
  if (!anchor)
    throw Error(ErrorCode::kNotAnchorable, "no knot inside the span of feature " + std::to_string(track.id));

  InverseDepthLandmark lm;
  lm.id = track.id;
  lm.anchor_knot = *anchor;
  lm.anchor_time = traj.time(*anchor);
  lm.kappa = cam.bearing(cam.undistort(interpolate_track(obs, lm.anchor_time)));

  // Latest observation the trajectory can place.
  const FeatureObservation* last = nullptr;
  for (auto it = obs.rbegin(); it != obs.rend(); ++it)
    if (traj.covers(it->t)) {
      last = &*it;
      break;
    }
  if (last == nullptr || last->t <= lm.anchor_time) return lm;

  const Pose T1 = traj.state(*anchor).T * cam.T_bc;
  const Pose T2 = traj.query(last->t, false).x.T * cam.T_bc;
  const Vec3 b1 = T1.C() * lm.kappa;
  const Vec3 b2 = T2.C() * cam.bearing(cam.undistort(last->q));
  const double dist = triangulate_midpoint(T1.translation(), b1, T2.translation(), b2, cfg.min_parallax);
  lm.rho = dist > 0.0 ? std::min(1.0 / dist, cfg.rho_max) : 0.0;
  return lm;
}

}  // namespace gpeio
