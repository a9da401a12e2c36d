#include "gpeio/solver/estimator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>

#include "gpeio/common/error.hpp"
#include "gpeio/solver/marginalization.hpp"
#include "gpeio/vision/reprojection.hpp"

namespace gpeio {

namespace {

constexpr double kTimeEps = 1e-9;
constexpr std::size_t kMinLandmarkObservations = 3;

void accumulate(FactorCounts& sum, const FactorCounts& c) {
  sum.wnoj += c.wnoj;
  sum.bias += c.bias;
  sum.gpif += c.gpif;
  sum.gpp += c.gpp;
  sum.preint += c.preint;
  sum.visual += c.visual;
  sum.zero += c.zero;
  sum.gauge += c.gauge;
  sum.anchor += c.anchor;
  sum.marginal += c.marginal;
}

std::size_t knot_at(const Trajectory& traj, double t) {
  for (std::size_t k = 0; k < traj.size(); ++k)
    if (std::abs(traj.time(k) - t) < kTimeEps) return k;
  return traj.size();
}

std::size_t first_knot_from(const Trajectory& traj, double t) {
  std::size_t k = 0;
  while (k < traj.size() && traj.time(k) < t - kTimeEps) ++k;
  return k;
}

Pose camera_pose(const Trajectory& traj, std::size_t k, const CameraModel& cam) { return traj.state(k).T * cam.T_bc; }

// World point of a landmark, or its world direction when rho = 0.
struct WorldLandmark {
  Vec3 point = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();
  bool finite = false;
};

WorldLandmark to_world(const InverseDepthLandmark& lm, const Pose& T_wc) {
  WorldLandmark w;
  w.direction = T_wc.C() * lm.kappa;
  w.finite = lm.rho > 1e-9;
  if (w.finite) w.point = T_wc * (lm.kappa / lm.rho);
  return w;
}

// Re-expresses a world landmark in the camera of `anchor`. False when the
// point falls behind that camera.
bool anchor_world(const WorldLandmark& w, const Trajectory& traj, std::size_t anchor, const CameraModel& cam,
                  double rho_max, InverseDepthLandmark* lm) {
  const Pose T_wc = camera_pose(traj, anchor, cam);
  lm->anchor_knot = anchor;
  lm->anchor_time = traj.time(anchor);
  if (!w.finite) {
    lm->kappa = T_wc.C().transpose() * w.direction;
    lm->rho = 0.0;
    return lm->kappa.z() > 0.0;
  }
  const Vec3 p_c = T_wc.inverse() * w.point;
  if (p_c.z() < 0.1) return false;
  lm->kappa = p_c.normalized();
  lm->rho = std::min(1.0 / p_c.norm(), rho_max);
  return true;
}

struct TrackState {
  const FeatureTrajectory* track = nullptr;
  bool has_landmark = false;
  InverseDepthLandmark landmark;  // anchor_time is authoritative, anchor_knot is per window
  WorldLandmark world;
  // Observations up to this time are already inside the marginal prior.
  double used_until = -std::numeric_limits<double>::infinity();
  std::set<double> rejected;
};

// Observations of one track usable in [t_from, t_to].
std::vector<FeatureObservation> usable(const TrackState& ts, double t_from, double t_to) {
  std::vector<FeatureObservation> out;
  for (const FeatureObservation& o : ts.track->observations) {
    if (o.t < t_from - kTimeEps || o.t > t_to + kTimeEps || o.t <= ts.used_until) continue;
    if (ts.rejected.count(o.t)) continue;
    out.push_back(o);
  }
  return out;
}

// Drops visual measurements whose pixel error exceeds the gate and records
// them on their tracks. Returns the number dropped.
std::size_t reject_outliers(FactorGraphProblem& p, const std::vector<TrackState*>& slot_track, double gate_px) {
  std::vector<VisualMeasurement> kept;
  std::size_t dropped = 0;
  for (const VisualMeasurement& m : p.visual) {
    bool bad = false;
    try {
      const VisualResidual vr = visual_residual(p.landmarks[m.landmark], p.trajectory, m.t, m.q, p.camera);
      bad = vr.residual.norm() > gate_px;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kBehindCamera) throw;
      bad = true;
    }
    if (bad) {
      slot_track[m.landmark]->rejected.insert(m.t);
      ++dropped;
    } else {
      kept.push_back(m);
    }
  }
  p.visual = std::move(kept);
  return dropped;
}

void solve(FactorGraphProblem& p, const std::vector<TrackState*>& slot_track, const SolverConfig& cfg,
           EstimateResult& res) {
  accumulate(res.factors, p.counts());
  OptimizeReport rep = optimize(p, cfg);
  res.iterations += rep.iterations;
  const std::size_t dropped = reject_outliers(p, slot_track, cfg.outlier_px);
  if (dropped > 0) {
    res.outliers += dropped;
    rep = optimize(p, cfg);
    res.iterations += rep.iterations;
  }
}

// First pose and body velocity held, first bias anchored.
void fix_gauge(FactorGraphProblem& p, const SolverConfig& cfg) {
  p.hold(0, 0, 6);
  if (cfg.gauge_hold_velocity) p.hold(0, 9, 3);
  p.bias_anchors.push_back(initial_bias_anchor(cfg));
}

}  // namespace

Trajectory EstimateResult::trajectory(const WnojModel& model) const {
  Trajectory traj(model);
  for (std::size_t k = 0; k < knots.size(); ++k) traj.add_knot(knot_times[k], knots[k]);
  return traj;
}

std::vector<StampedPose> EstimateResult::poses(double rate, const WnojModel& model) const {
  std::vector<StampedPose> out;
  if (knots.empty()) return out;
  if (rate <= 0.0 || knots.size() < 2) {
    for (std::size_t k = 0; k < knots.size(); ++k) out.push_back({knot_times[k], knots[k].T});
    return out;
  }
  const Trajectory traj = trajectory(model);
  const double t0 = traj.start_time(), t1 = traj.end_time();
  const long n = static_cast<long>(std::floor((t1 - t0) * rate + kTimeEps));
  for (long i = 0; i <= n; ++i) {
    const double t = std::min(t0 + i / rate, t1);
    out.push_back({t, traj.query(t, false).x.T});
  }
  return out;
}

std::vector<FeatureTrajectory> prepare_tracks(const std::vector<FeatureTrajectory>& tracks, const CameraModel& camera,
                                              const SolverConfig& cfg) {
  std::vector<FeatureTrajectory> out;
  for (const FeatureTrajectory& tr : tracks) {
    if (tr.observations.size() < 2) continue;
    if (tr.observations.back().t - tr.observations.front().t < cfg.min_track_span) continue;
    FeatureTrajectory p;
    p.id = tr.id;
    p.alive = tr.alive;
    double last = -std::numeric_limits<double>::infinity();
    for (const FeatureObservation& o : tr.observations) {
      if (o.t - last < cfg.visual_interval - kTimeEps) continue;
      p.observations.push_back({o.t, camera.has_distortion() ? camera.undistort(o.q) : o.q});
      last = o.t;
    }
    if (p.observations.size() >= 2) out.push_back(std::move(p));
  }
  return out;
}

EstimateResult estimate(const std::vector<FeatureTrajectory>& raw_tracks, const std::vector<InertialSample>& imu,
                        const CameraModel& camera_in, const SolverConfig& cfg) {
  cfg.validate();
  const auto clock0 = std::chrono::steady_clock::now();
  if (imu.size() < 2) throw Error(ErrorCode::kMissingData, "no inertial data");
  CameraModel camera = camera_in;
  const std::vector<FeatureTrajectory> tracks = prepare_tracks(raw_tracks, camera, cfg);
  camera.distortion.setZero();  // pixels are undistorted from here on

  const double t_end = imu.back().t;
  double t0 = imu.front().t;
  InitResult init;
  for (;;) {
    try {
      init = initialize(tracks, imu, t0, camera, cfg);
      break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNotReady) throw;
      t0 += cfg.init_retry_step;
      if (t0 + cfg.init_min_duration > t_end)
        throw Error(ErrorCode::kNotReady, std::string("initialization never succeeded: ") + e.what());
    }
  }

  EstimateResult res;
  res.t_init = t0;
  res.iterations += init.warmup.iterations + init.refine.iterations;

  std::map<int, TrackState> states;
  for (const FeatureTrajectory& tr : tracks) states[tr.id].track = &tr;
  for (const InverseDepthLandmark& lm : init.landmarks) {
    TrackState& ts = states.at(lm.id);
    ts.has_landmark = true;
    ts.landmark = lm;
  }

  Trajectory win = init.trajectory;
  std::vector<BiasState> biases = init.biases;
  MarginalPrior prior;
  IncrementCache cache;
  bool first = true;
  const double dt = cfg.knot_spacing;

  auto emit_knots = [&](std::size_t count) {
    for (std::size_t k = 0; k < count; ++k) {
      res.knot_times.push_back(win.time(k));
      res.knots.push_back(win.state(k));
      res.biases.push_back(biases[k]);
    }
  };

  for (;;) {
    const double ws = win.start_time(), we = win.end_time();
    std::vector<LandmarkObservations> los;
    std::vector<TrackState*> slot_track;
    for (auto& [id, ts] : states) {
      std::vector<FeatureObservation> obs = usable(ts, ws, we);
      if (obs.size() < kMinLandmarkObservations) continue;
      InverseDepthLandmark lm = ts.landmark;
      lm.id = id;
      bool ok = false;
      if (ts.has_landmark && lm.anchor_time >= ws - kTimeEps) {
        lm.anchor_knot = knot_at(win, lm.anchor_time);
        ok = lm.anchor_knot < win.size();
      } else if (ts.has_landmark) {
        const std::size_t anchor = first_knot_from(win, obs.front().t);
        ok = anchor < win.size() && anchor_world(ts.world, win, anchor, camera, cfg.landmark.rho_max, &lm);
      }
      if (!ok) {
        FeatureTrajectory sub;
        sub.id = id;
        sub.observations = obs;
        try {
          lm = init_landmark(sub, win, camera, cfg.landmark);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kNotAnchorable) throw;
          continue;
        }
      }
      std::erase_if(obs, [&](const FeatureObservation& o) { return o.t < lm.anchor_time - kTimeEps; });
      if (obs.size() < kMinLandmarkObservations) continue;
      los.push_back({lm, std::move(obs)});
      slot_track.push_back(&ts);
    }

    std::size_t dropped = 0;
    FactorGraphProblem p = build_problem(win, biases, imu, los, camera, cfg, &cache, &dropped);
    res.dropped_measurements += dropped;
    p.marginal = prior;
    if (first) fix_gauge(p, cfg);
    solve(p, slot_track, cfg, res);
    ++res.windows;

    win = p.trajectory;
    biases = p.biases;
    for (std::size_t j = 0; j < p.landmarks.size(); ++j) {
      TrackState& ts = *slot_track[j];
      ts.has_landmark = true;
      ts.landmark = p.landmarks[j];
      ts.world = to_world(ts.landmark, camera_pose(win, ts.landmark.anchor_knot, camera));
      if (ts.world.finite) res.points[ts.landmark.id] = ts.world.point;
    }

    const std::size_t room = static_cast<std::size_t>(std::floor((t_end - we) / dt + kTimeEps));
    const std::size_t n_new = std::min<std::size_t>(room, static_cast<std::size_t>(cfg.slide_knots));
    if (n_new == 0) break;

    const std::size_t want = static_cast<std::size_t>(cfg.window_knots);
    const std::size_t retire = win.size() + n_new > want ? std::min(win.size() - 1, win.size() + n_new - want) : 0;
    if (retire > 0) {
      std::vector<bool> retire_lm(p.landmarks.size(), false);
      for (std::size_t j = 0; j < p.landmarks.size(); ++j) {
        retire_lm[j] = p.landmarks[j].anchor_knot < retire;
        // Everything this landmark saw so far goes into the prior.
        if (retire_lm[j]) slot_track[j]->used_until = we;
      }
      prior = marginalize(p, retire, retire_lm);
      emit_knots(retire);
      win.erase_front(retire);
      biases.erase(biases.begin(), biases.begin() + static_cast<std::ptrdiff_t>(retire));
      std::erase_if(cache, [&](const auto& kv) { return kv.first < win.start_time() - kTimeEps; });
      first = false;
    }

    for (std::size_t i = 0; i < n_new; ++i) {
      const std::size_t last = win.size() - 1;
      const double t_last = win.time(last);
      win.add_knot(t_last + dt, predict_state(imu, t_last, win.state(last), t_last + dt, biases[last], cfg.imu));
      biases.push_back(biases[last]);
    }
  }
  emit_knots(win.size());
  res.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock0).count();
  return res;
}

EstimateResult estimate_batch(const std::vector<FeatureTrajectory>& raw_tracks, const std::vector<InertialSample>& imu,
                              const CameraModel& camera_in, const SolverConfig& cfg, const EstimateResult& seed) {
  cfg.validate();
  const auto clock0 = std::chrono::steady_clock::now();
  if (seed.knots.size() < 2) throw Error(ErrorCode::kInvalidArgument, "batch seed needs at least two knots");
  CameraModel camera = camera_in;
  const std::vector<FeatureTrajectory> tracks = prepare_tracks(raw_tracks, camera, cfg);
  camera.distortion.setZero();

  const Trajectory traj = seed.trajectory(cfg.wnoj);
  std::vector<TrackState> states(tracks.size());
  std::vector<LandmarkObservations> los;
  std::vector<TrackState*> slot_track;
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    TrackState& ts = states[i];
    ts.track = &tracks[i];
    std::vector<FeatureObservation> obs = usable(ts, traj.start_time(), traj.end_time());
    if (obs.size() < kMinLandmarkObservations) continue;
    const std::size_t anchor = first_knot_from(traj, obs.front().t);
    if (anchor >= traj.size()) continue;
    InverseDepthLandmark lm;
    lm.id = tracks[i].id;
    bool ok = false;
    const auto it = seed.points.find(lm.id);
    if (it != seed.points.end()) {
      WorldLandmark w;
      w.point = it->second;
      w.finite = true;
      ok = anchor_world(w, traj, anchor, camera, cfg.landmark.rho_max, &lm);
    }
    if (!ok) {
      FeatureTrajectory sub;
      sub.id = lm.id;
      sub.observations = obs;
      try {
        lm = init_landmark(sub, traj, camera, cfg.landmark);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNotAnchorable) throw;
        continue;
      }
    }
    std::erase_if(obs, [&](const FeatureObservation& o) { return o.t < lm.anchor_time - kTimeEps; });
    if (obs.size() < kMinLandmarkObservations) continue;
    los.push_back({lm, std::move(obs)});
    slot_track.push_back(&ts);
  }

  EstimateResult res;
  res.t_init = seed.t_init;
  std::size_t dropped = 0;
  FactorGraphProblem p = build_problem(traj, seed.biases, imu, los, camera, cfg, nullptr, &dropped);
  res.dropped_measurements = dropped;
  fix_gauge(p, cfg);
  solve(p, slot_track, cfg, res);
  res.windows = 1;
  for (std::size_t k = 0; k < p.num_knots(); ++k) {
    res.knot_times.push_back(p.trajectory.time(k));
    res.knots.push_back(p.trajectory.state(k));
    res.biases.push_back(p.biases[k]);
  }
  for (const InverseDepthLandmark& lm : p.landmarks) {
    const WorldLandmark w = to_world(lm, camera_pose(p.trajectory, lm.anchor_knot, camera));
    if (w.finite) res.points[lm.id] = w.point;
  }
  res.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock0).count();
  return res;
}

}  // namespace gpeio
