#include "gpeio/frontend/frontend.hpp"

#include <algorithm>
#include <cmath>

#include "gpeio/common/error.hpp"

namespace gpeio {

Frontend::Frontend(const FrontendConfig& config)
    : config_(config), sae_(config.width, config.height), table_(config.width, config.height) {
  if (config.width <= 0 || config.height <= 0) throw Error(ErrorCode::kInvalidArgument, "frontend needs a sensor size");
  if (!(config.t_min >= 0.0 && config.t_max > config.t_min))
    throw Error(ErrorCode::kInvalidArgument, "frontend needs 0 <= t_min < t_max");
}

Eigen::Vector2i Frontend::cell(int id) const {
  const auto it = live_.find(id);
  if (it == live_.end()) throw Error(ErrorCode::kInvalidArgument, "feature " + std::to_string(id) + " is not live");
  return it->second.cell;
}

void Frontend::remove(int id) {
  const auto it = live_.find(id);
  if (it == live_.end()) return;
  if (table_.get(it->second.cell.x(), it->second.cell.y()) == id) table_.clear(it->second.cell.x(), it->second.cell.y());
  features_[id].alive = false;
  live_.erase(it);
}

void Frontend::sweep(double t) {
  std::vector<int> stale;
  for (const auto& [id, f] : live_)
    if (t - f.last_append >= config_.t_max) stale.push_back(id);
  for (int id : stale) remove(id);
  stats_.removed_sweep += static_cast<long>(stale.size());
}

EventOutcome Frontend::process(const Event& e) {
  if (!sae_.contains(e.x, e.y)) {
    ++stats_.rejected_bounds;
    return {FrontendEffect::kRejected, -1};
  }
  if (e.t < t_last_) {
    ++stats_.rejected_order;
    return {FrontendEffect::kRejected, -1};
  }
  t_last_ = e.t;
  ++stats_.events;
  sae_.update(e);

  if (e.t >= next_sweep_) {
    if (next_sweep_ > -1e300) sweep(e.t);
    next_sweep_ = e.t + config_.sweep_period;
  }

  if (const std::optional<int> hit = table_.search(e.x, e.y, config_.search_radius)) {
    const int id = *hit;
    Live& f = live_.at(id);
    const double gap = e.t - f.last_append;
    if (gap >= config_.t_max) {
      remove(id);
      ++stats_.removed_lazy;
      return {FrontendEffect::kRemoved, id};
    }
    if (config_.track_gate > 0.0 && f.tracker.total_weight() >= 3.0) {
      const Vec2 predicted = f.tracker.position() + f.tracker.velocity() * (e.t - f.tracker.last_time());
      if ((Vec2(e.x, e.y) - predicted).norm() > config_.track_gate) {
        ++stats_.gated;
        return {FrontendEffect::kNone, id};
      }
    }
    f.tracker.update(e);
    if (gap <= config_.t_min) return {FrontendEffect::kNone, id};

    const Vec2 q = f.tracker.position();
    const Eigen::Vector2i to(std::clamp(static_cast<int>(std::lround(q.x())), 0, config_.width - 1),
                             std::clamp(static_cast<int>(std::lround(q.y())), 0, config_.height - 1));
    FeatureTrajectory& traj = features_[id];
    traj.observations.push_back({e.t, q});
    f.last_append = e.t;
    if (to != f.cell) {
      if (table_.get(f.cell.x(), f.cell.y()) == id) table_.clear(f.cell.x(), f.cell.y());
      f.cell = to;
      // Features converging on one spot: keep the longer track.
      while (const std::optional<int> other = table_.search(to.x(), to.y(), config_.search_radius, id)) {
        const std::size_t mine = traj.observations.size();
        const std::size_t theirs = features_[*other].observations.size();
        const int loser = (theirs > mine || (theirs == mine && *other < id)) ? id : *other;
        remove(loser);
        ++stats_.removed_merge;
        if (loser == id) return {FrontendEffect::kRemoved, id};
      }
      table_.set(to.x(), to.y(), id);
    }
    return {FrontendEffect::kAppended, id};
  }

  if (live_count() >= config_.max_features) return {};
  if (!detect_corner(sae_, e.x, e.y, config_.corner).corner) return {};

  const int id = next_id_++;
  live_.emplace(id, Live{Tracker(Vec2(e.x, e.y), e.t, config_.t_max / 3.0), Eigen::Vector2i(e.x, e.y), e.t});
  table_.set(e.x, e.y, id);
  FeatureTrajectory& traj = features_[id];
  traj.id = id;
  traj.observations.push_back({e.t, Vec2(e.x, e.y)});
  ++stats_.created;
  return {FrontendEffect::kNewFeature, id};
}

std::vector<FeatureTrajectory> track_events(const std::vector<Event>& events, const FrontendConfig& config,
                                            std::size_t min_observations, FrontendStats* stats) {
  Frontend fe(config);
  for (const Event& e : events) fe.process(e);
  std::vector<FeatureTrajectory> out;
  for (const auto& [id, f] : fe.features())
    if (f.observations.size() >= min_observations) out.push_back(f);
  if (stats) *stats = fe.stats();
  return out;
}

}  // namespace gpeio
