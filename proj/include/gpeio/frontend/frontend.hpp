#pragma once

#include <map>
#include <vector>

#include "gpeio/common/types.hpp"
#include "gpeio/frontend/corner_detector.hpp"
#include "gpeio/frontend/registration_table.hpp"
#include "gpeio/frontend/sae.hpp"
#include "gpeio/frontend/tracker.hpp"

namespace gpeio {

struct FrontendConfig {
  int width = 240;
  int height = 180;
  int search_radius = 5;
  double t_min = 1e-3;
  double t_max = 0.05;
  int max_features = 150;
  // Events inside the search radius but farther than this from the track's
  // extrapolated position keep the feature alive without moving it. <= 0
  // disables the gate.
  double track_gate = 2.5;
  double sweep_period = 0.01;
  CornerConfig corner;
};

struct FeatureObservation {
  double t = 0.0;
  Vec2 q = Vec2::Zero();
};

struct FeatureTrajectory {
  int id = -1;
  std::vector<FeatureObservation> observations;
  bool alive = true;
};

enum class FrontendEffect { kNone, kAppended, kNewFeature, kRemoved, kRejected };

struct EventOutcome {
  FrontendEffect effect = FrontendEffect::kNone;
  int id = -1;
};

struct FrontendStats {
  long events = 0;
  long rejected_bounds = 0;
  long rejected_order = 0;
  long gated = 0;
  long created = 0;
  long removed_lazy = 0;
  long removed_sweep = 0;
  long removed_merge = 0;
};

// Event-by-event detection and tracking over a SAE and a registration table.
class Frontend {
 public:
  explicit Frontend(const FrontendConfig& config = {});

  EventOutcome process(const Event& e);

  const FrontendConfig& config() const { return config_; }
  const Sae& sae() const { return sae_; }
  const RegistrationTable& table() const { return table_; }
  const FrontendStats& stats() const { return stats_; }
  // All features ever created, live and finished, by id.
  const std::map<int, FeatureTrajectory>& features() const { return features_; }
  int live_count() const { return static_cast<int>(live_.size()); }
  // Table cell of a live feature.
  Eigen::Vector2i cell(int id) const;

 private:
  struct Live {
    Tracker tracker;
    Eigen::Vector2i cell;
    double last_append;
  };

  void remove(int id);
  void sweep(double t);

  FrontendConfig config_;
  Sae sae_;
  RegistrationTable table_;
  FrontendStats stats_;
  std::map<int, FeatureTrajectory> features_;
  std::map<int, Live> live_;
  int next_id_ = 0;
  double t_last_ = -1e300;
  double next_sweep_ = -1e300;
};

// Runs a whole stream and returns every feature trajectory with at least
// `min_observations` entries.
std::vector<FeatureTrajectory> track_events(const std::vector<Event>& events, const FrontendConfig& config,
                                            std::size_t min_observations = 2, FrontendStats* stats = nullptr);

}  // namespace gpeio
