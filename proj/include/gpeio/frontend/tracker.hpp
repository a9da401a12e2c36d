#pragma once

#include "gpeio/common/types.hpp"
#include "gpeio/frontend/event.hpp"

namespace gpeio {

// Exponentially weighted event statistics of one feature. Every event has
// unit weight and weights decay as exp(-age / decay). Times are kept relative
// to the newest event.
class Tracker {
 public:
  Tracker(const Vec2& start, double t, double decay);

  void update(const Event& e);

  // Weighted centroid of the events fed so far.
  Vec2 centroid() const;
  // Slope of the weighted linear fit of event position against time, px/s.
  // Zero until the events span enough time.
  Vec2 velocity() const;
  // The linear fit evaluated at the newest event time. The centroid lags a
  // moving feature by velocity x mean event age; this does not.
  Vec2 position() const;

  double last_time() const { return t_last_; }
  double total_weight() const { return w_; }

 private:
  void advance(double t);
  double time_variance_times_weight() const;

  double decay_;
  double t_last_;
  double w_ = 0.0;   // sum of weights
  double st_ = 0.0;  // sum of w * s
  double stt_ = 0.0; // sum of w * s^2
  Vec2 sq_ = Vec2::Zero();   // sum of w * q
  Vec2 stq_ = Vec2::Zero();  // sum of w * s * q
};

}  // namespace gpeio
