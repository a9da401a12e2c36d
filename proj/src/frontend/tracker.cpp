#include "gpeio/frontend/tracker.hpp"

#include <cmath>

namespace gpeio {

Tracker::Tracker(const Vec2& start, double t, double decay) : decay_(decay), t_last_(t) {
  w_ = 1.0;
  sq_ = start;
}

void Tracker::advance(double t) {
  const double dt = t - t_last_;
  if (dt <= 0.0) return;
  const double a = std::exp(-dt / decay_);
  // Shift the time origin to t, then decay.
  stt_ = a * (stt_ - 2.0 * dt * st_ + dt * dt * w_);
  stq_ = a * (stq_ - dt * sq_);
  st_ = a * (st_ - dt * w_);
  sq_ = a * sq_;
  w_ = a * w_;
  t_last_ = t;
}

void Tracker::update(const Event& e) {
  advance(e.t);
  w_ += 1.0;
  sq_ += Vec2(e.x, e.y);
}

Vec2 Tracker::centroid() const { return sq_ / w_; }

double Tracker::time_variance_times_weight() const { return stt_ - st_ * st_ / w_; }

Vec2 Tracker::velocity() const {
  // Needs a few events spread over at least a millisecond.
  const double var_w = time_variance_times_weight();
  if (w_ < 3.0 || var_w < 1e-6 * w_) return Vec2::Zero();
  return (stq_ - st_ * sq_ / w_) / var_w;
}

Vec2 Tracker::position() const {
  // Intercept of the weighted fit at s = 0 (the newest event).
  return centroid() - velocity() * (st_ / w_);
}

}  // namespace gpeio
