#pragma once

#include <cstddef>
#include <vector>

#include "gpeio/gp/wnoj.hpp"
#include "gpeio/trajectory/kinematic_state.hpp"

namespace gpeio {

struct Knot {
  double t;
  KinematicState x;
};

// State at an arbitrary time together with d x(tau) / d x_k and d x(tau) / d x_{k+1}
// in the stacked perturbation convention of KinematicState.
struct InterpolatedState {
  KinematicState x;
  std::size_t k = 0;
  Mat18 d_xk;
  Mat18 d_xk1;
};

// Interpolates inside one knot pair given its precomputed local states.
InterpolatedState interpolate(const wnoj::LocalStates& ls, const KinematicState& xk, double tau, double t_k,
                              double t_k1, bool with_jacobians = true);

// Continuous-time trajectory over strictly increasing knots. Const member
// functions may be called concurrently; mutation needs exclusive access.
class Trajectory {
 public:
  explicit Trajectory(WnojModel model = {}) : model_(model) {}

  // Throws kInvalidArgument unless t is later than the last knot.
  void add_knot(double t, const KinematicState& x);
  void erase_front(std::size_t n);

  std::size_t size() const { return knots_.size(); }
  bool empty() const { return knots_.empty(); }
  double time(std::size_t k) const { return knots_.at(k).t; }
  const KinematicState& state(std::size_t k) const { return knots_.at(k).x; }
  KinematicState& state(std::size_t k) { return knots_.at(k).x; }
  const std::vector<Knot>& knots() const { return knots_; }
  const WnojModel& model() const { return model_; }
  double start_time() const;
  double end_time() const;
  bool covers(double tau) const;

  // Index k of the pair with t_k <= tau <= t_{k+1}. Throws kNotReady with fewer
  // than two knots and kOutOfRange outside the span.
  std::size_t bracket(double tau) const;
  wnoj::LocalStates local_states(std::size_t k, bool with_jacobians = true) const;
  InterpolatedState query(double tau, bool with_jacobians = true) const;

 private:
  std::vector<Knot> knots_;
  WnojModel model_;
};

}  // namespace gpeio
