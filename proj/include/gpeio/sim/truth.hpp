#pragma once

#include <memory>
#include <vector>

#include "gpeio/sim/scenario.hpp"
#include "gpeio/trajectory/kinematic_state.hpp"

namespace gpeio {

struct TruthState {
  double t = 0.0;
  KinematicState x;  // pose, body twist [omega; nu], its time derivative
  Vec3 accel_world = Vec3::Zero();  // r''
};

// Analytic ground-truth motion.
class TruthModel {
 public:
  virtual ~TruthModel() = default;
  virtual TruthState at(double t) const = 0;
};

std::unique_ptr<TruthModel> make_truth(const ScenarioSpec& spec);

// ZYX Euler angles (yaw, pitch, roll) to a rotation, and the body rate and
// its derivative from the angles and their first two derivatives.
Mat3 euler_to_rotation(const Vec3& ypr);
void euler_body_rate(const Vec3& ypr, const Vec3& dypr, const Vec3& ddypr, Vec3* omega, Vec3* domega);

// Dense samples at `rate` Hz over [0, duration].
std::vector<TruthState> gen_truth(const ScenarioSpec& spec, double rate = 1000.0);

}  // namespace gpeio
