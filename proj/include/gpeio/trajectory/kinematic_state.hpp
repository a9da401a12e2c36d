#pragma once

#include "gpeio/common/types.hpp"
#include "gpeio/liegroup/se3.hpp"

namespace gpeio {

// Pose, body-frame generalized velocity varpi = [omega; nu] and its time derivative.
// Perturbations are stacked [eps (6); d varpi (6); d varpi_dot (6)] with
// T = T_bar exp(eps^).
struct KinematicState {
  Pose T;
  Twist w = Twist::Zero();
  Vec6 dw = Vec6::Zero();

  KinematicState retract(const Vec18& delta) const {
    return KinematicState{T.retract(delta.head<6>()), w + delta.segment<6>(6), dw + delta.tail<6>()};
  }
};

}  // namespace gpeio
