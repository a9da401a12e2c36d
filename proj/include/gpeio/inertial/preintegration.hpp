#pragma once

#include <vector>

#include "gpeio/inertial/increments.hpp"

namespace gpeio {

// Midpoint on-manifold preintegration over [t0, t1] with first-order
// covariance propagation and bias Jacobians. Measurements are linearly
// interpolated at the interval ends. Throws kMissingData for an empty interval.
ImuIncrements preintegrate_discrete(const std::vector<InertialSample>& samples, double t0, double t1,
                                    const BiasState& bias, const ImuNoiseModel& model);

}  // namespace gpeio
