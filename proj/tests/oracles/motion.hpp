#pragma once

// Analytic body-frame IMU signals and an RK4 integrator for the relative
// motion they produce. Independent of the library's integration code.

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <functional>

#include "oracles/series.hpp"

namespace oracle {

struct Signal {
  std::function<Eigen::Vector3d(double)> gyro;   // body angular rate
  std::function<Eigen::Vector3d(double)> accel;  // body specific force
};

inline Signal tumbling_signal() {
  return {[](double t) { return Eigen::Vector3d(0.2 + 0.3 * std::sin(2 * t), 0.5 * std::cos(3 * t), 0.4 + 0.2 * std::sin(t)); },
          [](double t) {
            return Eigen::Vector3d(1.0 + 0.5 * std::sin(4 * t), -0.3 + 0.2 * std::cos(2 * t), 9.81 + 0.3 * std::sin(3 * t));
          }};
}

struct Increments {
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
};

// Integrates dR = R w^, dv = R f, dp = v from t0 to t1 with fixed RK4 steps.
inline Increments rk4_increments(const Signal& s, double t0, double t1, double h = 1e-3) {
  using V = Eigen::Matrix<double, 15, 1>;
  auto pack = [](const Increments& x) {
    V y;
    y << Eigen::Map<const Eigen::Matrix<double, 9, 1>>(x.R.data()), x.v, x.p;
    return y;
  };
  auto deriv = [&](double t, const V& y) {
    const Eigen::Matrix3d R = Eigen::Map<const Eigen::Matrix3d>(y.data());
    const Eigen::Vector3d v = y.segment<3>(9);
    const Eigen::Matrix3d dR = R * skew(s.gyro(t));
    V d;
    d << Eigen::Map<const Eigen::Matrix<double, 9, 1>>(dR.data()), R * s.accel(t), v;
    return d;
  };
  V y = pack(Increments{});
  const int n = static_cast<int>(std::round((t1 - t0) / h));
  const double dt = (t1 - t0) / n;
  for (int i = 0; i < n; ++i) {
    const double t = t0 + i * dt;
    const V k1 = deriv(t, y);
    const V k2 = deriv(t + dt / 2, y + dt / 2 * k1);
    const V k3 = deriv(t + dt / 2, y + dt / 2 * k2);
    const V k4 = deriv(t + dt, y + dt * k3);
    y += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  Increments out;
  out.R = Eigen::Map<const Eigen::Matrix3d>(y.data());
  Eigen::Quaterniond q(out.R);
  out.R = q.normalized().toRotationMatrix();
  out.v = y.segment<3>(9);
  out.p = y.segment<3>(12);
  return out;
}

inline Eigen::Vector3d rotation_log(const Eigen::Matrix3d& R) {
  const Eigen::AngleAxisd aa(R);
  return aa.angle() * aa.axis();
}

}  // namespace oracle
