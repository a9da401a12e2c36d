#pragma once

#include <Eigen/Core>

namespace gpeio {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Vec18 = Eigen::Matrix<double, 18, 1>;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using Mat18 = Eigen::Matrix<double, 18, 18>;
using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;

// Twists are ordered (rotation, translation) everywhere in this library:
// xi = [phi; rho], varpi = [omega; nu]. Many SLAM codes use the opposite order.
using Twist = Vec6;

}  // namespace gpeio
