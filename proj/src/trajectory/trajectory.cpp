#include "gpeio/trajectory/trajectory.hpp"

#include <algorithm>

#include "gpeio/common/error.hpp"

namespace gpeio {

InterpolatedState interpolate(const wnoj::LocalStates& ls, const KinematicState& xk, double tau, double t_k,
                              double t_k1, bool with_jacobians) {
  const wnoj::ScalarGains g = wnoj::scalar_interpolation_gains(tau, t_k, t_k1);
  const Vec18 gamma = wnoj::scalar_blocks_times(g.lambda, ls.gamma_k) + wnoj::scalar_blocks_times(g.psi, ls.gamma_k1);
  const Twist xi = gamma.head<6>();
  const Vec6 xi_d = gamma.segment<6>(6);
  const Vec6 xi_dd = gamma.tail<6>();
  const Mat6 J = se3::right_jacobian(xi);
  const Pose E = Pose::exp(xi);

  InterpolatedState out;
  out.x.T = xk.T * E;
  out.x.w = J * xi_d;
  out.x.dw = J * xi_dd;
  if (!with_jacobians) return out;

  // d gamma(tau) / d x_k and d x_k1. d gamma_k / d x_k = diag(0, I, I).
  Mat18 d_gamma_k = Mat18::Zero();
  d_gamma_k.bottomRightCorner<12, 12>().setIdentity();
  const Mat18 dg_k = wnoj::scalar_blocks_times(g.lambda, d_gamma_k) + wnoj::scalar_blocks_times(g.psi, ls.d_gamma_k1_d_xk);
  const Mat18 dg_k1 = wnoj::scalar_blocks_times(g.psi, ls.d_gamma_k1_d_xk1);

  const Mat6 DJ_d = se3::right_jacobian_derivative(xi, xi_d);
  const Mat6 DJ_dd = se3::right_jacobian_derivative(xi, xi_dd);
  auto chain = [&](const Mat18& dg, Mat18& out_jac) {
    out_jac.middleRows<6>(0) = J * dg.middleRows<6>(0);
    out_jac.middleRows<6>(6) = DJ_d * dg.middleRows<6>(0) + J * dg.middleRows<6>(6);
    out_jac.middleRows<6>(12) = DJ_dd * dg.middleRows<6>(0) + J * dg.middleRows<6>(12);
  };
  chain(dg_k, out.d_xk);
  chain(dg_k1, out.d_xk1);
  out.d_xk.block<6, 6>(0, 0) += se3::adjoint_inv(E);
  return out;
}

void Trajectory::add_knot(double t, const KinematicState& x) {
  if (!std::isfinite(t) || (!knots_.empty() && t <= knots_.back().t))
    throw Error(ErrorCode::kInvalidArgument, "knot times must be finite and strictly increasing");
  knots_.push_back({t, x});
}

void Trajectory::erase_front(std::size_t n) {
  knots_.erase(knots_.begin(), knots_.begin() + std::min(n, knots_.size()));
}

double Trajectory::start_time() const {
  if (knots_.empty()) throw Error(ErrorCode::kNotReady, "empty trajectory");
  return knots_.front().t;
}

double Trajectory::end_time() const {
  if (knots_.empty()) throw Error(ErrorCode::kNotReady, "empty trajectory");
  return knots_.back().t;
}

bool Trajectory::covers(double tau) const {
  return knots_.size() >= 2 && tau >= knots_.front().t && tau <= knots_.back().t;
}

std::size_t Trajectory::bracket(double tau) const {
  if (knots_.size() < 2) throw Error(ErrorCode::kNotReady, "interpolation needs at least two knots");
  if (!(tau >= knots_.front().t && tau <= knots_.back().t))
    throw Error(ErrorCode::kOutOfRange, "query time " + std::to_string(tau) + " outside trajectory span");
  auto it = std::upper_bound(knots_.begin(), knots_.end(), tau, [](double v, const Knot& k) { return v < k.t; });
  const std::size_t idx = static_cast<std::size_t>(it - knots_.begin());
  return std::min(idx - 1, knots_.size() - 2);
}

wnoj::LocalStates Trajectory::local_states(std::size_t k, bool with_jacobians) const {
  if (k + 1 >= knots_.size()) throw Error(ErrorCode::kOutOfRange, "local states need consecutive knots");
  return wnoj::local_states(knots_[k].x, knots_[k + 1].x, with_jacobians);
}

InterpolatedState Trajectory::query(double tau, bool with_jacobians) const {
  const std::size_t k = bracket(tau);
  InterpolatedState out;
  out.k = k;
  if (tau == knots_[k].t || tau == knots_[k + 1].t) {
    const bool first = tau == knots_[k].t;
    out.x = first ? knots_[k].x : knots_[k + 1].x;
    out.d_xk = first ? Mat18(Mat18::Identity()) : Mat18(Mat18::Zero());
    out.d_xk1 = first ? Mat18(Mat18::Zero()) : Mat18(Mat18::Identity());
    return out;
  }
  out = interpolate(local_states(k, with_jacobians), knots_[k].x, tau, knots_[k].t, knots_[k + 1].t, with_jacobians);
  out.k = k;
  return out;
}

}  // namespace gpeio
