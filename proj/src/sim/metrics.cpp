#include "gpeio/sim/metrics.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "gpeio/common/error.hpp"

namespace gpeio {

Alignment umeyama(const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
  const std::size_t n = from.size();
  Vec3 mf = Vec3::Zero(), mt = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    mf += from[i];
    mt += to[i];
  }
  mf /= double(n);
  mt /= double(n);
  Mat3 S = Mat3::Zero();
  for (std::size_t i = 0; i < n; ++i) S += (to[i] - mt) * (from[i] - mf).transpose();
  Eigen::JacobiSVD<Mat3> svd(S, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 D = Mat3::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) D(2, 2) = -1.0;
  Alignment a;
  a.R = svd.matrixU() * D * svd.matrixV().transpose();
  a.t = mt - a.R * mf;
  return a;
}

Pose interpolate_pose(const std::vector<StampedPose>& traj, double t) {
  const auto it = std::lower_bound(traj.begin(), traj.end(), t, [](const StampedPose& p, double v) { return p.t < v; });
  if (it == traj.end()) return traj.back().T;
  if (it == traj.begin() || it->t == t) return it->T;
  const StampedPose& a = *(it - 1);
  const StampedPose& b = *it;
  const double s = (t - a.t) / (b.t - a.t);
  const Eigen::Quaterniond q = a.T.rotation().quaternion().slerp(s, b.T.rotation().quaternion());
  return Pose(Rotation::from_quaternion(q), (1.0 - s) * a.T.translation() + s * b.T.translation());
}

void relative_pose_error(const std::vector<StampedPose>& est, const std::vector<StampedPose>& ref, double delta,
                         double* trans, double* rot) {
  double st = 0.0, sr = 0.0;
  std::size_t count = 0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    while (j < est.size() && est[j].t < est[i].t + delta - 1e-9) ++j;
    if (j >= est.size()) break;
    const double d = est[j].t - est[i].t;
    if (d > 1.5 * delta) continue;
    const Pose de = est[i].T.inverse() * est[j].T;
    const Pose dr = ref[i].T.inverse() * ref[j].T;
    const Pose E = dr.inverse() * de;
    st += std::pow(E.translation().norm() / d, 2);
    sr += std::pow(E.rotation().log().norm() / d, 2);
    ++count;
  }
  *trans = count ? std::sqrt(st / count) : 0.0;
  *rot = count ? std::sqrt(sr / count) : 0.0;
}

EvalReport evaluate(const std::vector<StampedPose>& estimate, const std::vector<StampedPose>& truth) {
  if (truth.size() < 2) throw Error(ErrorCode::kInsufficientOverlap, "truth has fewer than two poses");
  std::vector<StampedPose> est, ref;
  for (const StampedPose& p : estimate) {
    if (p.t < truth.front().t - 1e-9 || p.t > truth.back().t + 1e-9) continue;
    est.push_back(p);
    ref.push_back({p.t, interpolate_pose(truth, p.t)});
  }
  if (est.size() < 2)
    throw Error(ErrorCode::kInsufficientOverlap,
                "only " + std::to_string(est.size()) + " estimate poses overlap the truth span");

  std::vector<Vec3> pe, pr;
  for (std::size_t i = 0; i < est.size(); ++i) {
    pe.push_back(est[i].T.translation());
    pr.push_back(ref[i].T.translation());
  }
  const Alignment a = umeyama(pe, pr);
  EvalReport r;
  r.matched = est.size();
  double sq = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) sq += (a.R * pe[i] + a.t - pr[i]).squaredNorm();
  r.ate_rmse = std::sqrt(sq / est.size());
  relative_pose_error(est, ref, 0.1, &r.rpe_trans_short, &r.rpe_rot_short);
  relative_pose_error(est, ref, 1.0, &r.rpe_trans_long, &r.rpe_rot_long);
  const double t0 = est.front().t, t1 = est.back().t;
  const StampedPose* prev = nullptr;
  for (const StampedPose& p : truth) {
    if (p.t < t0 || p.t > t1) continue;
    if (prev) r.path_length += (p.T.translation() - prev->T.translation()).norm();
    prev = &p;
  }
  return r;
}

}  // namespace gpeio
