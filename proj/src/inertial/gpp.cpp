#include "gpeio/inertial/gpp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "gpeio/common/error.hpp"
#include "gpeio/liegroup/se3.hpp"
#include "gpeio/liegroup/so3.hpp"

namespace gpeio {

namespace {

double kernel(double a, double b, double l) {
  const double d = (a - b) / l;
  return std::exp(-0.5 * d * d);
}

// Fit features are a constant mean followed by the latent kernels.
VecX features(const std::vector<double>& latent_t, double l, double t) {
  VecX f(latent_t.size() + 1);
  f(0) = 1.0;
  for (std::size_t j = 0; j < latent_t.size(); ++j) f(j + 1) = kernel(t, latent_t[j], l);
  return f;
}

VecX feature_integral(const std::vector<double>& latent_t, double l, double t0, double tau) {
  VecX f(latent_t.size() + 1);
  f << tau - t0, gpp_kernel_integral(latent_t, l, t0, tau);
  return f;
}

VecX feature_double_integral(const std::vector<double>& latent_t, double l, double t0, double tau) {
  VecX f(latent_t.size() + 1);
  f << 0.5 * (tau - t0) * (tau - t0), gpp_kernel_double_integral(latent_t, l, t0, tau);
  return f;
}

double median_period(const std::vector<InertialSample>& s) {
  std::vector<double> d;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i].t > s[i - 1].t) d.push_back(s[i].t - s[i - 1].t);
  if (d.empty()) return 0.0;
  std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
  return d[d.size() / 2];
}

Vec3 sample_variance(const Eigen::Matrix3Xd& Y) {
  if (Y.cols() < 2) return Vec3::Ones();
  const Vec3 mean = Y.rowwise().mean();
  Vec3 var = (Y.colwise() - mean).rowwise().squaredNorm() / double(Y.cols() - 1);
  return var.cwiseMax(1e-12);
}

}  // namespace

VecX gpp_kernel_integral(const std::vector<double>& latent_t, double l, double t0, double tau) {
  VecX out(latent_t.size());
  const double c = l * std::sqrt(M_PI / 2.0);
  const double s = 1.0 / (std::sqrt(2.0) * l);
  for (std::size_t j = 0; j < latent_t.size(); ++j)
    out(j) = c * (std::erf((tau - latent_t[j]) * s) - std::erf((t0 - latent_t[j]) * s));
  return out;
}

VecX gpp_kernel_double_integral(const std::vector<double>& latent_t, double l, double t0, double tau) {
  const VecX I1 = gpp_kernel_integral(latent_t, l, t0, tau);
  VecX out(latent_t.size());
  for (std::size_t j = 0; j < latent_t.size(); ++j)
    out(j) = (tau - latent_t[j]) * I1(j) - l * l * (kernel(t0, latent_t[j], l) - kernel(tau, latent_t[j], l));
  return out;
}

Vec3 LatentImuStates::rate(double tau) const { return w_rate * features(t, lengthscale, tau); }

Vec3 LatentImuStates::acc(double tau) const { return w_acc * features(t, lengthscale, tau); }

LatentImuStates gpp_fit_latent(const std::vector<InertialSample>& all, double t0, double t1, const BiasState& bias,
                               const GppConfig& config) {
  if (!(t1 > t0)) throw Error(ErrorCode::kInvalidArgument, "empty GPP window");
  if (config.num_latent < 2) throw Error(ErrorCode::kInvalidArgument, "GPP needs at least two latent states");
  const int N = config.num_latent;

  // Samples inside the window decide the period; the fit also takes a margin.
  std::vector<InertialSample> inside;
  for (const InertialSample& s : all)
    if (s.t >= t0 && s.t <= t1) inside.push_back(s);
  const double period = median_period(inside.size() >= 2 ? inside : all);
  const double margin = config.margin_periods * period + 1e-12;

  LatentImuStates L;
  L.t0 = t0;
  L.t1 = t1;
  for (const InertialSample& s : all)
    if (s.t >= t0 - margin && s.t <= t1 + margin) L.samples.push_back(s);
  const int M = static_cast<int>(L.samples.size());
  if (M < N || inside.empty())
    throw Error(ErrorCode::kMissingData, "GPP window [" + std::to_string(t0) + ", " + std::to_string(t1) + "] has " +
                                             std::to_string(M) + " samples, needs " + std::to_string(N));

  L.lengthscale = config.lengthscale > 0.0 ? config.lengthscale : std::max(10.0 * period, (t1 - t0) / 3.0);
  L.noise_ratio = config.noise_ratio;
  for (int j = 0; j < N; ++j) L.t.push_back(t0 + (t1 - t0) * j / (N - 1));
  const double l = L.lengthscale;

  // Normalized Gram matrix plus noise.
  MatX E(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) E(i, j) = kernel(L.t[i], L.t[j], l);
  const MatX G = E + config.noise_ratio * MatX::Identity(N, N);
  const VecX ev = Eigen::SelfAdjointEigenSolver<MatX>(G).eigenvalues();
  L.condition = ev.maxCoeff() / std::max(ev.minCoeff(), 1e-300);
  if (!(L.condition <= config.max_condition))
    throw Error(ErrorCode::kConditioning,
                "GPP Gram matrix condition " + std::to_string(L.condition) +
                    "; increase the latent noise ratio or shorten the lengthscale (now " + std::to_string(l) + " s)");

  // Least-squares operator mapping sample targets to weights.
  MatX X(M, N + 1);
  for (int i = 0; i < M; ++i) X.row(i) = features(L.t, l, L.samples[i].t).transpose();
  Eigen::JacobiSVD<MatX> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VecX& sv = svd.singularValues();
  VecX sinv = VecX::Zero(sv.size());
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > config.svd_rcond * sv(0)) sinv(i) = 1.0 / sv(i);
  L.pinv = svd.matrixV() * sinv.asDiagonal() * svd.matrixU().transpose();

  std::vector<VecX> I1_at(M);
  for (int i = 0; i < M; ++i) I1_at[i] = feature_integral(L.t, l, t0, L.samples[i].t);

  // Rate fit with fixed-point refinement of the J_r^-1(phi) correction.
  Eigen::Matrix3Xd gyro(3, M);
  for (int i = 0; i < M; ++i) gyro.col(i) = L.samples[i].gyro - bias.bg;
  L.rate_maps.assign(M, Mat3::Identity());
  L.rate_sensitivity = MatX::Identity(3 * M, 3 * M);
  MatX H(M, M);  // phi(t_i) = sum_m H(i, m) target_m
  for (int i = 0; i < M; ++i) H.row(i) = (L.pinv.transpose() * I1_at[i]).transpose();
  Eigen::Matrix3Xd targets = gyro;
  L.w_rate = targets * L.pinv.transpose();
  for (int pass = 0; pass < config.refinement_passes; ++pass) {
    MatX next(3 * M, 3 * M);
    for (int i = 0; i < M; ++i) {
      const Vec3 phi = L.w_rate * I1_at[i];
      L.rate_maps[i] = so3::right_jacobian_inv(phi);
      targets.col(i) = L.rate_maps[i] * gyro.col(i);
      // d(J_r^-1(phi) g)/dphi is the rotation block of the SE(3) series.
      Twist xi = Twist::Zero(), v = Twist::Zero();
      xi.head<3>() = phi;
      v.head<3>() = gyro.col(i);
      const Mat3 D = se3::right_jacobian_inv_derivative(xi, v).topLeftCorner<3, 3>();
      MatX dphi = MatX::Zero(3, 3 * M);
      for (int m = 0; m < M; ++m) dphi += H(i, m) * L.rate_sensitivity.middleRows(3 * m, 3);
      next.middleRows(3 * i, 3) = D * dphi;
      next.block(3 * i, 3 * i, 3, 3) += L.rate_maps[i];
    }
    L.rate_sensitivity = next;
    L.w_rate = targets * L.pinv.transpose();
  }
  L.variance_rate = sample_variance(targets);

  // Accelerations rotated into the window frame, then fit.
  Eigen::Matrix3Xd acc(3, M);
  L.rotations.resize(M);
  for (int i = 0; i < M; ++i) {
    L.rotations[i] = so3::exp(L.w_rate * I1_at[i]);
    acc.col(i) = L.rotations[i] * (L.samples[i].accel - bias.ba);
  }
  L.w_acc = acc * L.pinv.transpose();
  L.variance_acc = sample_variance(acc);

  L.rho.resize(3, N);
  L.alpha.resize(3, N);
  for (int j = 0; j < N; ++j) {
    L.rho.col(j) = L.rate(L.t[j]);
    L.alpha.col(j) = L.acc(L.t[j]);
  }
  return L;
}

GppIncrement gpp_query(const LatentImuStates& L, double tau) {
  if (tau < L.t0) throw Error(ErrorCode::kOutOfRange, "GPP query before window start");
  GppIncrement out;
  if (tau == L.t0) return out;
  const VecX I1 = feature_integral(L.t, L.lengthscale, L.t0, tau);
  const VecX I2 = feature_double_integral(L.t, L.lengthscale, L.t0, tau);
  out.dphi = L.w_rate * I1;
  out.dv = L.w_acc * I1;
  out.dp = L.w_acc * I2;
  return out;
}

ImuIncrements gpp_increments(const std::vector<InertialSample>& samples, double t0, double t1, const BiasState& bias,
                             const ImuNoiseModel& model, const GppConfig& config) {
  const LatentImuStates L = gpp_fit_latent(samples, t0, t1, bias, config);
  const GppIncrement q = gpp_query(L, t1);
  const int M = static_cast<int>(L.samples.size());
  const double l = L.lengthscale;

  // Increments are linear in the targets: coefficient vectors over samples.
  const VecX c = L.pinv.transpose() * feature_integral(L.t, l, t0, t1);
  const VecX qv = L.pinv.transpose() * feature_double_integral(L.t, l, t0, t1);
  MatX H(M, M);  // row i: coefficients of phi(t_i)
  for (int i = 0; i < M; ++i) H.row(i) = (L.pinv.transpose() * feature_integral(L.t, l, t0, L.samples[i].t)).transpose();

  // d(targets)/d(gyro samples) and d(phi_i)/d(gyro samples).
  const MatX& T = L.rate_sensitivity;
  MatX Dg = MatX::Zero(9, 3 * M);
  MatX Da = MatX::Zero(9, 3 * M);
  for (int i = 0; i < M; ++i) {
    Dg.topRows(3) += c(i) * T.middleRows(3 * i, 3);
    const Vec3 phi_i = L.w_rate * feature_integral(L.t, l, t0, L.samples[i].t);
    const Mat3 S = -L.rotations[i] * so3::hat(L.samples[i].accel - bias.ba) * so3::right_jacobian(phi_i);
    MatX dphi = MatX::Zero(3, 3 * M);
    for (int m = 0; m < M; ++m)
      if (H(i, m) != 0.0) dphi += H(i, m) * T.middleRows(3 * m, 3);
    Dg.middleRows(3, 3) += c(i) * S * dphi;
    Dg.bottomRows(3) += qv(i) * S * dphi;
    Da.block(3, 3 * i, 3, 3) = c(i) * L.rotations[i];
    Da.block(6, 3 * i, 3, 3) = qv(i) * L.rotations[i];
  }

  ImuIncrements inc;
  inc.t0 = t0;
  inc.t1 = t1;
  inc.bias_lin = bias;
  inc.dR = so3::exp(q.dphi);
  inc.dv = q.dv;
  inc.dp = q.dp;
  inc.covariance.setZero();
  for (int m = 0; m < M; ++m) {
    const auto Gm = Dg.middleCols(3 * m, 3);
    const auto Am = Da.middleCols(3 * m, 3);
    inc.covariance += Gm * model.Q_g * Gm.transpose() + Am * model.Q_a * Am.transpose();
    inc.d_bias.leftCols<3>() -= Gm;
    inc.d_bias.rightCols<3>() -= Am;
  }
  inc.covariance = 0.5 * (inc.covariance + inc.covariance.transpose());
  // Rotation rows as a right perturbation of exp(dphi).
  inc.d_bias.topRows<3>() = so3::right_jacobian(q.dphi) * inc.d_bias.topRows<3>();
  return inc;
}

}  // namespace gpeio
