#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "gpeio/common/error.hpp"
#include "gpeio/inertial/gpif.hpp"
#include "gpeio/inertial/gpp.hpp"
#include "gpeio/inertial/preintegration.hpp"
#include "oracles/motion.hpp"
#include "oracles/quadrature.hpp"
#include "oracles/states.hpp"

using namespace gpeio;

namespace {

std::vector<InertialSample> sample_signal(const oracle::Signal& s, double t0, double t1, double rate) {
  std::vector<InertialSample> out;
  const int n = static_cast<int>(std::round((t1 - t0) * rate));
  for (int i = 0; i <= n; ++i) {
    const double t = t0 + i / rate;
    out.push_back({t, s.gyro(t), s.accel(t)});
  }
  return out;
}

// World-frame knots consistent with a signal: integrate from a known start.
KinematicState integrated_state(const oracle::Signal& s, const KinematicState& x0, double t0, double t,
                                const Vec3& g) {
  const oracle::Increments inc = oracle::rk4_increments(s, t0, t, 1e-4);
  const Mat3& C0 = x0.T.C();
  const Vec3 v0 = C0 * x0.w.tail<3>();
  const double dt = t - t0;
  KinematicState x;
  const Mat3 C = C0 * inc.R;
  const Vec3 v = v0 + g * dt + C0 * inc.v;
  const Vec3 r = x0.T.translation() + v0 * dt + 0.5 * g * dt * dt + C0 * inc.p;
  x.T = Pose(Rotation::from_approximate(C), r);
  x.w << s.gyro(t), C.transpose() * v;
  return x;
}

KinematicState stationary_state() {
  KinematicState x;
  x.T = Pose::exp((Twist() << 0.3, -0.2, 0.9, 1.0, 2.0, 0.5).finished());
  return x;
}

// First-order bias correction error against a full re-run, for a bias step
// scaled by s. Correct Jacobians leave an O(s^2) remainder.
template <typename Fn>
double bias_correction_error(Fn run, const ImuIncrements& inc, double s) {
  const BiasState db{s * Vec3(1e-3, -2e-3, 1e-3), s * Vec3(0.02, 0.01, -0.03)};
  const ImuIncrements re = run(db);
  return oracle::rotation_log(re.dR.transpose() * inc.corrected_dR(db)).norm() + (re.dv - inc.corrected_dv(db)).norm() +
         (re.dp - inc.corrected_dp(db)).norm();
}

}  // namespace

TEST(Gpif, StationaryBodyHasZeroResidual) {
  ImuNoiseModel model;
  Trajectory traj;
  const KinematicState x = stationary_state();
  traj.add_knot(0.0, x);
  traj.add_knot(0.05, x);
  const InertialSample s{0.02, Vec3::Zero(), -x.T.C().transpose() * model.gravity};
  const GpifResidual r = gpif_residual(traj, {BiasState{}, BiasState{}}, s, model);
  EXPECT_LT(r.residual.norm(), 1e-12);
}

TEST(Gpif, ConstantTwistIdealImu) {
  ImuNoiseModel model;
  const Twist w = (Twist() << 0.3, -0.5, 0.8, 1.2, 0.4, -0.2).finished();
  KinematicState a = stationary_state();
  a.w = w;
  KinematicState b = a;
  b.T = a.T * Pose::exp(0.05 * w);
  Trajectory traj;
  traj.add_knot(0.0, a);
  traj.add_knot(0.05, b);
  BiasState bias{Vec3(0.01, -0.02, 0.005), Vec3(0.1, 0.0, -0.05)};
  for (double t : {0.0, 0.013, 0.031, 0.05}) {
    const Mat3 C = (a.T * Pose::exp(t * w)).C();
    const InertialSample s = ideal_sample(t, C, w, Vec6::Zero(), model.gravity, bias);
    EXPECT_LT(gpif_residual(traj, {bias, bias}, s, model).residual.norm(), 1e-9);
  }
}

TEST(Gpif, JacobiansMatchFiniteDifferences) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> frac(0.05, 0.95);
  ImuNoiseModel model;
  for (int i = 0; i < 100; ++i) {
    const KinematicState a = oracle::random_state(rng);
    const KinematicState b = oracle::random_successor(rng, a, 0.3);
    const BiasState ba = BiasState::from_stacked(oracle::random_vector<6>(rng, 0.1));
    const BiasState bb = BiasState::from_stacked(oracle::random_vector<6>(rng, 0.1));
    const InertialSample s{0.05 * frac(rng), oracle::random_vector<3>(rng, 1.0), oracle::random_vector<3>(rng, 10.0)};
    auto eval = [&](const KinematicState& xa, const KinematicState& xb, const BiasState& pa, const BiasState& pb) {
      Trajectory t;
      t.add_knot(0.0, xa);
      t.add_knot(0.05, xb);
      return gpif_residual(t, {pa, pb}, s, model);
    };
    const GpifResidual r = eval(a, b, ba, bb);
    auto fa = [&](const VecX& d) -> VecX { return eval(a.retract(d), b, ba, bb).residual; };
    auto fb = [&](const VecX& d) -> VecX { return eval(a, b.retract(d), ba, bb).residual; };
    auto fba = [&](const VecX& d) -> VecX {
      return eval(a, b, BiasState::from_stacked(ba.stacked() + d), bb).residual;
    };
    auto fbb = [&](const VecX& d) -> VecX {
      return eval(a, b, ba, BiasState::from_stacked(bb.stacked() + d)).residual;
    };
    EXPECT_LT(oracle::relative_error(r.d_xk, oracle::numeric_jacobian(fa, Vec18::Zero())), 1e-4);
    EXPECT_LT(oracle::relative_error(r.d_xk1, oracle::numeric_jacobian(fb, Vec18::Zero())), 1e-4);
    EXPECT_LT(oracle::relative_error(r.d_bk, oracle::numeric_jacobian(fba, Vec6::Zero())), 1e-4);
    EXPECT_LT(oracle::relative_error(r.d_bk1, oracle::numeric_jacobian(fbb, Vec6::Zero())), 1e-4);
  }
}

TEST(Gpif, WeightingIsMeasurementCovariance) {
  ImuNoiseModel model = ImuNoiseModel::isotropic(0.01, 0.1, 1e-4, 1e-3);
  const GpifResidual r = gpif_residual(InterpolatedState{KinematicState{}, 0, Mat18::Identity(), Mat18::Zero()}, 0.0,
                                       {}, {}, InertialSample{0.0, Vec3::Zero(), Vec3::Zero()}, model);
  Mat6 info = Mat6::Zero();
  info.diagonal() << Vec3::Constant(1e4), Vec3::Constant(1e2);
  EXPECT_LT((r.sqrt_information.transpose() * r.sqrt_information - info).norm(), 1e-8);
}

TEST(BiasPrior, EqualBiasesGiveZero) {
  const BiasState b{Vec3(0.1, 0.2, 0.3), Vec3(-0.1, 0.0, 0.4)};
  EXPECT_EQ(bias_prior_residual(b, b, 0.05, ImuNoiseModel{}).residual, Vec6::Zero());
}

TEST(BiasPrior, DifferenceAndJacobians) {
  BiasState a, b;
  b.bg.x() = 0.01;
  const BiasPriorResidual r = bias_prior_residual(a, b, 0.05, ImuNoiseModel{});
  EXPECT_EQ(r.residual, (Vec6() << 0.01, 0, 0, 0, 0, 0).finished());
  EXPECT_EQ(r.d_bk, -Mat6::Identity());
  EXPECT_EQ(r.d_bk1, Mat6::Identity());
}

TEST(BiasPrior, DoublingWalkHalvesInformation) {
  ImuNoiseModel m1, m2;
  m2.Q_bg = 2.0 * m1.Q_bg;
  const Mat6 U1 = bias_prior_residual({}, {}, 0.05, m1).sqrt_information;
  const Mat6 U2 = bias_prior_residual({}, {}, 0.05, m2).sqrt_information;
  const Mat6 I1 = U1.transpose() * U1, I2 = U2.transpose() * U2;
  EXPECT_NEAR(I2(0, 0) / I1(0, 0), 0.5, 1e-12);
  EXPECT_NEAR(I2(4, 4) / I1(4, 4), 1.0, 1e-12);
}

TEST(Preintegration, ConstantAccelerationNoRotation) {
  const Vec3 a(0.5, -1.0, 2.0);
  std::vector<InertialSample> s;
  for (int i = 0; i <= 20; ++i) s.push_back({0.005 * i, Vec3::Zero(), a});
  const ImuIncrements inc = preintegrate_discrete(s, 0.0, 0.1, {}, ImuNoiseModel{});
  EXPECT_LT((inc.dv - a * 0.1).norm(), 1e-14);
  EXPECT_LT((inc.dp - 0.5 * a * 0.01).norm(), 1e-14);
  EXPECT_LT((inc.dR - Mat3::Identity()).norm(), 1e-15);
}

TEST(Preintegration, ConstantRateAboutZ) {
  std::vector<InertialSample> s;
  for (int i = 0; i <= 20; ++i) s.push_back({0.005 * i, Vec3(0, 0, 1.3), Vec3::Zero()});
  const ImuIncrements inc = preintegrate_discrete(s, 0.0, 0.1, {}, ImuNoiseModel{});
  EXPECT_LT((inc.dR - oracle::expm(Mat3(oracle::skew(Vec3(0, 0, 0.13))))).norm(), 1e-14);
}

TEST(Preintegration, MatchesRk4Oracle) {
  const oracle::Signal sig = oracle::tumbling_signal();
  const std::vector<InertialSample> s = sample_signal(sig, 0.0, 1.0, 200.0);
  const ImuIncrements inc = preintegrate_discrete(s, 0.2, 0.45, {}, ImuNoiseModel{});
  const oracle::Increments ref = oracle::rk4_increments(sig, 0.2, 0.45);
  EXPECT_LT(oracle::rotation_log(ref.R.transpose() * inc.dR).norm(), 1e-4);
  EXPECT_LT((ref.v - inc.dv).norm(), 1e-4);
  EXPECT_LT((ref.p - inc.dp).norm(), 1e-4);
}

TEST(Preintegration, EmptyIntervalIsMissingData) {
  std::vector<InertialSample> s{{0.0, Vec3::Zero(), Vec3::Zero()}, {0.1, Vec3::Zero(), Vec3::Zero()}};
  try {
    preintegrate_discrete(s, 0.02, 0.08, {}, ImuNoiseModel{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingData);
  }
}

TEST(Preintegration, BiasJacobiansAreFirstOrderExact) {
  const oracle::Signal sig = oracle::tumbling_signal();
  const std::vector<InertialSample> s = sample_signal(sig, 0.0, 1.0, 200.0);
  auto run = [&](const BiasState& b) { return preintegrate_discrete(s, 0.1, 0.15, b, ImuNoiseModel{}); };
  const ImuIncrements inc = run({});
  const double e1 = bias_correction_error(run, inc, 1.0);
  const double e01 = bias_correction_error(run, inc, 0.1);
  EXPECT_LT(e1, 1e-5);
  EXPECT_LT(e01, 0.02 * e1);
}

TEST(GppIntegrals, MatchAdaptiveQuadrature) {
  const std::vector<double> latent{0.0, 0.013, 0.027, 0.05};
  const double l = 0.05, t0 = -0.004;
  for (double tau : {0.0, 0.02, 0.05, 0.09}) {
    const VecX I1 = gpp_kernel_integral(latent, l, t0, tau);
    const VecX I2 = gpp_kernel_double_integral(latent, l, t0, tau);
    for (std::size_t j = 0; j < latent.size(); ++j) {
      auto k = [&](double s) { return std::exp(-0.5 * std::pow((s - latent[j]) / l, 2)); };
      const double q1 = oracle::integrate(k, t0, tau, 1e-13);
      const double q2 = oracle::integrate([&](double s) { return (tau - s) * k(s); }, t0, tau, 1e-13);
      EXPECT_NEAR(I1(j), q1, 1e-8 * std::abs(q1));
      EXPECT_NEAR(I2(j), q2, 1e-8 * std::abs(q2));
    }
  }
}

TEST(GppFit, ConstantRateReproduced) {
  std::vector<InertialSample> s;
  const Vec3 w(0.4, -0.9, 1.1);
  for (int i = 0; i <= 40; ++i) s.push_back({0.005 * i, w, Vec3(0, 0, 9.81)});
  const LatentImuStates L = gpp_fit_latent(s, 0.05, 0.1, {}, GppConfig{});
  for (const InertialSample& x : L.samples) EXPECT_LT((L.rate(x.t) - w).norm(), 1e-6);
}

TEST(GppFit, ZeroMotionGivesConstantAcceleration) {
  const KinematicState x = stationary_state();
  const Vec3 f = -x.T.C().transpose() * Vec3(0, 0, -9.81);
  std::vector<InertialSample> s;
  for (int i = 0; i <= 40; ++i) s.push_back({0.005 * i, Vec3::Zero(), f});
  const LatentImuStates L = gpp_fit_latent(s, 0.05, 0.1, {}, GppConfig{});
  for (const InertialSample& p : L.samples) EXPECT_LT((L.acc(p.t) - f).norm(), 1e-6);
}

TEST(GppFit, HeldOutPredictionWithinNoise) {
  const oracle::Signal sig = oracle::tumbling_signal();
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 1.0);
  const double sg = 0.005;
  std::vector<InertialSample> all = sample_signal(sig, 0.0, 1.0, 200.0);
  for (InertialSample& s : all) s.gyro += sg * Vec3(n(rng), n(rng), n(rng));
  double sq = 0.0;
  int count = 0;
  for (int w = 0; w < 15; ++w) {
    const double t0 = 0.1 + 0.05 * w;
    std::vector<InertialSample> fit;
    std::vector<InertialSample> held;
    for (std::size_t i = 0; i < all.size(); ++i) (i % 4 == 1 ? held : fit).push_back(all[i]);
    const LatentImuStates L = gpp_fit_latent(fit, t0, t0 + 0.05, {}, GppConfig{});
    for (const InertialSample& h : held) {
      if (h.t < t0 || h.t > t0 + 0.05) continue;
      const Vec3 phi = gpp_query(L, h.t).dphi;
      const Vec3 pred = so3::right_jacobian(phi) * L.rate(h.t);
      sq += (pred - h.gyro).squaredNorm() / 3.0;
      ++count;
    }
  }
  EXPECT_LT(std::sqrt(sq / count), 3.0 * sg);
}

TEST(GppFit, IllConditionedGramRaises) {
  std::vector<InertialSample> s;
  for (int i = 0; i <= 40; ++i) s.push_back({0.005 * i, Vec3::Zero(), Vec3::Zero()});
  GppConfig cfg;
  cfg.noise_ratio = 0.0;
  try {
    gpp_fit_latent(s, 0.05, 0.1, {}, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConditioning);
    EXPECT_NE(std::string(e.what()).find("lengthscale"), std::string::npos);
  }
}

TEST(GppFit, TooFewSamples) {
  std::vector<InertialSample> s;
  for (int i = 0; i <= 4; ++i) s.push_back({0.0125 * i, Vec3::Zero(), Vec3::Zero()});
  EXPECT_THROW(gpp_fit_latent(s, 0.0, 0.05, {}, GppConfig{}), Error);
}

TEST(GppQuery, StartOfWindowIsZeroAndEarlierIsOutOfRange) {
  std::vector<InertialSample> s;
  for (int i = 0; i <= 40; ++i) s.push_back({0.005 * i, Vec3(0.1, 0.2, 0.3), Vec3(1, 2, 3)});
  const LatentImuStates L = gpp_fit_latent(s, 0.05, 0.1, {}, GppConfig{});
  const GppIncrement z = gpp_query(L, 0.05);
  EXPECT_EQ(z.dphi, Vec3::Zero());
  EXPECT_EQ(z.dv, Vec3::Zero());
  EXPECT_EQ(z.dp, Vec3::Zero());
  try {
    gpp_query(L, 0.049);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfRange);
  }
}

TEST(GppQuery, ConstantAccelerationHalfSecondMatchesRk4) {
  const oracle::Signal sig{[](double) { return Vec3::Zero(); }, [](double) { return Vec3(0.8, -0.4, 10.3); }};
  const std::vector<InertialSample> s = sample_signal(sig, 0.0, 1.0, 200.0);
  const ImuIncrements inc = gpp_increments(s, 0.25, 0.75, {}, ImuNoiseModel{});
  const oracle::Increments ref = oracle::rk4_increments(sig, 0.25, 0.75);
  EXPECT_LT(oracle::rotation_log(ref.R.transpose() * inc.dR).norm(), 1e-3);
  EXPECT_LT((ref.v - inc.dv).norm(), 1e-3);
  EXPECT_LT((ref.p - inc.dp).norm(), 1e-3);
}

TEST(GppQuery, TumblingHalfSecondMatchesRk4) {
  const oracle::Signal sig = oracle::tumbling_signal();
  const std::vector<InertialSample> s = sample_signal(sig, 0.0, 1.0, 200.0);
  const ImuIncrements inc = gpp_increments(s, 0.25, 0.75, {}, ImuNoiseModel{});
  const oracle::Increments ref = oracle::rk4_increments(sig, 0.25, 0.75);
  EXPECT_LT(oracle::rotation_log(ref.R.transpose() * inc.dR).norm(), 1e-3);
  EXPECT_LT((ref.v - inc.dv).norm(), 1e-3);
  EXPECT_LT((ref.p - inc.dp).norm(), 1e-3);
}

TEST(GppIncrements, BiasJacobiansAreFirstOrderExact) {
  const oracle::Signal sig = oracle::tumbling_signal();
  const std::vector<InertialSample> s = sample_signal(sig, 0.0, 1.0, 200.0);
  auto run = [&](const BiasState& b) { return gpp_increments(s, 0.1, 0.15, b, ImuNoiseModel{}); };
  const ImuIncrements inc = run({});
  const double e1 = bias_correction_error(run, inc, 1.0);
  const double e01 = bias_correction_error(run, inc, 0.1);
  EXPECT_LT(e1, 1e-5);
  EXPECT_LT(e01, 0.02 * e1);
}

TEST(IncrementResidual, IdentityMotionZeroIncrements) {
  ImuIncrements inc;
  inc.t0 = 0.0;
  inc.t1 = 0.05;
  const KinematicState x;
  EXPECT_LT(increment_residual(x, x, {}, inc, Vec3::Zero()).residual.norm(), 1e-15);
}

TEST(IncrementResidual, ZeroOnKnotsFromSameImu) {
  const oracle::Signal sig = oracle::tumbling_signal();
  const Vec3 g(0, 0, -9.81);
  const std::vector<InertialSample> s = sample_signal(sig, 0.0, 1.0, 200.0);
  KinematicState x0 = stationary_state();
  x0.w << sig.gyro(0.3), 0.5, -0.2, 0.1;
  for (double t0 : {0.3, 0.5}) {
    const KinematicState xa = integrated_state(sig, x0, 0.3, t0, g);
    const KinematicState xb = integrated_state(sig, x0, 0.3, t0 + 0.05, g);
    const ImuIncrements gpp = gpp_increments(s, t0, t0 + 0.05, {}, ImuNoiseModel{});
    const ImuIncrements pre = preintegrate_discrete(s, t0, t0 + 0.05, {}, ImuNoiseModel{});
    EXPECT_LT(increment_residual(xa, xb, {}, gpp, g).residual.norm(), 1e-6);
    EXPECT_LT(increment_residual(xa, xb, {}, pre, g).residual.norm(), 1e-5);
  }
}

TEST(IncrementResidual, JacobiansMatchFiniteDifferences) {
  std::mt19937_64 rng(3);
  const oracle::Signal sig = oracle::tumbling_signal();
  const std::vector<InertialSample> s = sample_signal(sig, 0.0, 1.0, 200.0);
  const Vec3 g(0, 0, -9.81);
  const ImuIncrements incs[2] = {gpp_increments(s, 0.2, 0.25, {}, ImuNoiseModel{}),
                                 preintegrate_discrete(s, 0.2, 0.25, {}, ImuNoiseModel{})};
  for (int i = 0; i < 100; ++i) {
    const ImuIncrements& inc = incs[i % 2];
    const KinematicState a = oracle::random_state(rng);
    const KinematicState b = oracle::random_successor(rng, a, 0.3);
    const BiasState bias = BiasState::from_stacked(oracle::random_vector<6>(rng, 0.05));
    const IncrementResidual r = increment_residual(a, b, bias, inc, g);
    auto fa = [&](const VecX& d) -> VecX { return increment_residual(a.retract(d), b, bias, inc, g).residual; };
    auto fb = [&](const VecX& d) -> VecX { return increment_residual(a, b.retract(d), bias, inc, g).residual; };
    auto fbias = [&](const VecX& d) -> VecX {
      return increment_residual(a, b, BiasState::from_stacked(bias.stacked() + d), inc, g).residual;
    };
    EXPECT_LT(oracle::relative_error(r.d_xk, oracle::numeric_jacobian(fa, Vec18::Zero())), 1e-4);
    EXPECT_LT(oracle::relative_error(r.d_xk1, oracle::numeric_jacobian(fb, Vec18::Zero())), 1e-4);
    EXPECT_LT(oracle::relative_error(r.d_bk, oracle::numeric_jacobian(fbias, Vec6::Zero())), 1e-4);
  }
}

TEST(IncrementCovariance, PositiveDefiniteForBothSchemes) {
  const oracle::Signal sig = oracle::tumbling_signal();
  const std::vector<InertialSample> s = sample_signal(sig, 0.0, 1.0, 200.0);
  for (const ImuIncrements& inc : {gpp_increments(s, 0.2, 0.25, {}, ImuNoiseModel{}),
                                   preintegrate_discrete(s, 0.2, 0.25, {}, ImuNoiseModel{})}) {
    EXPECT_LT((inc.covariance - inc.covariance.transpose()).norm(), 1e-18);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Mat9>(inc.covariance).eigenvalues().minCoeff(), 0.0);
  }
}

TEST(ImuCsv, RoundTripWithHeader) {
  std::vector<InertialSample> s{{0.0, Vec3(0.1, 0.2, 0.3), Vec3(1, 2, 3)}, {0.005, Vec3(-1, 0, 1), Vec3(4, 5, 6)}};
  std::stringstream ss;
  write_imu_csv(ss, s);
  const std::vector<InertialSample> back = read_imu_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].gyro, s[1].gyro);
  EXPECT_EQ(back[1].accel, s[1].accel);
  std::stringstream no_header("0.0,1,2,3,4,5,6\n");
  EXPECT_EQ(read_imu_csv(no_header).size(), 1u);
}

TEST(ImuCsv, MalformedIsDataError) {
  std::stringstream ss("t,gx,gy,gz,ax,ay,az\n0.0,1,2,3\n");
  try {
    read_imu_csv(ss);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDataError);
  }
}
