#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "gpeio/common/error.hpp"
#include "gpeio/vision/reprojection.hpp"
#include "oracles/series.hpp"
#include "oracles/states.hpp"

using namespace gpeio;

namespace {

// Camera looking along body +x, image x along -body y, image y along -body z.
CameraModel forward_camera() {
  CameraModel cam;
  Mat3 R;
  R.col(0) = -Vec3::UnitY();
  R.col(1) = -Vec3::UnitZ();
  R.col(2) = Vec3::UnitX();
  cam.T_bc = Pose(Rotation(R), Vec3(0.05, -0.02, 0.01));
  return cam;
}

Trajectory three_knots(std::mt19937_64& rng) {
  Trajectory traj;
  KinematicState x = oracle::random_state(rng);
  for (int k = 0; k < 3; ++k) {
    traj.add_knot(0.1 * k, x);
    x = oracle::random_successor(rng, x, 0.05);
  }
  return traj;
}

// A world point a few meters ahead of the camera at knot 0.
Vec3 point_ahead(std::mt19937_64& rng, const Trajectory& traj, const CameraModel& cam) {
  const Pose T = traj.state(0).T * cam.T_bc;
  return T * Vec3(oracle::random_vector<1>(rng, 0.5)(0), oracle::random_vector<1>(rng, 0.5)(0), 3.0);
}

InverseDepthLandmark landmark_at(const Vec3& P, const Trajectory& traj, std::size_t knot, const CameraModel& cam) {
  const Vec3 pc = (traj.state(knot).T * cam.T_bc).inverse() * P;
  InverseDepthLandmark lm;
  lm.anchor_knot = knot;
  lm.anchor_time = traj.time(knot);
  lm.kappa = pc.normalized();
  lm.rho = 1.0 / pc.norm();
  return lm;
}

Vec2 observe(const Vec3& P, const Pose& T_wb, const CameraModel& cam) {
  return cam.project((T_wb * cam.T_bc).inverse() * P);
}

}  // namespace

TEST(Camera, ProjectBearingRoundTrip) {
  const CameraModel cam = forward_camera();
  EXPECT_EQ(cam.project(Vec3(0, 0, 2)), Vec2(cam.cx, cam.cy));
  const Vec2 q(37.25, 151.5);
  EXPECT_LT((cam.project(cam.bearing(q)) - q).norm(), 1e-12);
}

TEST(Camera, UndistortInvertsDistort) {
  CameraModel cam;
  cam.distortion << -0.2, 0.05, 1e-3, -5e-4;
  for (const Vec2& q : {Vec2(10, 10), Vec2(120, 90), Vec2(230, 170), Vec2(60.5, 140.25)})
    EXPECT_LT((cam.distort(cam.undistort(q)) - q).norm(), 1e-9);
}

TEST(Camera, ValidationRejectsBadIntrinsics) {
  CameraModel cam;
  cam.fx = 0.0;
  EXPECT_THROW(cam.validate(), Error);
  cam = CameraModel{};
  cam.cx = 300.0;
  EXPECT_THROW(cam.validate(), Error);
}

TEST(Camera, YamlRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "gpeio_test_vision";
  std::filesystem::create_directories(dir);
  CameraModel cam = forward_camera();
  cam.distortion << -0.1, 0.01, 0.0, 1e-4;
  save_camera((dir / "cam.yaml").string(), cam);
  const CameraModel back = load_camera((dir / "cam.yaml").string());
  EXPECT_EQ(back.fx, cam.fx);
  EXPECT_EQ(back.width, cam.width);
  EXPECT_EQ(back.distortion, cam.distortion);
  EXPECT_LT((back.T_bc.matrix() - cam.T_bc.matrix()).norm(), 1e-12);
  std::ofstream(dir / "bad.yaml") << "fx: 100\nfy: [1, 2\n";
  try {
    load_camera((dir / "bad.yaml").string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDataError);
  }
}

TEST(LandmarkInit, PrincipalPointGivesOpticalAxis) {
  const CameraModel cam = forward_camera();
  Trajectory traj;
  traj.add_knot(0.0, KinematicState{});
  traj.add_knot(0.1, KinematicState{});
  FeatureTrajectory f;
  f.observations = {{0.0, Vec2(cam.cx, cam.cy)}, {0.1, Vec2(cam.cx, cam.cy)}};
  const InverseDepthLandmark lm = init_landmark(f, traj, cam);
  EXPECT_LT((lm.kappa - Vec3::UnitZ()).norm(), 1e-15);
  EXPECT_EQ(lm.rho, 0.0);  // zero baseline
}

TEST(LandmarkInit, TwoMetersWithTwentyCentimeterBaseline) {
  const CameraModel cam = forward_camera();
  KinematicState a, b;
  b.T = Pose(Rotation(), Vec3(0.0, 0.2, 0.0));  // sideways along body y
  Trajectory traj;
  traj.add_knot(0.0, a);
  traj.add_knot(0.1, b);
  const Vec3 P = (a.T * cam.T_bc) * (2.0 * Vec3(0.1, -0.05, 1.0).normalized());
  FeatureTrajectory f;
  f.observations = {{0.0, observe(P, a.T, cam)}, {0.1, observe(P, b.T, cam)}};
  const InverseDepthLandmark lm = init_landmark(f, traj, cam);
  EXPECT_NEAR(lm.rho, 0.5, 1e-6);
  EXPECT_EQ(lm.anchor_knot, 0u);
}

TEST(LandmarkInit, NoKnotInsideSpanIsNotAnchorable) {
  Trajectory traj;
  traj.add_knot(0.0, KinematicState{});
  traj.add_knot(0.1, KinematicState{});
  FeatureTrajectory f;
  f.observations = {{0.02, Vec2(10, 10)}, {0.08, Vec2(12, 10)}};
  try {
    init_landmark(f, traj, CameraModel{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotAnchorable);
  }
}

TEST(LandmarkInit, AnchorPixelIsInterpolated) {
  const std::vector<FeatureObservation> obs{{0.0, Vec2(10, 20)}, {0.2, Vec2(30, 10)}};
  EXPECT_LT((interpolate_track(obs, 0.05) - Vec2(15, 17.5)).norm(), 1e-12);
}

TEST(Projection, IdentityViewHitsPrincipalPoint) {
  const CameraModel cam = forward_camera();
  for (double rho : {0.0, 0.3, 5.0}) {
    const Projection p = project_landmark(Vec4(0, 0, 1, rho), Pose(), Pose(), cam);
    EXPECT_LT((p.q - Vec2(cam.cx, cam.cy)).norm(), 1e-12);
  }
}

TEST(Projection, InfiniteLandmarkIgnoresTranslation) {
  const CameraModel cam = forward_camera();
  const Vec4 p = (Vec4() << Vec3(0.2, -0.1, 1.0).normalized(), 0.0).finished();
  const Pose T2(Rotation(), Vec3(1.0, -2.0, 0.5));
  EXPECT_LT((project_landmark(p, Pose(), T2, cam).q - project_landmark(p, Pose(), Pose(), cam).q).norm(), 1e-12);
}

TEST(Projection, BehindCameraRaises) {
  const Vec4 p(0, 0, 1, 1.0);  // 1 m ahead
  const Pose T2(Rotation(), Vec3(0, 0, 2.0));
  try {
    project_landmark(p, Pose(), T2, CameraModel{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBehindCamera);
  }
}

TEST(Projection, InitThenProjectRoundTrip) {
  std::mt19937_64 rng(21);
  const CameraModel cam = forward_camera();
  for (int i = 0; i < 50; ++i) {
    const Trajectory traj = three_knots(rng);
    const Vec3 P = point_ahead(rng, traj, cam);
    FeatureTrajectory f;
    for (double t : {0.0, 0.07, 0.15, 0.2}) f.observations.push_back({t, observe(P, traj.query(t, false).x.T, cam)});
    const InverseDepthLandmark lm = init_landmark(f, traj, cam);
    for (const FeatureObservation& o : f.observations) {
      const Pose T1 = traj.state(lm.anchor_knot).T * cam.T_bc;
      const Pose T2 = traj.query(o.t, false).x.T * cam.T_bc;
      EXPECT_LT((project_landmark(lm.homogeneous(), T1, T2, cam).q - o.q).norm(), 1e-8);
    }
  }
}

TEST(Projection, InvariantToCommonRigidTransform) {
  std::mt19937_64 rng(4);
  const CameraModel cam;
  for (int i = 0; i < 20; ++i) {
    const Pose T1 = oracle::random_state(rng).T;
    const Pose T2 = T1 * Pose::exp(oracle::random_vector<6>(rng, 0.05));
    const Pose G = oracle::random_state(rng).T;
    const Vec4 p(0.1, -0.05, 0.99, 0.4);
    const Vec4 pn = (Vec4() << p.head<3>().normalized(), p(3)).finished();
    EXPECT_LT((project_landmark(pn, T1, T2, cam).q - project_landmark(pn, G * T1, G * T2, cam).q).norm(), 1e-9);
  }
}

TEST(Projection, OdotIdentity) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    const Twist xi = oracle::random_vector<6>(rng, 2.0);
    const Vec4 h = oracle::random_vector<4>(rng, 3.0);
    EXPECT_LT((se3::hat(xi) * h - se3::odot(h) * xi).norm(), 1e-14);
  }
}

TEST(VisualResidual, PerfectObservationIsZero) {
  std::mt19937_64 rng(31);
  const CameraModel cam = forward_camera();
  for (int i = 0; i < 20; ++i) {
    const Trajectory traj = three_knots(rng);
    const Vec3 P = point_ahead(rng, traj, cam);
    const InverseDepthLandmark lm = landmark_at(P, traj, 0, cam);
    for (double t : {0.0, 0.05, 0.13, 0.2}) {
      const Vec2 q = observe(P, traj.query(t, false).x.T, cam);
      EXPECT_LT(visual_residual(lm, traj, t, q, cam).residual.norm(), 1e-9);
    }
  }
}

TEST(VisualResidual, PixelOffsetGivesUnitResidual) {
  std::mt19937_64 rng(32);
  const CameraModel cam = forward_camera();
  const Trajectory traj = three_knots(rng);
  const Vec3 P = point_ahead(rng, traj, cam);
  const InverseDepthLandmark lm = landmark_at(P, traj, 0, cam);
  const Vec2 q = observe(P, traj.query(0.15, false).x.T, cam);
  EXPECT_NEAR(visual_residual(lm, traj, 0.15, q + Vec2(0.6, -0.8), cam).residual.norm(), 1.0, 1e-9);
}

TEST(VisualResidual, JacobiansMatchFiniteDifferences) {
  std::mt19937_64 rng(33);
  const CameraModel cam = forward_camera();
  std::uniform_real_distribution<double> when(0.105, 0.195);
  for (int i = 0; i < 100; ++i) {
    const Trajectory traj = three_knots(rng);
    const Vec3 P = point_ahead(rng, traj, cam);
    InverseDepthLandmark lm = landmark_at(P, traj, 0, cam);
    const double t = when(rng);
    const Vec2 q = observe(P, traj.query(t, false).x.T, cam) + oracle::random_vector<2>(rng, 2.0);
    const VisualResidual r = visual_residual(lm, traj, t, q, cam);
    ASSERT_EQ(r.obs_knot, 1u);
    auto with_knot = [&](std::size_t k, const VecX& d) {
      Trajectory p;
      for (std::size_t j = 0; j < 3; ++j) p.add_knot(traj.time(j), j == k ? traj.state(j).retract(d) : traj.state(j));
      return visual_residual(lm, p, t, q, cam).residual;
    };
    auto fa = [&](const VecX& d) -> VecX { return with_knot(0, d); };
    auto fk = [&](const VecX& d) -> VecX { return with_knot(1, d); };
    auto fk1 = [&](const VecX& d) -> VecX { return with_knot(2, d); };
    auto frho = [&](const VecX& d) -> VecX {
      InverseDepthLandmark m = lm;
      m.rho += d(0);
      return visual_residual(m, traj, t, q, cam).residual;
    };
    EXPECT_LT(oracle::relative_error(r.d_anchor, oracle::numeric_jacobian(fa, Vec18::Zero())), 1e-4);
    EXPECT_LT(oracle::relative_error(r.d_obs_k, oracle::numeric_jacobian(fk, Vec18::Zero())), 1e-4);
    EXPECT_LT(oracle::relative_error(r.d_obs_k1, oracle::numeric_jacobian(fk1, Vec18::Zero())), 1e-4);
    EXPECT_LT(oracle::relative_error(r.d_rho, oracle::numeric_jacobian(frho, VecX::Zero(1))), 1e-4);
  }
}

TEST(VisualResidual, AnchorSideTouchesOneKnot) {
  std::mt19937_64 rng(34);
  const CameraModel cam = forward_camera();
  const Trajectory traj = three_knots(rng);
  const Vec3 P = point_ahead(rng, traj, cam);
  const InverseDepthLandmark lm = landmark_at(P, traj, 0, cam);
  const VisualResidual r = visual_residual(lm, traj, 0.15, Vec2(100, 100), cam);
  // Anchor block is one knot wide and only its pose part is nonzero.
  EXPECT_EQ(r.d_anchor.cols(), 18);
  EXPECT_EQ(r.d_anchor.rightCols<12>().norm(), 0.0);
  EXPECT_GT(r.d_anchor.leftCols<6>().norm(), 0.0);
  // An interpolated anchor would have needed two knots (36 columns) instead.
  EXPECT_GT(r.d_obs_k.norm(), 0.0);
  EXPECT_GT(r.d_obs_k1.norm(), 0.0);
}
