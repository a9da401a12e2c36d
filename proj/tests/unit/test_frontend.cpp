#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <random>
#include <sstream>

#include "gpeio/common/error.hpp"
#include "gpeio/frontend/frontend.hpp"
#include "oracles/events.hpp"

using namespace gpeio;

namespace {

// Eight-pixel L with its corner at (x, y), corner event last.
std::vector<Event> l_pattern(int x, int y, double t) {
  std::vector<Event> ev;
  for (int i = 3; i >= 1; --i) ev.push_back({t, x + i, y, 1});
  for (int i = 3; i >= 1; --i) ev.push_back({t, x, y + i, 1});
  ev.push_back({t, x - 1, y - 1, 1});
  ev.push_back({t + 1e-6, x, y, 1});
  return ev;
}

// Frontend whose corner test ignores the partial L while it is being drawn.
FrontendConfig l_config() {
  FrontendConfig cfg;
  cfg.corner.min_support = 8;
  return cfg;
}

// Straightforward Sobel + Gaussian-weighted structure tensor.
double reference_harris(const std::vector<std::vector<int>>& b, double k, double sigma) {
  const int n = static_cast<int>(b.size());
  const int c = n / 2;
  Eigen::Matrix2d M = Eigen::Matrix2d::Zero();
  const int sx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
  for (int y = 1; y < n - 1; ++y) {
    for (int x = 1; x < n - 1; ++x) {
      double gx = 0, gy = 0;
      for (int j = -1; j <= 1; ++j)
        for (int i = -1; i <= 1; ++i) {
          gx += sx[j + 1][i + 1] * b[y + j][x + i];
          gy += sx[i + 1][j + 1] * b[y + j][x + i];
        }
      const double w = std::exp(-((x - c) * (x - c) + (y - c) * (y - c)) / (2 * sigma * sigma));
      M += w * Eigen::Vector2d(gx, gy) * Eigen::Vector2d(gx, gy).transpose();
    }
  }
  return M.determinant() - k * M.trace() * M.trace();
}

}  // namespace

TEST(Sae, StartsEmptyAndKeepsLatestPerPolarity) {
  Sae sae(10, 8);
  EXPECT_EQ(sae.latest(3, 4), 0.0);
  sae.update({0.5, 3, 4, 1});
  sae.update({0.7, 3, 4, -1});
  sae.update({0.6, 3, 4, 1});
  EXPECT_EQ(sae.at(3, 4, 1), 0.6);
  EXPECT_EQ(sae.at(3, 4, -1), 0.7);
  EXPECT_EQ(sae.latest(3, 4), 0.7);
  sae.update({0.4, 3, 4, 1});
  EXPECT_EQ(sae.at(3, 4, 1), 0.6);
}

TEST(RegistrationTable, EmptyPatchFindsNothing) {
  RegistrationTable table(20, 20);
  EXPECT_FALSE(table.search(10, 10, 5).has_value());
}

TEST(RegistrationTable, SingleIdWithinRadius) {
  RegistrationTable table(20, 20);
  table.set(12, 10, 7);
  EXPECT_EQ(table.search(10, 10, 3), 7);
  EXPECT_FALSE(table.search(10, 10, 1).has_value());
}

TEST(RegistrationTable, EquidistantIdsPickSmaller) {
  RegistrationTable table(20, 20);
  table.set(12, 10, 9);
  table.set(8, 10, 4);
  EXPECT_EQ(table.search(10, 10, 3), 4);
}

TEST(RegistrationTable, MatchesExhaustiveOracle) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> pos(0, 8), id(0, 5), r(0, 4);
  for (int trial = 0; trial < 500; ++trial) {
    RegistrationTable table(9, 9);
    std::vector<std::tuple<int, int, int>> cells;
    for (int i = 0; i < 6; ++i) {
      const int x = pos(rng), y = pos(rng), k = id(rng);
      table.set(x, y, k);
    }
    for (int y = 0; y < 9; ++y)
      for (int x = 0; x < 9; ++x)
        if (table.get(x, y) >= 0) cells.push_back({x, y, table.get(x, y)});
    const int qx = pos(rng), qy = pos(rng), rr = r(rng);
    std::optional<std::tuple<int, int>> best;  // (d2, id)
    for (const auto& [x, y, k] : cells) {
      if (std::max(std::abs(x - qx), std::abs(y - qy)) > rr) continue;
      const std::tuple<int, int> key{(x - qx) * (x - qx) + (y - qy) * (y - qy), k};
      if (!best || key < *best) best = key;
    }
    const std::optional<int> got = table.search(qx, qy, rr);
    ASSERT_EQ(got.has_value(), best.has_value());
    if (got) EXPECT_EQ(*got, std::get<1>(*best));
  }
}

TEST(CornerDetector, UniformPatchIsNotACorner) {
  Sae sae(30, 30);
  for (int y = 0; y < 30; ++y)
    for (int x = 0; x < 30; ++x) sae.update({1.0, x, y, 1});
  const CornerResult r = detect_corner(sae, 15, 15);
  EXPECT_FALSE(r.corner);
  EXPECT_NEAR(r.score, 0.0, 1e-12);
}

TEST(CornerDetector, LShapeIsACornerWithReferenceScore) {
  Sae sae(30, 30);
  for (const Event& e : l_pattern(15, 15, 1.0)) sae.update(e);
  const CornerResult r = detect_corner(sae, 15, 15);
  EXPECT_TRUE(r.corner);
  std::vector<std::vector<int>> b(9, std::vector<int>(9, 0));
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 9; ++x) b[y][x] = sae.latest(11 + x, 11 + y) > 0.0;
  EXPECT_NEAR(r.score, reference_harris(b, 0.04, 1.5), 1e-9);
}

TEST(CornerDetector, StraightEdgeIsNotACorner) {
  Sae sae(30, 30);
  for (int y = 8; y <= 22; ++y) sae.update({1.0, 15, y, 1});
  EXPECT_FALSE(detect_corner(sae, 15, 15).corner);
}

TEST(CornerDetector, QuarterTurnPreservesDecisionAndScore) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> stamp(0.9, 1.0);
  std::bernoulli_distribution on(0.4);
  for (int trial = 0; trial < 50; ++trial) {
    Sae a(21, 21), b(21, 21);
    for (int y = 6; y <= 14; ++y)
      for (int x = 6; x <= 14; ++x) {
        if (!on(rng)) continue;
        const double t = stamp(rng);
        a.update({t, x, y, 1});
        b.update({t, 20 - y, x, 1});  // (x, y) -> (W - 1 - y, x)
      }
    a.update({1.0, 10, 10, 1});
    b.update({1.0, 10, 10, 1});
    const CornerResult ra = detect_corner(a, 10, 10), rb = detect_corner(b, 10, 10);
    EXPECT_EQ(ra.corner, rb.corner);
    EXPECT_NEAR(ra.score, rb.score, 1e-9 * std::max(1.0, std::abs(ra.score)));
  }
}

TEST(CornerDetector, BorderAndSparsePatchesAreNotCorners) {
  Sae sae(30, 30);
  for (const Event& e : l_pattern(2, 2, 1.0)) sae.update(e);
  EXPECT_FALSE(detect_corner(sae, 2, 2).corner);
  sae.update({1.0, 20, 20, 1});
  EXPECT_FALSE(detect_corner(sae, 20, 20).corner);
}

TEST(Tracker, EventsAtCenterKeepPosition) {
  Tracker tr(Vec2(10, 20), 0.0, 0.05 / 3);
  for (int i = 1; i <= 50; ++i) tr.update({i * 1e-3, 10, 20, 1});
  EXPECT_LT((tr.centroid() - Vec2(10, 20)).norm(), 1e-12);
  EXPECT_LT((tr.position() - Vec2(10, 20)).norm(), 1e-9);
}

TEST(Tracker, RecoversDriftVelocity) {
  Tracker tr(Vec2(50, 50), 0.0, 0.05 / 3);
  std::mt19937 rng(2);
  std::uniform_int_distribution<int> jitter(-1, 1);
  for (int i = 1; i <= 400; ++i) {
    const double t = i * 2.5e-4;
    const double x = 50 + 100.0 * t;
    tr.update({t, static_cast<int>(std::lround(x)) + jitter(rng), 50 + jitter(rng), 1});
  }
  EXPECT_NEAR(tr.velocity().x(), 100.0, 20.0);
  EXPECT_NEAR(tr.velocity().y(), 0.0, 20.0);
  // The fit at the newest event sits on the moving feature; the centroid trails it.
  EXPECT_NEAR(tr.position().x(), 60.0, 1.0);
  EXPECT_LT(tr.centroid().x(), 59.0);
}

TEST(Tracker, OutlierMovesCentroidByDecayedFraction) {
  const double decay = 0.05 / 3;
  Tracker tr(Vec2(10, 10), 0.0, decay);
  for (int i = 1; i <= 20; ++i) tr.update({i * 1e-3, 10, 10, 1});
  const double w_before = tr.total_weight();
  const Vec2 before = tr.centroid();
  tr.update({0.025, 20, 10, 1});
  const double kept = w_before * std::exp(-0.005 / decay) / tr.total_weight();
  const double moved = (tr.centroid() - before).norm();
  EXPECT_LE(moved, (1.0 - kept) * 10.0 + 1e-12);
  EXPECT_NEAR(moved, (1.0 - kept) * 10.0, 1e-9);
}

TEST(Frontend, NonCornerEventOnlyUpdatesSae) {
  Frontend fe;
  const EventOutcome r = fe.process({0.1, 50, 60, 1});
  EXPECT_EQ(r.effect, FrontendEffect::kNone);
  EXPECT_EQ(fe.sae().latest(50, 60), 0.1);
  EXPECT_EQ(fe.live_count(), 0);
}

TEST(Frontend, CornerCreatesFeatureAndRegistersIt) {
  Frontend fe(l_config());
  EventOutcome last;
  for (const Event& e : l_pattern(50, 60, 0.1)) last = fe.process(e);
  ASSERT_EQ(last.effect, FrontendEffect::kNewFeature);
  EXPECT_EQ(fe.table().get(50, 60), last.id);
  EXPECT_EQ(fe.features().at(last.id).observations.size(), 1u);
}

TEST(Frontend, NearbyEventInsideWindowAppendsAndRelocates) {
  Frontend fe(l_config());
  EventOutcome created;
  for (const Event& e : l_pattern(50, 60, 0.1)) created = fe.process(e);
  const EventOutcome r = fe.process({0.105, 52, 60, 1});
  EXPECT_EQ(r.effect, FrontendEffect::kAppended);
  EXPECT_EQ(r.id, created.id);
  const auto& obs = fe.features().at(created.id).observations;
  ASSERT_EQ(obs.size(), 2u);
  EXPECT_EQ(obs[1].t, 0.105);
  EXPECT_EQ(fe.cell(created.id), Eigen::Vector2i(51, 60));
  EXPECT_EQ(fe.table().get(51, 60), created.id);
  EXPECT_EQ(fe.table().get(50, 60), -1);
}

TEST(Frontend, EventTooSoonUpdatesTrackerWithoutAppending) {
  Frontend fe(l_config());
  EventOutcome created;
  for (const Event& e : l_pattern(50, 60, 0.1)) created = fe.process(e);
  const EventOutcome r = fe.process({0.1005, 51, 60, 1});
  EXPECT_EQ(r.effect, FrontendEffect::kNone);
  EXPECT_EQ(fe.features().at(created.id).observations.size(), 1u);
  EXPECT_EQ(fe.table().get(50, 60), created.id);
}

TEST(Frontend, IdleFeatureIsRemovedOnNextNearbyEvent) {
  FrontendConfig cfg = l_config();
  cfg.sweep_period = 1e9;  // lazy deletion only
  Frontend fe(cfg);
  EventOutcome created;
  for (const Event& e : l_pattern(50, 60, 0.1)) created = fe.process(e);
  const EventOutcome r = fe.process({0.1 + cfg.t_max + 1e-3, 51, 60, 1});
  EXPECT_EQ(r.effect, FrontendEffect::kRemoved);
  EXPECT_EQ(r.id, created.id);
  EXPECT_EQ(fe.table().get(50, 60), -1);
  EXPECT_FALSE(fe.features().at(created.id).alive);
}

TEST(Frontend, PeriodicSweepRemovesStaleFeatures) {
  Frontend fe(l_config());
  EventOutcome created;
  for (const Event& e : l_pattern(50, 60, 0.1)) created = fe.process(e);
  fe.process({0.2, 150, 100, 1});  // far away
  EXPECT_EQ(fe.live_count(), 0);
  EXPECT_EQ(fe.table().get(50, 60), -1);
  EXPECT_EQ(fe.stats().removed_sweep, 1);
}

TEST(Frontend, RejectsOutOfBoundsAndOutOfOrder) {
  Frontend fe;
  EXPECT_EQ(fe.process({0.1, 240, 10, 1}).effect, FrontendEffect::kRejected);
  EXPECT_EQ(fe.process({0.1, -1, 10, 1}).effect, FrontendEffect::kRejected);
  fe.process({0.2, 10, 10, 1});
  EXPECT_EQ(fe.process({0.1, 10, 10, 1}).effect, FrontendEffect::kRejected);
  EXPECT_EQ(fe.stats().rejected_bounds, 2);
  EXPECT_EQ(fe.stats().rejected_order, 1);
}

TEST(Frontend, FeatureCountCapped) {
  FrontendConfig cfg = l_config();
  cfg.max_features = 2;
  Frontend fe(cfg);
  double t = 0.1;
  for (int k = 0; k < 4; ++k, t += 1e-4)
    for (const Event& e : l_pattern(20 + 30 * k, 60, t)) fe.process(e);
  EXPECT_EQ(fe.live_count(), 2);
}

namespace {

std::vector<Event> moving_squares() {
  std::vector<oracle::Center> centers;
  for (int k = 0; k < 12; ++k) {
    const double u0 = 30 + 17 * (k % 6), v0 = 40 + 60 * (k / 6), a = 0.7 * k;
    centers.push_back([=](double t) {
      return std::make_pair(u0 + 25 * std::sin(3 * t + a) + 60 * t, v0 + 20 * std::cos(2.5 * t + a));
    });
  }
  return oracle::render_squares(centers, 0.0, 1.0, 240, 180);
}

}  // namespace

TEST(Frontend, StreamInvariants) {
  const std::vector<Event> events = moving_squares();
  FrontendConfig cfg;
  Frontend fe(cfg);
  std::size_t i = 0;
  for (const Event& e : events) {
    fe.process(e);
    ASSERT_LE(fe.live_count(), cfg.max_features);
    if (++i % 50 != 0) continue;
    std::vector<Eigen::Vector2i> cells;
    for (const auto& [id, f] : fe.features())
      if (f.alive) cells.push_back(fe.cell(id));
    for (std::size_t a = 0; a < cells.size(); ++a)
      for (std::size_t b = a + 1; b < cells.size(); ++b)
        ASSERT_GT((cells[a] - cells[b]).cwiseAbs().maxCoeff(), cfg.search_radius);
  }
  EXPECT_GT(fe.stats().created, 0);
  std::size_t appended = 0;
  for (const auto& [id, f] : fe.features()) {
    for (std::size_t k = 1; k < f.observations.size(); ++k) {
      const double dt = f.observations[k].t - f.observations[k - 1].t;
      EXPECT_GT(dt, cfg.t_min);
      EXPECT_LT(dt, cfg.t_max);
    }
    appended += f.observations.size();
  }
  EXPECT_GT(appended, 100u);
}

TEST(Frontend, TracksFollowSquareCenters) {
  std::vector<oracle::Center> centers;
  centers.push_back([](double t) { return std::make_pair(60 + 80 * t, 90 + 30 * std::sin(4 * t)); });
  const std::vector<Event> events = oracle::render_squares(centers, 0.0, 1.0, 240, 180);
  FrontendConfig cfg;
  cfg.track_gate = 0.0;  // square edges fire well away from the centre
  const std::vector<FeatureTrajectory> tracks = track_events(events, cfg, 5);
  ASSERT_FALSE(tracks.empty());
  double sq = 0.0;
  int n = 0;
  for (const FeatureTrajectory& f : tracks)
    for (std::size_t k = 3; k < f.observations.size(); ++k) {
      const auto [u, v] = centers[0](f.observations[k].t);
      sq += (f.observations[k].q - Vec2(u, v)).squaredNorm();
      ++n;
    }
  ASSERT_GT(n, 20);
  EXPECT_LT(std::sqrt(sq / n), 1.5);
}

TEST(Frontend, PointTrailsBecomeFeatures) {
  // One event per half pixel of motion at the rounded projected point.
  std::vector<Event> events;
  for (int k = 0; k < 6; ++k) {
    const double u0 = 40 + 30 * k, v0 = 60 + 10 * k;
    Vec2 last(u0, v0);
    for (double t = 0.0; t <= 0.5; t += 1e-4) {
      const Vec2 q(u0 + 80 * t + 5 * std::sin(6 * t + k), v0 + 40 * t + 5 * std::cos(5 * t));
      if ((q - last).norm() < 0.5) continue;
      last = q;
      events.push_back({t, static_cast<int>(std::lround(q.x())), static_cast<int>(std::lround(q.y())), 1});
    }
  }
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.t < b.t; });
  FrontendStats stats;
  const auto tracks = track_events(events, FrontendConfig{}, 10, &stats);
  EXPECT_GE(tracks.size(), 6u);
  EXPECT_EQ(stats.rejected_order, 0);
}

namespace {

// Two point trails whose paths pass 3.5 px apart: A moves right along
// v = 90, B moves down along u = 100 and trails A by 0.05 s at the crossing.
Vec2 trail_a(double t) { return Vec2(40 + 100 * t, 90); }
Vec2 trail_b(double t) { return Vec2(100, 35 + 100 * t); }

double worst_error_on_a(const FrontendConfig& cfg) {
  std::vector<Event> events;
  for (auto q : {trail_a, trail_b}) {
    Vec2 last = q(0.0);
    for (double t = 0.0; t <= 1.0; t += 1e-4) {
      if ((q(t) - last).norm() < 0.5) continue;
      last = q(t);
      events.push_back({t, static_cast<int>(std::lround(last.x())), static_cast<int>(std::lround(last.y())), 1});
    }
  }
  std::stable_sort(events.begin(), events.end(), [](const Event& x, const Event& y) { return x.t < y.t; });
  double worst = 0.0;
  for (const FeatureTrajectory& f : track_events(events, cfg, 10)) {
    if ((f.observations.front().q - trail_a(f.observations.front().t)).norm() > 3.0) continue;
    for (const FeatureObservation& o : f.observations) worst = std::max(worst, (o.q - trail_a(o.t)).norm());
  }
  return worst;
}

}  // namespace

TEST(Frontend, GateKeepsTrackOnItsOwnPoint) {
  FrontendConfig cfg;
  const double gated = worst_error_on_a(cfg);
  cfg.track_gate = 0.0;
  const double ungated = worst_error_on_a(cfg);
  EXPECT_LT(gated, 1.5);
  EXPECT_GT(ungated, 1.5);
}

TEST(Frontend, Deterministic) {
  const std::vector<Event> events = moving_squares();
  const auto a = track_events(events, FrontendConfig{});
  const auto b = track_events(events, FrontendConfig{});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a[i].observations.size(), b[i].observations.size());
    for (std::size_t k = 0; k < a[i].observations.size(); ++k) {
      EXPECT_EQ(a[i].observations[k].t, b[i].observations[k].t);
      EXPECT_EQ(a[i].observations[k].q, b[i].observations[k].q);
    }
  }
}

TEST(EventIo, TextRoundTrip) {
  const std::vector<Event> ev{{0.000123456, 3, 4, 1}, {1.5, 239, 179, -1}};
  std::stringstream ss;
  write_events_text(ss, ev);
  const std::vector<Event> back = read_events_text(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_NEAR(back[0].t, ev[0].t, 1e-12);
  EXPECT_EQ(back[1].x, 239);
  EXPECT_EQ(back[1].polarity, -1);
}

TEST(EventIo, BinaryRoundTrip) {
  const std::vector<Event> ev{{0.000123456, 3, 4, 1}, {12.5, 639, 479, -1}};
  std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
  write_events_binary(ss, ev);
  EXPECT_EQ(ss.str().size(), 26u);
  const std::vector<Event> back = read_events_binary(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_NEAR(back[0].t, ev[0].t, 1e-9);
  EXPECT_EQ(back[1].y, 479);
  EXPECT_EQ(back[1].polarity, -1);
}

TEST(EventIo, MalformedInputIsDataError) {
  std::stringstream bad_text("0.1 3 4 2\n");
  EXPECT_THROW(read_events_text(bad_text), Error);
  std::stringstream short_bin(std::string(20, '\0'));
  try {
    read_events_binary(short_bin);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDataError);
  }
}
