#include "gpeio/sim/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "gpeio/common/error.hpp"

namespace gpeio {

SolverConfig estimator_config(const ScenarioSpec& spec, SolverConfig cfg) {
  const ScenarioSpec nominal;
  cfg.imu = ImuNoiseModel::isotropic(std::max(spec.gyro_sigma, nominal.gyro_sigma),
                                     std::max(spec.accel_sigma, nominal.accel_sigma),
                                     std::max(spec.gyro_walk, nominal.gyro_walk),
                                     std::max(spec.accel_walk, nominal.accel_walk));
  cfg.imu.gravity = spec.gravity;
  cfg.pixel_sigma = std::max(spec.pixel_sigma, nominal.pixel_sigma);
  cfg.frontend.width = spec.camera.width;
  cfg.frontend.height = spec.camera.height;
  return cfg;
}

void write_tracks_csv(const std::string& path, const std::vector<FeatureTrajectory>& tracks) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::kDataError, "cannot write " + path);
  f << "id,t,x,y\n";
  char line[128];
  for (const FeatureTrajectory& tr : tracks)
    for (const FeatureObservation& o : tr.observations) {
      std::snprintf(line, sizeof(line), "%d,%.9f,%.6f,%.6f\n", tr.id, o.t, o.q.x(), o.q.y());
      f << line;
    }
}

std::vector<FeatureTrajectory> read_tracks_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::kDataError, "cannot read " + path);
  std::map<int, FeatureTrajectory> by_id;
  std::string line;
  int row = 0;
  while (std::getline(f, line)) {
    ++row;
    if (line.empty() || line[0] == '#' || (row == 1 && line.rfind("id", 0) == 0)) continue;
    int id;
    double t, x, y;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf", &id, &t, &x, &y) != 4)
      throw Error(ErrorCode::kDataError, path + ":" + std::to_string(row) + ": expected id,t,x,y");
    FeatureTrajectory& tr = by_id[id];
    tr.id = id;
    if (!tr.observations.empty() && t < tr.observations.back().t)
      throw Error(ErrorCode::kDataError, path + ":" + std::to_string(row) + ": time goes backwards in track " +
                                             std::to_string(id));
    tr.observations.push_back({t, Vec2(x, y)});
  }
  std::vector<FeatureTrajectory> out;
  for (auto& [id, tr] : by_id) out.push_back(std::move(tr));
  return out;
}

RunResult run_estimator(const Dataset& data, const std::vector<FeatureTrajectory>& tracks,
                        const SolverConfig& config) {
  RunResult r;
  r.scheme = config.scheme;
  const auto start = std::chrono::steady_clock::now();
  try {
    r.estimate = estimate(tracks, data.imu, data.spec.camera, config);
    r.ok = true;
    if (!data.truth.empty()) r.eval = evaluate(r.estimate.poses(100.0, config.wnoj), data.truth);
  } catch (const Error& e) {
    r.ok = false;
    r.error = e.code();
    r.message = e.what();
  }
  r.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<RunResult> compare(const ScenarioSpec& spec, const std::vector<InertialScheme>& schemes,
                               const std::vector<double>& noise_levels, const SolverConfig& base) {
  std::vector<RunResult> rows;
  for (double m : noise_levels) {
    const ScenarioSpec s = spec.with_noise_multiplier(m);
    const Dataset data = simulate(s);
    SolverConfig cfg = estimator_config(s, base);
    const std::vector<FeatureTrajectory> tracks = track_events(data.events, cfg.frontend);
    for (InertialScheme scheme : schemes) {
      cfg.scheme = scheme;
      RunResult r = run_estimator(data, tracks, cfg);
      r.noise = m;
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

void write_report_csv(std::ostream& os, const std::vector<RunResult>& rows) {
  os << "scheme,noise,status,ate_rmse,path_length,ate_pct,rpe_trans_short,rpe_rot_short,rpe_trans_long,"
        "rpe_rot_long,runtime,windows,iterations,outliers,f_wnoj,f_bias,f_inertial,f_visual,f_marginal,message\n";
  char line[512];
  for (const RunResult& r : rows) {
    const EvalReport& e = r.eval;
    const FactorCounts& c = r.estimate.factors;
    const double pct = e.path_length > 0.0 ? 100.0 * e.ate_rmse / e.path_length : 0.0;
    std::snprintf(line, sizeof(line), "%s,%g,%s,%.6f,%.4f,%.4f,%.6f,%.6f,%.6f,%.6f,%.3f,%d,%d,%zu,%zu,%zu,%zu,%zu,%zu,",
                  to_string(r.scheme).c_str(), r.noise, r.ok ? "ok" : "failed", e.ate_rmse, e.path_length, pct,
                  e.rpe_trans_short, e.rpe_rot_short, e.rpe_trans_long, e.rpe_rot_long, r.runtime,
                  r.estimate.windows, r.estimate.iterations, r.estimate.outliers, c.wnoj, c.bias, c.inertial(),
                  c.visual, c.marginal);
    std::string msg = r.message;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    os << line << msg << "\n";
  }
}

void write_report_csv(const std::string& path, const std::vector<RunResult>& rows) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::kDataError, "cannot write " + path);
  write_report_csv(f, rows);
}

std::string format_report_table(const std::vector<RunResult>& rows) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof(line), "%-7s %6s %-7s %10s %8s %10s %9s %9s\n", "scheme", "noise", "status", "ATE [m]",
                "ATE %", "RPE [m/s]", "time [s]", "factors");
  os << line;
  for (const RunResult& r : rows) {
    const double pct = r.eval.path_length > 0.0 ? 100.0 * r.eval.ate_rmse / r.eval.path_length : 0.0;
    std::snprintf(line, sizeof(line), "%-7s %6g %-7s %10.4f %8.3f %10.4f %9.1f %9zu\n", to_string(r.scheme).c_str(),
                  r.noise, r.ok ? "ok" : "failed", r.eval.ate_rmse, pct, r.eval.rpe_trans_long, r.runtime,
                  r.estimate.factors.total());
    os << line;
  }
  return os.str();
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotReady:
    case ErrorCode::kConditioning:
    case ErrorCode::kSolverFailure:
      return 3;
    default:
      return 2;
  }
}

}  // namespace gpeio
