// gpeio: simulate, track, estimate, compare, eval.
// Exit codes: 0 success, 2 bad input or data, 3 estimation failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "gpeio/common/error.hpp"
#include "gpeio/sim/pipeline.hpp"

namespace fs = std::filesystem;
using namespace gpeio;

namespace {

void make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kDataError, "cannot create directory " + dir + ": " + ec.message());
}

// key=value pairs from --set.
void apply_overrides(SolverConfig& cfg, const std::vector<std::string>& sets) {
  for (const std::string& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::kDataError, "--set expects key=value, got " + kv);
    apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
}

void print_eval(const EvalReport& e) {
  std::printf("matched      %zu\n", e.matched);
  std::printf("path_length  %.4f m\n", e.path_length);
  std::printf("ate_rmse     %.6f m (%.3f%%)\n", e.ate_rmse, e.path_length > 0 ? 100.0 * e.ate_rmse / e.path_length : 0.0);
  std::printf("rpe_0.1s     %.6f m/s %.6f rad/s\n", e.rpe_trans_short, e.rpe_rot_short);
  std::printf("rpe_1s       %.6f m/s %.6f rad/s\n", e.rpe_trans_long, e.rpe_rot_long);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-inertial odometry on a continuous-time trajectory"};
  app.require_subcommand(1);

  std::string spec_file, out, events_file, data_dir, scheme = "gpif", config_file, tracks_file, est_file,
                                                    truth_file, camera_file;
  std::vector<std::string> sets, schemes = {"gpif", "gpp", "preint"};
  std::vector<double> noise_levels = {0.0, 1.0};
  double noise = -1.0;

  auto* sim = app.add_subcommand("simulate", "Generate a synthetic dataset");
  sim->add_option("--spec", spec_file, "Scenario YAML (defaults when omitted)");
  sim->add_option("--out", out, "Output directory")->required();
  sim->add_option("--noise", noise, "Noise multiplier applied to the scenario");

  auto* track = app.add_subcommand("track", "Run the event frontend");
  track->add_option("--events", events_file, "Event file (.csv text or .bin)")->required();
  track->add_option("--out", out, "Track CSV (id,t,x,y)")->required();
  track->add_option("--config", config_file, "Solver YAML; its frontend section is used");
  track->add_option("--camera", camera_file, "Camera YAML; sets the image size");
  track->add_option("--set", sets, "Config override key=value");

  auto* est = app.add_subcommand("estimate", "Estimate a trajectory from a dataset directory");
  est->add_option("--data", data_dir, "Dataset directory")->required();
  est->add_option("--scheme", scheme, "gpif | gpp | preint");
  est->add_option("--config", config_file, "Solver YAML (matched to the dataset noise when omitted)");
  est->add_option("--tracks", tracks_file, "Precomputed tracks instead of running the frontend");
  est->add_option("--out", out, "Output directory")->required();
  est->add_option("--set", sets, "Config override key=value");

  auto* cmp = app.add_subcommand("compare", "Run every scheme at every noise level");
  cmp->add_option("--spec", spec_file, "Scenario YAML (defaults when omitted)");
  cmp->add_option("--schemes", schemes, "Schemes")->delimiter(',');
  cmp->add_option("--noise-levels", noise_levels, "Noise multipliers")->delimiter(',');
  cmp->add_option("--config", config_file, "Base solver YAML");
  cmp->add_option("--out", out, "Output directory")->required();
  cmp->add_option("--set", sets, "Config override key=value");

  auto* ev = app.add_subcommand("eval", "Score a TUM trajectory against the truth");
  ev->add_option("--est", est_file, "Estimate TUM file")->required();
  ev->add_option("--truth", truth_file, "Truth TUM file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*sim) {
      ScenarioSpec spec = spec_file.empty() ? ScenarioSpec{} : load_scenario(spec_file);
      if (noise >= 0.0) spec = spec.with_noise_multiplier(noise);
      const Dataset data = simulate(spec);
      write_dataset(out, data);
      std::printf("%zu events, %zu imu samples, %zu truth poses -> %s\n", data.events.size(), data.imu.size(),
                  data.truth.size(), out.c_str());
      return 0;
    }

    if (*track) {
      SolverConfig cfg = config_file.empty() ? SolverConfig{} : load_solver_config(config_file);
      apply_overrides(cfg, sets);
      if (!camera_file.empty()) {
        const CameraModel cam = load_camera(camera_file);
        cfg.frontend.width = cam.width;
        cfg.frontend.height = cam.height;
      }
      FrontendStats stats;
      const auto tracks = track_events(read_events_file(events_file), cfg.frontend, 2, &stats);
      write_tracks_csv(out, tracks);
      std::printf("%ld events, %zu tracks -> %s\n", stats.events, tracks.size(), out.c_str());
      return 0;
    }

    if (*est) {
      const Dataset data = read_dataset(data_dir);
      SolverConfig cfg = config_file.empty() ? estimator_config(data.spec) : load_solver_config(config_file);
      cfg.scheme = scheme_from_string(scheme);
      cfg.frontend.width = data.spec.camera.width;
      cfg.frontend.height = data.spec.camera.height;
      apply_overrides(cfg, sets);
      const auto tracks = tracks_file.empty() ? track_events(data.events, cfg.frontend) : read_tracks_csv(tracks_file);
      RunResult r = run_estimator(data, tracks, cfg);
      make_dir(out);
      const fs::path dir(out);
      save_solver_config((dir / "config.snapshot").string(), cfg);
      write_report_csv((dir / "report.csv").string(), {r});
      if (!r.ok) {
        std::fprintf(stderr, "estimate failed: %s\n", r.message.c_str());
        return exit_code(r.error);
      }
      write_tum((dir / "estimate.tum").string(), r.estimate.poses(100.0, cfg.wnoj));
      std::printf("%s: %d windows, %d iterations, %.1f s\n", to_string(cfg.scheme).c_str(), r.estimate.windows,
                  r.estimate.iterations, r.runtime);
      if (!data.truth.empty()) print_eval(r.eval);
      return 0;
    }

    if (*cmp) {
      const ScenarioSpec spec = spec_file.empty() ? ScenarioSpec{} : load_scenario(spec_file);
      SolverConfig base = config_file.empty() ? SolverConfig{} : load_solver_config(config_file);
      apply_overrides(base, sets);
      std::vector<InertialScheme> list;
      for (const std::string& s : schemes) list.push_back(scheme_from_string(s));
      const std::vector<RunResult> rows = compare(spec, list, noise_levels, base);
      make_dir(out);
      const fs::path dir(out);
      for (const RunResult& r : rows) {
        if (!r.ok) continue;
        char name[64];
        std::snprintf(name, sizeof(name), "%s_m%g.tum", to_string(r.scheme).c_str(), r.noise);
        write_tum((dir / name).string(), r.estimate.poses(100.0, base.wnoj));
      }
      write_report_csv((dir / "report.csv").string(), rows);
      save_scenario((dir / "config.snapshot").string(), spec);
      std::cout << format_report_table(rows);
      return 0;
    }

    if (*ev) {
      print_eval(evaluate(read_tum(est_file), read_tum(truth_file)));
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 3;
  }
  return 0;
}
