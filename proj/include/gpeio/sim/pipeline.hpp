#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gpeio/common/error.hpp"
#include "gpeio/sim/dataset.hpp"
#include "gpeio/sim/metrics.hpp"
#include "gpeio/solver/estimator.hpp"

namespace gpeio {

// Estimator settings matched to a scenario: its gravity and image size, and
// noise densities equal to the scenario's but never below the nominal ones.
// Very small densities make the inertial factors stiff enough to stall the
// sliding window.
SolverConfig estimator_config(const ScenarioSpec& spec, SolverConfig base = {});

// Feature tracks as CSV rows `id,t,x,y`, grouped by id in time order.
void write_tracks_csv(const std::string& path, const std::vector<FeatureTrajectory>& tracks);
std::vector<FeatureTrajectory> read_tracks_csv(const std::string& path);

struct RunResult {
  InertialScheme scheme = InertialScheme::kGpif;
  double noise = 0.0;  // noise multiplier, for compare rows
  bool ok = false;
  ErrorCode error = ErrorCode::kSolverFailure;
  std::string message;
  EstimateResult estimate;
  EvalReport eval;  // zero unless ok and truth is available
  double runtime = 0.0;
};

// Runs the estimator on given tracks and scores it against data.truth when
// present. Errors become a failed result.
RunResult run_estimator(const Dataset& data, const std::vector<FeatureTrajectory>& tracks,
                        const SolverConfig& config);

// The scenario at every noise multiplier, simulated and tracked once, then
// estimated with each scheme. Rows are ordered by noise level, then scheme.
std::vector<RunResult> compare(const ScenarioSpec& spec, const std::vector<InertialScheme>& schemes,
                               const std::vector<double>& noise_levels, const SolverConfig& base = {});

// One header line, then one line per result.
void write_report_csv(std::ostream& os, const std::vector<RunResult>& rows);
void write_report_csv(const std::string& path, const std::vector<RunResult>& rows);
std::string format_report_table(const std::vector<RunResult>& rows);

// Maps error codes to CLI exit codes: 2 for bad input, 3 for estimation
// failures.
int exit_code(ErrorCode code);

}  // namespace gpeio
