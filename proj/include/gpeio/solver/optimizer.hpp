#pragma once

#include <string>
#include <vector>

#include "gpeio/solver/problem.hpp"

namespace gpeio {

struct OptimizeReport {
  int iterations = 0;  // linearizations
  int accepted = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  std::vector<double> costs;  // initial cost, then after every accepted step
  bool converged = false;
  std::string termination;
};

// Levenberg-Marquardt with Marquardt diagonal damping. Landmarks are
// eliminated first; the reduced knot system is solved by sparse LDLT.
// Accepted steps never increase the cost. Throws kSolverFailure on
// non-finite residuals or when no damping level gives a solvable system.
OptimizeReport optimize(FactorGraphProblem& problem, const SolverConfig& config);

// Adds a step: poses right-multiplicatively, the rest additively, rho
// clamped to [0, rho_max]. dx has 24 entries per knot, dl one per landmark.
void apply_step(FactorGraphProblem& problem, const VecX& dx, const VecX& dl);

}  // namespace gpeio
