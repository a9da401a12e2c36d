#pragma once

#include <vector>

#include "gpeio/solver/problem.hpp"

namespace gpeio {

struct MarginalizationStats {
  int regularized = 0;  // times the retired block needed diagonal loading
  std::size_t factors = 0;
  std::size_t dropped_visual = 0;
};

// Schur complement of knots [0, retire) and of the flagged landmarks at the
// current estimate. Uses every factor touching a retired variable plus the
// existing marginal prior. Visual factors of surviving landmarks that touch
// retired knots are dropped, so the prior only involves knots. Held
// dimensions are treated as constants.
MarginalPrior marginalize(const FactorGraphProblem& problem, std::size_t retire,
                          const std::vector<bool>& retire_landmark, MarginalizationStats* stats = nullptr);

}  // namespace gpeio
