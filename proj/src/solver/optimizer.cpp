#include "gpeio/solver/optimizer.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <map>

#include "gpeio/common/error.hpp"

namespace gpeio {

namespace {

struct NormalSystem {
  std::map<std::pair<std::size_t, std::size_t>, Mat24> H;  // block (i, j), i <= j
  VecX g;
  VecX hll, gl;
  std::vector<std::map<std::size_t, Vec24>> hlx;
};

NormalSystem linearize(const FactorGraphProblem& p) {
  NormalSystem s;
  const std::size_t n = p.num_knots();
  s.g = VecX::Zero(kKnotDim * n);
  s.hll = VecX::Zero(p.landmarks.size());
  s.gl = VecX::Zero(p.landmarks.size());
  s.hlx.resize(p.landmarks.size());
  std::vector<KnotJacobian> merged;
  evaluate_factors(p, true, [&](const FactorEval& f) {
    if (f.r.size() == 0) return;
    merged.clear();
    for (const KnotJacobian& kj : f.knots) {
      auto it = std::find_if(merged.begin(), merged.end(), [&](const KnotJacobian& m) { return m.knot == kj.knot; });
      if (it == merged.end()) merged.push_back(kj);
      else it->J += kj.J;
    }
    for (std::size_t a = 0; a < merged.size(); ++a) {
      s.g.segment<kKnotDim>(kKnotDim * merged[a].knot) += merged[a].J.transpose() * f.r;
      for (std::size_t b = 0; b < merged.size(); ++b) {
        if (merged[a].knot > merged[b].knot) continue;
        auto [it, fresh] = s.H.try_emplace({merged[a].knot, merged[b].knot});
        if (fresh) it->second.setZero();
        it->second.noalias() += merged[a].J.transpose() * merged[b].J;
      }
    }
    if (f.landmark >= 0) {
      const std::size_t l = f.landmark;
      s.hll(l) += f.J_landmark.squaredNorm();
      s.gl(l) += f.J_landmark.dot(f.r);
      for (const KnotJacobian& m : merged) {
        auto [it, fresh] = s.hlx[l].try_emplace(m.knot);
        if (fresh) it->second.setZero();
        it->second.noalias() += m.J.transpose() * f.J_landmark;
      }
    }
  });
  return s;
}

struct Step {
  VecX dx, dl;
  double predicted = 0.0;  // model cost decrease
};

bool solve_damped(const FactorGraphProblem& p, const NormalSystem& s, double lambda, Step* out) {
  const std::size_t n = p.num_knots();
  const std::size_t nx = kKnotDim * n;
  const std::size_t nl = p.landmarks.size();
  constexpr double kFloor = 1e-9;

  std::map<std::pair<std::size_t, std::size_t>, Mat24> H = s.H;
  VecX g = s.g;
  VecX dll(nl);
  for (std::size_t l = 0; l < nl; ++l) {
    dll(l) = s.hll(l) > 0.0 ? s.hll(l) + lambda * std::max(s.hll(l), kFloor) : 0.0;
    if (dll(l) <= 0.0) continue;
    for (const auto& [a, va] : s.hlx[l]) {
      g.segment<kKnotDim>(kKnotDim * a) -= va * (s.gl(l) / dll(l));
      for (const auto& [b, vb] : s.hlx[l]) {
        if (a > b) continue;
        auto [it, fresh] = H.try_emplace({a, b});
        if (fresh) it->second.setZero();
        it->second.noalias() -= va * vb.transpose() / dll(l);
      }
    }
  }

  VecX damp = VecX::Zero(nx);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(H.size() * kKnotDim * kKnotDim);
  for (const auto& [ij, B] : H) {
    const auto [bi, bj] = ij;
    for (int r = 0; r < kKnotDim; ++r) {
      const std::size_t gr = kKnotDim * bi + r;
      if (p.is_fixed(gr)) continue;
      for (int c = 0; c < kKnotDim; ++c) {
        const std::size_t gc = kKnotDim * bj + c;
        if (p.is_fixed(gc) || (bi == bj && c < r)) continue;
        double v = B(r, c);
        if (gr == gc) {
          damp(gr) = lambda * std::max(s.H.count(ij) ? s.H.at(ij)(r, r) : 0.0, kFloor);
          v += damp(gr);
        }
        trip.emplace_back(static_cast<int>(gr), static_cast<int>(gc), v);
      }
    }
  }
  for (std::size_t i = 0; i < nx; ++i) {
    if (p.is_fixed(i)) {
      trip.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
      g(i) = 0.0;
    } else if (!H.count({i / kKnotDim, i / kKnotDim})) {
      // Knot with no factors at all.
      trip.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
      g(i) = 0.0;
    }
  }
  Eigen::SparseMatrix<double> A(nx, nx);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Upper> ldlt(A);
  if (ldlt.info() != Eigen::Success) return false;
  if ((ldlt.vectorD().array() <= 0.0).any()) return false;
  out->dx = ldlt.solve(-g);
  if (!out->dx.allFinite()) return false;
  for (std::size_t i = 0; i < nx; ++i)
    if (p.is_fixed(i)) out->dx(i) = 0.0;

  out->dl = VecX::Zero(nl);
  double dDd = damp.dot(out->dx.cwiseProduct(out->dx));
  for (std::size_t l = 0; l < nl; ++l) {
    if (dll(l) <= 0.0) continue;
    double acc = -s.gl(l);
    for (const auto& [a, va] : s.hlx[l]) acc -= va.dot(out->dx.segment<kKnotDim>(kKnotDim * a));
    out->dl(l) = acc / dll(l);
    dDd += (dll(l) - s.hll(l)) * out->dl(l) * out->dl(l);
  }
  const double gd = s.g.dot(out->dx) + s.gl.dot(out->dl);
  out->predicted = 0.5 * (dDd - gd);
  return true;
}

struct Snapshot {
  std::vector<KinematicState> x;
  std::vector<BiasState> b;
  std::vector<InverseDepthLandmark> l;
};

Snapshot save(const FactorGraphProblem& p) {
  Snapshot s;
  for (std::size_t k = 0; k < p.num_knots(); ++k) s.x.push_back(p.trajectory.state(k));
  s.b = p.biases;
  s.l = p.landmarks;
  return s;
}

void restore(FactorGraphProblem& p, const Snapshot& s) {
  for (std::size_t k = 0; k < p.num_knots(); ++k) p.trajectory.state(k) = s.x[k];
  p.biases = s.b;
  p.landmarks = s.l;
}

}  // namespace

void apply_step(FactorGraphProblem& p, const VecX& dx, const VecX& dl) {
  for (std::size_t k = 0; k < p.num_knots(); ++k) {
    KinematicState& x = p.trajectory.state(k);
    x = x.retract(dx.segment<18>(kKnotDim * k));
    p.biases[k] = BiasState::from_stacked(p.biases[k].stacked() + dx.segment<6>(kKnotDim * k + kBiasOffset));
  }
  for (std::size_t l = 0; l < p.landmarks.size() && l < static_cast<std::size_t>(dl.size()); ++l)
    p.landmarks[l].rho = std::clamp(p.landmarks[l].rho + dl(l), 0.0, p.rho_max);
}

OptimizeReport optimize(FactorGraphProblem& p, const SolverConfig& cfg) {
  p.sync_sizes();
  OptimizeReport rep;
  double cost = evaluate_cost(p);
  rep.initial_cost = cost;
  rep.costs.push_back(cost);
  double lambda = cfg.lambda_init;
  bool ever_solved = false;

  while (rep.iterations < cfg.max_iterations) {
    if (cost <= 1e-300) {
      rep.converged = true;
      rep.termination = "zero cost";
      break;
    }
    const NormalSystem sys = linearize(p);
    ++rep.iterations;
    bool accepted = false;
    bool done = false;
    while (!accepted && !done) {
      Step step;
      if (!solve_damped(p, sys, lambda, &step)) {
        lambda *= cfg.lambda_factor;
        if (lambda > cfg.lambda_max) {
          if (!ever_solved)
            throw Error(ErrorCode::kSolverFailure, "normal equations stay indefinite up to the largest damping");
          rep.converged = true;
          rep.termination = "damping exhausted";
          done = true;
        }
        continue;
      }
      ever_solved = true;
      if (step.predicted <= cfg.cost_tolerance * cost) {
        rep.converged = true;
        rep.termination = "predicted decrease below tolerance";
        done = true;
        break;
      }
      const Snapshot before = save(p);
      apply_step(p, step.dx, step.dl);
      const double trial = evaluate_cost(p);
      if (trial < cost) {
        const double rel = (cost - trial) / cost;
        cost = trial;
        rep.costs.push_back(cost);
        ++rep.accepted;
        lambda = std::max(lambda / cfg.lambda_factor, 1e-15);
        accepted = true;
        const double step_norm = std::sqrt(step.dx.squaredNorm() + step.dl.squaredNorm());
        if (rel < cfg.cost_tolerance || step_norm < cfg.step_tolerance) {
          rep.converged = true;
          rep.termination = rel < cfg.cost_tolerance ? "relative decrease below tolerance" : "step below tolerance";
          done = true;
        }
      } else {
        restore(p, before);
        lambda *= cfg.lambda_factor;
        if (lambda > cfg.lambda_max) {
          rep.converged = true;
          rep.termination = "no decrease up to the largest damping";
          done = true;
        }
      }
    }
    if (done) break;
  }
  if (rep.termination.empty()) rep.termination = "iteration limit";
  rep.final_cost = cost;
  return rep;
}

}  // namespace gpeio
