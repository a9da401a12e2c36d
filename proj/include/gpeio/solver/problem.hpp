#pragma once

#include <functional>
#include <map>
#include <vector>

#include "gpeio/inertial/increments.hpp"
#include "gpeio/solver/config.hpp"
#include "gpeio/trajectory/trajectory.hpp"
#include "gpeio/vision/camera.hpp"
#include "gpeio/vision/landmark.hpp"

namespace gpeio {

// Per-knot variable block: [state perturbation (18); bias (6)].
constexpr int kKnotDim = 24;
constexpr int kBiasOffset = 18;
using Vec24 = Eigen::Matrix<double, 24, 1>;
using Mat24 = Eigen::Matrix<double, 24, 24>;

enum class FactorKind { kWnojPrior, kBiasPrior, kGpif, kGpp, kPreint, kVisual, kZeroPrior, kGaugePrior, kBiasAnchor,
                        kMarginal };
const char* to_string(FactorKind kind);

struct VisualMeasurement {
  std::size_t landmark = 0;
  double t = 0.0;
  Vec2 q = Vec2::Zero();  // undistorted pixel
};

struct IncrementMeasurement {
  std::size_t knot = 0;  // between knot and knot + 1
  ImuIncrements increments;
};

// Prior left by marginalization, in square-root form: cost 0.5 |r0 + J d|^2
// with d the stacked local differences of the listed knots from their
// linearization points.
struct MarginalPrior {
  std::vector<double> knot_times;
  std::vector<KinematicState> x_lin;
  std::vector<BiasState> b_lin;
  MatX J;
  VecX r0;

  bool empty() const { return J.rows() == 0; }
  MatX information() const { return J.transpose() * J; }
};

// Soft gauge on one knot: position and heading about world z pulled to a
// reference with weight `sqrt_weight`. Roll and pitch stay free.
struct GaugePrior {
  std::size_t knot = 0;
  Pose reference;
  double sqrt_weight = 1e4;
};

// Absolute prior on one knot's bias, diagonal standard deviations [b_g; b_a].
struct BiasAnchor {
  std::size_t knot = 0;
  BiasState mean;
  Vec6 sigma = Vec6::Ones();
};

struct FactorCounts {
  std::size_t wnoj = 0, bias = 0, gpif = 0, gpp = 0, preint = 0, visual = 0, zero = 0, gauge = 0, anchor = 0,
              marginal = 0;
  std::size_t inertial() const { return gpif + gpp + preint; }
  std::size_t total() const { return wnoj + bias + gpif + gpp + preint + visual + zero + gauge + anchor + marginal; }
};

class FactorGraphProblem {
 public:
  // Variables.
  Trajectory trajectory;
  std::vector<BiasState> biases;  // one per knot
  std::vector<InverseDepthLandmark> landmarks;

  // Measurements.
  InertialScheme scheme = InertialScheme::kGpif;
  std::vector<InertialSample> gpif_samples;
  std::vector<IncrementMeasurement> increments;
  std::vector<VisualMeasurement> visual;
  MarginalPrior marginal;
  std::vector<GaugePrior> gauge_priors;
  std::vector<BiasAnchor> bias_anchors;
  bool wnoj_priors = true;  // between consecutive knots
  bool bias_priors = true;  // random walk between consecutive knots
  double lambda_omega = 0.0;  // first-knot zero priors
  double lambda_accel = 0.0;

  // Models.
  ImuNoiseModel imu;
  CameraModel camera;
  double pixel_sigma = 1.0;
  double huber_px = 2.0;
  double behind_camera_px = 50.0;
  double rho_max = 100.0;

  std::size_t num_knots() const { return trajectory.size(); }
  std::size_t knot_dims() const { return kKnotDim * num_knots(); }

  // Held dimensions are excluded from the solve.
  void hold(std::size_t knot, int first, int count);
  void hold_all_except(const std::vector<int>& free_dims);
  void release_all() { fixed_.assign(knot_dims(), 0); }
  bool is_fixed(std::size_t dim) const { return dim < fixed_.size() && fixed_[dim]; }
  // Sizes the hold mask and bias list to the trajectory.
  void sync_sizes();

  FactorCounts counts() const;

 private:
  std::vector<char> fixed_;
};

// A landmark with the (undistorted) track observations that may produce
// visual factors.
struct LandmarkObservations {
  InverseDepthLandmark landmark;
  std::vector<FeatureObservation> observations;
};

// Increments keyed by the start time of their knot pair.
using IncrementCache = std::map<double, ImuIncrements>;

// Sets models, priors and scheme from the config, then adds the inertial
// factors of the scheme over the trajectory span and one visual factor per
// observation inside the span at or after its landmark's anchor time.
// Measurements outside the span are skipped and counted in *dropped.
FactorGraphProblem build_problem(const Trajectory& trajectory, const std::vector<BiasState>& biases,
                                 const std::vector<InertialSample>& imu,
                                 const std::vector<LandmarkObservations>& landmarks, const CameraModel& camera,
                                 const SolverConfig& config, IncrementCache* cache = nullptr,
                                 std::size_t* dropped = nullptr);

// Inertial factors only (GPIF samples or per-pair increments).
void add_inertial_factors(FactorGraphProblem& problem, const std::vector<InertialSample>& imu,
                          const SolverConfig& config, IncrementCache* cache = nullptr);

struct KnotJacobian {
  std::size_t knot;
  MatX J;  // rows x 24
};

// One evaluated factor. r and the Jacobians are whitened and, for visual
// factors, rescaled so that 0.5 |r|^2 has the Huber gradient.
struct FactorEval {
  FactorKind kind;
  std::size_t index = 0;
  double cost = 0.0;
  VecX r;
  std::vector<KnotJacobian> knots;
  int landmark = -1;
  VecX J_landmark;
};

// Calls `fn` for every factor. Throws kSolverFailure naming the factor when
// a residual is not finite.
void evaluate_factors(const FactorGraphProblem& problem, bool jacobians, const std::function<void(const FactorEval&)>& fn);
double evaluate_cost(const FactorGraphProblem& problem);

// Dense normal equations over [knots (24 each); landmarks (1 each)], held
// dimensions included. For tests and rank checks.
void dense_normal_equations(const FactorGraphProblem& problem, MatX* H, VecX* g);
// Rank with eigenvalues above rel_tol * max eigenvalue.
int numerical_rank(const MatX& H, double rel_tol = 1e-9);

// Local difference of a knot block from a linearization point and its
// Jacobian w.r.t. the block perturbation.
Vec24 knot_difference(const KinematicState& x, const BiasState& b, const KinematicState& x_lin, const BiasState& b_lin,
                      Mat24* jacobian = nullptr);

}  // namespace gpeio
