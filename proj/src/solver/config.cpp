#include "gpeio/solver/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "gpeio/common/error.hpp"

namespace gpeio {

std::string to_string(InertialScheme s) {
  switch (s) {
    case InertialScheme::kGpif: return "gpif";
    case InertialScheme::kGpp: return "gpp";
    case InertialScheme::kPreint: return "preint";
  }
  return "?";
}

InertialScheme scheme_from_string(const std::string& name) {
  if (name == "gpif") return InertialScheme::kGpif;
  if (name == "gpp") return InertialScheme::kGpp;
  if (name == "preint") return InertialScheme::kPreint;
  throw Error(ErrorCode::kDataError, "unknown inertial scheme '" + name + "' (gpif, gpp, preint)");
}

void SolverConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, std::string("solver config: ") + what);
  };
  require(window_knots >= 3, "window needs at least 3 knots");
  require(slide_knots >= 1 && slide_knots < window_knots, "slide must be in [1, window)");
  require(knot_spacing > 0.0, "knot spacing must be positive");
  require(lambda_init > 0.0 && lambda_factor > 1.0 && lambda_max > lambda_init, "bad damping schedule");
  require(max_iterations >= 1, "max iterations must be positive");
  require(cost_tolerance > 0.0 && step_tolerance > 0.0, "tolerances must be positive");
  require(pixel_sigma > 0.0 && huber_px > 0.0 && outlier_px > 0.0, "pixel noise and thresholds must be positive");
  require(visual_interval >= 0.0 && min_track_span >= 0.0, "visual sampling must be non-negative");
  require(gpif_stride >= 1, "gpif stride must be positive");
  require(lambda_omega >= 0.0 && lambda_accel >= 0.0, "warm-up weights must be non-negative");
  require(init_duration >= init_min_duration && init_min_duration > 0.0, "bad initialization window");
  require(init_frame_interval > 0.0 && init_retry_step > 0.0, "bad initialization sampling");
  require(init_bias_sigma_g > 0.0 && init_bias_sigma_a > 0.0, "initial bias widths must be positive");
  wnoj.validate();
  imu.validate();
}

namespace {

// One list of (key, field) bindings drives both directions.
template <typename Visitor>
void visit_fields(SolverConfig& c, double* qc_rot, double* qc_trans, double* sg, double* sa, double* sbg, double* sba,
                  Visitor&& v) {
  v("window_knots", c.window_knots);
  v("slide_knots", c.slide_knots);
  v("knot_spacing", c.knot_spacing);
  v("lambda_init", c.lambda_init);
  v("lambda_factor", c.lambda_factor);
  v("lambda_max", c.lambda_max);
  v("max_iterations", c.max_iterations);
  v("cost_tolerance", c.cost_tolerance);
  v("step_tolerance", c.step_tolerance);
  v("pixel_sigma", c.pixel_sigma);
  v("huber_px", c.huber_px);
  v("outlier_px", c.outlier_px);
  v("visual_interval", c.visual_interval);
  v("min_track_span", c.min_track_span);
  v("behind_camera_px", c.behind_camera_px);
  v("gpif_stride", c.gpif_stride);
  v("lambda_omega", c.lambda_omega);
  v("lambda_accel", c.lambda_accel);
  v("gauge_hold_velocity", c.gauge_hold_velocity);
  v("init.bias_sigma_g", c.init_bias_sigma_g);
  v("init.bias_sigma_a", c.init_bias_sigma_a);
  v("init.duration", c.init_duration);
  v("init.min_duration", c.init_min_duration);
  v("init.min_disparity", c.init_min_disparity);
  v("init.frame_interval", c.init_frame_interval);
  v("init.retry_step", c.init_retry_step);
  v("gpp.num_latent", c.gpp.num_latent);
  v("gpp.lengthscale", c.gpp.lengthscale);
  v("gpp.noise_ratio", c.gpp.noise_ratio);
  v("gpp.refinement_passes", c.gpp.refinement_passes);
  v("gpp.margin_periods", c.gpp.margin_periods);
  v("gpp.svd_rcond", c.gpp.svd_rcond);
  v("gpp.max_condition", c.gpp.max_condition);
  v("wnoj.qc_rot", *qc_rot);
  v("wnoj.qc_trans", *qc_trans);
  v("imu.sigma_g", *sg);
  v("imu.sigma_a", *sa);
  v("imu.sigma_bg", *sbg);
  v("imu.sigma_ba", *sba);
  v("frontend.width", c.frontend.width);
  v("frontend.height", c.frontend.height);
  v("frontend.search_radius", c.frontend.search_radius);
  v("frontend.t_min", c.frontend.t_min);
  v("frontend.t_max", c.frontend.t_max);
  v("frontend.max_features", c.frontend.max_features);
  v("frontend.sweep_period", c.frontend.sweep_period);
  v("frontend.track_gate", c.frontend.track_gate);
  v("frontend.corner.half_width", c.frontend.corner.half_width);
  v("frontend.corner.recent_count", c.frontend.corner.recent_count);
  v("frontend.corner.recency", c.frontend.corner.recency);
  v("frontend.corner.min_support", c.frontend.corner.min_support);
  v("frontend.corner.harris_k", c.frontend.corner.harris_k);
  v("frontend.corner.gaussian_sigma", c.frontend.corner.gaussian_sigma);
  v("frontend.corner.threshold", c.frontend.corner.threshold);
  v("landmark.rho_max", c.landmark.rho_max);
  v("landmark.min_parallax", c.landmark.min_parallax);
}

struct ModelScalars {
  double qc_rot, qc_trans, sg, sa, sbg, sba;
  explicit ModelScalars(const SolverConfig& c)
      : qc_rot(c.wnoj.Qc(0, 0)),
        qc_trans(c.wnoj.Qc(3, 3)),
        sg(std::sqrt(c.imu.Q_g(0, 0))),
        sa(std::sqrt(c.imu.Q_a(0, 0))),
        sbg(std::sqrt(c.imu.Q_bg(0, 0))),
        sba(std::sqrt(c.imu.Q_ba(0, 0))) {}
  void apply(SolverConfig& c) const {
    c.wnoj = WnojModel::diagonal(qc_rot, qc_trans);
    const Vec3 g = c.imu.gravity;
    c.imu = ImuNoiseModel::isotropic(sg, sa, sbg, sba);
    c.imu.gravity = g;
  }
};

YAML::Node* find_or_null(YAML::Node& root, const std::string& dotted, std::vector<YAML::Node>& keep) {
  keep.clear();
  keep.push_back(root);
  std::stringstream ss(dotted);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    YAML::Node next = keep.back()[parts[i]];
    if (!next.IsDefined() || next.IsNull()) return nullptr;
    keep.push_back(next);
  }
  return &keep.back();
}

YAML::Node to_node(const SolverConfig& config) {
  SolverConfig c = config;
  ModelScalars m(c);
  YAML::Node root;
  root["scheme"] = to_string(c.scheme);
  visit_fields(c, &m.qc_rot, &m.qc_trans, &m.sg, &m.sa, &m.sbg, &m.sba, [&](const std::string& key, auto& field) {
    std::stringstream ss(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    // yaml-cpp nodes are handles, so walking by assignment would rebind.
    if (parts.size() == 1) root[parts[0]] = field;
    else if (parts.size() == 2) root[parts[0]][parts[1]] = field;
    else root[parts[0]][parts[1]][parts[2]] = field;
  });
  root["imu"]["gravity"] = std::vector<double>{c.imu.gravity.x(), c.imu.gravity.y(), c.imu.gravity.z()};
  return root;
}

SolverConfig from_node(YAML::Node root) {
  SolverConfig c;
  ModelScalars m(c);
  if (root["scheme"]) c.scheme = scheme_from_string(root["scheme"].as<std::string>());
  std::vector<YAML::Node> keep;
  visit_fields(c, &m.qc_rot, &m.qc_trans, &m.sg, &m.sa, &m.sbg, &m.sba, [&](const std::string& key, auto& field) {
    if (YAML::Node* n = find_or_null(root, key, keep)) field = n->as<std::remove_reference_t<decltype(field)>>();
  });
  m.apply(c);
  if (root["imu"] && root["imu"]["gravity"]) {
    const auto g = root["imu"]["gravity"].as<std::vector<double>>();
    if (g.size() != 3) throw Error(ErrorCode::kDataError, "imu.gravity needs 3 values");
    c.imu.gravity = Vec3(g[0], g[1], g[2]);
  }
  return c;
}

bool known_key(const std::string& key) {
  if (key == "scheme" || key == "imu.gravity") return true;
  SolverConfig c;
  double d[6];
  bool found = false;
  visit_fields(c, d, d + 1, d + 2, d + 3, d + 4, d + 5, [&](const std::string& k, auto&) { found |= (k == key); });
  return found;
}

}  // namespace

std::string solver_config_to_yaml(const SolverConfig& config) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << to_node(config);
  return out.c_str();
}

SolverConfig solver_config_from_yaml(const std::string& text) {
  SolverConfig c;
  try {
    c = from_node(YAML::Load(text));
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kDataError, std::string("solver config: ") + e.what());
  }
  try {
    c.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kDataError, e.what());
  }
  return c;
}

SolverConfig load_solver_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::kDataError, "cannot read solver config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return solver_config_from_yaml(ss.str());
}

void save_solver_config(const std::string& path, const SolverConfig& config) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::kDataError, "cannot write solver config " + path);
  f << solver_config_to_yaml(config) << "\n";
}

void apply_override(SolverConfig& config, const std::string& key, const std::string& value) {
  if (!known_key(key)) throw Error(ErrorCode::kDataError, "unknown config key '" + key + "'");
  YAML::Node root = to_node(config);
  YAML::Node parsed;
  try {
    parsed = YAML::Load(value);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kDataError, "bad value for '" + key + "': " + e.what());
  }
  std::stringstream ss(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.size() == 1) root[parts[0]] = parsed;
  else if (parts.size() == 2) root[parts[0]][parts[1]] = parsed;
  else root[parts[0]][parts[1]][parts[2]] = parsed;
  try {
    config = from_node(root);
    config.validate();
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kDataError, "bad value for '" + key + "': " + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::kDataError, e.what());
  }
}

}  // namespace gpeio
