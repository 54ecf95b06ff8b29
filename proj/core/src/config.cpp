#include "sonar3d/config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "sonar3d/errors.hpp"

namespace sonar3d {
namespace {

using nlohmann::json;

// Walks one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown fields.
class Reader {
 public:
  Reader(const json& node, std::string path, const std::string& source)
      : node_(node), path_(std::move(path)), source_(source) {
    if (!node_.is_object()) fail("", "expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = node_.find(key);
    if (it == node_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      fail(key, "wrong type (" + std::string(it->type_name()) + ")");
    }
  }

  void get_deg(const char* key, double& radians) {
    double deg = rad2deg(radians);
    const bool present = node_.contains(key);
    get(key, deg);
    if (present) radians = deg2rad(deg);
  }

  bool has(const char* key) const { return node_.contains(key); }

  Reader child(const char* key) {
    seen_.insert(key);
    static const json kEmpty = json::object();
    auto it = node_.find(key);
    return Reader(it == node_.end() ? kEmpty : *it, path_ + key + ".", source_);
  }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.count(key)) fail(key, "unknown field");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(source_ + ": field '" + path_ + key + "': " + what);
  }

 private:
  const json& node_;
  std::string path_;
  const std::string& source_;
  std::set<std::string> seen_;
};

void read_sonar(Reader r, SonarConfig& c) {
  r.get("max_range", c.max_range);
  r.get("range_resolution", c.range_resolution);
  r.get_deg("aperture_deg", c.aperture);
  r.get("angular_bins", c.angular_bins);
  r.get_deg("beamwidth_deg", c.beamwidth);
  r.finish();
}

json sonar_json(const SonarConfig& c) {
  return {{"max_range", c.max_range},
          {"range_resolution", c.range_resolution},
          {"aperture_deg", rad2deg(c.aperture)},
          {"angular_bins", c.angular_bins},
          {"beamwidth_deg", rad2deg(c.beamwidth)}};
}

// Runs a module validator and re-labels its error with the config section.
template <class F>
void check(const std::string& section, F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    throw ConfigError("config section '" + section + "': " + e.what());
  }
}

}  // namespace

const char* to_string(PipelineMode mode) {
  return mode == PipelineMode::kBenchmark ? "benchmark" : "semantic";
}

PipelineMode parse_mode(const std::string& text) {
  if (text == "benchmark") return PipelineMode::kBenchmark;
  if (text == "semantic") return PipelineMode::kSemantic;
  throw ConfigError("mode must be 'benchmark' or 'semantic', got '" + text + "'");
}

void PipelineConfig::validate() const {
  check("sonar.horizontal", [&] { horizontal.validate(); });
  check("sonar.vertical", [&] { vertical.validate(); });
  if (horizontal.orientation != SonarOrientation::kHorizontal ||
      vertical.orientation != SonarOrientation::kVertical) {
    throw ConfigError("config section 'sonar': orientation mix-up");
  }
  if (std::abs(horizontal.range_resolution - vertical.range_resolution) > 1e-12 ||
      std::abs(horizontal.max_range - vertical.max_range) > 1e-12) {
    throw ConfigError("config section 'sonar': both sonars need the same range sampling");
  }
  check("render", [&] { render.validate(); });
  check("cfar", [&] { cfar.validate(); });
  check("dbscan", [&] { dbscan.validate(); });
  if (min_cluster_size < 1) throw ConfigError("config field 'min_cluster_size': must be >= 1");
  check("classifier", [&] { classify.validate(); });
  if (training_samples_per_class < 5) {
    throw ConfigError("config field 'classifier.training_samples_per_class': must be >= 5");
  }
  check("fusion", [&] { fusion.validate(); });
  check("inference", [&] { inference.validate(); });
  if (min_fused_points < 1) {
    throw ConfigError("config field 'inference.min_fused_points': must be >= 1");
  }
  if (!(voxel_size > 0.0)) throw ConfigError("config field 'mapping.voxel_size': must be > 0");
  if (!(outlier_whisker > 0.0)) {
    throw ConfigError("config field 'mapping.outlier_whisker': must be > 0");
  }
}

PipelineConfig parse_config(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ": " + e.what());
  }
  PipelineConfig c;
  Reader root(j, "", source);
  if (root.has("mode")) {
    std::string mode;
    root.get("mode", mode);
    try {
      c.mode = parse_mode(mode);
    } catch (const ConfigError& e) {
      root.fail("mode", e.what());
    }
  } else {
    root.get("mode", c.mode);  // marks the key as known
  }

  Reader sonar = root.child("sonar");
  read_sonar(sonar.child("horizontal"), c.horizontal);
  read_sonar(sonar.child("vertical"), c.vertical);
  sonar.finish();

  Reader render = root.child("render");
  render.get("rays_per_bin", c.render.rays_per_bin);
  render.get("gain", c.render.gain);
  render.get("grazing_floor", c.render.grazing_floor);
  render.get("noise_floor", c.render.noise_floor);
  render.get("speckle_sigma", c.render.speckle_sigma);
  render.finish();

  Reader cfar = root.child("cfar");
  cfar.get("train_cells", c.cfar.train_cells);
  cfar.get("guard_cells", c.cfar.guard_cells);
  cfar.get("threshold_factor", c.cfar.threshold_factor);
  cfar.finish();

  Reader dbscan = root.child("dbscan");
  dbscan.get("eps", c.dbscan.eps);
  dbscan.get("min_pts", c.dbscan.min_pts);
  dbscan.finish();

  root.get("min_cluster_size", c.min_cluster_size);

  Reader cls = root.child("classifier");
  cls.get("model_path", c.classifier_model_path);
  cls.get("predictions", c.classify.predictions);
  cls.get("accept_threshold", c.classify.accept_threshold);
  cls.get("perturbation_scale", c.classify.perturbation_scale);
  cls.get("training_samples_per_class", c.training_samples_per_class);
  cls.finish();

  Reader fusion = root.child("fusion");
  fusion.get("min_confidence", c.fusion.min_confidence);
  fusion.get("range_tolerance_bins", c.fusion.range_tolerance_bins);
  fusion.finish();

  Reader inf = root.child("inference");
  auto& ip = c.inference;
  inf.get("cell_range", ip.cell_range);
  inf.get_deg("cell_bearing_deg", ip.cell_bearing);
  inf.get("range_extent", ip.range_extent);
  inf.get_deg("bearing_extent_deg", ip.bearing_extent);
  inf.get("z_min", ip.z_min);
  inf.get("z_max", ip.z_max);
  inf.get("z_step", ip.z_step);
  inf.get("sigma", ip.sigma);
  inf.get("likelihood_floor", ip.likelihood_floor);
  inf.get("confidence_factor", ip.confidence_factor);
  inf.get("reference_cap", ip.reference_cap);
  inf.get("max_icp_residual", ip.max_icp_residual);
  inf.get("min_fused_points", c.min_fused_points);
  Reader icp = inf.child("icp");
  icp.get("max_iters", ip.icp.max_iters);
  icp.get("tolerance", ip.icp.tolerance);
  icp.get("reject_factor", ip.icp.reject_factor);
  icp.get("rotation_starts", ip.icp.rotation_starts);
  icp.get_deg("rotation_span_deg", ip.icp.rotation_span);
  icp.finish();
  inf.finish();

  Reader classes = root.child("classes");
  classes.get("excluded", c.excluded_classes);
  classes.finish();

  Reader mapping = root.child("mapping");
  mapping.get("voxel_size", c.voxel_size);
  mapping.get("outlier_whisker", c.outlier_whisker);
  mapping.finish();

  Reader seeds = root.child("seeds");
  seeds.get("noise", c.seeds.noise);
  seeds.get("classifier", c.seeds.classifier);
  seeds.get("training", c.seeds.training);
  seeds.get("reference", c.seeds.reference);
  seeds.finish();

  root.finish();
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return c;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string config_to_json(const PipelineConfig& c) {
  const auto& ip = c.inference;
  json j = {
      {"mode", to_string(c.mode)},
      {"sonar", {{"horizontal", sonar_json(c.horizontal)}, {"vertical", sonar_json(c.vertical)}}},
      {"render",
       {{"rays_per_bin", c.render.rays_per_bin},
        {"gain", c.render.gain},
        {"grazing_floor", c.render.grazing_floor},
        {"noise_floor", c.render.noise_floor},
        {"speckle_sigma", c.render.speckle_sigma}}},
      {"cfar",
       {{"train_cells", c.cfar.train_cells},
        {"guard_cells", c.cfar.guard_cells},
        {"threshold_factor", c.cfar.threshold_factor}}},
      {"dbscan", {{"eps", c.dbscan.eps}, {"min_pts", c.dbscan.min_pts}}},
      {"min_cluster_size", c.min_cluster_size},
      {"classifier",
       {{"model_path", c.classifier_model_path},
        {"predictions", c.classify.predictions},
        {"accept_threshold", c.classify.accept_threshold},
        {"perturbation_scale", c.classify.perturbation_scale},
        {"training_samples_per_class", c.training_samples_per_class}}},
      {"fusion",
       {{"min_confidence", c.fusion.min_confidence},
        {"range_tolerance_bins", c.fusion.range_tolerance_bins}}},
      {"inference",
       {{"cell_range", ip.cell_range},
        {"cell_bearing_deg", rad2deg(ip.cell_bearing)},
        {"range_extent", ip.range_extent},
        {"bearing_extent_deg", rad2deg(ip.bearing_extent)},
        {"z_min", ip.z_min},
        {"z_max", ip.z_max},
        {"z_step", ip.z_step},
        {"sigma", ip.sigma},
        {"likelihood_floor", ip.likelihood_floor},
        {"confidence_factor", ip.confidence_factor},
        {"reference_cap", ip.reference_cap},
        {"max_icp_residual", ip.max_icp_residual},
        {"min_fused_points", c.min_fused_points},
        {"icp",
         {{"max_iters", ip.icp.max_iters},
          {"tolerance", ip.icp.tolerance},
          {"reject_factor", ip.icp.reject_factor},
          {"rotation_starts", ip.icp.rotation_starts},
          {"rotation_span_deg", rad2deg(ip.icp.rotation_span)}}}}},
      {"classes", {{"excluded", c.excluded_classes}}},
      {"mapping", {{"voxel_size", c.voxel_size}, {"outlier_whisker", c.outlier_whisker}}},
      {"seeds",
       {{"noise", c.seeds.noise},
        {"classifier", c.seeds.classifier},
        {"training", c.seeds.training},
        {"reference", c.seeds.reference}}},
  };
  return j.dump(2) + "\n";
}

}  // namespace sonar3d
