#include "sonar3d/inference.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "sonar3d/errors.hpp"

namespace sonar3d {
namespace {

constexpr int kFormatVersion = 1;

void require_label(const ObjectDetection& object, const ClassModel& model) {
  if (object.classification.label == kUnknownClass) {
    throw PreconditionError("inference: unknown-class objects cannot enter a class model");
  }
  if (object.classification.label != model.class_id()) {
    throw PreconditionError("inference: object label " +
                            std::to_string(object.classification.label) +
                            " does not match class model " + std::to_string(model.class_id()));
  }
  if (object.cluster.features.size() < 3) {
    throw PreconditionError("inference: object needs at least 3 features");
  }
}

}  // namespace

int InferenceParams::z_bins() const {
  return static_cast<int>(std::lround((z_max - z_min) / z_step));
}

double InferenceParams::z_center(int bin) const { return z_min + (bin + 0.5) * z_step; }

void InferenceParams::validate() const {
  if (!(cell_range > 0.0) || !(cell_bearing > 0.0)) {
    throw ConfigError("inference: cell sizes must be positive");
  }
  if (!(range_extent > 0.0) || !(bearing_extent > 0.0)) {
    throw ConfigError("inference: grid extents must be positive");
  }
  if (!(z_max > z_min) || !(z_step > 0.0) || z_bins() < 2) {
    throw ConfigError("inference: invalid height grid");
  }
  if (z_min >= 0.0 || z_max <= 0.0) {
    throw ConfigError("inference: height grid must straddle z = 0");
  }
  if (!(sigma > 0.0)) throw ConfigError("inference: sigma must be positive");
  if (likelihood_floor < 0.0) throw ConfigError("inference: likelihood_floor must be >= 0");
  if (!(confidence_factor > 0.0)) throw ConfigError("inference: confidence_factor must be positive");
  if (reference_cap < 3) throw ConfigError("inference: reference_cap must be >= 3");
  if (!(max_icp_residual > 0.0)) throw ConfigError("inference: max_icp_residual must be positive");
  icp.validate();
}

HeightDistribution::HeightDistribution(int bins)
    : p_(static_cast<std::size_t>(bins), 1.0 / bins) {}

void HeightDistribution::update(const InferenceParams& grid, double z, double sigma) {
  const int n = static_cast<int>(p_.size());
  std::vector<double> likelihood(n);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double d = grid.z_center(k) - z;
    likelihood[k] = std::exp(-d * d * inv) + grid.likelihood_floor;
    sum += p_[k] * likelihood[k];
  }
  if (!(sum > 0.0)) {
    // complete underflow (only possible without a floor): keep the new evidence
    sum = 0.0;
    for (int k = 0; k < n; ++k) sum += likelihood[k];
    for (int k = 0; k < n; ++k) p_[k] = likelihood[k] / sum;
  } else {
    for (int k = 0; k < n; ++k) p_[k] = p_[k] * likelihood[k] / sum;
  }
  ++updates_;
}

ClassModel::ClassModel(int class_id, InferenceParams params, std::uint64_t seed)
    : class_id_(class_id), params_(std::move(params)), rng_(seed) {
  params_.validate();
}

std::optional<CellKey> ClassModel::cell_of(double range, double bearing) const {
  if (!reference_) return std::nullopt;
  if (std::abs(range - reference_->origin_range) > params_.range_extent) return std::nullopt;
  if (std::abs(normalize_angle(bearing - reference_->origin_bearing)) > params_.bearing_extent) {
    return std::nullopt;
  }
  return CellKey{static_cast<int>(std::floor(range / params_.cell_range)),
                 static_cast<int>(std::floor(bearing / params_.cell_bearing))};
}

const HeightDistribution* ClassModel::find(const CellKey& key) const {
  auto it = cells_.find(key);
  return it == cells_.end() ? nullptr : &it->second;
}

bool ClassModel::apply_measurement(double range, double bearing, double z, double sigma) {
  const auto key = cell_of(range, bearing);
  if (!key || z < params_.z_min || z > params_.z_max) {
    ++dropped_;
    return false;
  }
  auto it = cells_.find(*key);
  if (it == cells_.end()) it = cells_.emplace(*key, HeightDistribution(params_.z_bins())).first;
  it->second.update(params_, z, sigma);
  ++update_count_;
  return true;
}

void ClassModel::grow_reference(const PointSet2D& points) {
  if (!reference_) throw PreconditionError("grow_reference: no reference frame yet");
  auto& cloud = reference_->cloud;
  cloud.insert(cloud.end(), points.begin(), points.end());
  if (cloud.size() > params_.reference_cap) {
    std::shuffle(cloud.begin(), cloud.end(), rng_);
    cloud.resize(params_.reference_cap);
  }
}

PointSet2D cluster_points(const FeatureCluster& cluster) {
  PointSet2D out;
  out.reserve(cluster.features.size());
  for (const auto& f : cluster.features) {
    const auto& m = f.measurement;
    out.push_back({m.range * std::cos(m.bearing), m.range * std::sin(m.bearing)});
  }
  return out;
}

std::pair<double, double> cluster_anchor(const FeatureCluster& cluster) {
  if (cluster.features.empty()) throw PreconditionError("cluster_anchor: empty cluster");
  double min_range = cluster.features.front().measurement.range;
  std::vector<double> bearings;
  bearings.reserve(cluster.features.size());
  for (const auto& f : cluster.features) {
    min_range = std::min(min_range, f.measurement.range);
    bearings.push_back(f.measurement.bearing);
  }
  const auto mid = bearings.begin() + static_cast<std::ptrdiff_t>((bearings.size() - 1) / 2);
  std::nth_element(bearings.begin(), mid, bearings.end());
  return {min_range, *mid};
}

RegistrationResult locate_object(const ObjectDetection& object, const ClassModel& model) {
  require_label(object, model);
  if (!model.reference()) {
    throw PreconditionError("locate_object: class model has no reference frame");
  }
  const auto& ref = *model.reference();
  const auto [range, bearing] = cluster_anchor(object.cluster);
  const double rotation = normalize_angle(ref.origin_bearing - bearing);
  const Transform2D rotate = Transform2D::from(rotation, 0.0, 0.0);
  const Point2 anchor = rotate.apply({range * std::cos(bearing), range * std::sin(bearing)});
  const Point2 ref_anchor{ref.origin_range * std::cos(ref.origin_bearing),
                          ref.origin_range * std::sin(ref.origin_bearing)};
  const Transform2D init =
      Transform2D::from(rotation, ref_anchor.x - anchor.x, ref_anchor.y - anchor.y);

  RegistrationResult result;
  result.transform = icp_2d(cluster_points(object.cluster), ref.cloud, init, model.params().icp);
  result.accepted = result.transform.converged &&
                    result.transform.residual <= model.params().max_icp_residual;
  return result;
}

RegistrationResult register_object(const ObjectDetection& object, ClassModel& model,
                                   bool grow_reference) {
  require_label(object, model);
  if (!model.reference()) {
    if (!grow_reference) {
      throw PreconditionError("register_object: first sighting must grow the reference");
    }
    const auto [range, bearing] = cluster_anchor(object.cluster);
    model.set_reference({range, bearing, cluster_points(object.cluster)});
    RegistrationResult result;
    result.transform.converged = true;
    result.accepted = true;
    result.first_sighting = true;
    return result;
  }
  RegistrationResult result = locate_object(object, model);
  if (result.accepted && grow_reference) {
    model.grow_reference(transform_points(result.transform, cluster_points(object.cluster)));
  }
  return result;
}

UpdateStats update_class_model(ClassModel& model, const std::vector<FusedPoint>& fused,
                               const Transform2D& transform, double sigma) {
  if (!(sigma > 0.0)) throw PreconditionError("update_class_model: sigma must be positive");
  UpdateStats stats;
  for (const auto& f : fused) {
    const double z = fused_to_cartesian(f).z;
    const Point2 q =
        transform.apply({f.range * std::cos(f.bearing), f.range * std::sin(f.bearing)});
    if (model.apply_measurement(std::hypot(q.x, q.y), std::atan2(q.y, q.x), z, sigma)) {
      ++stats.applied;
    } else {
      ++stats.dropped;
    }
  }
  return stats;
}

std::vector<double> map_estimate(const ClassModel& model, double range, double bearing,
                                 double confidence_threshold) {
  std::vector<double> out;
  const auto key = model.cell_of(range, bearing);
  if (!key) return out;
  const HeightDistribution* dist = model.find(*key);
  if (!dist) return out;
  const auto& params = model.params();
  const auto& p = dist->probabilities();
  int best_neg = -1;
  int best_pos = -1;
  for (int k = 0; k < static_cast<int>(p.size()); ++k) {
    int& best = params.z_center(k) <= 0.0 ? best_neg : best_pos;
    if (best < 0 || p[k] > p[best]) best = k;
  }
  for (int k : {best_neg, best_pos}) {
    if (k >= 0 && p[k] > confidence_threshold) out.push_back(params.z_center(k));
  }
  return out;
}

std::vector<PredictedPoint> predict_heights(const ObjectDetection& object, const ClassModel& model,
                                            double confidence_threshold,
                                            const std::vector<char>& skip,
                                            double max_elevation) {
  require_label(object, model);
  if (model.update_count() < 1) {
    throw PreconditionError("predict_heights: class model has never been updated");
  }
  if (!skip.empty() && skip.size() != object.cluster.features.size()) {
    throw PreconditionError("predict_heights: skip mask size mismatch");
  }
  std::vector<PredictedPoint> out;
  const RegistrationResult reg = locate_object(object, model);
  if (!reg.accepted) return out;
  const auto& features = object.cluster.features;
  for (int i = 0; i < static_cast<int>(features.size()); ++i) {
    if (!skip.empty() && skip[i]) continue;
    const auto& m = features[i].measurement;
    const Point2 q = reg.transform.apply({m.range * std::cos(m.bearing), m.range * std::sin(m.bearing)});
    for (double z : map_estimate(model, std::hypot(q.x, q.y), std::atan2(q.y, q.x),
                                 confidence_threshold)) {
      if (std::abs(z) > m.range) continue;  // no real elevation
      const double elevation = std::asin(z / m.range);
      if (std::abs(elevation) > max_elevation) continue;  // outside the beam
      out.push_back({spherical_to_cartesian({m.range, m.bearing, elevation, 0.0}), i});
    }
  }
  return out;
}

std::string class_model_to_json(const ClassModel& model, const std::string& class_name) {
  const auto& p = model.params();
  nlohmann::json j;
  j["format"] = "sonar3d-class-model";
  j["version"] = kFormatVersion;
  j["class_id"] = model.class_id();
  j["class_name"] = class_name;
  j["grid"] = {{"cell_range", p.cell_range},
               {"cell_bearing", p.cell_bearing},
               {"range_extent", p.range_extent},
               {"bearing_extent", p.bearing_extent},
               {"z_min", p.z_min},
               {"z_max", p.z_max},
               {"z_step", p.z_step},
               {"sigma", p.sigma},
               {"likelihood_floor", p.likelihood_floor},
               {"confidence_factor", p.confidence_factor}};
  j["update_count"] = model.update_count();
  if (const auto& ref = model.reference()) {
    nlohmann::json cloud = nlohmann::json::array();
    for (const auto& q : ref->cloud) cloud.push_back({q.x, q.y});
    j["reference"] = {{"origin_range", ref->origin_range},
                      {"origin_bearing", ref->origin_bearing},
                      {"cloud", cloud}};
  } else {
    j["reference"] = nullptr;
  }
  j["cells"] = nlohmann::json::array();
  for (const auto& [key, dist] : model.cells()) {
    j["cells"].push_back({{"range_index", key.first},
                          {"bearing_index", key.second},
                          {"updates", dist.updates()},
                          {"p", dist.probabilities()}});
  }
  return j.dump() + "\n";
}

ClassModel class_model_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != "sonar3d-class-model") {
      throw ConfigError("class model: unexpected format tag");
    }
    if (j.at("version").get<int>() != kFormatVersion) {
      throw ConfigError("class model: unsupported version " + j.at("version").dump());
    }
    InferenceParams p;
    const auto& g = j.at("grid");
    p.cell_range = g.at("cell_range").get<double>();
    p.cell_bearing = g.at("cell_bearing").get<double>();
    p.range_extent = g.at("range_extent").get<double>();
    p.bearing_extent = g.at("bearing_extent").get<double>();
    p.z_min = g.at("z_min").get<double>();
    p.z_max = g.at("z_max").get<double>();
    p.z_step = g.at("z_step").get<double>();
    p.sigma = g.at("sigma").get<double>();
    p.likelihood_floor = g.at("likelihood_floor").get<double>();
    p.confidence_factor = g.at("confidence_factor").get<double>();
    ClassModel model(j.at("class_id").get<int>(), p);
    if (!j.at("reference").is_null()) {
      const auto& r = j.at("reference");
      ReferenceFrame ref;
      ref.origin_range = r.at("origin_range").get<double>();
      ref.origin_bearing = r.at("origin_bearing").get<double>();
      for (const auto& q : r.at("cloud")) ref.cloud.push_back({q.at(0).get<double>(), q.at(1).get<double>()});
      model.set_reference(std::move(ref));
    }
    for (const auto& c : j.at("cells")) {
      HeightDistribution dist(p.z_bins());
      dist.probabilities() = c.at("p").get<std::vector<double>>();
      if (static_cast<int>(dist.probabilities().size()) != p.z_bins()) {
        throw ConfigError("class model: cell distribution has the wrong length");
      }
      dist.set_updates(c.at("updates").get<int>());
      model.restore_cell({c.at("range_index").get<int>(), c.at("bearing_index").get<int>()},
                         std::move(dist));
    }
    model.set_update_count(j.at("update_count").get<int>());
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("class model: ") + e.what());
  }
}

}  // namespace sonar3d
