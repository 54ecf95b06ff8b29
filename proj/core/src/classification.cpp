#include "sonar3d/classification.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "sonar3d/errors.hpp"

namespace sonar3d {
namespace {

constexpr int kFormatVersion = 1;
constexpr double kMinScale = 1e-6;

double scaled_distance2(const std::vector<double>& x, const std::vector<double>& c,
                        const std::vector<double>& scale) {
  double d2 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double u = (x[k] - c[k]) / scale[k];
    d2 += u * u;
  }
  return d2;
}

}  // namespace

ObjectPatch extract_patch(const PolarImage& img, const FeatureCluster& cluster) {
  if (cluster.features.empty()) throw PreconditionError("extract_patch: empty cluster");
  int r0 = std::numeric_limits<int>::max(), r1 = -1;
  int c0 = std::numeric_limits<int>::max(), c1 = -1;
  for (const auto& f : cluster.features) {
    if (f.range_bin < 0 || f.range_bin >= img.rows() || f.angle_bin < 0 ||
        f.angle_bin >= img.cols()) {
      throw PreconditionError("extract_patch: feature outside the image");
    }
    r0 = std::min(r0, f.range_bin);
    r1 = std::max(r1, f.range_bin);
    c0 = std::min(c0, f.angle_bin);
    c1 = std::max(c1, f.angle_bin);
  }
  const int h = r1 - r0 + 1;
  const int w = c1 - c0 + 1;

  double r_min = std::numeric_limits<double>::infinity(), r_max = -r_min;
  double r_sum = 0.0;
  for (const auto& f : cluster.features) {
    r_min = std::min(r_min, f.measurement.range);
    r_max = std::max(r_max, f.measurement.range);
    r_sum += f.measurement.range;
  }
  const double r_mean = r_sum / static_cast<double>(cluster.features.size());

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      lo = std::min(lo, img.at(r, c));
      hi = std::max(hi, img.at(r, c));
    }
  }
  const double span = hi - lo;
  auto source = [&](int r, int c) { return span > 0.0 ? (img.at(r0 + r, c0 + c) - lo) / span : 0.0; };

  ObjectPatch patch;
  patch.source_rows = h;
  patch.source_cols = w;
  patch.footprint_width = r_mean * w * img.config().bin_width();
  patch.footprint_depth = r_max - r_min + img.config().range_resolution;
  const double s = static_cast<double>(kPatchSize) / std::max(h, w);
  patch.content_rows = std::clamp(static_cast<int>(std::lround(h * s)), 1, kPatchSize);
  patch.content_cols = std::clamp(static_cast<int>(std::lround(w * s)), 1, kPatchSize);
  const int off_r = (kPatchSize - patch.content_rows) / 2;
  const int off_c = (kPatchSize - patch.content_cols) / 2;

  // source cells whose centres fall in [lo, hi) along one axis
  auto cover = [](int i, int content, int source) {
    const double a = static_cast<double>(i) * source / content;
    const double b = static_cast<double>(i + 1) * source / content;
    int first = static_cast<int>(std::ceil(a - 0.5));
    int last = static_cast<int>(std::ceil(b - 0.5)) - 1;
    if (last < first) first = last = std::min(static_cast<int>(std::floor(0.5 * (a + b))), source - 1);
    return std::pair<int, int>{std::max(first, 0), std::min(last, source - 1)};
  };

  for (int i = 0; i < patch.content_rows; ++i) {
    const auto [ra, rb] = cover(i, patch.content_rows, h);
    for (int j = 0; j < patch.content_cols; ++j) {
      const auto [ca, cb] = cover(j, patch.content_cols, w);
      double sum = 0.0;
      int count = 0;
      for (int r = ra; r <= rb; ++r) {
        for (int c = ca; c <= cb; ++c) {
          sum += source(r, c);
          ++count;
        }
      }
      patch.at(off_r + i, off_c + j) = sum / count;
    }
  }
  return patch;
}

std::vector<double> patch_descriptor(const ObjectPatch& patch) {
  std::vector<double> d(kDescriptorSize, 0.0);
  double mass = 0.0, mi = 0.0, mj = 0.0;
  int occupied = 0;
  for (int i = 0; i < kPatchSize; ++i) {
    for (int j = 0; j < kPatchSize; ++j) {
      const double v = patch.at(i, j);
      if (v > 0.25) ++occupied;
      mass += v;
      mi += v * i;
      mj += v * j;
    }
  }
  const double area = static_cast<double>(std::max(1, patch.content_rows * patch.content_cols));
  d[0] = occupied / area;
  d[1] = static_cast<double>(patch.source_rows) / (patch.source_rows + patch.source_cols);
  if (mass > 0.0) {
    mi /= mass;
    mj /= mass;
    double m20 = 0.0, m02 = 0.0, m11 = 0.0;
    std::array<double, 4> ring_sum{};
    std::array<int, 4> ring_count{};
    for (int i = 0; i < kPatchSize; ++i) {
      for (int j = 0; j < kPatchSize; ++j) {
        const double v = patch.at(i, j);
        const double di = i - mi;
        const double dj = j - mj;
        m20 += v * di * di;
        m02 += v * dj * dj;
        m11 += v * di * dj;
        const int ring = static_cast<int>(std::sqrt(di * di + dj * dj) / 5.0);
        if (ring < 4) {
          ring_sum[ring] += v;
          ++ring_count[ring];
        }
      }
    }
    const double norm = mass * kPatchSize * kPatchSize;
    d[2] = m20 / norm;
    d[3] = m02 / norm;
    d[4] = m11 / norm;
    for (int k = 0; k < 4; ++k) d[6 + k] = ring_count[k] ? ring_sum[k] / ring_count[k] : 0.0;
  }
  d[5] = mass / area;
  // log keeps wall-sized footprints from swamping the pooled scale
  d[10] = std::log(std::max(patch.footprint_width, 1e-3));
  d[11] = std::log(std::max(patch.footprint_depth, 1e-3));
  return d;
}

const ClassifierModel::ClassStats* ClassifierModel::find(int id) const {
  for (const auto& c : classes) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

std::string ClassifierModel::name_of(int id) const {
  if (const auto* c = find(id)) return c->name;
  return "unknown";
}

int ClassifierModel::id_of(const std::string& name) const {
  for (const auto& c : classes) {
    if (c.name == name) return c.id;
  }
  return kUnknownClass;
}

void ClassifierModel::validate() const {
  if (classes.empty()) throw ConfigError("classifier: model has no classes");
  for (const auto& c : classes) {
    if (c.centroid.size() != scale.size() || c.dispersion.size() != scale.size()) {
      throw ConfigError("classifier: descriptor size mismatch in class " + c.name);
    }
    for (double v : c.centroid) {
      if (!std::isfinite(v)) throw ConfigError("classifier: non-finite centroid");
    }
  }
  for (double s : scale) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("classifier: invalid scale");
  }
}

ClassifierModel train_classifier(const std::vector<LabeledPatch>& samples, std::uint64_t /*seed*/,
                                 const std::vector<std::pair<int, std::string>>& names) {
  std::map<int, std::vector<std::vector<double>>> by_class;
  for (const auto& s : samples) by_class[s.class_id].push_back(patch_descriptor(s.patch));
  if (by_class.size() < 2) throw PreconditionError("train_classifier: need at least two classes");

  ClassifierModel model;
  std::vector<double> pooled(kDescriptorSize, 0.0);
  int dof = 0;
  for (const auto& [id, rows] : by_class) {
    if (rows.size() < 5) {
      throw PreconditionError("train_classifier: class " + std::to_string(id) +
                              " has fewer than 5 samples");
    }
    ClassifierModel::ClassStats stats;
    stats.id = id;
    stats.name = "class_" + std::to_string(id);
    for (const auto& [nid, name] : names) {
      if (nid == id) stats.name = name;
    }
    stats.samples = static_cast<int>(rows.size());
    stats.centroid.assign(kDescriptorSize, 0.0);
    stats.dispersion.assign(kDescriptorSize, 0.0);
    for (const auto& r : rows) {
      for (int k = 0; k < kDescriptorSize; ++k) stats.centroid[k] += r[k];
    }
    for (double& v : stats.centroid) v /= static_cast<double>(rows.size());
    for (const auto& r : rows) {
      for (int k = 0; k < kDescriptorSize; ++k) {
        const double u = r[k] - stats.centroid[k];
        stats.dispersion[k] += u * u;
        pooled[k] += u * u;
      }
    }
    for (double& v : stats.dispersion) v = std::sqrt(v / static_cast<double>(rows.size() - 1));
    dof += static_cast<int>(rows.size()) - 1;
    model.classes.push_back(std::move(stats));
  }
  model.scale.resize(kDescriptorSize);
  for (int k = 0; k < kDescriptorSize; ++k) {
    model.scale[k] = std::max(std::sqrt(pooled[k] / dof), kMinScale);
  }
  return model;
}

void ClassifyParams::validate() const {
  if (predictions < 1) throw ConfigError("classify: m (predictions) must be >= 1");
  if (!(accept_threshold > 0.0) || accept_threshold > 1.0) {
    throw ConfigError("classify: accept_threshold must be in (0, 1]");
  }
  if (perturbation_scale < 0.0) throw ConfigError("classify: perturbation_scale must be >= 0");
}

int nearest_class(const std::vector<double>& descriptor, const ClassifierModel& model) {
  int best_id = kUnknownClass;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : model.classes) {
    const double d2 = scaled_distance2(descriptor, c.centroid, model.scale);
    if (d2 < best) {
      best = d2;
      best_id = c.id;
    }
  }
  return best_id;
}

Classification classify_descriptor(const std::vector<double>& descriptor,
                                   const ClassifierModel& model, const ClassifyParams& params,
                                   std::uint64_t seed) {
  params.validate();
  model.validate();
  if (descriptor.size() != model.scale.size()) {
    throw PreconditionError("classify: descriptor size does not match the model");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::map<int, int> votes;
  std::vector<double> x(descriptor.size());
  for (int k = 0; k < params.predictions; ++k) {
    for (std::size_t d = 0; d < x.size(); ++d) {
      x[d] = descriptor[d] + params.perturbation_scale * model.scale[d] * gauss(rng);
    }
    ++votes[nearest_class(x, model)];
  }
  Classification out;
  out.prediction_count = params.predictions;
  int best_votes = -1;
  for (const auto& [id, count] : votes) {
    if (count > best_votes) {  // std::map order: lowest id wins ties
      best_votes = count;
      out.modal_class = id;
    }
  }
  out.confidence = static_cast<double>(best_votes) / params.predictions;
  out.label = out.confidence >= params.accept_threshold ? out.modal_class : kUnknownClass;
  return out;
}

Classification classify_object(const ObjectPatch& patch, const ClassifierModel& model,
                               const ClassifyParams& params, std::uint64_t seed) {
  return classify_descriptor(patch_descriptor(patch), model, params, seed);
}

std::string classifier_to_json(const ClassifierModel& model) {
  nlohmann::json j;
  j["format"] = "sonar3d-classifier";
  j["version"] = kFormatVersion;
  j["descriptor"] = {"occupied_ratio", "aspect",   "moment_rr", "moment_aa", "moment_ra",
                     "mean_intensity", "ring_0",   "ring_1",    "ring_2",    "ring_3",
                     "log_footprint_width", "log_footprint_depth"};
  j["scale"] = model.scale;
  j["classes"] = nlohmann::json::array();
  for (const auto& c : model.classes) {
    j["classes"].push_back({{"id", c.id},
                            {"name", c.name},
                            {"samples", c.samples},
                            {"centroid", c.centroid},
                            {"dispersion", c.dispersion}});
  }
  return j.dump(2) + "\n";
}

ClassifierModel classifier_from_json(const std::string& text) {
  ClassifierModel model;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != "sonar3d-classifier") {
      throw ConfigError("classifier: unexpected format tag");
    }
    if (j.at("version").get<int>() != kFormatVersion) {
      throw ConfigError("classifier: unsupported version " + j.at("version").dump());
    }
    model.scale = j.at("scale").get<std::vector<double>>();
    for (const auto& c : j.at("classes")) {
      ClassifierModel::ClassStats s;
      s.id = c.at("id").get<int>();
      s.name = c.at("name").get<std::string>();
      s.samples = c.at("samples").get<int>();
      s.centroid = c.at("centroid").get<std::vector<double>>();
      s.dispersion = c.at("dispersion").get<std::vector<double>>();
      model.classes.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("classifier: ") + e.what());
  }
  model.validate();
  return model;
}

void save_classifier(const ClassifierModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw RuntimeError("cannot write classifier model: " + path);
  out << classifier_to_json(model);
}

ClassifierModel load_classifier(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read classifier model: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return classifier_from_json(ss.str());
}

}  // namespace sonar3d
