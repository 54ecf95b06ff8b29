#include "sonar3d/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <sstream>

#include "sonar3d/detection.hpp"
#include "sonar3d/errors.hpp"
#include "sonar3d/fusion.hpp"
#include "sonar3d/io.hpp"
#include "sonar3d/training.hpp"

namespace sonar3d {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

bool excluded(const PipelineConfig& config, const ClassifierModel& classifier, int label) {
  const std::string name = classifier.name_of(label);
  return std::find(config.excluded_classes.begin(), config.excluded_classes.end(), name) !=
         config.excluded_classes.end();
}

void process_frame(int frame, const PlanarPose& pose, const Scene& scene,
                   const PipelineConfig& config, const ClassifierModel& classifier,
                   MissionResult& result, FrameReport& report) {
  const auto [h_img, v_img] = render_pair(scene, pose, config.horizontal, config.vertical,
                                          config.render,
                                          mix_seed(config.seeds.noise, static_cast<std::uint64_t>(frame)));
  const auto h_feats = soca_cfar(h_img, config.cfar);
  const auto v_feats = soca_cfar(v_img, config.cfar);
  report.h_features = static_cast<int>(h_feats.size());
  report.v_features = static_cast<int>(v_feats.size());

  const FusionResult fused = fuse_frame(h_img, v_img, h_feats, v_feats, config.fusion);
  report.fused = static_cast<int>(fused.points.size());

  if (config.mode == PipelineMode::kBenchmark) {
    std::vector<CartesianPoint> pts;
    pts.reserve(fused.points.size());
    for (const auto& f : fused.points) pts.push_back(fused_to_cartesian(f));
    accumulate(result.map, pose, pts, PointSource::kFused, frame);
    return;
  }

  // detection and classification on the horizontal image
  const auto clusters = filter_clusters(
      cluster_features(h_feats, SonarOrientation::kHorizontal, config.dbscan),
      config.min_cluster_size);
  report.clusters = static_cast<int>(clusters.size());
  std::vector<ObjectDetection> objects;
  objects.reserve(clusters.size());
  std::vector<int> cluster_of_feature(h_feats.size(), -1);
  const std::uint64_t frame_seed =
      mix_seed(config.seeds.classifier, static_cast<std::uint64_t>(frame));
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    ObjectDetection obj{clusters[c], {}};
    obj.classification = classify_object(extract_patch(h_img, clusters[c]), classifier,
                                         config.classify, mix_seed(frame_seed, c));
    if (obj.classification.label != kUnknownClass) ++report.labeled;
    for (int idx : clusters[c].indices) cluster_of_feature[idx] = static_cast<int>(c);
    objects.push_back(std::move(obj));
  }

  // fused points, grouped by the object their horizontal feature belongs to
  std::vector<std::vector<FusedPoint>> fused_of(objects.size());
  std::vector<char> is_fused(h_feats.size(), 0);
  for (const auto& f : fused.points) {
    is_fused[f.h_feature] = 1;
    const int c = cluster_of_feature[f.h_feature];
    const int label = c >= 0 ? objects[c].classification.label : kUnknownClass;
    accumulate(result.map, pose, {fused_to_cartesian(f)}, PointSource::kFused, frame, label);
    if (c >= 0) fused_of[c].push_back(f);
  }

  auto eligible = [&](const ObjectDetection& obj) {
    const int label = obj.classification.label;
    return label != kUnknownClass && !excluded(config, classifier, label);
  };

  // learn from objects seen in the overlap region
  for (std::size_t c = 0; c < objects.size(); ++c) {
    const auto& obj = objects[c];
    if (!eligible(obj) || static_cast<int>(fused_of[c].size()) < config.min_fused_points) continue;
    const int label = obj.classification.label;
    auto it = result.models
                  .try_emplace(label, label, config.inference,
                               mix_seed(config.seeds.reference, static_cast<std::uint64_t>(label)))
                  .first;
    const RegistrationResult reg = register_object(obj, it->second, true);
    if (!reg.accepted) continue;
    ++report.registered;
    update_class_model(it->second, fused_of[c], reg.transform, config.inference.sigma);
  }

  // predict heights for every feature the fusion could not place
  const double threshold = config.inference.default_confidence_threshold();
  for (const auto& obj : objects) {
    if (!eligible(obj)) continue;
    auto it = result.models.find(obj.classification.label);
    if (it == result.models.end() || it->second.update_count() < 1) continue;
    std::vector<char> skip;
    skip.reserve(obj.cluster.indices.size());
    for (int idx : obj.cluster.indices) skip.push_back(is_fused[idx]);
    const auto predicted = predict_heights(obj, it->second, threshold, skip,
                                           0.5 * config.horizontal.beamwidth);
    std::vector<CartesianPoint> pts;
    pts.reserve(predicted.size());
    for (const auto& p : predicted) pts.push_back(p.point);
    accumulate(result.map, pose, pts, PointSource::kInferred, frame, obj.classification.label);
    report.inferred += static_cast<int>(pts.size());
  }
}

json summary_json(const ErrorSummary& s) {
  return {{"count", s.count},   {"mean", s.mean}, {"q1", s.q1},
          {"median", s.median}, {"q3", s.q3},     {"max", s.max},
          {"outlier_fraction", s.outlier_fraction}};
}

ErrorSummary errors_for(const MissionResult& r, const std::vector<double>& errors,
                        const PipelineConfig& config, int source) {
  std::vector<double> sel;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (source < 0 || static_cast<int>(r.map.points[i].source) == source) sel.push_back(errors[i]);
  }
  return summarize_errors(std::move(sel), config.outlier_whisker);
}

struct ModeStats {
  std::size_t voxels = 0;
  std::size_t fused_voxels = 0;
  std::size_t inferred_voxels = 0;
  ErrorSummary all;
  ErrorSummary fused;
  ErrorSummary inferred;
};

ModeStats mode_stats(const MissionResult& r, const Scene& scene, const PipelineConfig& config) {
  ModeStats s;
  s.voxels = voxel_count(r.map, config.voxel_size);
  s.fused_voxels = voxel_count(r.map, config.voxel_size, PointSource::kFused);
  s.inferred_voxels = voxel_count(r.map, config.voxel_size, PointSource::kInferred);
  const auto errors = scene.primitives.empty() ? std::vector<double>{} : absolute_error(r.map, scene);
  s.all = errors_for(r, errors, config, -1);
  s.fused = errors_for(r, errors, config, 0);
  s.inferred = errors_for(r, errors, config, 1);
  return s;
}

json mode_json(const ModeStats& s) {
  return {{"voxel_count",
           {{"total", s.voxels}, {"fused", s.fused_voxels}, {"inferred", s.inferred_voxels}}},
          {"error", {{"all", summary_json(s.all)},
                     {"fused", summary_json(s.fused)},
                     {"inferred", summary_json(s.inferred)}}}};
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw RuntimeError("cannot create directory " + dir + ": " + ec.message());
}

}  // namespace

MissionResult run_mission(const Scene& scene, const Mission& mission, const PipelineConfig& config,
                          const ClassifierModel& classifier, const LogSink& log) {
  config.validate();
  MissionResult result;
  result.mode = config.mode;
  for (std::size_t k = 0; k < mission.keyframes.size(); ++k) {
    FrameReport report;
    report.frame = static_cast<int>(k);
    const std::size_t before = result.map.points.size();
    try {
      process_frame(report.frame, mission.keyframes[k], scene, config, classifier, result, report);
    } catch (const std::exception& e) {
      // drop whatever the failed frame had already added
      result.map.points.resize(before);
      report.skipped = true;
      report.error = e.what();
      if (log) log("frame " + std::to_string(k) + " skipped: " + e.what());
    }
    result.frames.push_back(report);
  }
  return result;
}

ClassifierModel obtain_classifier(const PipelineConfig& config) {
  if (config.classifier_model_path.empty()) return bootstrap_classifier(config);
  return load_classifier(config.classifier_model_path);
}

std::string metrics_json(const MissionResult& result, const Scene& scene,
                         const PipelineConfig& config, const ClassifierModel& classifier) {
  const ModeStats s = mode_stats(result, scene, config);
  json j = mode_json(s);
  j["mode"] = to_string(result.mode);
  j["voxel_size"] = config.voxel_size;
  j["points"] = {{"total", result.map.points.size()},
                 {"fused", result.map.count(PointSource::kFused)},
                 {"inferred", result.map.count(PointSource::kInferred)}};
  json models = json::array();
  for (const auto& [id, model] : result.models) {
    models.push_back({{"class_id", id},
                      {"class", classifier.name_of(id)},
                      {"update_count", model.update_count()},
                      {"dropped", model.dropped_count()},
                      {"cells", model.cells().size()},
                      {"reference_points",
                       model.reference() ? model.reference()->cloud.size() : 0}});
  }
  j["class_models"] = models;
  json frames = json::array();
  int skipped = 0;
  for (const auto& f : result.frames) {
    json fj = {{"frame", f.frame},          {"h_features", f.h_features},
               {"v_features", f.v_features}, {"clusters", f.clusters},
               {"labeled", f.labeled},       {"fused", f.fused},
               {"registered", f.registered}, {"inferred", f.inferred},
               {"skipped", f.skipped}};
    if (f.skipped) {
      fj["error"] = f.error;
      ++skipped;
    }
    frames.push_back(fj);
  }
  j["frames"] = frames;
  j["skipped_frames"] = skipped;
  return j.dump(2) + "\n";
}

void write_mission_outputs(const std::string& dir, const MissionResult& result,
                           const Scene& scene, const PipelineConfig& config,
                           const ClassifierModel& classifier) {
  ensure_dir(dir);
  std::ostringstream ply;
  write_ply(ply, result.map);
  write_text_file(dir + "/points.ply", ply.str());
  std::ostringstream csv;
  write_csv(csv, result.map);
  write_text_file(dir + "/points.csv", csv.str());
  write_text_file(dir + "/metrics.json", metrics_json(result, scene, config, classifier));
  if (!result.models.empty()) {
    ensure_dir(dir + "/class_models");
    for (const auto& [id, model] : result.models) {
      const std::string name = classifier.name_of(id);
      write_text_file(dir + "/class_models/" + name + ".json", class_model_to_json(model, name));
    }
  }
}

ModeComparison compare_modes(const Scene& scene, const Mission& mission,
                             const PipelineConfig& config, const ClassifierModel& classifier,
                             const LogSink& log) {
  ModeComparison cmp;
  PipelineConfig c = config;
  c.mode = PipelineMode::kBenchmark;
  cmp.benchmark = run_mission(scene, mission, c, classifier, log);
  c.mode = PipelineMode::kSemantic;
  cmp.semantic = run_mission(scene, mission, c, classifier, log);
  return cmp;
}

std::string comparison_json(const ModeComparison& cmp, const Scene& scene,
                            const PipelineConfig& config) {
  const ModeStats b = mode_stats(cmp.benchmark, scene, config);
  const ModeStats s = mode_stats(cmp.semantic, scene, config);
  json j;
  j["benchmark"] = mode_json(b);
  j["semantic"] = mode_json(s);
  j["voxel_ratio"] = b.voxels == 0 ? 0.0 : static_cast<double>(s.voxels) / static_cast<double>(b.voxels);
  j["median_error_ratio"] = b.all.median == 0.0 ? 0.0 : s.all.median / b.all.median;
  j["keyframes"] = cmp.semantic.frames.size();
  j["voxel_size"] = config.voxel_size;
  return j.dump(2) + "\n";
}

std::string comparison_table(const ModeComparison& cmp, const Scene& scene,
                             const PipelineConfig& config) {
  const ModeStats b = mode_stats(cmp.benchmark, scene, config);
  const ModeStats s = mode_stats(cmp.semantic, scene, config);
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %10s %10s %10s %10s %10s %10s\n", "mode", "voxels",
                "q1 [m]", "median", "q3", "max", "outliers");
  out += line;
  for (const auto& [name, st] : {std::pair<const char*, const ModeStats*>{"benchmark", &b},
                                 std::pair<const char*, const ModeStats*>{"semantic", &s}}) {
    std::snprintf(line, sizeof line, "%-10s %10zu %10.4f %10.4f %10.4f %10.4f %9.2f%%\n", name,
                  st->voxels, st->all.q1, st->all.median, st->all.q3, st->all.max,
                  100.0 * st->all.outlier_fraction);
    out += line;
  }
  std::snprintf(line, sizeof line, "voxel ratio (semantic / benchmark): %.2f\n",
                b.voxels == 0 ? 0.0 : static_cast<double>(s.voxels) / static_cast<double>(b.voxels));
  out += line;
  return out;
}

void write_comparison_outputs(const std::string& dir, const ModeComparison& cmp,
                              const Scene& scene, const PipelineConfig& config,
                              const ClassifierModel& classifier) {
  ensure_dir(dir);
  PipelineConfig c = config;
  c.mode = PipelineMode::kBenchmark;
  write_mission_outputs(dir + "/benchmark", cmp.benchmark, scene, c, classifier);
  c.mode = PipelineMode::kSemantic;
  write_mission_outputs(dir + "/semantic", cmp.semantic, scene, c, classifier);
  write_text_file(dir + "/comparison.json", comparison_json(cmp, scene, config));
  write_text_file(dir + "/comparison.txt", comparison_table(cmp, scene, config));
}

}  // namespace sonar3d
