#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sonar3d/classification.hpp"
#include "sonar3d/config.hpp"
#include "sonar3d/inference.hpp"
#include "sonar3d/mapping.hpp"
#include "sonar3d/scene.hpp"
#include "sonar3d/simulator.hpp"

namespace sonar3d {

struct FrameReport {
  int frame = 0;
  int h_features = 0;
  int v_features = 0;
  int clusters = 0;
  int labeled = 0;
  int fused = 0;
  int registered = 0;
  int inferred = 0;
  bool skipped = false;
  std::string error;
};

struct MissionResult {
  PipelineMode mode = PipelineMode::kSemantic;
  GlobalMap map;
  std::map<int, ClassModel> models;  // by class id, semantic mode only
  std::vector<FrameReport> frames;
};

using LogSink = std::function<void(const std::string&)>;

/// Processes every keyframe in order: render, detect, fuse, and in semantic
/// mode classify, update class models and predict heights. A frame that
/// throws is reported and skipped.
MissionResult run_mission(const Scene& scene, const Mission& mission, const PipelineConfig& config,
                          const ClassifierModel& classifier, const LogSink& log = {});

/// Loads the configured classifier, or trains the bootstrap one when no
/// path is set.
ClassifierModel obtain_classifier(const PipelineConfig& config);

/// Voxel counts, error quartiles, per-class model state and frame reports.
std::string metrics_json(const MissionResult& result, const Scene& scene,
                         const PipelineConfig& config, const ClassifierModel& classifier);

/// Writes points.ply, points.csv, metrics.json and class_models/<name>.json
/// into `dir`, creating it if needed.
void write_mission_outputs(const std::string& dir, const MissionResult& result,
                           const Scene& scene, const PipelineConfig& config,
                           const ClassifierModel& classifier);

struct ModeComparison {
  MissionResult benchmark;
  MissionResult semantic;
};

/// Runs both modes with the same seeds and classifier.
ModeComparison compare_modes(const Scene& scene, const Mission& mission,
                             const PipelineConfig& config, const ClassifierModel& classifier,
                             const LogSink& log = {});

/// Side-by-side voxel counts and error quartiles.
std::string comparison_json(const ModeComparison& cmp, const Scene& scene,
                            const PipelineConfig& config);
std::string comparison_table(const ModeComparison& cmp, const Scene& scene,
                             const PipelineConfig& config);

/// Writes benchmark/, semantic/, comparison.json and comparison.txt.
void write_comparison_outputs(const std::string& dir, const ModeComparison& cmp,
                              const Scene& scene, const PipelineConfig& config,
                              const ClassifierModel& classifier);

}  // namespace sonar3d
