#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sonar3d/classification.hpp"
#include "sonar3d/detection.hpp"
#include "sonar3d/fusion.hpp"
#include "sonar3d/inference.hpp"
#include "sonar3d/simulator.hpp"
#include "sonar3d/sonar_image.hpp"

namespace sonar3d {

enum class PipelineMode { kBenchmark, kSemantic };

const char* to_string(PipelineMode mode);
PipelineMode parse_mode(const std::string& text);

struct Seeds {
  std::uint64_t noise = 1;
  std::uint64_t classifier = 2;
  std::uint64_t training = 3;
  std::uint64_t reference = 4;
};

/// Every tunable constant of the pipeline. Defaults are the documented
/// values; a config file only needs the keys it changes.
struct PipelineConfig {
  PipelineMode mode = PipelineMode::kSemantic;
  SonarConfig horizontal = SonarConfig::default_horizontal();
  SonarConfig vertical = SonarConfig::default_vertical();
  RenderParams render;
  CfarParams cfar;
  DbscanParams dbscan;
  int min_cluster_size = 10;  // n
  ClassifyParams classify;
  std::string classifier_model_path;  // empty: bootstrap-train in process
  int training_samples_per_class = 60;
  FusionParams fusion;
  InferenceParams inference;
  int min_fused_points = 3;   // fused points a detection needs to update its class
  std::vector<std::string> excluded_classes{"wall"};
  double voxel_size = 0.1;
  double outlier_whisker = 1.5;
  Seeds seeds;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parses a JSON config. Unknown keys are rejected. `source` names the file
/// in error messages.
PipelineConfig parse_config(const std::string& text, const std::string& source = "config");
PipelineConfig load_config(const std::string& path);
/// Full config, every key present.
std::string config_to_json(const PipelineConfig& config);

}  // namespace sonar3d
