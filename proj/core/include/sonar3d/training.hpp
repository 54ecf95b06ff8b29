#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sonar3d/classification.hpp"
#include "sonar3d/config.hpp"

namespace sonar3d {

/// Class ids used by the bundled scenes and the bootstrap classifier.
inline constexpr int kCylindricalPiling = 0;
inline constexpr int kRectangularPiling = 1;
inline constexpr int kWall = 2;

std::vector<std::pair<int, std::string>> default_class_names();

/// Renders single-object scenes with randomised size, range and bearing and
/// returns the horizontal-image patch of the detected object, `per_class`
/// samples for each class id listed in `class_ids`.
std::vector<LabeledPatch> generate_training_set(const PipelineConfig& config, int per_class,
                                                std::uint64_t seed,
                                                const std::vector<int>& class_ids = {
                                                    kCylindricalPiling, kRectangularPiling,
                                                    kWall});

/// Trains the baseline classifier on simulator patches.
ClassifierModel bootstrap_classifier(const PipelineConfig& config);

}  // namespace sonar3d
