#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sonar3d/detection.hpp"
#include "sonar3d/sonar_image.hpp"

namespace sonar3d {

inline constexpr int kPatchSize = 40;
inline constexpr int kUnknownClass = -1;

/// 40x40 grayscale object patch. Rows follow range, columns the imaged
/// angle. The object occupies a centred content window of
/// content_rows x content_cols; the rest is zero padding.
struct ObjectPatch {
  std::array<double, kPatchSize * kPatchSize> pixels{};
  bool aspect_preserved = true;
  int source_rows = 0;
  int source_cols = 0;
  int content_rows = 0;
  int content_cols = 0;
  // metric size of the cluster: cross-range width and range depth [m]
  double footprint_width = 0.0;
  double footprint_depth = 0.0;

  double at(int r, int c) const { return pixels[static_cast<std::size_t>(r) * kPatchSize + c]; }
  double& at(int r, int c) { return pixels[static_cast<std::size_t>(r) * kPatchSize + c]; }
};

/// Crops the cluster's pixel bounding box, min-max normalises it and
/// resamples it into the patch without distorting the aspect ratio.
/// Shrinking averages the covered source pixels; enlarging repeats them.
/// The cluster's metric footprint is recorded alongside.
ObjectPatch extract_patch(const PolarImage& img, const FeatureCluster& cluster);

/// Geometric descriptor of a patch: occupied ratio, bounding aspect,
/// three second moments, mean intensity, a four-ring radial profile and the
/// log metric footprint (width, depth).
std::vector<double> patch_descriptor(const ObjectPatch& patch);
inline constexpr int kDescriptorSize = 12;

struct LabeledPatch {
  ObjectPatch patch;
  int class_id = 0;
};

/// Nearest-centroid model over patch descriptors.
struct ClassifierModel {
  struct ClassStats {
    int id = 0;
    std::string name;
    std::vector<double> centroid;
    std::vector<double> dispersion;  // per-dimension standard deviation
    int samples = 0;
  };
  std::vector<ClassStats> classes;
  /// Pooled within-class standard deviation per dimension; distances are
  /// measured in these units.
  std::vector<double> scale;

  const ClassStats* find(int id) const;
  std::string name_of(int id) const;
  int id_of(const std::string& name) const;  // kUnknownClass if absent

  void validate() const;
};

/// Fits one centroid and dispersion per class. Needs >= 2 classes and >= 5
/// samples per class. The fit is closed-form; `seed` is accepted so a
/// stochastic learner can replace this one behind the same call.
ClassifierModel train_classifier(const std::vector<LabeledPatch>& samples, std::uint64_t seed,
                                 const std::vector<std::pair<int, std::string>>& names = {});

struct ClassifyParams {
  int predictions = 25;            // m
  double accept_threshold = 0.8;
  double perturbation_scale = 0.5; // descriptor noise in pooled-std units

  void validate() const;
};

struct Classification {
  int label = kUnknownClass;
  double confidence = 0.0;
  int prediction_count = 0;
  int modal_class = kUnknownClass;  // winning vote even when rejected
};

/// Deterministic nearest-centroid decision without perturbation.
int nearest_class(const std::vector<double>& descriptor, const ClassifierModel& model);

/// m perturbed nearest-centroid votes; confidence is the modal fraction.
Classification classify_descriptor(const std::vector<double>& descriptor,
                                   const ClassifierModel& model, const ClassifyParams& params,
                                   std::uint64_t seed);

Classification classify_object(const ObjectPatch& patch, const ClassifierModel& model,
                               const ClassifyParams& params, std::uint64_t seed);

/// Versioned JSON persistence.
void save_classifier(const ClassifierModel& model, const std::string& path);
ClassifierModel load_classifier(const std::string& path);
std::string classifier_to_json(const ClassifierModel& model);
ClassifierModel classifier_from_json(const std::string& text);

}  // namespace sonar3d
