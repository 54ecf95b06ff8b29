#pragma once

#include <vector>

#include "sonar3d/geometry.hpp"
#include "sonar3d/sonar_image.hpp"

namespace sonar3d {

/// A pixel flagged by CFAR. For a horizontal image the measurement's
/// elevation is zero (unknown); for a vertical image the bearing is.
struct ImageFeature {
  int range_bin = 0;
  int angle_bin = 0;
  SphericalMeasurement measurement;
};

struct FeatureCluster {
  std::vector<ImageFeature> features;
  /// Position of each feature in the list passed to cluster_features.
  std::vector<int> indices;
  SonarOrientation orientation = SonarOrientation::kHorizontal;
};

struct CfarParams {
  int train_cells = 10;
  int guard_cells = 2;
  double threshold_factor = 15.8;  // ~12 dB

  void validate() const;
};

/// Smallest-of cell-averaging CFAR over both image axes.
///
/// For each pixel, four one-sided training windows (shorter range, longer
/// range, lower angle, higher angle) are averaged after skipping the guard
/// cells; windows are truncated at the image border and empty ones are
/// ignored. The smallest average is the noise estimate and the pixel is a
/// feature iff intensity > threshold_factor * noise.
std::vector<ImageFeature> soca_cfar(const PolarImage& img, const CfarParams& params);

/// Feature position in the imaged plane, (R cos a, R sin a) with a the
/// imaged angle.
std::pair<double, double> planar_projection(const ImageFeature& f, SonarOrientation orientation);

struct DbscanParams {
  double eps = 0.5;  // [m]
  int min_pts = 4;   // neighbourhood size including the point itself

  void validate() const;
};

/// Density-based clustering in the metric plane of the image.
///
/// Core points have at least min_pts neighbours within eps (self included)
/// and clusters are the connected components of core points. A border point
/// joins the cluster of its nearest core point. Noise is dropped. Output is
/// independent of input order: clusters are listed by their first member in
/// (range_bin, angle_bin) order.
std::vector<FeatureCluster> cluster_features(const std::vector<ImageFeature>& features,
                                             SonarOrientation orientation,
                                             const DbscanParams& params);

/// Keeps clusters with at least `min_size` features, preserving order.
std::vector<FeatureCluster> filter_clusters(std::vector<FeatureCluster> clusters, int min_size);

}  // namespace sonar3d
