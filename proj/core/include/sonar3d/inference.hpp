#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "sonar3d/classification.hpp"
#include "sonar3d/detection.hpp"
#include "sonar3d/geometry.hpp"
#include "sonar3d/registration.hpp"

namespace sonar3d {

/// A clustered object in the horizontal image together with its label.
struct ObjectDetection {
  FeatureCluster cluster;
  Classification classification;
};

struct InferenceParams {
  // reference-frame cell grid
  double cell_range = 0.1;              // [m]
  double cell_bearing = deg2rad(1.0);   // [rad]
  double range_extent = 3.0;            // cells kept within +-extent of the origin range
  double bearing_extent = deg2rad(20.0);
  // height histogram
  double z_min = -5.0;
  double z_max = 5.0;
  double z_step = 0.05;
  double sigma = 0.1;                   // measurement noise of z [m]
  double likelihood_floor = 1e-3;       // outlier level of the likelihood, relative to its peak
  double confidence_factor = 5.0;       // MAP threshold = factor / bin count
  // reference cloud registration
  std::size_t reference_cap = 5000;
  double max_icp_residual = 0.5;        // [m]
  IcpParams icp;

  int z_bins() const;
  double z_center(int bin) const;
  double default_confidence_threshold() const { return confidence_factor / z_bins(); }
  void validate() const;
};

/// Discrete height posterior of one reference cell.
class HeightDistribution {
 public:
  HeightDistribution() = default;
  explicit HeightDistribution(int bins);

  /// Multiplies in exp(-(z_k - z)^2 / 2 sigma^2) + floor and renormalises.
  void update(const InferenceParams& grid, double z, double sigma);

  const std::vector<double>& probabilities() const { return p_; }
  std::vector<double>& probabilities() { return p_; }
  int updates() const { return updates_; }
  void set_updates(int n) { updates_ = n; }

 private:
  std::vector<double> p_;
  int updates_ = 0;
};

struct ReferenceFrame {
  double origin_range = 0.0;
  double origin_bearing = 0.0;
  PointSet2D cloud;
};

using CellKey = std::pair<int, int>;  // (range index, bearing index)

/// Online height model of one object class.
class ClassModel {
 public:
  ClassModel(int class_id, InferenceParams params, std::uint64_t seed = 0);

  int class_id() const { return class_id_; }
  const InferenceParams& params() const { return params_; }
  const std::optional<ReferenceFrame>& reference() const { return reference_; }
  const std::map<CellKey, HeightDistribution>& cells() const { return cells_; }
  int update_count() const { return update_count_; }
  int dropped_count() const { return dropped_; }

  /// Cell of a reference-frame position, or nullopt outside the grid.
  std::optional<CellKey> cell_of(double range, double bearing) const;
  /// Posterior of a cell; nullptr when it was never updated.
  const HeightDistribution* find(const CellKey& key) const;

  /// Applies one Bayes update. Returns false (and counts a drop) when the
  /// position or the height is outside the grid.
  bool apply_measurement(double range, double bearing, double z, double sigma);

  // registration state
  void set_reference(ReferenceFrame ref) { reference_ = std::move(ref); }
  void grow_reference(const PointSet2D& points);

  // persistence helpers
  void restore_cell(const CellKey& key, HeightDistribution dist) { cells_[key] = std::move(dist); }
  void set_update_count(int n) { update_count_ = n; }

 private:
  int class_id_;
  InferenceParams params_;
  std::optional<ReferenceFrame> reference_;
  std::map<CellKey, HeightDistribution> cells_;
  int update_count_ = 0;
  int dropped_ = 0;
  std::mt19937_64 rng_;
};

/// (R cos theta, R sin theta) of every feature in the cluster.
PointSet2D cluster_points(const FeatureCluster& cluster);

/// Minimum range and median bearing of a cluster.
std::pair<double, double> cluster_anchor(const FeatureCluster& cluster);

struct RegistrationResult {
  Transform2D transform;
  bool accepted = false;
  bool first_sighting = false;
};

/// Places a detection in its class's reference frame. The first sighting
/// defines the frame; later ones run ICP against the reference cloud,
/// initialised by rotating about the sensor so the median bearings agree
/// and translating so the anchors coincide. A non-converged or poor fit is
/// reported as not accepted. With `grow_reference` the registered points
/// are appended to the reference cloud.
RegistrationResult register_object(const ObjectDetection& object, ClassModel& model,
                                   bool grow_reference);

/// Registration without touching the model; needs an existing reference.
RegistrationResult locate_object(const ObjectDetection& object, const ClassModel& model);

struct UpdateStats {
  int applied = 0;
  int dropped = 0;
};

/// Bayes update of the class model from fused points of a registered
/// detection: each point's (range, bearing) is mapped through `transform`
/// to pick a cell and its z = R sin(elevation) is the measurement.
UpdateStats update_class_model(ClassModel& model, const std::vector<FusedPoint>& fused,
                               const Transform2D& transform, double sigma);

/// Per-branch MAP heights at a reference-frame position: the most probable
/// bin with z <= 0 and the most probable with z > 0, each kept only when
/// its probability exceeds `confidence_threshold`. Negative branch first.
std::vector<double> map_estimate(const ClassModel& model, double range, double bearing,
                                 double confidence_threshold);

struct PredictedPoint {
  CartesianPoint point;  // robot frame
  int feature = -1;      // index within the cluster
};

/// Predicts 3D points for the detection's features from the class model.
/// Features flagged in `skip` (same length as the cluster, may be empty)
/// are left out. A height is dropped when |z| > R or when its elevation
/// exceeds `max_elevation`, the half beamwidth of the imaging sonar.
/// Throws PreconditionError for an untrained model or a label mismatch.
std::vector<PredictedPoint> predict_heights(const ObjectDetection& object, const ClassModel& model,
                                            double confidence_threshold,
                                            const std::vector<char>& skip = {},
                                            double max_elevation = kPi / 2);

/// Versioned JSON persistence; only updated cells are stored.
std::string class_model_to_json(const ClassModel& model, const std::string& class_name);
ClassModel class_model_from_json(const std::string& text);

}  // namespace sonar3d
