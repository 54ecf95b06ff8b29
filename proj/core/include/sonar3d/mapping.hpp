#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "sonar3d/geometry.hpp"
#include "sonar3d/scene.hpp"

namespace sonar3d {

enum class PointSource : std::uint8_t { kFused = 0, kInferred = 1 };

const char* to_string(PointSource source);

struct MapPoint {
  CartesianPoint position;  // fixed map frame
  PointSource source = PointSource::kFused;
  int frame = 0;
  int class_id = -1;  // -1 when unlabelled
};

/// Append-only point cloud in the fixed map frame.
struct GlobalMap {
  std::vector<MapPoint> points;

  std::size_t count(PointSource source) const;
};

/// Appends each robot-frame point transformed into the map frame.
void accumulate(GlobalMap& map, const PlanarPose& pose, const std::vector<CartesianPoint>& points,
                PointSource source, int frame, int class_id = -1);

/// Number of distinct cells under floor(coordinate / cell_size) binning.
std::size_t voxel_count(const std::vector<CartesianPoint>& points, double cell_size);
std::size_t voxel_count(const GlobalMap& map, double cell_size);
std::size_t voxel_count(const GlobalMap& map, double cell_size, PointSource source);

/// Box-plot style summary of absolute errors. Quartiles use linear
/// interpolation between order statistics; outliers lie more than
/// `whisker` IQRs outside [q1, q3].
struct ErrorSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double outlier_fraction = 0.0;
};

ErrorSummary summarize_errors(std::vector<double> errors, double whisker = 1.5);

/// Distance of each map point to the scene surfaces. Throws
/// PreconditionError for an empty scene.
std::vector<double> absolute_error(const GlobalMap& map, const Scene& scene);

/// ASCII PLY with x y z and a uchar `source` property (0 fused, 1 inferred).
void write_ply(std::ostream& out, const GlobalMap& map);
/// CSV with header x,y,z,source,frame,class_id.
void write_csv(std::ostream& out, const GlobalMap& map);

}  // namespace sonar3d
