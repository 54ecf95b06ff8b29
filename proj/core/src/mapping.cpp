#include "sonar3d/mapping.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <unordered_set>

#include "sonar3d/errors.hpp"

namespace sonar3d {
namespace {

struct VoxelHash {
  std::size_t operator()(const std::array<std::int64_t, 3>& v) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto c : v) {
      h ^= static_cast<std::uint64_t>(c) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

std::array<std::int64_t, 3> voxel_of(const CartesianPoint& p, double cell) {
  return {static_cast<std::int64_t>(std::floor(p.x / cell)),
          static_cast<std::int64_t>(std::floor(p.y / cell)),
          static_cast<std::int64_t>(std::floor(p.z / cell))};
}

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

const char* to_string(PointSource source) {
  return source == PointSource::kFused ? "fused" : "inferred";
}

std::size_t GlobalMap::count(PointSource source) const {
  return static_cast<std::size_t>(std::count_if(
      points.begin(), points.end(), [&](const MapPoint& p) { return p.source == source; }));
}

void accumulate(GlobalMap& map, const PlanarPose& pose, const std::vector<CartesianPoint>& points,
                PointSource source, int frame, int class_id) {
  map.points.reserve(map.points.size() + points.size());
  for (const auto& p : points) {
    map.points.push_back({transform_to_map(pose, p), source, frame, class_id});
  }
}

std::size_t voxel_count(const std::vector<CartesianPoint>& points, double cell_size) {
  if (!(cell_size > 0.0)) throw PreconditionError("voxel_count: cell_size must be positive");
  std::unordered_set<std::array<std::int64_t, 3>, VoxelHash> cells;
  cells.reserve(points.size());
  for (const auto& p : points) cells.insert(voxel_of(p, cell_size));
  return cells.size();
}

std::size_t voxel_count(const GlobalMap& map, double cell_size) {
  std::vector<CartesianPoint> pts;
  pts.reserve(map.points.size());
  for (const auto& p : map.points) pts.push_back(p.position);
  return voxel_count(pts, cell_size);
}

std::size_t voxel_count(const GlobalMap& map, double cell_size, PointSource source) {
  std::vector<CartesianPoint> pts;
  for (const auto& p : map.points) {
    if (p.source == source) pts.push_back(p.position);
  }
  return voxel_count(pts, cell_size);
}

ErrorSummary summarize_errors(std::vector<double> errors, double whisker) {
  ErrorSummary s;
  s.count = errors.size();
  if (errors.empty()) return s;
  std::sort(errors.begin(), errors.end());
  double sum = 0.0;
  for (double e : errors) sum += e;
  s.mean = sum / static_cast<double>(errors.size());
  s.q1 = quantile(errors, 0.25);
  s.median = quantile(errors, 0.5);
  s.q3 = quantile(errors, 0.75);
  s.max = errors.back();
  const double iqr = s.q3 - s.q1;
  const double lo = s.q1 - whisker * iqr;
  const double hi = s.q3 + whisker * iqr;
  const auto outliers =
      std::count_if(errors.begin(), errors.end(), [&](double e) { return e < lo || e > hi; });
  s.outlier_fraction = static_cast<double>(outliers) / static_cast<double>(errors.size());
  return s;
}

std::vector<double> absolute_error(const GlobalMap& map, const Scene& scene) {
  if (scene.primitives.empty()) {
    throw PreconditionError("absolute_error: scene has no primitives");
  }
  std::vector<double> out;
  out.reserve(map.points.size());
  for (const auto& p : map.points) out.push_back(distance_to_scene(p.position, scene));
  return out;
}

void write_ply(std::ostream& out, const GlobalMap& map) {
  out << "ply\nformat ascii 1.0\n"
      << "element vertex " << map.points.size() << "\n"
      << "property float x\nproperty float y\nproperty float z\n"
      << "property uchar source\nend_header\n";
  char line[96];
  for (const auto& p : map.points) {
    std::snprintf(line, sizeof line, "%.4f %.4f %.4f %d\n", p.position.x, p.position.y,
                  p.position.z, static_cast<int>(p.source));
    out << line;
  }
}

void write_csv(std::ostream& out, const GlobalMap& map) {
  out << "x,y,z,source,frame,class_id\n";
  char line[128];
  for (const auto& p : map.points) {
    std::snprintf(line, sizeof line, "%.4f,%.4f,%.4f,%s,%d,%d\n", p.position.x, p.position.y,
                  p.position.z, to_string(p.source), p.frame, p.class_id);
    out << line;
  }
}

}  // namespace sonar3d
