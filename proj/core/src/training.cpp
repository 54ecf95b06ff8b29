#include "sonar3d/training.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "sonar3d/detection.hpp"
#include "sonar3d/errors.hpp"
#include "sonar3d/simulator.hpp"

namespace sonar3d {
namespace {

constexpr double kRobotDepth = -2.5;
constexpr int kMaxAttemptsPerSample = 20;

Primitive random_object(int class_id, double x, double y, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double bottom = -6.0;
  const double top = 1.0;
  const double height = top - bottom;
  const double zc = 0.5 * (top + bottom);
  switch (class_id) {
    case kCylindricalPiling:
      return {Cylinder{{x, y, zc}, 0.15 + 0.1 * u(rng), height}, "cylindrical_piling"};
    case kRectangularPiling: {
      const double w = 0.55 + 0.3 * u(rng);
      return {Box{{x, y, zc}, {w, w * (0.9 + 0.2 * u(rng)), height}, kPi * u(rng)},
              "rectangular_piling"};
    }
    case kWall: {
      const double half = 4.0 + 6.0 * u(rng);
      // roughly facing the sensor, up to 50 degrees off
      const double facing = std::atan2(y, x) + kPi / 2 + deg2rad(100.0 * (u(rng) - 0.5));
      const double dx = half * std::cos(facing);
      const double dy = half * std::sin(facing);
      return {Wall{x - dx, y - dy, x + dx, y + dy, bottom, top}, "wall"};
    }
    default:
      throw PreconditionError("generate_training_set: no generator for class " +
                              std::to_string(class_id));
  }
}

}  // namespace

std::vector<std::pair<int, std::string>> default_class_names() {
  return {{kCylindricalPiling, "cylindrical_piling"},
          {kRectangularPiling, "rectangular_piling"},
          {kWall, "wall"}};
}

std::vector<LabeledPatch> generate_training_set(const PipelineConfig& config, int per_class,
                                                std::uint64_t seed,
                                                const std::vector<int>& class_ids) {
  if (per_class < 1) throw PreconditionError("generate_training_set: per_class must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const PlanarPose pose(0.0, 0.0, 0.0, kRobotDepth);
  const double max_range = std::min(27.0, config.horizontal.max_range - 3.0);
  const double half_fov = std::min(deg2rad(60.0), 0.5 * config.horizontal.aperture - deg2rad(5.0));

  std::vector<LabeledPatch> out;
  for (int id : class_ids) {
    int made = 0;
    int attempts = 0;
    while (made < per_class) {
      if (++attempts > per_class * kMaxAttemptsPerSample) {
        throw RuntimeError("generate_training_set: class " + std::to_string(id) +
                           " is rarely detected; check the detector settings");
      }
      const double r = 6.0 + (max_range - 6.0) * u(rng);
      const double b = half_fov * (2.0 * u(rng) - 1.0);
      const double x = r * std::cos(b);
      const double y = r * std::sin(b);
      Scene scene;
      scene.primitives.push_back(random_object(id, x, y, rng));
      const PolarImage img = render_image(scene, pose, config.horizontal, config.render, rng());
      const auto features = soca_cfar(img, config.cfar);
      const auto clusters =
          filter_clusters(cluster_features(features, SonarOrientation::kHorizontal, config.dbscan),
                          config.min_cluster_size);
      // the cluster whose nearest feature is closest to the object's axis
      const FeatureCluster* best = nullptr;
      double best_d = std::numeric_limits<double>::infinity();
      for (const auto& c : clusters) {
        for (const auto& f : c.features) {
          const auto [px, py] = planar_projection(f, SonarOrientation::kHorizontal);
          const double d = std::hypot(px - x, py - y);
          if (d < best_d) {
            best_d = d;
            best = &c;
          }
        }
      }
      if (best == nullptr || best_d > 2.0) continue;
      out.push_back({extract_patch(img, *best), id});
      ++made;
    }
  }
  return out;
}

ClassifierModel bootstrap_classifier(const PipelineConfig& config) {
  const auto samples =
      generate_training_set(config, config.training_samples_per_class, config.seeds.training);
  return train_classifier(samples, config.seeds.classifier, default_class_names());
}

}  // namespace sonar3d
