#include "sonar3d/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sonar3d/errors.hpp"

namespace sonar3d {
namespace {

CartesianPoint ray_direction(const SonarConfig& cfg, double imaged, double unmeasured) {
  const double bearing = cfg.orientation == SonarOrientation::kHorizontal ? imaged : unmeasured;
  const double elevation = cfg.orientation == SonarOrientation::kHorizontal ? unmeasured : imaged;
  return spherical_to_cartesian({1.0, bearing, elevation, 0.0});
}

CartesianPoint rotate_yaw(double yaw, const CartesianPoint& d) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  return {c * d.x - s * d.y, s * d.x + c * d.y, d.z};
}

}  // namespace

void RenderParams::validate() const {
  if (rays_per_bin < 1) throw ConfigError("render: rays_per_bin must be >= 1");
  if (!(gain > 0.0)) throw ConfigError("render: gain must be positive");
  if (grazing_floor < 0.0 || grazing_floor > 1.0) {
    throw ConfigError("render: grazing_floor must be in [0, 1]");
  }
  if (!(noise_floor > 0.0)) throw ConfigError("render: noise_floor must be positive");
  if (speckle_sigma < 0.0) throw ConfigError("render: speckle_sigma must be non-negative");
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
  // splitmix64 finaliser
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

PolarImage render_image(const Scene& scene, const PlanarPose& pose, const SonarConfig& config,
                        const RenderParams& params, std::uint64_t noise_seed) {
  params.validate();
  PolarImage img(config);
  const CartesianPoint origin{pose.x(), pose.y(), pose.depth()};
  const int rays = params.rays_per_bin;
  const double step = config.beamwidth / rays;
  const double weight = params.gain / rays;

  for (int col = 0; col < img.cols(); ++col) {
    const double imaged = config.angle_of_bin(col);
    for (int k = 0; k < rays; ++k) {
      const double unmeasured = -0.5 * config.beamwidth + (k + 0.5) * step;
      const CartesianPoint dir = rotate_yaw(pose.yaw(), ray_direction(config, imaged, unmeasured));
      const auto hit = scene.cast_ray(origin, dir, config.max_range);
      if (!hit) continue;
      const int row = static_cast<int>(std::floor(hit->distance / config.range_resolution));
      if (row < 0 || row >= img.rows()) continue;
      img.at(row, col) += weight * std::max(hit->cos_incidence, params.grazing_floor);
    }
  }

  std::mt19937_64 rng(noise_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double s = params.speckle_sigma;
  for (double& v : img.data()) {
    const double speckle = std::exp(s * gauss(rng) - 0.5 * s * s);
    v = (params.noise_floor + v) * speckle;
  }
  return img;
}

std::pair<PolarImage, PolarImage> render_pair(const Scene& scene, const PlanarPose& pose,
                                              const SonarConfig& h_cfg, const SonarConfig& v_cfg,
                                              const RenderParams& params,
                                              std::uint64_t noise_seed) {
  if (h_cfg.orientation != SonarOrientation::kHorizontal ||
      v_cfg.orientation != SonarOrientation::kVertical) {
    throw ConfigError("render_pair: expected a horizontal and a vertical sonar config");
  }
  return {render_image(scene, pose, h_cfg, params, mix_seed(noise_seed, 1)),
          render_image(scene, pose, v_cfg, params, mix_seed(noise_seed, 2))};
}

std::vector<double> first_hit_profile(const Scene& scene, const PlanarPose& pose,
                                      const SonarConfig& config) {
  const CartesianPoint origin{pose.x(), pose.y(), pose.depth()};
  std::vector<double> out(static_cast<std::size_t>(config.angular_bins), -1.0);
  for (int col = 0; col < config.angular_bins; ++col) {
    const CartesianPoint dir =
        rotate_yaw(pose.yaw(), ray_direction(config, config.angle_of_bin(col), 0.0));
    if (auto hit = scene.cast_ray(origin, dir, config.max_range)) out[col] = hit->distance;
  }
  return out;
}

Mission sample_keyframes(const std::vector<std::pair<double, double>>& waypoints, double spacing,
                         double depth) {
  if (waypoints.size() < 2) throw ConfigError("mission: need at least two waypoints");
  if (!(spacing > 0.0)) throw ConfigError("mission: keyframe spacing must be positive");
  Mission mission;
  mission.keyframe_spacing = spacing;
  double next = 0.0;  // arc length of the next keyframe
  double travelled = 0.0;
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const auto [x0, y0] = waypoints[i];
    const auto [x1, y1] = waypoints[i + 1];
    const double len = std::hypot(x1 - x0, y1 - y0);
    if (len == 0.0) continue;
    const double yaw = std::atan2(y1 - y0, x1 - x0);
    while (next <= travelled + len + 1e-9) {
      const double u = std::min((next - travelled) / len, 1.0);
      mission.keyframes.emplace_back(x0 + u * (x1 - x0), y0 + u * (y1 - y0), yaw, depth);
      next += spacing;
    }
    travelled += len;
  }
  return mission;
}

}  // namespace sonar3d
