#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sonar3d/geometry.hpp"
#include "sonar3d/scene.hpp"
#include "sonar3d/sonar_image.hpp"

namespace sonar3d {

/// Knobs of the synthetic intensity model.
struct RenderParams {
  int rays_per_bin = 32;        // rays across the unmeasured aperture
  double gain = 1.0;            // return strength of a normal-incidence ray
  double grazing_floor = 0.1;   // minimum incidence factor
  double noise_floor = 0.002;   // additive background level
  double speckle_sigma = 0.3;   // log-normal multiplicative speckle spread

  void validate() const;
};

/// Renders one sonar image. Every angular bin casts `rays_per_bin` rays
/// spread across the beamwidth; each first hit adds
/// gain * max(cos(incidence), grazing_floor) / rays_per_bin to the range bin
/// of the hit, then every pixel gets (noise_floor + signal) * speckle.
PolarImage render_image(const Scene& scene, const PlanarPose& pose, const SonarConfig& config,
                        const RenderParams& params, std::uint64_t noise_seed);

/// Renders the co-located orthogonal pair (horizontal, vertical).
std::pair<PolarImage, PolarImage> render_pair(const Scene& scene, const PlanarPose& pose,
                                              const SonarConfig& h_cfg, const SonarConfig& v_cfg,
                                              const RenderParams& params,
                                              std::uint64_t noise_seed);

/// Noise-free range of the first hit along the ray of each angular bin
/// centre (zero unmeasured angle); negative when nothing is hit.
std::vector<double> first_hit_profile(const Scene& scene, const PlanarPose& pose,
                                      const SonarConfig& config);

/// Ordered keyframe poses of one survey.
struct Mission {
  std::vector<PlanarPose> keyframes;
  double keyframe_spacing = 0.0;
};

/// Samples keyframes every `spacing` metres of travel along a polyline of
/// (x, y) waypoints. Yaw follows the current segment direction.
Mission sample_keyframes(const std::vector<std::pair<double, double>>& waypoints, double spacing,
                         double depth);

/// 64-bit mixing used to derive independent per-stage seeds.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt);

}  // namespace sonar3d
