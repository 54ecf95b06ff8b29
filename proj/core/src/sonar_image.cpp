#include "sonar3d/sonar_image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sonar3d/errors.hpp"
#include "sonar3d/geometry.hpp"

namespace sonar3d {

int SonarConfig::range_bins() const {
  return static_cast<int>(std::lround(max_range / range_resolution));
}

double SonarConfig::angle_of_bin(int i) const {
  return -0.5 * aperture + (static_cast<double>(i) + 0.5) * bin_width();
}

double SonarConfig::range_of_bin(int i) const {
  return (static_cast<double>(i) + 0.5) * range_resolution;
}

int SonarConfig::bin_of_angle(double angle) const {
  const double u = (angle + 0.5 * aperture) / bin_width();
  if (u < 0.0 || u >= angular_bins) return -1;
  return static_cast<int>(std::floor(u));
}

void SonarConfig::validate() const {
  if (!(max_range > 0.0) || !(range_resolution > 0.0)) {
    throw ConfigError("sonar: max_range and range_resolution must be positive");
  }
  const double ratio = max_range / range_resolution;
  if (std::abs(ratio - std::round(ratio)) > 1e-6 || std::round(ratio) < 1.0) {
    throw ConfigError("sonar: max_range / range_resolution must be a positive integer");
  }
  if (angular_bins < 2) throw ConfigError("sonar: angular_bins must be >= 2");
  if (!(aperture > 0.0) || aperture > 2.0 * kPi) {
    throw ConfigError("sonar: aperture must be in (0, 2pi]");
  }
  if (!(beamwidth > 0.0) || beamwidth >= kPi) {
    throw ConfigError("sonar: beamwidth must be in (0, pi)");
  }
}

SonarConfig SonarConfig::default_horizontal() {
  SonarConfig c;
  c.aperture = deg2rad(130.0);
  c.angular_bins = 256;
  c.beamwidth = deg2rad(20.0);
  c.orientation = SonarOrientation::kHorizontal;
  return c;
}

SonarConfig SonarConfig::default_vertical() {
  SonarConfig c;
  c.aperture = deg2rad(20.0);
  c.angular_bins = 40;
  c.beamwidth = deg2rad(20.0);
  c.orientation = SonarOrientation::kVertical;
  return c;
}

PolarImage::PolarImage(SonarConfig config)
    : config_(config), rows_(config.range_bins()), cols_(config.angular_bins) {
  config_.validate();
  data_.assign(static_cast<std::size_t>(rows_) * cols_, 0.0);
}

PolarImage PolarImage::normalized() const {
  PolarImage out = *this;
  if (data_.empty()) return out;
  const auto [lo, hi] = std::minmax_element(data_.begin(), data_.end());
  const double min = *lo;
  const double span = *hi - *lo;
  for (double& v : out.data_) v = span > 0.0 ? (v - min) / span : 0.0;
  return out;
}

}  // namespace sonar3d
