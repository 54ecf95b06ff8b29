#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sonar3d {

enum class SonarOrientation { kHorizontal, kVertical };

/// Geometry of one imaging sonar.
///
/// The angular axis of the image is bearing for a horizontal sonar and
/// elevation for a vertical one. `beamwidth` is the unmeasured aperture
/// perpendicular to the imaged fan.
struct SonarConfig {
  double max_range = 30.0;         // [m]
  double range_resolution = 0.05;  // [m]
  double aperture = 0.0;           // imaged angular span [rad]
  int angular_bins = 0;
  double beamwidth = 0.0;          // unmeasured span [rad]
  SonarOrientation orientation = SonarOrientation::kHorizontal;

  int range_bins() const;
  double bin_width() const { return aperture / angular_bins; }
  /// Centre of angular bin `i`.
  double angle_of_bin(int i) const;
  /// Centre of range bin `i`.
  double range_of_bin(int i) const;
  /// Angular bin containing `angle`, or -1 outside the aperture.
  int bin_of_angle(double angle) const;

  /// Throws ConfigError when the invariants do not hold.
  void validate() const;

  static SonarConfig default_horizontal();
  static SonarConfig default_vertical();
};

/// Dense range x angle intensity grid. Row = range bin, column = angular bin.
class PolarImage {
 public:
  PolarImage() = default;
  explicit PolarImage(SonarConfig config);

  const SonarConfig& config() const { return config_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& at(int row, int col) { return data_[static_cast<std::size_t>(row) * cols_ + col]; }
  double at(int row, int col) const { return data_[static_cast<std::size_t>(row) * cols_ + col]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  /// Copy rescaled to [0, 1] by the global min and max. A constant image
  /// maps to all zeros.
  PolarImage normalized() const;

 private:
  SonarConfig config_;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

}  // namespace sonar3d
