#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace sonar3d {

inline constexpr double kPi = std::numbers::pi;

/// Wraps an angle into [-pi, pi).
double normalize_angle(double radians);

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// A single sonar return in the sensor's spherical frame.
///
/// Robot frame convention: x forward, y left, z up. Bearing is measured
/// from +x towards +y, elevation from the x-y plane towards +z.
struct SphericalMeasurement {
  double range = 0.0;      // [m]
  double bearing = 0.0;    // [rad]
  double elevation = 0.0;  // [rad]
  double intensity = 0.0;
};

struct CartesianPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend CartesianPoint operator+(const CartesianPoint& a, const CartesianPoint& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend CartesianPoint operator-(const CartesianPoint& a, const CartesianPoint& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend CartesianPoint operator*(double s, const CartesianPoint& a) {
    return {s * a.x, s * a.y, s * a.z};
  }
  friend bool operator==(const CartesianPoint&, const CartesianPoint&) = default;
};

double dot(const CartesianPoint& a, const CartesianPoint& b);
double norm(const CartesianPoint& a);
double distance(const CartesianPoint& a, const CartesianPoint& b);

/// Planar vehicle pose at a fixed depth. Roll and pitch are zero.
///
/// `depth` is the vertical translation of the sensor origin in the map frame
/// (map z of the vehicle), so a vehicle 2.5 m below the surface at z = 0 has
/// depth = -2.5.
class PlanarPose {
 public:
  PlanarPose() = default;
  PlanarPose(double x, double y, double yaw, double depth)
      : x_(x), y_(y), yaw_(normalize_angle(yaw)), depth_(depth) {}

  double x() const { return x_; }
  double y() const { return y_; }
  double yaw() const { return yaw_; }
  double depth() const { return depth_; }

  /// Homogeneous 4x4 transform, row-major.
  std::array<std::array<double, 4>, 4> matrix() const;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double yaw_ = 0.0;
  double depth_ = 0.0;
};

/// Fully 3D return obtained by associating a horizontal and a vertical
/// sonar feature at the same range.
struct FusedPoint {
  double range = 0.0;      // mean of the two sensor ranges
  double bearing = 0.0;    // from the horizontal image
  double elevation = 0.0;  // from the vertical image
  double confidence = 0.0; // association confidence in [0, 1]
  int h_feature = -1;      // index into the horizontal feature list
  int v_feature = -1;      // index into the vertical feature list
};

CartesianPoint spherical_to_cartesian(const SphericalMeasurement& m);

/// Throws PreconditionError for the origin.
SphericalMeasurement cartesian_to_spherical(const CartesianPoint& p);

/// Robot frame -> map frame: rotate by yaw about z, then translate by
/// (x, y, depth).
CartesianPoint transform_to_map(const PlanarPose& pose, const CartesianPoint& p);

/// Map frame -> robot frame; inverse of transform_to_map.
CartesianPoint transform_to_robot(const PlanarPose& pose, const CartesianPoint& p);

CartesianPoint fused_to_cartesian(const FusedPoint& f);

}  // namespace sonar3d
