#include "sonar3d/geometry.hpp"

#include "sonar3d/errors.hpp"

namespace sonar3d {

double normalize_angle(double radians) {
  double a = std::fmod(radians + kPi, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  a -= kPi;
  // fmod can land exactly on +pi after the shift for tiny negative inputs
  if (a >= kPi) a -= 2.0 * kPi;
  return a;
}

double dot(const CartesianPoint& a, const CartesianPoint& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

double norm(const CartesianPoint& a) { return std::sqrt(dot(a, a)); }

double distance(const CartesianPoint& a, const CartesianPoint& b) { return norm(a - b); }

std::array<std::array<double, 4>, 4> PlanarPose::matrix() const {
  const double c = std::cos(yaw_);
  const double s = std::sin(yaw_);
  return {{{c, -s, 0.0, x_}, {s, c, 0.0, y_}, {0.0, 0.0, 1.0, depth_}, {0.0, 0.0, 0.0, 1.0}}};
}

CartesianPoint spherical_to_cartesian(const SphericalMeasurement& m) {
  const double cp = std::cos(m.elevation);
  return {m.range * cp * std::cos(m.bearing), m.range * cp * std::sin(m.bearing),
          m.range * std::sin(m.elevation)};
}

SphericalMeasurement cartesian_to_spherical(const CartesianPoint& p) {
  const double horizontal = std::hypot(p.x, p.y);
  const double r = std::hypot(horizontal, p.z);
  if (r == 0.0) {
    throw PreconditionError("cartesian_to_spherical: point is the origin");
  }
  SphericalMeasurement m;
  m.range = r;
  m.bearing = std::atan2(p.y, p.x);
  m.elevation = std::atan2(p.z, horizontal);
  return m;
}

CartesianPoint transform_to_map(const PlanarPose& pose, const CartesianPoint& p) {
  const double c = std::cos(pose.yaw());
  const double s = std::sin(pose.yaw());
  return {c * p.x - s * p.y + pose.x(), s * p.x + c * p.y + pose.y(), p.z + pose.depth()};
}

CartesianPoint transform_to_robot(const PlanarPose& pose, const CartesianPoint& p) {
  const double c = std::cos(pose.yaw());
  const double s = std::sin(pose.yaw());
  const double dx = p.x - pose.x();
  const double dy = p.y - pose.y();
  return {c * dx + s * dy, -s * dx + c * dy, p.z - pose.depth()};
}

CartesianPoint fused_to_cartesian(const FusedPoint& f) {
  return spherical_to_cartesian({f.range, f.bearing, f.elevation, 0.0});
}

}  // namespace sonar3d
