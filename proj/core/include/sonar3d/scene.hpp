#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sonar3d/geometry.hpp"

namespace sonar3d {

/// Vertical cylinder. `center` is the centroid of the solid.
struct Cylinder {
  CartesianPoint center;
  double radius = 0.0;
  double height = 0.0;
};

/// Box with full side lengths `extents`, rotated by `yaw` about the
/// vertical axis through `center`.
struct Box {
  CartesianPoint center;
  CartesianPoint extents;
  double yaw = 0.0;
};

/// Zero-thickness vertical rectangle spanning the segment (x0, y0)-(x1, y1)
/// horizontally and [z_bottom, z_top] vertically.
struct Wall {
  double x0 = 0.0, y0 = 0.0;
  double x1 = 0.0, y1 = 0.0;
  double z_bottom = 0.0;
  double z_top = 0.0;
};

using Shape = std::variant<Cylinder, Box, Wall>;

struct Primitive {
  Shape shape;
  std::string class_tag;
};

struct RayHit {
  double distance = 0.0;
  double cos_incidence = 0.0;  // |cos| of the angle between ray and surface normal
  int primitive = -1;
};

/// Analytic ground-truth environment.
struct Scene {
  std::vector<Primitive> primitives;
  double water_depth = 0.0;

  /// Throws ConfigError on non-positive dimensions.
  void validate() const;

  /// First intersection along a unit-direction ray, if any within `max_distance`.
  std::optional<RayHit> cast_ray(const CartesianPoint& origin, const CartesianPoint& direction,
                                 double max_distance) const;
};

std::optional<RayHit> intersect(const Shape& shape, const CartesianPoint& origin,
                                const CartesianPoint& direction);

/// Exact distance from `p` to the surface of one primitive.
double surface_distance(const Shape& shape, const CartesianPoint& p);

/// Minimum distance from `p` to the union of primitive surfaces. Throws
/// PreconditionError for an empty scene.
double distance_to_scene(const CartesianPoint& p, const Scene& scene);

/// Index of the primitive whose surface is nearest to `p`, or -1 for an
/// empty scene.
int nearest_primitive(const CartesianPoint& p, const Scene& scene);

}  // namespace sonar3d
