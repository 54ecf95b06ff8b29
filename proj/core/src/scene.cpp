#include "sonar3d/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sonar3d/errors.hpp"

namespace sonar3d {
namespace {

constexpr double kEps = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// Distance to an axis-aligned rectangle lying in a plane, given the offset
// along the plane normal and the in-plane coordinates (u, v) with half sizes.
double rectangle_distance(double normal_offset, double u, double v, double hu, double hv) {
  const double du = std::abs(u) - hu;
  const double dv = std::abs(v) - hv;
  const double eu = du > 0.0 ? du : 0.0;
  const double ev = dv > 0.0 ? dv : 0.0;
  return std::sqrt(normal_offset * normal_offset + eu * eu + ev * ev);
}

std::optional<RayHit> intersect_cylinder(const Cylinder& c, const CartesianPoint& o,
                                         const CartesianPoint& d) {
  const double half = 0.5 * c.height;
  const double z_lo = c.center.z - half;
  const double z_hi = c.center.z + half;
  double best = std::numeric_limits<double>::infinity();
  CartesianPoint normal{};

  // lateral surface
  const double ox = o.x - c.center.x;
  const double oy = o.y - c.center.y;
  const double a = d.x * d.x + d.y * d.y;
  if (a > kEps) {
    const double b = 2.0 * (ox * d.x + oy * d.y);
    const double cc = ox * ox + oy * oy - c.radius * c.radius;
    const double disc = b * b - 4.0 * a * cc;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      for (double t : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)}) {
        if (t <= kEps || t >= best) continue;
        const double z = o.z + t * d.z;
        if (z < z_lo || z > z_hi) continue;
        best = t;
        normal = {(ox + t * d.x) / c.radius, (oy + t * d.y) / c.radius, 0.0};
      }
    }
  }
  // caps
  if (std::abs(d.z) > kEps) {
    for (double zc : {z_lo, z_hi}) {
      const double t = (zc - o.z) / d.z;
      if (t <= kEps || t >= best) continue;
      const double px = ox + t * d.x;
      const double py = oy + t * d.y;
      if (px * px + py * py > c.radius * c.radius) continue;
      best = t;
      normal = {0.0, 0.0, 1.0};
    }
  }
  if (!std::isfinite(best)) return std::nullopt;
  return RayHit{best, std::abs(dot(normal, d)), -1};
}

std::optional<RayHit> intersect_box(const Box& b, const CartesianPoint& o,
                                    const CartesianPoint& d) {
  const double c = std::cos(b.yaw);
  const double s = std::sin(b.yaw);
  const double rx = o.x - b.center.x;
  const double ry = o.y - b.center.y;
  const std::array<double, 3> lo{c * rx + s * ry, -s * rx + c * ry, o.z - b.center.z};
  const std::array<double, 3> ld{c * d.x + s * d.y, -s * d.x + c * d.y, d.z};
  const std::array<double, 3> half{0.5 * b.extents.x, 0.5 * b.extents.y, 0.5 * b.extents.z};

  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  int near_axis = -1;
  int far_axis = -1;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(ld[k]) < kEps) {
      if (std::abs(lo[k]) > half[k]) return std::nullopt;
      continue;
    }
    double t0 = (-half[k] - lo[k]) / ld[k];
    double t1 = (half[k] - lo[k]) / ld[k];
    if (t0 > t1) std::swap(t0, t1);
    if (t0 > t_near) {
      t_near = t0;
      near_axis = k;
    }
    if (t1 < t_far) {
      t_far = t1;
      far_axis = k;
    }
    if (t_near > t_far) return std::nullopt;
  }
  double t = t_near;
  int axis = near_axis;
  if (t <= kEps) {
    t = t_far;
    axis = far_axis;
  }
  if (t <= kEps || axis < 0) return std::nullopt;
  return RayHit{t, std::abs(ld[axis]), -1};
}

std::optional<RayHit> intersect_wall(const Wall& w, const CartesianPoint& o,
                                     const CartesianPoint& d) {
  const double ex = w.x1 - w.x0;
  const double ey = w.y1 - w.y0;
  const double len = std::hypot(ex, ey);
  const double nx = -ey / len;
  const double ny = ex / len;
  const double denom = nx * d.x + ny * d.y;
  if (std::abs(denom) < kEps) return std::nullopt;
  const double t = (nx * (w.x0 - o.x) + ny * (w.y0 - o.y)) / denom;
  if (t <= kEps) return std::nullopt;
  const double px = o.x + t * d.x - w.x0;
  const double py = o.y + t * d.y - w.y0;
  const double along = (px * ex + py * ey) / (len * len);
  if (along < 0.0 || along > 1.0) return std::nullopt;
  const double z = o.z + t * d.z;
  if (z < w.z_bottom || z > w.z_top) return std::nullopt;
  return RayHit{t, std::abs(denom), -1};
}

double cylinder_distance(const Cylinder& c, const CartesianPoint& p) {
  const double rho = std::hypot(p.x - c.center.x, p.y - c.center.y);
  const double dz = p.z - c.center.z;
  const double half = 0.5 * c.height;
  // lateral surface
  const double over = std::abs(dz) - half;
  const double lateral = over > 0.0 ? std::hypot(rho - c.radius, over) : std::abs(rho - c.radius);
  // caps (disks)
  const double outside = rho > c.radius ? rho - c.radius : 0.0;
  const double top = std::hypot(outside, dz - half);
  const double bottom = std::hypot(outside, dz + half);
  return std::min({lateral, top, bottom});
}

double box_distance(const Box& b, const CartesianPoint& p) {
  const double c = std::cos(b.yaw);
  const double s = std::sin(b.yaw);
  const double rx = p.x - b.center.x;
  const double ry = p.y - b.center.y;
  const double lx = c * rx + s * ry;
  const double ly = -s * rx + c * ry;
  const double lz = p.z - b.center.z;
  const double hx = 0.5 * b.extents.x;
  const double hy = 0.5 * b.extents.y;
  const double hz = 0.5 * b.extents.z;
  double best = std::numeric_limits<double>::infinity();
  for (double sign : {-1.0, 1.0}) {
    best = std::min(best, rectangle_distance(lx - sign * hx, ly, lz, hy, hz));
    best = std::min(best, rectangle_distance(ly - sign * hy, lx, lz, hx, hz));
    best = std::min(best, rectangle_distance(lz - sign * hz, lx, ly, hx, hy));
  }
  return best;
}

double wall_distance(const Wall& w, const CartesianPoint& p) {
  const double ex = w.x1 - w.x0;
  const double ey = w.y1 - w.y0;
  const double len2 = ex * ex + ey * ey;
  const double along = clamp(((p.x - w.x0) * ex + (p.y - w.y0) * ey) / len2, 0.0, 1.0);
  const double qx = w.x0 + along * ex;
  const double qy = w.y0 + along * ey;
  const double qz = clamp(p.z, w.z_bottom, w.z_top);
  return std::sqrt((p.x - qx) * (p.x - qx) + (p.y - qy) * (p.y - qy) + (p.z - qz) * (p.z - qz));
}

}  // namespace

void Scene::validate() const {
  for (std::size_t i = 0; i < primitives.size(); ++i) {
    const auto& prim = primitives[i];
    const bool ok = std::visit(
        Overloaded{
            [](const Cylinder& c) { return c.radius > 0.0 && c.height > 0.0; },
            [](const Box& b) { return b.extents.x > 0.0 && b.extents.y > 0.0 && b.extents.z > 0.0; },
            [](const Wall& w) {
              return std::hypot(w.x1 - w.x0, w.y1 - w.y0) > 0.0 && w.z_top > w.z_bottom;
            },
        },
        prim.shape);
    if (!ok) {
      throw ConfigError("scene: primitive " + std::to_string(i) + " has non-positive dimensions");
    }
    if (prim.class_tag.empty()) {
      throw ConfigError("scene: primitive " + std::to_string(i) + " has an empty class tag");
    }
  }
  if (water_depth < 0.0) throw ConfigError("scene: water_depth must be non-negative");
}

std::optional<RayHit> intersect(const Shape& shape, const CartesianPoint& origin,
                                const CartesianPoint& direction) {
  return std::visit(Overloaded{
                        [&](const Cylinder& c) { return intersect_cylinder(c, origin, direction); },
                        [&](const Box& b) { return intersect_box(b, origin, direction); },
                        [&](const Wall& w) { return intersect_wall(w, origin, direction); },
                    },
                    shape);
}

std::optional<RayHit> Scene::cast_ray(const CartesianPoint& origin,
                                      const CartesianPoint& direction,
                                      double max_distance) const {
  std::optional<RayHit> best;
  for (std::size_t i = 0; i < primitives.size(); ++i) {
    auto hit = intersect(primitives[i].shape, origin, direction);
    if (!hit || hit->distance >= max_distance) continue;
    if (!best || hit->distance < best->distance) {
      hit->primitive = static_cast<int>(i);
      best = hit;
    }
  }
  return best;
}

double surface_distance(const Shape& shape, const CartesianPoint& p) {
  return std::visit(Overloaded{
                        [&](const Cylinder& c) { return cylinder_distance(c, p); },
                        [&](const Box& b) { return box_distance(b, p); },
                        [&](const Wall& w) { return wall_distance(w, p); },
                    },
                    shape);
}

double distance_to_scene(const CartesianPoint& p, const Scene& scene) {
  if (scene.primitives.empty()) {
    throw PreconditionError("distance_to_scene: scene has no primitives");
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& prim : scene.primitives) best = std::min(best, surface_distance(prim.shape, p));
  return best;
}

int nearest_primitive(const CartesianPoint& p, const Scene& scene) {
  int best_index = -1;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scene.primitives.size(); ++i) {
    const double d = surface_distance(scene.primitives[i].shape, p);
    if (d < best) {
      best = d;
      best_index = static_cast<int>(i);
    }
  }
  return best_index;
}

}  // namespace sonar3d
