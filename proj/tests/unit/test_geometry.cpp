#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sonar3d/errors.hpp"
#include "sonar3d/geometry.hpp"

using namespace sonar3d;

namespace {

void expect_point(const CartesianPoint& p, double x, double y, double z, double tol = 1e-12) {
  EXPECT_NEAR(p.x, x, tol);
  EXPECT_NEAR(p.y, y, tol);
  EXPECT_NEAR(p.z, z, tol);
}

// Random point inside the default horizontal frustum.
SphericalMeasurement random_frustum(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> r(0.05, 30.0);
  std::uniform_real_distribution<double> th(-deg2rad(65.0), deg2rad(65.0));
  std::uniform_real_distribution<double> ph(-deg2rad(10.0), deg2rad(10.0));
  return {r(rng), th(rng), ph(rng), 0.0};
}

}  // namespace

TEST(SphericalToCartesian, AxisCases) {
  expect_point(spherical_to_cartesian({1, 0, 0, 0}), 1, 0, 0);
  expect_point(spherical_to_cartesian({2, kPi / 2, 0, 0}), 0, 2, 0);
}

TEST(SphericalToCartesian, MatchesHighPrecisionValues) {
  // evaluated to 25 digits with an arbitrary-precision calculator
  expect_point(spherical_to_cartesian({30, 0.3, -0.1, 0}), 28.51691357766190070884,
               8.821315096555675606886, -2.995002499404844569204, 1e-12);
}

TEST(CartesianToSpherical, Examples) {
  const auto a = cartesian_to_spherical({0, 3, 0});
  EXPECT_NEAR(a.range, 3, 1e-12);
  EXPECT_NEAR(a.bearing, kPi / 2, 1e-12);
  EXPECT_NEAR(a.elevation, 0, 1e-12);

  const auto b = cartesian_to_spherical({1, 1, std::sqrt(2.0)});
  EXPECT_NEAR(b.range, 2, 1e-12);
  EXPECT_NEAR(b.bearing, kPi / 4, 1e-12);
  EXPECT_NEAR(b.elevation, kPi / 4, 1e-12);
}

TEST(CartesianToSpherical, OriginIsRejected) {
  EXPECT_THROW(cartesian_to_spherical({0, 0, 0}), PreconditionError);
}

TEST(SphericalToCartesian, RoundTripOverFrustum) {
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const auto m = random_frustum(rng);
    const auto p = spherical_to_cartesian(m);
    const auto back = spherical_to_cartesian(cartesian_to_spherical(p));
    worst = std::max(worst, distance(p, back));
    const double r2 = p.x * p.x + p.y * p.y + p.z * p.z;
    ASSERT_NEAR(r2, m.range * m.range, 1e-9 * m.range * m.range);
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(TransformToMap, Examples) {
  expect_point(transform_to_map(PlanarPose(0, 0, 0, 0), {5, 1, -2}), 5, 1, -2);
  expect_point(transform_to_map(PlanarPose(0, 0, kPi / 2, 0), {1, 0, 0}), 0, 1, 0);
}

TEST(TransformToMap, MatchesHomogeneousMultiply) {
  // [cos -sin 0 10; sin cos 0 -4; 0 0 1 1.5] * (3, 2, 0, 1), yaw = pi/6,
  // evaluated to 25 digits independently
  expect_point(transform_to_map(PlanarPose(10, -4, kPi / 6, 1.5), {3, 2, 0}),
               11.59807621135331594029, -0.7679491924311227064726, 1.5, 1e-12);
}

TEST(TransformToMap, MatrixAgreesWithFunction) {
  const PlanarPose pose(-3.2, 7.1, 2.4, -2.5);
  const auto m = pose.matrix();
  const CartesianPoint p{1.5, -0.25, 3.0};
  const auto q = transform_to_map(pose, p);
  EXPECT_NEAR(m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z + m[0][3], q.x, 1e-12);
  EXPECT_NEAR(m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z + m[1][3], q.y, 1e-12);
  EXPECT_NEAR(m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z + m[2][3], q.z, 1e-12);
  EXPECT_EQ(m[3][3], 1.0);
}

TEST(TransformToMap, IsometryAndInverse) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-50, 50);
  std::uniform_real_distribution<double> yaw(-4, 4);
  for (int i = 0; i < 10000; ++i) {
    const PlanarPose pose(u(rng), u(rng), yaw(rng), u(rng) / 10);
    const CartesianPoint a{u(rng), u(rng), u(rng)};
    const CartesianPoint b{u(rng), u(rng), u(rng)};
    const auto ma = transform_to_map(pose, a);
    const auto mb = transform_to_map(pose, b);
    ASSERT_NEAR(distance(ma, mb), distance(a, b), 1e-9);
    ASSERT_LT(distance(transform_to_robot(pose, ma), a), 1e-9);
  }
}

TEST(PlanarPose, YawIsNormalized) {
  EXPECT_NEAR(PlanarPose(0, 0, 3 * kPi / 2, 0).yaw(), -kPi / 2, 1e-12);
  EXPECT_NEAR(PlanarPose(0, 0, kPi, 0).yaw(), -kPi, 1e-12);
  for (double a = -20; a < 20; a += 0.37) {
    const double y = normalize_angle(a);
    EXPECT_GE(y, -kPi);
    EXPECT_LT(y, kPi);
    EXPECT_NEAR(std::remainder(y - a, 2 * kPi), 0.0, 1e-9);
  }
}

TEST(FusedToCartesian, UsesAllThreeAngles) {
  FusedPoint f;
  f.range = 10.025;
  f.bearing = 0.1;
  f.elevation = -0.05;
  const auto p = fused_to_cartesian(f);
  expect_point(p, 10.025 * std::cos(-0.05) * std::cos(0.1), 10.025 * std::cos(-0.05) * std::sin(0.1),
               10.025 * std::sin(-0.05));
}
