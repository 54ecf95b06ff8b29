#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "oracles.hpp"
#include "sonar3d/detection.hpp"
#include "sonar3d/errors.hpp"
#include "sonar3d/simulator.hpp"

using namespace sonar3d;

namespace {

PolarImage constant_image(double c) {
  PolarImage img(SonarConfig::default_horizontal());
  std::fill(img.data().begin(), img.data().end(), c);
  return img;
}

PolarImage rendered_cylinder(std::uint64_t seed) {
  Scene s;
  s.primitives.push_back({Cylinder{{10.0, 0.0, -2.5}, 0.25, 7.0}, "cylindrical_piling"});
  return render_image(s, PlanarPose(0, 0, 0, -2.5), SonarConfig::default_horizontal(),
                      RenderParams{}, seed);
}

std::vector<std::pair<int, int>> pixels(const std::vector<ImageFeature>& f) {
  std::vector<std::pair<int, int>> out;
  for (const auto& x : f) out.emplace_back(x.range_bin, x.angle_bin);
  return out;
}

ImageFeature feature_at(double x, double y, int rb = 0, int ab = 0) {
  ImageFeature f;
  f.range_bin = rb;
  f.angle_bin = ab;
  f.measurement.range = std::hypot(x, y);
  f.measurement.bearing = std::atan2(y, x);
  return f;
}

// Cluster partition as sets of input indices, independent of numbering.
std::set<std::set<int>> partition(const std::vector<FeatureCluster>& clusters) {
  std::set<std::set<int>> out;
  for (const auto& c : clusters) out.insert(std::set<int>(c.indices.begin(), c.indices.end()));
  return out;
}

std::set<std::set<int>> partition(const std::vector<int>& labels) {
  std::map<int, std::set<int>> groups;
  for (int i = 0; i < static_cast<int>(labels.size()); ++i) {
    if (labels[i] >= 0) groups[labels[i]].insert(i);
  }
  std::set<std::set<int>> out;
  for (auto& [k, v] : groups) out.insert(v);
  return out;
}

}  // namespace

TEST(SocaCfar, ConstantImageHasNoFeatures) {
  CfarParams p;
  p.threshold_factor = 1.01;
  EXPECT_TRUE(soca_cfar(constant_image(0.7), p).empty());
}

TEST(SocaCfar, SingleSpikeIsTheOnlyFeature) {
  auto img = constant_image(0.2);
  img.at(300, 100) = 20.0;
  CfarParams p;
  p.threshold_factor = 5.0;
  const auto f = soca_cfar(img, p);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].range_bin, 300);
  EXPECT_EQ(f[0].angle_bin, 100);
  EXPECT_DOUBLE_EQ(f[0].measurement.range, img.config().range_of_bin(300));
  EXPECT_DOUBLE_EQ(f[0].measurement.bearing, img.config().angle_of_bin(100));
  EXPECT_EQ(f[0].measurement.elevation, 0.0);
}

TEST(SocaCfar, SpikeInCornerUsesTruncatedWindows) {
  auto img = constant_image(1.0);
  img.at(0, 0) = 100.0;
  CfarParams p;
  p.threshold_factor = 5.0;
  const auto f = soca_cfar(img, p);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].range_bin, 0);
  EXPECT_EQ(f[0].angle_bin, 0);
}

TEST(SocaCfar, MatchesNaiveOracleOnRenderedImages) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto img = rendered_cylinder(seed);
    const CfarParams p;
    const auto got = pixels(soca_cfar(img, p));
    const auto want = oracle::naive_cfar(img, p.train_cells, p.guard_cells, p.threshold_factor);
    EXPECT_FALSE(want.empty());
    EXPECT_EQ(got, want) << "seed " << seed;
  }
  // other window shapes
  const auto img = rendered_cylinder(8);
  for (auto [t, g, k] : std::vector<std::tuple<int, int, double>>{{4, 1, 8.0}, {15, 3, 20.0}}) {
    CfarParams p{t, g, k};
    EXPECT_EQ(pixels(soca_cfar(img, p)), oracle::naive_cfar(img, t, g, k));
  }
}

TEST(SocaCfar, ExactlyScaleInvariant) {
  const auto img = rendered_cylinder(4);
  const auto base = pixels(soca_cfar(img, CfarParams{}));
  for (double s : {1e-6, 0.37, 8.0, 1024.0, 3.1e5}) {
    PolarImage scaled = img;
    for (double& v : scaled.data()) v *= s;
    EXPECT_EQ(pixels(soca_cfar(scaled, CfarParams{})), base) << s;
  }
}

TEST(SocaCfar, EveryFeatureExceedsItsThreshold) {
  const auto img = rendered_cylinder(6);
  const CfarParams p;
  const auto f = soca_cfar(img, p);
  ASSERT_FALSE(f.empty());
  for (const auto& x : f) {
    EXPECT_EQ(x.measurement.intensity, img.at(x.range_bin, x.angle_bin));
    EXPECT_GT(x.measurement.intensity,
              p.threshold_factor *
                  oracle::soca_noise(img, x.range_bin, x.angle_bin, p.train_cells, p.guard_cells));
  }
}

TEST(SocaCfar, RejectsBadWindows) {
  EXPECT_THROW(soca_cfar(constant_image(1), CfarParams{0, 2, 15.8}), ConfigError);
  EXPECT_THROW(soca_cfar(constant_image(1), CfarParams{10, 2, 0.0}), ConfigError);
  EXPECT_THROW(soca_cfar(constant_image(1), CfarParams{300, 2, 15.8}), ConfigError);
}

TEST(ClusterFeatures, FarApartNeverMerge) {
  const std::vector<ImageFeature> f = {feature_at(5, 0), feature_at(15, 0)};
  DbscanParams p{1.0, 1};
  EXPECT_EQ(cluster_features(f, SonarOrientation::kHorizontal, p).size(), 2u);
  p.min_pts = 2;
  EXPECT_TRUE(cluster_features(f, SonarOrientation::kHorizontal, p).empty());
}

TEST(ClusterFeatures, DenseBlobIsOneCluster) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  std::vector<ImageFeature> f;
  for (int i = 0; i < 50; ++i) f.push_back(feature_at(10 + u(rng), 2 + u(rng), i, i));
  const auto c = cluster_features(f, SonarOrientation::kHorizontal, DbscanParams{0.5, 5});
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].features.size(), 50u);
}

TEST(ClusterFeatures, MatchesQuadraticOracle) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_real_distribution<double> u(0, 12);
    std::vector<ImageFeature> f;
    std::vector<std::pair<double, double>> xy;
    for (int i = 0; i < 200; ++i) {
      auto feat = feature_at(2 + u(rng), u(rng) - 6, i / 7, i % 7);
      f.push_back(feat);
      xy.push_back(planar_projection(feat, SonarOrientation::kHorizontal));
    }
    const DbscanParams p{0.9, 4};
    const auto got = cluster_features(f, SonarOrientation::kHorizontal, p);
    EXPECT_EQ(partition(got), partition(oracle::naive_dbscan(xy, p.eps, p.min_pts)))
        << "trial " << trial;
  }
}

TEST(ClusterFeatures, VerticalUsesElevation) {
  ImageFeature a, b;
  a.measurement = {10, 0, 0.0, 1};
  b.measurement = {10, 0, 0.2, 1};  // 2 m apart in the vertical plane
  b.angle_bin = 1;
  const auto c = cluster_features({a, b}, SonarOrientation::kVertical, DbscanParams{1.0, 1});
  EXPECT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].orientation, SonarOrientation::kVertical);
}

TEST(ClusterFeatures, PermutationInvariant) {
  const auto img = rendered_cylinder(2);
  CfarParams cp;
  cp.threshold_factor = 4.0;  // more speckle features, more clusters
  auto feats = soca_cfar(img, cp);
  ASSERT_GT(feats.size(), 20u);
  const auto base = cluster_features(feats, SonarOrientation::kHorizontal, DbscanParams{});
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<int> perm(feats.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<ImageFeature> shuffled;
    for (int i : perm) shuffled.push_back(feats[i]);
    const auto c = cluster_features(shuffled, SonarOrientation::kHorizontal, DbscanParams{});
    ASSERT_EQ(c.size(), base.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
      // canonical order: same clusters, same member order
      ASSERT_EQ(pixels(c[k].features), pixels(base[k].features));
      for (std::size_t j = 0; j < c[k].indices.size(); ++j) {
        EXPECT_EQ(perm[c[k].indices[j]], base[k].indices[j]);
      }
    }
  }
}

TEST(FilterClusters, Examples) {
  std::vector<FeatureCluster> in(3);
  in[0].features.resize(3);
  in[1].features.resize(7);
  in[2].features.resize(12);
  auto sizes = [](const std::vector<FeatureCluster>& c) {
    std::vector<std::size_t> s;
    for (const auto& x : c) s.push_back(x.features.size());
    return s;
  };
  EXPECT_EQ(sizes(filter_clusters(in, 5)), (std::vector<std::size_t>{7, 12}));
  EXPECT_EQ(sizes(filter_clusters(in, 1)), (std::vector<std::size_t>{3, 7, 12}));
  EXPECT_TRUE(filter_clusters(in, 13).empty());
  EXPECT_THROW(filter_clusters(in, 0), PreconditionError);
}

TEST(Detection, RenderedCylinderGivesOneClusterNearTruth) {
  const auto img = rendered_cylinder(1);
  const auto clusters = filter_clusters(
      cluster_features(soca_cfar(img, CfarParams{}), SonarOrientation::kHorizontal,
                       DbscanParams{}),
      10);
  ASSERT_EQ(clusters.size(), 1u);
  for (const auto& f : clusters[0].features) {
    // first hits span 9.75 m (front) to the tangent distance over cos(10 deg)
    EXPECT_GE(f.measurement.range, 9.75 - 0.05);
    EXPECT_LE(f.measurement.range, std::sqrt(100.0 - 0.0625) / std::cos(deg2rad(10.0)) + 0.05);
    EXPECT_NEAR(f.measurement.bearing, 0.0, 0.05);
  }
}
