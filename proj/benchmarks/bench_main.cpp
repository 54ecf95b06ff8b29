#include <benchmark/benchmark.h>

#include <random>

#include "sonar3d/assignment.hpp"
#include "sonar3d/detection.hpp"
#include "sonar3d/mapping.hpp"
#include "sonar3d/registration.hpp"
#include "sonar3d/simulator.hpp"

using namespace sonar3d;

namespace {

Scene piling_scene() {
  Scene s;
  for (int i = 0; i < 6; ++i) {
    s.primitives.push_back({Cylinder{{6.0 + 4.0 * i, -4.0 + 1.5 * i, -2.5}, 0.2, 7.0}, "cyl"});
  }
  s.primitives.push_back({Wall{0, -12, 40, -12, -6, 1}, "wall"});
  return s;
}

const PolarImage& rendered() {
  static const PolarImage img = render_image(piling_scene(), PlanarPose(0, 0, 0, -2.5),
                                             SonarConfig::default_horizontal(), RenderParams{}, 1);
  return img;
}

void BM_RenderHorizontal(benchmark::State& state) {
  const Scene scene = piling_scene();
  RenderParams p;
  p.rays_per_bin = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_image(scene, PlanarPose(0, 0, 0, -2.5),
                                          SonarConfig::default_horizontal(), p, ++seed));
  }
}
BENCHMARK(BM_RenderHorizontal)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_SocaCfar(benchmark::State& state) {
  const PolarImage& img = rendered();
  CfarParams p;
  p.train_cells = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(soca_cfar(img, p));
}
BENCHMARK(BM_SocaCfar)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_Dbscan(benchmark::State& state) {
  const auto features = soca_cfar(rendered(), CfarParams{});
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        cluster_features(features, SonarOrientation::kHorizontal, DbscanParams{}));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(features.size()));
}
BENCHMARK(BM_Dbscan);

void BM_Hungarian(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  CostMatrix c(n, n);
  for (double& v : c.values) v = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(solve_assignment(c));
}
BENCHMARK(BM_Hungarian)->RangeMultiplier(4)->Range(4, 256);

void BM_Icp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  PointSet2D src;
  for (int i = 0; i < n; ++i) {
    const double t = 2 * kPi * i / n;
    const double r = 3.0 + 0.8 * std::cos(t) + 0.4 * std::sin(2 * t);
    src.push_back({r * std::cos(t) + 0.5 * t, r * std::sin(t)});
  }
  const auto tgt = transform_points(Transform2D::from(0.3, 0.6, -0.4), src);
  IcpParams p;
  p.rotation_starts = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(icp_2d(src, tgt, Transform2D::identity(), p));
}
BENCHMARK(BM_Icp)->Args({50, 0})->Args({50, 17})->Args({500, 17});

void BM_VoxelCount(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-20, 20);
  std::vector<CartesianPoint> pts(static_cast<std::size_t>(state.range(0)));
  for (auto& p : pts) p = {u(rng), u(rng), 0.1 * u(rng)};
  for (auto _ : state) benchmark::DoNotOptimize(voxel_count(pts, 0.1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_VoxelCount)->Arg(10000)->Arg(1000000);

}  // namespace
BENCHMARK_MAIN();
