#include <gtest/gtest.h>

#include <filesystem>
#include <nlohmann/json.hpp>
#include <sstream>

#include "sonar3d/config.hpp"
#include "sonar3d/errors.hpp"
#include "sonar3d/io.hpp"
#include "sonar3d/pipeline.hpp"
#include "sonar3d/training.hpp"

using namespace sonar3d;
namespace fs = std::filesystem;

namespace {

const std::string kData = SONAR3D_DATA_DIR;

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const ClassifierModel& shared_classifier() {
  static const ClassifierModel model = obtain_classifier(PipelineConfig{});
  return model;
}

// A few keyframes of the marina lane, enough to see pilings in the overlap.
Mission short_mission() {
  Mission m = load_mission(kData + "/mission_4m.json");
  m.keyframes.resize(6);
  return m;
}

std::string ply_of(const GlobalMap& map) {
  std::ostringstream out;
  write_ply(out, map);
  return out.str();
}

}  // namespace

TEST(Config, DefaultsRoundTrip) {
  const PipelineConfig c;
  const std::string text = config_to_json(c);
  const PipelineConfig back = parse_config(text);
  EXPECT_EQ(config_to_json(back), text);
  EXPECT_EQ(parse_config("{}").cfar.threshold_factor, c.cfar.threshold_factor);
}

TEST(Config, PartialOverride) {
  const auto c = parse_config(R"({"cfar": {"threshold_factor": 9}, "mode": "benchmark"})");
  EXPECT_EQ(c.cfar.threshold_factor, 9.0);
  EXPECT_EQ(c.cfar.train_cells, PipelineConfig{}.cfar.train_cells);
  EXPECT_EQ(c.mode, PipelineMode::kBenchmark);
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_NE(error_of([] { parse_config(R"({"cfar": {"trian_cells": 4}})"); }).find("trian_cells"),
            std::string::npos);
  EXPECT_NE(error_of([] { parse_config(R"({"bogus": 1})"); }).find("bogus"), std::string::npos);
  EXPECT_NE(error_of([] { parse_config(R"({"dbscan": {"eps": "wide"}})"); }).find("eps"),
            std::string::npos);
  EXPECT_NE(error_of([] { parse_config(R"({"mapping": {"voxel_size": 0}})"); }).find("voxel_size"),
            std::string::npos);
  EXPECT_NE(error_of([] { parse_config(R"({"mode": "fast"})"); }).find("mode"), std::string::npos);
  EXPECT_NE(error_of([] { parse_config("{not json"); }), "");
}

TEST(Config, ParseMode) {
  EXPECT_EQ(parse_mode("benchmark"), PipelineMode::kBenchmark);
  EXPECT_EQ(parse_mode("semantic"), PipelineMode::kSemantic);
  EXPECT_THROW(parse_mode("Semantic"), ConfigError);
  EXPECT_STREQ(to_string(PipelineMode::kBenchmark), "benchmark");
}

TEST(SceneFile, ErrorsCarryFieldPaths) {
  const std::string e1 = error_of([] {
    parse_scene(R"({"primitives": [{"kind": "cylinder", "class": "c", "center": [0, 0, 0],
                    "radius": 0.2, "height": 2}, {"kind": "box", "class": "b", "center": [0, 0]}]})");
  });
  EXPECT_NE(e1.find("primitives[1].center"), std::string::npos) << e1;
  const std::string e2 =
      error_of([] { parse_scene(R"({"primitives": [{"kind": "cone", "class": "x"}]})"); });
  EXPECT_NE(e2.find("primitives[0].kind"), std::string::npos) << e2;
  EXPECT_NE(error_of([] { parse_scene(R"({"primitives": [], "extra": 1})"); }).find("extra"),
            std::string::npos);
}

TEST(SceneFile, MarinaLoads) {
  const Scene s = load_scene(kData + "/marina_scene.json");
  EXPECT_GT(s.primitives.size(), 20u);
}

TEST(MissionFile, WaypointsAndKeyframes) {
  EXPECT_EQ(load_mission(kData + "/mission_4m.json").keyframes.size(), 20u);
  EXPECT_EQ(load_mission(kData + "/mission_2m.json").keyframes.size(), 39u);
  const Mission m = parse_mission(
      R"({"depth": -2, "keyframes": [{"x": 1, "y": 2, "yaw_deg": 90}, {"x": 3, "y": 4}]})");
  ASSERT_EQ(m.keyframes.size(), 2u);
  EXPECT_NEAR(m.keyframes[0].yaw(), M_PI / 2, 1e-12);
  EXPECT_EQ(m.keyframes[1].depth(), -2.0);
}

TEST(MissionFile, ErrorsCarryFieldPaths) {
  const std::string e1 = error_of(
      [] { parse_mission(R"({"depth": -2, "keyframe_spacing": 4, "waypoints": [[0, 0], [1]]})"); });
  EXPECT_NE(e1.find("waypoints[1]"), std::string::npos) << e1;
  EXPECT_NE(error_of([] { parse_mission(R"({"keyframes": [{"x": 0, "y": 0}]})"); }).find("depth"),
            std::string::npos);
  EXPECT_NE(error_of([] { parse_mission(R"({"depth": -2, "keyframes": []})"); }), "");
  EXPECT_NE(error_of([] {
              parse_mission(R"({"depth": -2, "keyframes": [{"x": 0, "y": 0, "z": 1}]})");
            }).find("keyframes[0].z"),
            std::string::npos);
}

TEST(Pipeline, BenchmarkModeHasNoInferredPoints) {
  PipelineConfig config;
  config.mode = PipelineMode::kBenchmark;
  const auto r = run_mission(load_scene(kData + "/marina_scene.json"), short_mission(), config,
                             shared_classifier());
  EXPECT_GT(r.map.count(PointSource::kFused), 0u);
  EXPECT_EQ(r.map.count(PointSource::kInferred), 0u);
  EXPECT_TRUE(r.models.empty());
}

TEST(Pipeline, SemanticAddsToTheSameFusedPoints) {
  const Scene scene = load_scene(kData + "/marina_scene.json");
  const auto cmp = compare_modes(scene, short_mission(), PipelineConfig{}, shared_classifier());
  std::vector<CartesianPoint> fused;
  for (const auto& p : cmp.semantic.map.points) {
    if (p.source == PointSource::kFused) fused.push_back(p.position);
  }
  ASSERT_EQ(fused.size(), cmp.benchmark.map.points.size());
  for (std::size_t i = 0; i < fused.size(); ++i) {
    EXPECT_EQ(fused[i], cmp.benchmark.map.points[i].position);
  }
  EXPECT_GE(voxel_count(cmp.semantic.map, 0.1), voxel_count(cmp.benchmark.map, 0.1));
}

TEST(Pipeline, PointCountsMatchFrameReports) {
  const auto r = run_mission(load_scene(kData + "/marina_scene.json"), short_mission(),
                             PipelineConfig{}, shared_classifier());
  std::size_t fused = 0, inferred = 0;
  for (const auto& f : r.frames) {
    EXPECT_FALSE(f.skipped) << f.error;
    fused += f.fused;
    inferred += f.inferred;
  }
  EXPECT_EQ(r.map.count(PointSource::kFused), fused);
  EXPECT_EQ(r.map.count(PointSource::kInferred), inferred);
  EXPECT_EQ(r.map.points.size(), fused + inferred);
}

TEST(Pipeline, ExcludedClassesOnlyGiveBenchmarkPoints) {
  // only seawall: nothing eligible for height inference
  Scene scene;
  scene.primitives.push_back({Wall{0, -6, 40, -6, -6, 1}, "wall"});
  Mission m;
  for (int k = 0; k < 4; ++k) m.keyframes.emplace_back(4.0 * k, 0, -0.5, -2.5);
  const auto cmp = compare_modes(scene, m, PipelineConfig{}, shared_classifier());
  EXPECT_EQ(cmp.semantic.map.count(PointSource::kInferred), 0u);
  EXPECT_EQ(ply_of(cmp.semantic.map), ply_of(cmp.benchmark.map));
}

TEST(Pipeline, DeterministicOutputs) {
  const Scene scene = load_scene(kData + "/marina_scene.json");
  const PipelineConfig config;
  const auto a = run_mission(scene, short_mission(), config, shared_classifier());
  const auto b = run_mission(scene, short_mission(), config, shared_classifier());
  EXPECT_EQ(ply_of(a.map), ply_of(b.map));
  EXPECT_EQ(metrics_json(a, scene, config, shared_classifier()),
            metrics_json(b, scene, config, shared_classifier()));
  EXPECT_GT(a.map.points.size(), 0u);
}

TEST(Pipeline, WritesOutputFiles) {
  const Scene scene = load_scene(kData + "/marina_scene.json");
  Mission m = short_mission();
  m.keyframes.resize(2);
  const auto cmp = compare_modes(scene, m, PipelineConfig{}, shared_classifier());
  const fs::path dir = fs::temp_directory_path() / "sonar3d_test_outputs";
  fs::remove_all(dir);
  write_comparison_outputs(dir.string(), cmp, scene, PipelineConfig{}, shared_classifier());
  for (const char* f : {"comparison.json", "comparison.txt", "benchmark/points.ply",
                        "benchmark/points.csv", "benchmark/metrics.json", "semantic/points.ply",
                        "semantic/metrics.json"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  const auto j = nlohmann::json::parse(read_text_file((dir / "comparison.json").string()));
  EXPECT_TRUE(j.is_object());
  fs::remove_all(dir);
}

TEST(Pipeline, FailingFramesAreSkipped) {
  ClassifierModel broken = shared_classifier();
  broken.classes[0].centroid.pop_back();
  const auto r = run_mission(load_scene(kData + "/marina_scene.json"), short_mission(),
                             PipelineConfig{}, broken);
  int skipped = 0;
  for (const auto& f : r.frames) {
    if (!f.skipped) continue;
    ++skipped;
    EXPECT_FALSE(f.error.empty());
  }
  EXPECT_GT(skipped, 0);
  EXPECT_EQ(r.frames.size(), short_mission().keyframes.size());
  for (const auto& p : r.map.points) {
    EXPECT_FALSE(r.frames[p.frame].skipped);
  }
}

TEST(Pipeline, DenserKeyframesCoverMore) {
  const Scene scene = load_scene(kData + "/marina_scene.json");
  const auto m4 = compare_modes(scene, load_mission(kData + "/mission_4m.json"), PipelineConfig{},
                                shared_classifier());
  const auto m2 = compare_modes(scene, load_mission(kData + "/mission_2m.json"), PipelineConfig{},
                                shared_classifier());
  EXPECT_GT(voxel_count(m2.benchmark.map, 0.1), voxel_count(m4.benchmark.map, 0.1));
  EXPECT_GT(voxel_count(m2.semantic.map, 0.1), voxel_count(m4.semantic.map, 0.1));
}
