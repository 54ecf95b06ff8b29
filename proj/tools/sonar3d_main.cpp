#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "sonar3d/config.hpp"
#include "sonar3d/errors.hpp"
#include "sonar3d/io.hpp"
#include "sonar3d/pipeline.hpp"
#include "sonar3d/training.hpp"

namespace {

using namespace sonar3d;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonArgs {
  std::string config_path;
  long long seed = -1;  // negative: keep the configured seeds
};

PipelineConfig load_common(const CommonArgs& args) {
  PipelineConfig config = args.config_path.empty() ? PipelineConfig{} : load_config(args.config_path);
  if (args.seed >= 0) {
    const auto s = static_cast<std::uint64_t>(args.seed);
    config.seeds.noise = s;
    config.seeds.classifier = mix_seed(s, 1);
    config.seeds.training = mix_seed(s, 2);
    config.seeds.reference = mix_seed(s, 3);
  }
  return config;
}

void log_stderr(const std::string& msg) { std::cerr << "sonar3d: " << msg << "\n"; }

void write_pgm(const std::string& path, const PolarImage& img) {
  const PolarImage norm = img.normalized();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write " + path);
  out << "P5\n" << img.cols() << " " << img.rows() << "\n255\n";
  for (int r = 0; r < img.rows(); ++r) {
    for (int c = 0; c < img.cols(); ++c) {
      // gamma lifts weak returns so the image is readable
      const double v = std::sqrt(norm.at(r, c));
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * v))));
    }
  }
}

double accuracy(const std::vector<LabeledPatch>& samples, const ClassifierModel& model) {
  if (samples.empty()) return 0.0;
  int hits = 0;
  for (const auto& s : samples) {
    if (nearest_class(patch_descriptor(s.patch), model) == s.class_id) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sonar 3D mapping with orthogonal sonar fusion and class-level height inference"};
  app.require_subcommand(1);

  CommonArgs common;
  std::string scene_path, mission_path, output_path, mode;
  int frame = 0;
  int samples = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("-c,--config", common.config_path, "Pipeline config (JSON)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", common.seed, "Derive all seeds from this value")
        ->check(CLI::NonNegativeNumber);
  };

  auto* run = app.add_subcommand("run", "Process one mission in a single mode");
  run->add_option("-s,--scene", scene_path, "Scene file")->required()->check(CLI::ExistingFile);
  run->add_option("-m,--mission", mission_path, "Mission file")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", output_path, "Output directory")->required();
  run->add_option("--mode", mode, "benchmark or semantic (overrides config)")
      ->check(CLI::IsMember({"benchmark", "semantic"}));
  add_common(run);

  auto* compare = app.add_subcommand("compare", "Run both modes and tabulate coverage and error");
  compare->add_option("-s,--scene", scene_path, "Scene file")->required()->check(CLI::ExistingFile);
  compare->add_option("-m,--mission", mission_path, "Mission file")
      ->required()
      ->check(CLI::ExistingFile);
  compare->add_option("-o,--output", output_path, "Output directory")->required();
  add_common(compare);

  auto* train = app.add_subcommand("train-classifier", "Train the baseline classifier on simulated patches");
  train->add_option("-o,--output", output_path, "Model file to write")->required();
  train->add_option("-n,--samples", samples, "Samples per class (default from config)")
      ->check(CLI::PositiveNumber);
  add_common(train);

  auto* render = app.add_subcommand("render-scene", "Render the image pair of one keyframe as PGM");
  render->add_option("-s,--scene", scene_path, "Scene file")->required()->check(CLI::ExistingFile);
  render->add_option("-m,--mission", mission_path, "Mission file")->required()->check(CLI::ExistingFile);
  render->add_option("-f,--frame", frame, "Keyframe index")->check(CLI::NonNegativeNumber);
  render->add_option("-o,--output", output_path, "Output directory")->required();
  add_common(render);

  auto* print_config = app.add_subcommand("print-config", "Print the effective config with every key");
  add_common(print_config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    PipelineConfig config = load_common(common);
    if (*run) {
      if (!mode.empty()) config.mode = parse_mode(mode);
      const Scene scene = load_scene(scene_path);
      const Mission mission = load_mission(mission_path);
      const ClassifierModel classifier = obtain_classifier(config);
      const MissionResult result = run_mission(scene, mission, config, classifier, log_stderr);
      write_mission_outputs(output_path, result, scene, config, classifier);
      std::cout << "mode " << to_string(config.mode) << ": " << result.map.points.size()
                << " points, " << voxel_count(result.map, config.voxel_size) << " voxels\n";
    } else if (*compare) {
      const Scene scene = load_scene(scene_path);
      const Mission mission = load_mission(mission_path);
      const ClassifierModel classifier = obtain_classifier(config);
      const ModeComparison cmp = compare_modes(scene, mission, config, classifier, log_stderr);
      write_comparison_outputs(output_path, cmp, scene, config, classifier);
      std::cout << comparison_table(cmp, scene, config);
    } else if (*train) {
      if (samples > 0) config.training_samples_per_class = samples;
      const ClassifierModel model = bootstrap_classifier(config);
      save_classifier(model, output_path);
      const auto held_out = generate_training_set(config, config.training_samples_per_class,
                                                  mix_seed(config.seeds.training, 99));
      std::printf("held-out accuracy: %.3f\n", accuracy(held_out, model));
    } else if (*print_config) {
      std::cout << config_to_json(config) << "\n";
    } else if (*render) {
      const Scene scene = load_scene(scene_path);
      const Mission mission = load_mission(mission_path);
      if (frame >= static_cast<int>(mission.keyframes.size())) {
        throw ConfigError("--frame " + std::to_string(frame) + " out of range (mission has " +
                          std::to_string(mission.keyframes.size()) + " keyframes)");
      }
      const auto [h, v] = render_pair(scene, mission.keyframes[frame], config.horizontal,
                                      config.vertical, config.render,
                                      mix_seed(config.seeds.noise, static_cast<std::uint64_t>(frame)));
      std::filesystem::create_directories(output_path);
      write_pgm(output_path + "/horizontal.pgm", h);
      write_pgm(output_path + "/vertical.pgm", v);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
