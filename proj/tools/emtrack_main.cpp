// emtrack command-line front end.
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "emtrack/pipeline.hpp"

namespace fs = std::filesystem;
using namespace emtrack;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

RunConfig resolve(const Common& c) {
  RunConfig cfg;
  if (!c.config.empty()) {
    try {
      cfg = load_config(read_file(c.config));
    } catch (const DataError& e) {
      throw DataError(c.config + ": " + e.what());
    }
  }
  if (c.seed) apply_seed(cfg, *c.seed);
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* app, Common& c, bool with_out) {
  app->add_option("--config", c.config, "JSON configuration file")->check(CLI::ExistingFile);
  if (with_out) app->add_option("--out", c.out, "output directory")->required();
  app->add_option("--seed", c.seed, "overrides every seed in the configuration");
  app->add_option("--jobs", c.jobs, "worker threads for independent units")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Droplet tracking in dense emulsions: simulate, track, score, datagen, bench"};
  app.require_subcommand(1);

  Common common;

  auto* simulate = app.add_subcommand("simulate", "render a synthetic channel scene");
  add_common(simulate, common, true);
  bool render = false;
  simulate->add_flag("--render", render, "also write frames/frame_NNNNNN.ppm");

  auto* track = app.add_subcommand("track", "track detections into trajectories");
  add_common(track, common, true);
  std::string detections;
  track->add_option("detections", detections, "MOT-format detection file")
      ->required()
      ->check(CLI::ExistingFile);
  TrackOptions track_opts;
  track->add_flag("--stitch", track_opts.stitch, "merge fragmented trajectories");
  track->add_option("--frames", track_opts.frames, "sequence length when trailing frames are empty");
  std::string images;
  track->add_option("--images", images, "directory of frame_NNNNNN.ppm for appearance descriptors")
      ->check(CLI::ExistingDirectory);

  auto* score = app.add_subcommand("score", "score a tracking run against ground truth");
  add_common(score, common, false);
  score->add_option("--out", common.out, "also write score.json and score.txt here");
  std::string pred_dir;
  std::string gt_path;
  score->add_option("pred", pred_dir, "directory written by track")
      ->required()
      ->check(CLI::ExistingDirectory);
  score->add_option("ground_truth", gt_path, "ground_truth.csv")->required()->check(CLI::ExistingFile);
  bool table = false;
  score->add_flag("--table", table, "print a text table instead of JSON");

  auto* datagen = app.add_subcommand("datagen", "build hybrid real/synthetic detector datasets");
  add_common(datagen, common, true);
  std::string manifest;
  datagen->add_option("--manifest", manifest, "re-materialize one dataset from its manifest.json")
      ->check(CLI::ExistingFile);

  auto* bench = app.add_subcommand("bench", "time the tracking stages");
  add_common(bench, common, false);
  int repeats = 3;
  bench->add_option("--repeats", repeats, "timed passes over the sequence")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*simulate) {
      cmd_simulate(resolve(common), common.out, render, common.jobs);
    } else if (*track) {
      if (!images.empty()) track_opts.images = fs::path(images);
      cmd_track(detections, resolve(common), common.out, track_opts);
    } else if (*score) {
      std::optional<fs::path> out;
      if (!common.out.empty()) out = fs::path(common.out);
      const ScoreReport r = cmd_score(pred_dir, gt_path, resolve(common), out);
      std::cout << (table ? r.to_table() : r.to_json());
    } else if (*datagen) {
      if (!manifest.empty()) {
        const auto m = manifest_from_json(read_file(manifest));
        materialize(m, common.out, common.jobs);
      } else {
        cmd_datagen(resolve(common), common.out, common.jobs);
      }
    } else if (*bench) {
      const BenchmarkReport r = cmd_bench(resolve(common), repeats);
      std::cout << r.to_json() << "\n" << r.to_table();
    }
  } catch (const std::exception& e) {
    // DataError, ConfigError and rejected parameter values alike.
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
