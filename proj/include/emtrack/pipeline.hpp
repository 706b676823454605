#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "emtrack/io.hpp"

namespace emtrack {

// ---- library-level stages -----------------------------------------------------

// Number of trajectories with a sample at each frame 1..last_frame.
CountSeries count_per_frame(const std::vector<Trajectory>& trajectories, int last_frame);

struct TrackingRun {
  std::vector<Trajectory> trajectories;  // stitched when requested
  std::vector<TrackRow> rows;            // emitted boxes per frame
  CountSeries counts;                    // frames 1..last_frame
};

// Runs the tracker over frames 1..last_frame (frames without detections are
// stepped with an empty list), optionally stitching the trajectories.
TrackingRun run_tracking(const std::vector<DetectionFrame>& detections, const RunConfig& cfg,
                         bool stitch_segments, int last_frame);

struct ScoreReport {
  double mse = 0.0;
  std::optional<double> ap;
  TrackingScore tracking;
  int frames = 0;
  double dist_threshold = 0.0;

  // Keys: mse, ap, id_switches, full_trajectories, gt_total, fragments.
  std::string to_json() const;
  std::string to_table() const;
};

// Half the mean ground-truth droplet diameter; 1 px without ground truth.
double default_dist_threshold(const std::vector<GroundTruthRow>& gt);

// Throws DataError when ground truth or predictions reach beyond the frames
// covered by `predicted_counts`.
ScoreReport score_run(const std::vector<Trajectory>& predicted, const CountSeries& predicted_counts,
                      const std::vector<TrackRow>* track_rows,
                      const std::vector<GroundTruthRow>& ground_truth,
                      const MetricsConfig& metrics);

struct StageTiming {
  double mean = 0.0;  // seconds per frame
  double min = 0.0;
  double max = 0.0;
};

struct BenchmarkReport {
  StageTiming tracking;
  StageTiming stitching;
  StageTiming scoring;
  double total_mean = 0.0;      // seconds per frame, sum of stage means
  double throughput_fps = 0.0;  // 1 / total_mean
  double tracking_fps = 0.0;    // 1 / tracking.mean
  int droplets = 0;
  int frames = 0;
  int repeats = 0;
  std::string config_hash;
  std::string config;  // resolved configuration document, echoed in to_json

  std::string to_json() const;
  std::string to_table() const;
};

// FNV-1a of the resolved configuration document, hex.
std::string config_hash(const RunConfig& cfg);

// ---- commands -------------------------------------------------------------------

// Writes ground_truth.csv, detections.txt (detector emulation with the
// configured noise), config.json and, with `render`, frames/frame_NNNNNN.ppm.
void cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out_dir, bool render,
                  int jobs = 1);

struct TrackOptions {
  bool stitch = false;
  // Last frame of the sequence; defaults to the last frame with detections.
  std::optional<int> frames;
  // Directory with frame_NNNNNN.ppm; enables colour-histogram descriptors.
  std::optional<std::filesystem::path> images;
};

// Writes trajectories.csv, counts.csv, tracks.csv and config.json.
TrackingRun cmd_track(const std::filesystem::path& detections, const RunConfig& cfg,
                      const std::filesystem::path& out_dir, const TrackOptions& opts = {});

// Reads trajectories.csv, counts.csv and (if present) tracks.csv from
// `pred_dir`; writes score.json, score.txt and config.json when `out_dir` is
// given.
ScoreReport cmd_score(const std::filesystem::path& pred_dir,
                      const std::filesystem::path& ground_truth, const RunConfig& cfg,
                      const std::optional<std::filesystem::path>& out_dir = std::nullopt);

// Eleven hybrid datasets 000, 010, ..., 100 (only 100 in synthetic-only
// mode), each with images/, labels/ and manifest.json.
std::vector<DatasetManifest> cmd_datagen(const RunConfig& cfg, const std::filesystem::path& out_dir,
                                         int jobs = 1);

// Times tracking (per frame), stitching and scoring (per run, normalized per
// frame) over at least 100 frames; simulation and I/O are not timed.
BenchmarkReport cmd_bench(const RunConfig& cfg, int repeats = 3);

}  // namespace emtrack
