#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emtrack/datagen.hpp"
#include "emtrack/metrics.hpp"
#include "emtrack/simulator.hpp"
#include "emtrack/stitcher.hpp"
#include "emtrack/text_format.hpp"
#include "emtrack/tracker.hpp"
#include "emtrack/trajectory.hpp"

namespace emtrack {

// ---- detections: MOT det.txt convention -----------------------------------
// Rows "frame,id,x,y,w,h,conf[,...]"; trailing fields are ignored, blank
// lines skipped. Frames must be nondecreasing; detections are grouped by
// frame in file order. Errors carry the 1-based line number.
std::vector<DetectionFrame> read_detections(std::string_view text);
// Writes "frame,-1,x,y,w,h,conf,-1,-1,-1" with six decimals.
std::string write_detections(const std::vector<DetectionFrame>& frames);

// ---- ground truth: "frame,id,x,y,w,h" with header ----------------------------
struct GroundTruthRow {
  int frame = 0;
  int id = 0;
  BBox box;
};

std::string write_ground_truth(const std::vector<GroundTruthFrame>& frames);
std::vector<GroundTruthRow> read_ground_truth(std::string_view text);
// One trajectory per id from box centres, ids ascending.
std::vector<Trajectory> ground_truth_trajectories(const std::vector<GroundTruthRow>& rows);

// ---- trajectories: "track_id,frame,cx,cy" with header, sorted ----------------
std::string write_trajectories(const std::vector<Trajectory>& trajectories);
std::vector<Trajectory> read_trajectories(std::string_view text);

// ---- per-frame counts: "frame,count" with header -----------------------------
std::string write_counts(const CountSeries& counts, int first_frame = 1);
// Returns counts for frames first..last; throws DataError unless the frames
// form a contiguous range starting at 1.
CountSeries read_counts(std::string_view text);

// ---- tracker output boxes: MOT results "frame,id,x,y,w,h,conf,-1,-1,-1" ------
struct TrackRow {
  int frame = 0;
  int id = 0;
  BBox box;
  double confidence = 1.0;
};

std::string write_track_rows(const std::vector<TrackRow>& rows);
std::vector<TrackRow> read_track_rows(std::string_view text);

// ---- run configuration --------------------------------------------------------
struct MetricsConfig {
  double iou_threshold = 0.5;
  // Unset: half the mean ground-truth droplet diameter.
  std::optional<double> dist_threshold;

  bool operator==(const MetricsConfig&) const = default;
};

struct DatagenConfig {
  int total = kDefaultDatasetTotal;
  std::string real_pool;
  bool synthetic_only = false;
  std::uint64_t master_seed = 42;
  SyntheticImageSpec image;

  bool operator==(const DatagenConfig&) const = default;
};

struct RunConfig {
  TrackerConfig tracker;
  NoiseModel noise;
  SceneConfig scene;
  StitchConfig stitch;
  MetricsConfig metrics;
  DatagenConfig datagen;

  // Throws ConfigError naming the offending section.
  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

class ConfigError : public DataError {
 public:
  using DataError::DataError;
};

// JSON document of nested sections (tracker, noise, scene, stitch, metrics,
// datagen); absent keys take defaults, unknown keys and type mismatches throw
// ConfigError naming the key path.
RunConfig load_config(std::string_view text);
// Fully resolved configuration; load_config(dump_config(c)) == c.
std::string dump_config(const RunConfig& cfg);
// --seed override: scene, noise and dataset seeds all take `seed`.
void apply_seed(RunConfig& cfg, std::uint64_t seed);

}  // namespace emtrack
