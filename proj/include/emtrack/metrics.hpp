#pragma once

#include <optional>
#include <vector>

#include "emtrack/geometry.hpp"
#include "emtrack/trajectory.hpp"

namespace emtrack {

// Per-frame droplet counts, one entry per frame.
using CountSeries = std::vector<long long>;

// Counting error as defined for the droplet-count evaluation:
//   (1 / F) * sum_i sqrt((M_i - P_i)^2)
// The square root of a square is |M_i - P_i|, so despite being reported as an
// MSE this is the mean absolute count error. Throws std::invalid_argument on
// empty or mismatched series.
double counting_error(const CountSeries& manual, const CountSeries& predicted);

struct ScoredDetection {
  BBox box;
  double confidence = 0.0;
};

struct DetectionFlag {
  double confidence = 0.0;
  bool true_positive = false;
};

// Greedy matching in descending confidence (stable, so equal confidences keep
// input order). A detection is a true positive when its best-IoU unmatched
// ground-truth box reaches `iou_threshold`; each ground truth matches once.
// Flags are returned in the processing order.
std::vector<DetectionFlag> match_detections(const std::vector<ScoredDetection>& detections,
                                            const std::vector<BBox>& ground_truth,
                                            double iou_threshold = 0.5);

struct PRPoint {
  double recall = 0.0;
  double precision = 0.0;
  double confidence = 0.0;
};

// Cumulative precision/recall after each flag; flags must be in descending
// confidence order.
std::vector<PRPoint> pr_curve(const std::vector<DetectionFlag>& flags, long long n_gt);

// All-point interpolated average precision: area under the monotone
// precision envelope. With a single class this is also the mAP. n_gt == 0
// yields 1 with no detections and 0 otherwise.
double average_precision(const std::vector<DetectionFlag>& flags, long long n_gt);

// AP over a sequence: flags from each frame are pooled and re-sorted by
// confidence (stable across frames) before integration.
double sequence_average_precision(const std::vector<std::vector<ScoredDetection>>& detections,
                                  const std::vector<std::vector<BBox>>& ground_truth,
                                  double iou_threshold = 0.5);

struct TrackingScore {
  long long id_switches = 0;
  long long full_trajectories = 0;
  long long gt_total = 0;
  // Maximal runs of consecutive matched frames with one predicted id,
  // summed over ground-truth trajectories.
  long long fragments = 0;

  bool operator==(const TrackingScore&) const = default;
};

// Per frame, predicted centres are assigned to ground-truth centres by the
// optimal assignment on Euclidean distance, pairs beyond `dist_threshold`
// forbidden. An id switch is counted when a ground-truth id's matched
// predicted id differs from its previous matched one. A ground-truth
// trajectory is full when every one of its samples is matched to the same
// predicted id.
TrackingScore tracking_score(const std::vector<Trajectory>& predicted,
                             const std::vector<Trajectory>& ground_truth, double dist_threshold);

}  // namespace emtrack
