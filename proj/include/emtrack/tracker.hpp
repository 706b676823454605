#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "emtrack/assignment.hpp"
#include "emtrack/geometry.hpp"
#include "emtrack/image.hpp"
#include "emtrack/kalman.hpp"
#include "emtrack/trajectory.hpp"

namespace emtrack {

using Descriptor = std::vector<double>;

inline constexpr int kHistogramBinsPerChannel = 8;
inline constexpr int kDescriptorSize =
    kHistogramBinsPerChannel * kHistogramBinsPerChannel * kHistogramBinsPerChannel;

// Joint 8x8x8 RGB histogram of the pixels of `patch` (clipped to the image),
// L2-normalized. Throws std::invalid_argument for an empty crop.
Descriptor appearance_descriptor(const Image& img, const PixelRect& patch);
Descriptor appearance_descriptor(const Image& img);
PixelRect pixel_rect(const BBox& box);

// 1 - cos(a, b). Vectors need not be normalized; zero vectors give 1.
double cosine_distance(const Descriptor& a, const Descriptor& b);

struct Detection {
  BBox bbox;
  double confidence = 1.0;
  std::optional<Descriptor> descriptor;
};

// All detections of one frame (1-based frame index).
struct DetectionFrame {
  int frame = 0;
  std::vector<Detection> detections;
};

enum class TrackState { Tentative, Confirmed, Deleted };

const char* to_string(TrackState s);

struct TrackerConfig {
  int n_init = 3;
  int max_age = 30;
  double iou_gate = 0.1;
  double appearance_weight = 0.3;
  int descriptor_budget = 50;
  double gating_threshold = kChiSquare95Dof4;
  NoiseConfig kalman;

  void validate() const;
  bool operator==(const TrackerConfig&) const = default;
};

struct TrackSample {
  int frame = 0;
  BBox box;
  // Kalman prediction filling a missed frame between two matches.
  bool predicted = false;
};

struct Track {
  int id = 0;
  TrackState state = TrackState::Tentative;
  KalmanState kalman;
  int hits = 0;
  int age = 0;
  int time_since_update = 0;
  bool ever_confirmed = false;
  // Confidence of the most recently matched detection.
  double confidence = 1.0;
  std::deque<Descriptor> descriptor_history;
  std::vector<TrackSample> history;
  // Predicted boxes for missed frames, committed to `history` on re-match.
  std::vector<TrackSample> coasted;

  std::optional<BBox> predicted_box() const;
  // Running mean of the retained descriptors, if any.
  std::optional<Descriptor> mean_descriptor() const;
};

struct TrackOutput {
  int id = 0;
  BBox box;
  TrackState state = TrackState::Confirmed;
  double confidence = 1.0;
};

// cost(t, d) = (1 - w) (1 - iou) + w * cosine_distance, with w = 0 unless both
// descriptors exist. Pairs failing the IoU gate or the Mahalanobis gate are
// forbidden. `tracks` must already be predicted to the current frame.
CostMatrix build_cost(const std::vector<Track>& tracks, const std::vector<Detection>& detections,
                      const TrackerConfig& cfg);

// Frame-by-frame identity management with one global assignment per frame.
// Tentative tracks take part in association but are not emitted. Any track is
// deleted after more than max_age consecutive misses and never resurrected.
class Tracker {
 public:
  explicit Tracker(TrackerConfig cfg = {});

  // Returns boxes of confirmed tracks matched in this frame, in id order.
  // Throws std::invalid_argument if frame_index does not increase.
  std::vector<TrackOutput> step(int frame_index, const std::vector<Detection>& detections);

  // One trajectory per ever-confirmed track, in id order.
  std::vector<Trajectory> extract_trajectories() const;

  const std::vector<Track>& live_tracks() const { return live_; }
  const TrackerConfig& config() const { return cfg_; }

 private:
  Track spawn(int frame_index, const Detection& det);

  TrackerConfig cfg_;
  std::vector<Track> live_;
  std::vector<Track> finished_;
  int next_id_ = 1;
  std::optional<int> last_frame_;
};

}  // namespace emtrack
