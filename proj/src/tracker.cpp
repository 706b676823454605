#include "emtrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace emtrack {

void Trajectory::validate() const {
  if (samples.empty()) throw std::invalid_argument("trajectory " + std::to_string(id) + " is empty");
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].frame <= samples[i - 1].frame) {
      throw std::invalid_argument("trajectory " + std::to_string(id) +
                                  ": frame indices must be strictly increasing");
    }
  }
}

PixelRect pixel_rect(const BBox& box) {
  return {static_cast<int>(std::floor(box.x())), static_cast<int>(std::floor(box.y())),
          static_cast<int>(std::ceil(box.right())), static_cast<int>(std::ceil(box.bottom()))};
}

Descriptor appearance_descriptor(const Image& img, const PixelRect& patch) {
  const PixelRect roi = clip(patch, img.bounds());
  if (roi.empty()) throw std::invalid_argument("appearance_descriptor: empty patch");
  constexpr int shift = 5;  // 256 / 8 levels per bin
  Descriptor hist(kDescriptorSize, 0.0);
  for (int y = roi.y0; y < roi.y1; ++y) {
    for (int x = roi.x0; x < roi.x1; ++x) {
      const Rgb c = img.at(x, y);
      const int bin = ((c.r >> shift) * kHistogramBinsPerChannel + (c.g >> shift)) *
                          kHistogramBinsPerChannel +
                      (c.b >> shift);
      hist[bin] += 1.0;
    }
  }
  const double norm = std::sqrt(std::inner_product(hist.begin(), hist.end(), hist.begin(), 0.0));
  for (double& v : hist) v /= norm;
  return hist;
}

Descriptor appearance_descriptor(const Image& img) {
  return appearance_descriptor(img, img.bounds());
}

double cosine_distance(const Descriptor& a, const Descriptor& b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine_distance: size mismatch");
  const double ab = std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
  const double aa = std::inner_product(a.begin(), a.end(), a.begin(), 0.0);
  const double bb = std::inner_product(b.begin(), b.end(), b.begin(), 0.0);
  if (aa == 0.0 || bb == 0.0) return 1.0;
  return std::clamp(1.0 - ab / std::sqrt(aa * bb), 0.0, 2.0);
}

const char* to_string(TrackState s) {
  switch (s) {
    case TrackState::Tentative:
      return "tentative";
    case TrackState::Confirmed:
      return "confirmed";
    case TrackState::Deleted:
      return "deleted";
  }
  return "unknown";
}

void TrackerConfig::validate() const {
  if (n_init < 1) throw std::invalid_argument("tracker.n_init must be >= 1");
  if (max_age < 1) throw std::invalid_argument("tracker.max_age must be >= 1");
  if (!(iou_gate >= 0.0 && iou_gate <= 1.0)) {
    throw std::invalid_argument("tracker.iou_gate must lie in [0, 1]");
  }
  if (!(appearance_weight >= 0.0 && appearance_weight <= 1.0)) {
    throw std::invalid_argument("tracker.appearance_weight must lie in [0, 1]");
  }
  if (descriptor_budget < 1) throw std::invalid_argument("tracker.descriptor_budget must be >= 1");
  if (!(gating_threshold > 0.0)) throw std::invalid_argument("tracker.gating_threshold must be > 0");
  kalman.validate();
}

std::optional<BBox> Track::predicted_box() const {
  const Measurement m = kalman.position();
  if (!(m.h > 0.0) || !(m.aspect > 0.0) || !std::isfinite(m.cx) || !std::isfinite(m.cy)) {
    return std::nullopt;
  }
  return from_measurement(m);
}

std::optional<Descriptor> Track::mean_descriptor() const {
  if (descriptor_history.empty()) return std::nullopt;
  Descriptor mean(descriptor_history.front().size(), 0.0);
  for (const auto& d : descriptor_history) {
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += d[i];
  }
  for (double& v : mean) v /= static_cast<double>(descriptor_history.size());
  return mean;
}

CostMatrix build_cost(const std::vector<Track>& tracks, const std::vector<Detection>& detections,
                      const TrackerConfig& cfg) {
  CostMatrix cost(tracks.size(), detections.size(), kForbidden);
  for (std::size_t t = 0; t < tracks.size(); ++t) {
    const std::optional<BBox> predicted = tracks[t].predicted_box();
    if (!predicted) continue;
    const std::optional<Descriptor> track_desc = tracks[t].mean_descriptor();
    for (std::size_t d = 0; d < detections.size(); ++d) {
      const Detection& det = detections[d];
      const double overlap = iou(*predicted, det.bbox);
      if (overlap < cfg.iou_gate) continue;
      double gate = 0.0;
      try {
        gate = gating_distance(tracks[t].kalman, to_measurement(det.bbox), cfg.kalman);
      } catch (const std::domain_error&) {
        continue;
      }
      if (gate > cfg.gating_threshold) continue;
      double c = 1.0 - overlap;
      if (track_desc && det.descriptor) {
        const double w = cfg.appearance_weight;
        c = (1.0 - w) * c + w * cosine_distance(*track_desc, *det.descriptor);
      }
      cost.set(t, d, c);
    }
  }
  return cost;
}

Tracker::Tracker(TrackerConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

Track Tracker::spawn(int frame_index, const Detection& det) {
  Track t;
  t.id = next_id_++;
  t.kalman = initiate(to_measurement(det.bbox), cfg_.kalman);
  t.hits = 1;
  t.confidence = det.confidence;
  t.age = 1;
  t.history.push_back({frame_index, det.bbox, false});
  if (det.descriptor) t.descriptor_history.push_back(*det.descriptor);
  if (cfg_.n_init <= 1) {
    t.state = TrackState::Confirmed;
    t.ever_confirmed = true;
  }
  return t;
}

std::vector<TrackOutput> Tracker::step(int frame_index, const std::vector<Detection>& detections) {
  if (last_frame_ && frame_index <= *last_frame_) {
    throw std::invalid_argument("Tracker::step: frame index " + std::to_string(frame_index) +
                                " does not follow " + std::to_string(*last_frame_));
  }
  last_frame_ = frame_index;

  for (Track& t : live_) {
    t.kalman = predict(t.kalman, cfg_.kalman);
    ++t.age;
    ++t.time_since_update;
  }

  const Assignment match = solve(build_cost(live_, detections, cfg_));

  for (const auto& [ti, di] : match.pairs) {
    Track& t = live_[ti];
    const Detection& det = detections[di];
    t.kalman = update(t.kalman, to_measurement(det.bbox), cfg_.kalman);
    ++t.hits;
    t.time_since_update = 0;
    t.confidence = det.confidence;
    if (det.descriptor) {
      t.descriptor_history.push_back(*det.descriptor);
      while (t.descriptor_history.size() > static_cast<std::size_t>(cfg_.descriptor_budget)) {
        t.descriptor_history.pop_front();
      }
    }
    t.history.insert(t.history.end(), t.coasted.begin(), t.coasted.end());
    t.coasted.clear();
    t.history.push_back({frame_index, det.bbox, false});
    if (t.state == TrackState::Tentative && t.hits >= cfg_.n_init) {
      t.state = TrackState::Confirmed;
      t.ever_confirmed = true;
    }
  }

  for (std::size_t ti : match.unmatched_rows) {
    Track& t = live_[ti];
    if (t.time_since_update > cfg_.max_age) {
      t.state = TrackState::Deleted;
      continue;
    }
    if (auto box = t.predicted_box()) t.coasted.push_back({frame_index, *box, true});
  }

  for (std::size_t di : match.unmatched_cols) live_.push_back(spawn(frame_index, detections[di]));

  std::vector<Track> still_live;
  still_live.reserve(live_.size());
  for (Track& t : live_) {
    if (t.state == TrackState::Deleted) {
      if (t.ever_confirmed) {
        t.coasted.clear();
        finished_.push_back(std::move(t));
      }
    } else {
      still_live.push_back(std::move(t));
    }
  }
  live_ = std::move(still_live);

  std::vector<TrackOutput> out;
  for (const Track& t : live_) {
    if (t.state != TrackState::Confirmed || t.time_since_update != 0) continue;
    out.push_back({t.id, t.history.back().box, t.state, t.confidence});
  }
  return out;
}

std::vector<Trajectory> Tracker::extract_trajectories() const {
  std::vector<const Track*> confirmed;
  for (const Track& t : finished_) confirmed.push_back(&t);
  for (const Track& t : live_) {
    if (t.ever_confirmed) confirmed.push_back(&t);
  }
  std::sort(confirmed.begin(), confirmed.end(),
            [](const Track* a, const Track* b) { return a->id < b->id; });

  std::vector<Trajectory> out;
  out.reserve(confirmed.size());
  for (const Track* t : confirmed) {
    Trajectory traj;
    traj.id = t->id;
    traj.source_ids = {t->id};
    for (const TrackSample& s : t->history) traj.samples.push_back({s.frame, center(s.box)});
    out.push_back(std::move(traj));
  }
  return out;
}

}  // namespace emtrack
