#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "emtrack/io.hpp"
#include "emtrack/metrics.hpp"
#include "emtrack/simulator.hpp"
#include "emtrack/tracker.hpp"

using namespace emtrack;

namespace {

Detection det(double x, double y, double w = 10, double h = 10, double conf = 0.9) {
  return Detection{BBox(x, y, w, h), conf, std::nullopt};
}

Track predicted_track(const BBox& box, const TrackerConfig& cfg) {
  Track t;
  t.id = 1;
  t.kalman = predict(initiate(to_measurement(box), cfg.kalman), cfg.kalman);
  return t;
}

std::vector<DetectionFrame> perfect_detections(const std::vector<GroundTruthFrame>& gt) {
  std::vector<DetectionFrame> out;
  for (const auto& f : gt) {
    DetectionFrame df{f.frame_index, {}};
    for (const auto& d : f.droplets) df.detections.push_back({d.bbox, 1.0, std::nullopt});
    out.push_back(std::move(df));
  }
  return out;
}

}  // namespace

TEST_CASE("appearance descriptor") {
  Image img(4, 4, Rgb{200, 10, 10});
  const Descriptor d = appearance_descriptor(img);
  CHECK(d.size() == static_cast<std::size_t>(kDescriptorSize));
  int nonzero = 0;
  double norm2 = 0;
  for (double v : d) {
    nonzero += v != 0.0;
    norm2 += v * v;
  }
  CHECK(nonzero == 1);
  CHECK(std::fabs(norm2 - 1.0) < 1e-12);
  // bin index r/32 * 64 + g/32 * 8 + b/32 built by hand
  CHECK(d[6 * 64 + 0 * 8 + 0] == doctest::Approx(1.0));
  CHECK(cosine_distance(d, d) == doctest::Approx(0.0).epsilon(1e-15));

  const Descriptor other = appearance_descriptor(Image(3, 3, Rgb{10, 200, 10}));
  CHECK(cosine_distance(d, other) == doctest::Approx(1.0));

  Image half(4, 2, Rgb{0, 0, 0});
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) half.set(x, y, Rgb{255, 255, 255});
  const Descriptor h = appearance_descriptor(half);
  CHECK(h[0] == doctest::Approx(std::sqrt(0.5)));
  CHECK(h[511] == doctest::Approx(std::sqrt(0.5)));

  CHECK_THROWS_AS(appearance_descriptor(img, PixelRect{2, 2, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(appearance_descriptor(img, PixelRect{10, 10, 12, 12}), std::invalid_argument);
}

TEST_CASE("tracker config validation") {
  TrackerConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.n_init = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.max_age = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.appearance_weight = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("build_cost") {
  TrackerConfig cfg;
  const BBox box(100, 100, 20, 20);
  std::vector<Track> tracks{predicted_track(box, cfg)};
  tracks[0].descriptor_history.push_back(appearance_descriptor(Image(2, 2, Rgb{1, 2, 3})));

  SUBCASE("perfect match costs zero") {
    Detection d{box, 1.0, appearance_descriptor(Image(2, 2, Rgb{1, 2, 3}))};
    CHECK(build_cost(tracks, {d}, cfg)(0, 0) == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("iou below the gate is forbidden") {
    const CostMatrix c = build_cost(tracks, {det(119, 119, 20, 20)}, cfg);
    CHECK_FALSE(c.allowed(0, 0));
  }
  SUBCASE("motion-only cost is 1 - iou when descriptors are absent") {
    cfg.appearance_weight = 0.0;
    cfg.gating_threshold = 1e9;
    // Shifted by a third of the width: iou = (2/3) / (4/3) = 0.5.
    const Detection d = det(100 + 20.0 / 3.0, 100, 20, 20);
    CHECK(build_cost(tracks, {d}, cfg)(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    cfg.appearance_weight = 0.7;
    CHECK(build_cost(tracks, {d}, cfg)(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("mahalanobis gate forbids implausible jumps despite overlap") {
    const CostMatrix c = build_cost(tracks, {det(100, 100, 20, 60)}, cfg);
    CHECK(iou(box, BBox(100, 100, 20, 60)) > cfg.iou_gate);
    CHECK_FALSE(c.allowed(0, 0));
  }
  SUBCASE("appearance blend") {
    cfg.gating_threshold = 1e9;
    Detection d{box, 1.0, appearance_descriptor(Image(2, 2, Rgb{200, 200, 200}))};
    CHECK(build_cost(tracks, {d}, cfg)(0, 0) == doctest::Approx(cfg.appearance_weight));
  }
}

TEST_CASE("step lifecycle") {
  Tracker tr;
  CHECK(tr.step(1, {}).empty());
  CHECK(tr.extract_trajectories().empty());

  Tracker t3;
  std::vector<std::vector<TrackOutput>> outs;
  for (int f = 1; f <= 5; ++f) outs.push_back(t3.step(f, {det(50, 50)}));
  CHECK(outs[0].empty());
  CHECK(outs[1].empty());
  for (int f = 2; f < 5; ++f) {
    REQUIRE(outs[f].size() == 1);
    CHECK(outs[f][0].id == 1);
    CHECK(outs[f][0].state == TrackState::Confirmed);
  }
  CHECK_THROWS_AS(t3.step(5, {}), std::invalid_argument);
  CHECK_THROWS_AS(t3.step(2, {}), std::invalid_argument);

  TrackerConfig one;
  one.n_init = 1;
  Tracker t1(one);
  CHECK(t1.step(1, {det(0, 0)}).size() == 1);
}

TEST_CASE("stationary droplet gives one trajectory of identical points") {
  Tracker tr;
  const int frames = 12;
  for (int f = 1; f <= frames; ++f) tr.step(f, {det(30, 40, 8, 6)});
  const auto trajs = tr.extract_trajectories();
  REQUIRE(trajs.size() == 1);
  REQUIRE(trajs[0].samples.size() == static_cast<std::size_t>(frames));
  for (const auto& s : trajs[0].samples) CHECK(s.position == Point{34, 43});
}

TEST_CASE("deletion after max_age misses and no resurrection") {
  TrackerConfig cfg;
  cfg.max_age = 3;
  Tracker tr(cfg);
  for (int f = 1; f <= 4; ++f) tr.step(f, {det(50, 50)});
  for (int f = 5; f <= 7; ++f) {
    CHECK(tr.step(f, {}).empty());
    CHECK(tr.live_tracks().size() == 1);
  }
  tr.step(8, {});
  CHECK(tr.live_tracks().empty());
  tr.step(9, {det(50, 50)});
  REQUIRE(tr.live_tracks().size() == 1);
  CHECK(tr.live_tracks()[0].id == 2);
  // The first track ended at its last matched frame; no coasted tail.
  const auto trajs = tr.extract_trajectories();
  REQUIRE(trajs.size() == 1);
  CHECK(trajs[0].last_frame() == 4);
}

TEST_CASE("a missed frame is filled by prediction on re-match") {
  Tracker tr;
  for (int f = 1; f <= 6; ++f) tr.step(f, {det(10.0 + 2 * f, 50)});
  tr.step(7, {});
  const auto out = tr.step(8, {det(26, 50)});
  REQUIRE(out.size() == 1);
  const auto trajs = tr.extract_trajectories();
  REQUIRE(trajs.size() == 1);
  REQUIRE(trajs[0].samples.size() == 8);
  CHECK(trajs[0].samples[6].frame == 7);
  CHECK(std::fabs(trajs[0].samples[6].position.cx - 29.0) < 1.0);
  for (std::size_t i = 1; i < trajs[0].samples.size(); ++i)
    CHECK(trajs[0].samples[i].frame > trajs[0].samples[i - 1].frame);
}

TEST_CASE("trajectory points equal emitted box centres") {
  Tracker tr;
  std::map<std::pair<int, int>, Point> emitted;
  for (int f = 1; f <= 10; ++f) {
    for (const auto& o : tr.step(f, {det(10.0 + 3 * f, 20), det(200 - 3.0 * f, 80)}))
      emitted[{o.id, f}] = center(o.box);
  }
  for (const auto& t : tr.extract_trajectories())
    for (const auto& s : t.samples) {
      auto it = emitted.find({t.id, s.frame});
      if (it != emitted.end()) CHECK(it->second == s.position);
    }
  CHECK(emitted.size() == 16);
}

TEST_CASE("no detection is consumed twice and ids increase") {
  SceneConfig scene;
  const auto gt = generate_scene(scene);
  NoiseModel nm;
  nm.miss_prob = 0.1;
  nm.jitter_std = 1.5;
  nm.false_positive_rate = 0.5;
  const auto dets = corrupt(gt, nm, scene);
  Tracker tr;
  int max_id = 0;
  for (const auto& f : dets) {
    std::set<int> ids;
    for (const auto& o : tr.step(f.frame, f.detections)) {
      CHECK(ids.insert(o.id).second);
      CHECK(o.state == TrackState::Confirmed);
    }
    for (const auto& t : tr.live_tracks()) {
      max_id = std::max(max_id, t.id);
      if (t.time_since_update == 0) CHECK(t.history.back().frame == f.frame);
    }
  }
  int prev = 0;
  for (const auto& t : tr.live_tracks()) {
    CHECK(t.id > prev);
    prev = t.id;
  }
}

TEST_CASE("perfect detections of the default scene: 19 ids, no switches") {
  SceneConfig scene;
  const auto gt = generate_scene(scene);
  Tracker tr;
  for (const auto& f : perfect_detections(gt)) tr.step(f.frame, f.detections);
  const auto trajs = tr.extract_trajectories();
  CHECK(trajs.size() == 19);

  std::vector<GroundTruthRow> rows;
  for (const auto& f : gt)
    for (const auto& d : f.droplets) rows.push_back({f.frame_index, d.true_id, d.bbox});
  const TrackingScore s = tracking_score(trajs, ground_truth_trajectories(rows), 5.0);
  CHECK(s.id_switches == 0);
  CHECK(s.full_trajectories == 19);
}

TEST_CASE("deterministic given config and detections") {
  SceneConfig scene;
  scene.n_frames = 40;
  NoiseModel nm;
  nm.miss_prob = 0.2;
  nm.jitter_std = 2;
  nm.false_positive_rate = 1;
  const auto dets = corrupt(generate_scene(scene), nm, scene);
  auto run = [&] {
    Tracker tr;
    std::vector<std::vector<TrackOutput>> all;
    for (const auto& f : dets) all.push_back(tr.step(f.frame, f.detections));
    return write_trajectories(tr.extract_trajectories());
  };
  CHECK(run() == run());
}
