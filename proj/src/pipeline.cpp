#include "emtrack/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <numeric>

#include "emtrack/parallel.hpp"
#include "json.hpp"

namespace emtrack {
namespace fs = std::filesystem;

namespace {

std::string frame_file(int frame) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%06d.ppm", frame);
  return buf;
}

std::string pad_column(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

nlohmann::ordered_json timing_json(const StageTiming& t) {
  return {{"mean", t.mean}, {"min", t.min}, {"max", t.max}};
}

StageTiming summarize(const std::vector<double>& samples) {
  StageTiming t;
  if (samples.empty()) return t;
  t.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / samples.size();
  t.min = *std::min_element(samples.begin(), samples.end());
  t.max = *std::max_element(samples.begin(), samples.end());
  return t;
}

void attach_descriptors(std::vector<DetectionFrame>& frames, const fs::path& images) {
  for (auto& f : frames) {
    const fs::path path = images / frame_file(f.frame);
    if (!fs::exists(path)) continue;
    const Image img = read_ppm(path);
    for (auto& d : f.detections) {
      const PixelRect roi = clip(pixel_rect(d.bbox), img.bounds());
      if (!roi.empty()) d.descriptor = appearance_descriptor(img, roi);
    }
  }
}

}  // namespace

CountSeries count_per_frame(const std::vector<Trajectory>& trajectories, int last_frame) {
  CountSeries counts(static_cast<std::size_t>(std::max(0, last_frame)), 0);
  for (const auto& t : trajectories) {
    for (const auto& s : t.samples) {
      if (s.frame >= 1 && s.frame <= last_frame) ++counts[s.frame - 1];
    }
  }
  return counts;
}

TrackingRun run_tracking(const std::vector<DetectionFrame>& detections, const RunConfig& cfg,
                         bool stitch_segments, int last_frame) {
  Tracker tracker(cfg.tracker);
  TrackingRun run;
  std::size_t next = 0;
  for (int frame = 1; frame <= last_frame; ++frame) {
    static const std::vector<Detection> kNoDetections;
    const std::vector<Detection>* dets = &kNoDetections;
    while (next < detections.size() && detections[next].frame < frame) ++next;
    if (next < detections.size() && detections[next].frame == frame) {
      dets = &detections[next].detections;
    }
    for (const TrackOutput& o : tracker.step(frame, *dets)) {
      run.rows.push_back({frame, o.id, o.box, o.confidence});
    }
  }
  run.trajectories = tracker.extract_trajectories();
  if (stitch_segments) run.trajectories = stitch(run.trajectories, cfg.stitch);
  run.counts = count_per_frame(run.trajectories, last_frame);
  return run;
}

double default_dist_threshold(const std::vector<GroundTruthRow>& gt) {
  if (gt.empty()) return 1.0;
  double sum = 0.0;
  for (const auto& r : gt) sum += (r.box.w() + r.box.h()) / 2.0;
  return sum / static_cast<double>(gt.size()) / 2.0;
}

ScoreReport score_run(const std::vector<Trajectory>& predicted, const CountSeries& predicted_counts,
                      const std::vector<TrackRow>* track_rows,
                      const std::vector<GroundTruthRow>& ground_truth,
                      const MetricsConfig& metrics) {
  const int frames = static_cast<int>(predicted_counts.size());
  if (frames == 0) throw DataError("score: predicted counts cover no frames");
  auto check_frame = [&](int f, const char* what) {
    if (f < 1 || f > frames) {
      throw DataError(std::string("score: frame-range mismatch: ") + what + " frame " +
                      std::to_string(f) + " outside 1.." + std::to_string(frames));
    }
  };

  CountSeries gt_counts(frames, 0);
  std::vector<std::vector<BBox>> gt_boxes(frames);
  for (const auto& r : ground_truth) {
    check_frame(r.frame, "ground-truth");
    ++gt_counts[r.frame - 1];
    gt_boxes[r.frame - 1].push_back(r.box);
  }
  for (const auto& t : predicted) {
    for (const auto& s : t.samples) check_frame(s.frame, "trajectory");
  }

  ScoreReport report;
  report.frames = frames;
  report.mse = counting_error(gt_counts, predicted_counts);
  if (track_rows) {
    std::vector<std::vector<ScoredDetection>> dets(frames);
    for (const auto& r : *track_rows) {
      check_frame(r.frame, "track");
      dets[r.frame - 1].push_back({r.box, r.confidence});
    }
    report.ap = sequence_average_precision(dets, gt_boxes, metrics.iou_threshold);
  }
  report.dist_threshold =
      metrics.dist_threshold ? *metrics.dist_threshold : default_dist_threshold(ground_truth);
  report.tracking =
      tracking_score(predicted, ground_truth_trajectories(ground_truth), report.dist_threshold);
  return report;
}

std::string ScoreReport::to_json() const {
  nlohmann::ordered_json j;
  j["mse"] = mse;
  j["ap"] = ap ? nlohmann::ordered_json(*ap) : nlohmann::ordered_json(nullptr);
  j["id_switches"] = tracking.id_switches;
  j["full_trajectories"] = tracking.full_trajectories;
  j["gt_total"] = tracking.gt_total;
  j["fragments"] = tracking.fragments;
  return j.dump(2) + "\n";
}

std::string ScoreReport::to_table() const {
  const std::vector<std::pair<std::string, std::string>> rows = {
      {"frames", std::to_string(frames)},
      {"counting MSE", format_fixed(mse)},
      {"AP", ap ? format_fixed(*ap) : std::string("n/a")},
      {"id switches", std::to_string(tracking.id_switches)},
      {"full trajectories",
       std::to_string(tracking.full_trajectories) + " / " + std::to_string(tracking.gt_total)},
      {"fragments", std::to_string(tracking.fragments)},
      {"match distance (px)", format_fixed(dist_threshold, 3)},
  };
  std::string out;
  for (const auto& [k, v] : rows) out += pad_column(k, 22) + v + "\n";
  return out;
}

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : dump_config(cfg)) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string BenchmarkReport::to_json() const {
  nlohmann::ordered_json j;
  j["stages"] = {{"tracking", timing_json(tracking)},
                 {"stitching", timing_json(stitching)},
                 {"scoring", timing_json(scoring)}};
  j["total_mean"] = total_mean;
  j["throughput_fps"] = throughput_fps;
  j["tracking_fps"] = tracking_fps;
  j["droplets"] = droplets;
  j["frames"] = frames;
  j["repeats"] = repeats;
  j["config_hash"] = config_hash;
  j["config"] = config.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json::parse(config);
  return j.dump(2) + "\n";
}

std::string BenchmarkReport::to_table() const {
  auto sci = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return std::string(buf);
  };
  std::string out = "per-frame latency, seconds\n";
  out += pad_column("Stage", 12) + pad_column("mean", 12) + pad_column("min", 12) +
         pad_column("max", 12) + "FPS\n";
  auto row = [&](const char* name, const StageTiming& t) {
    out += pad_column(name, 12) + pad_column(sci(t.mean), 12) + pad_column(sci(t.min), 12) +
           pad_column(sci(t.max), 12) + format_fixed(t.mean > 0 ? 1.0 / t.mean : 0.0, 1) + "\n";
  };
  row("tracking", tracking);
  row("stitching", stitching);
  row("scoring", scoring);
  out += pad_column("total", 12) + pad_column(sci(total_mean), 36) +
         format_fixed(throughput_fps, 1) + "\n";
  out += "droplets " + std::to_string(droplets) + ", frames " + std::to_string(frames) +
         ", repeats " + std::to_string(repeats) + ", config " + config_hash + "\n";
  return out;
}

void cmd_simulate(const RunConfig& cfg, const fs::path& out_dir, bool render, int jobs) {
  cfg.validate();
  const auto gt = generate_scene(cfg.scene);
  const auto dets = corrupt(gt, cfg.noise, cfg.scene);
  fs::create_directories(out_dir);
  write_file(out_dir / "ground_truth.csv", write_ground_truth(gt));
  write_file(out_dir / "detections.txt", write_detections(dets));
  write_file(out_dir / "config.json", dump_config(cfg));
  if (!render) return;
  const fs::path frames_dir = out_dir / "frames";
  fs::create_directories(frames_dir);
  parallel_for(gt.size(), jobs, [&](std::size_t i) {
    write_ppm(frames_dir / frame_file(gt[i].frame_index), render_frame(gt[i], cfg.scene));
  });
}

TrackingRun cmd_track(const fs::path& detections, const RunConfig& cfg, const fs::path& out_dir,
                      const TrackOptions& opts) {
  cfg.validate();
  std::vector<DetectionFrame> frames;
  try {
    frames = read_detections(read_file(detections));
  } catch (const DataError& e) {
    throw DataError(detections.string() + ": " + e.what());
  }
  if (opts.images) attach_descriptors(frames, *opts.images);
  int last_frame = frames.empty() ? 0 : frames.back().frame;
  if (opts.frames) last_frame = std::max(last_frame, *opts.frames);

  TrackingRun run = run_tracking(frames, cfg, opts.stitch, last_frame);
  fs::create_directories(out_dir);
  write_file(out_dir / "trajectories.csv", write_trajectories(run.trajectories));
  write_file(out_dir / "counts.csv", write_counts(run.counts));
  write_file(out_dir / "tracks.csv", write_track_rows(run.rows));
  write_file(out_dir / "config.json", dump_config(cfg));
  return run;
}

ScoreReport cmd_score(const fs::path& pred_dir, const fs::path& ground_truth, const RunConfig& cfg,
                      const std::optional<fs::path>& out_dir) {
  cfg.validate();
  const auto predicted = read_trajectories(read_file(pred_dir / "trajectories.csv"));
  const auto counts = read_counts(read_file(pred_dir / "counts.csv"));
  std::optional<std::vector<TrackRow>> rows;
  if (fs::exists(pred_dir / "tracks.csv")) {
    rows = read_track_rows(read_file(pred_dir / "tracks.csv"));
  }
  const auto gt = read_ground_truth(read_file(ground_truth));
  ScoreReport report = score_run(predicted, counts, rows ? &*rows : nullptr, gt, cfg.metrics);
  if (out_dir) {
    fs::create_directories(*out_dir);
    write_file(*out_dir / "score.json", report.to_json());
    write_file(*out_dir / "score.txt", report.to_table());
    write_file(*out_dir / "config.json", dump_config(cfg));
  }
  return report;
}

std::vector<DatasetManifest> cmd_datagen(const RunConfig& cfg, const fs::path& out_dir, int jobs) {
  cfg.validate();
  const auto& dg = cfg.datagen;
  std::vector<LabeledImage> pool;
  if (!dg.synthetic_only && !dg.real_pool.empty()) pool = scan_image_pool(dg.real_pool);

  std::vector<DatasetManifest> manifests;
  const int first_step = dg.synthetic_only ? 10 : 0;
  for (int step = first_step; step <= 10; ++step) {
    manifests.push_back(compose(pool, step / 10.0, dg.total, dg.master_seed, dg.image));
  }
  fs::create_directories(out_dir);
  write_file(out_dir / "config.json", dump_config(cfg));
  for (const auto& m : manifests) {
    char name[8];
    std::snprintf(name, sizeof name, "%03d", fraction_step(m.synthetic_fraction) * 10);
    materialize(m, out_dir / name, jobs);
  }
  return manifests;
}

BenchmarkReport cmd_bench(const RunConfig& cfg, int repeats) {
  using clock = std::chrono::steady_clock;
  cfg.validate();
  SceneConfig scene = cfg.scene;
  scene.n_frames = std::max(scene.n_frames, 100);
  const auto gt = generate_scene(scene);
  const auto dets = corrupt(gt, cfg.noise, scene);
  std::vector<GroundTruthRow> gt_rows;
  for (const auto& f : gt) {
    for (const auto& d : f.droplets) gt_rows.push_back({f.frame_index, d.true_id, d.bbox});
  }
  const auto gt_trajs = ground_truth_trajectories(gt_rows);
  const double dist = cfg.metrics.dist_threshold ? *cfg.metrics.dist_threshold
                                                 : default_dist_threshold(gt_rows);
  const int n_frames = scene.n_frames;

  std::vector<double> track_samples;
  std::vector<double> stitch_samples;
  std::vector<double> score_samples;
  auto seconds = [](clock::duration d) { return std::chrono::duration<double>(d).count(); };
  for (int rep = 0; rep < std::max(1, repeats); ++rep) {
    Tracker tracker(cfg.tracker);
    for (const auto& f : dets) {
      const auto t0 = clock::now();
      tracker.step(f.frame, f.detections);
      track_samples.push_back(seconds(clock::now() - t0));
    }
    const auto trajs = tracker.extract_trajectories();

    const auto t1 = clock::now();
    const auto stitched = stitch(trajs, cfg.stitch);
    stitch_samples.push_back(seconds(clock::now() - t1) / n_frames);

    const auto t2 = clock::now();
    const auto score = tracking_score(stitched, gt_trajs, dist);
    CountSeries gt_counts(n_frames, 0);
    for (const auto& f : gt) gt_counts[f.frame_index - 1] = static_cast<long long>(f.droplets.size());
    const double mse = counting_error(gt_counts, count_per_frame(stitched, n_frames));
    score_samples.push_back(seconds(clock::now() - t2) / n_frames);
    (void)score;
    (void)mse;
  }

  BenchmarkReport r;
  r.tracking = summarize(track_samples);
  r.stitching = summarize(stitch_samples);
  r.scoring = summarize(score_samples);
  r.total_mean = std::max(1e-12, r.tracking.mean + r.stitching.mean + r.scoring.mean);
  r.throughput_fps = 1.0 / r.total_mean;
  r.tracking_fps = 1.0 / std::max(1e-12, r.tracking.mean);
  r.droplets = scene.n_droplets;
  r.frames = n_frames;
  r.repeats = std::max(1, repeats);
  r.config_hash = config_hash(cfg);
  r.config = dump_config(cfg);
  return r;
}

}  // namespace emtrack
