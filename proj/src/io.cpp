#include "emtrack/io.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace emtrack {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string line_ref(std::size_t line) { return "line " + std::to_string(line); }

std::vector<std::string_view> csv_fields(std::string_view line) {
  std::vector<std::string_view> out;
  for (auto f : split(line, ',')) out.push_back(trim(f));
  return out;
}

bool is_header(std::string_view line, std::string_view header) { return trim(line) == header; }

int parse_frame(std::string_view f, const std::string& where) {
  const long long v = parse_int(f, where + " frame");
  if (v < 1 || v > std::numeric_limits<int>::max()) throw DataError(where + ": frame must be >= 1");
  return static_cast<int>(v);
}

BBox parse_box(const std::vector<std::string_view>& f, std::size_t at, const std::string& where) {
  const double x = parse_double(f[at], where + " x");
  const double y = parse_double(f[at + 1], where + " y");
  const double w = parse_double(f[at + 2], where + " w");
  const double h = parse_double(f[at + 3], where + " h");
  if (!(w > 0.0) || !(h > 0.0)) throw DataError(where + ": box width and height must be positive");
  return BBox(x, y, w, h);
}

void append_box(std::string& out, const BBox& b) {
  append_fixed(out, b.x());
  out += ',';
  append_fixed(out, b.y());
  out += ',';
  append_fixed(out, b.w());
  out += ',';
  append_fixed(out, b.h());
}

// Walks one JSON object, remembering consumed keys so leftovers can be
// reported as unknown.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError("config: '" + path_ + "' must be an object");
  }

  Section sub(const std::string& key) {
    seen_.insert(key);
    static const json empty = json::object();
    auto it = node_.find(key);
    return Section(it == node_.end() ? empty : *it, name(key));
  }

  void integer(const std::string& key, int& out) {
    if (const json* v = take(key)) {
      if (!v->is_number_integer()) mismatch(key, "an integer");
      const auto x = v->get<long long>();
      if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
        mismatch(key, "a 32-bit integer");
      }
      out = static_cast<int>(x);
    }
  }

  void seed(const std::string& key, std::uint64_t& out) {
    if (const json* v = take(key)) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
        mismatch(key, "a non-negative integer");
      }
      out = v->get<std::uint64_t>();
    }
  }

  void number(const std::string& key, double& out) {
    if (const json* v = take(key)) {
      if (!v->is_number()) mismatch(key, "a number");
      out = v->get<double>();
    }
  }

  void optional_number(const std::string& key, std::optional<double>& out) {
    if (const json* v = take(key)) {
      if (v->is_null()) {
        out.reset();
        return;
      }
      if (!v->is_number()) mismatch(key, "a number or null");
      out = v->get<double>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = take(key)) {
      if (!v->is_boolean()) mismatch(key, "a boolean");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) mismatch(key, "a string");
      out = v->get<std::string>();
    }
  }

  template <typename T>
  void pair(const std::string& key, T& lo, T& hi) {
    if (const json* v = take(key)) {
      if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
        mismatch(key, "a two-element numeric array");
      }
      if constexpr (std::is_integral_v<T>) {
        if (!(*v)[0].is_number_integer() || !(*v)[1].is_number_integer()) {
          mismatch(key, "a two-element integer array");
        }
      }
      lo = (*v)[0].get<T>();
      hi = (*v)[1].get<T>();
    }
  }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError("config: unknown key '" + name(it.key()) + "'");
    }
  }

 private:
  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* take(const std::string& key) {
    seen_.insert(key);
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  [[noreturn]] void mismatch(const std::string& key, const char* expected) const {
    throw ConfigError("config: '" + name(key) + "' must be " + expected);
  }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::vector<DetectionFrame> read_detections(std::string_view text) {
  std::vector<DetectionFrame> frames;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty()) continue;
    const std::string where = line_ref(i + 1);
    const auto f = csv_fields(line);
    if (f.size() < 7) throw DataError(where + ": expected at least 7 comma-separated fields");
    const int frame = parse_frame(f[0], where);
    parse_double(f[1], where + " id");
    const BBox box = parse_box(f, 2, where);
    const double conf = parse_double(f[6], where + " confidence");
    if (conf < 0.0 || conf > 1.0) throw DataError(where + ": confidence outside [0, 1]");
    if (!frames.empty() && frame < frames.back().frame) {
      throw DataError(where + ": frame " + std::to_string(frame) + " after frame " +
                      std::to_string(frames.back().frame));
    }
    if (frames.empty() || frames.back().frame != frame) frames.push_back({frame, {}});
    frames.back().detections.push_back({box, conf, std::nullopt});
  }
  return frames;
}

std::string write_detections(const std::vector<DetectionFrame>& frames) {
  std::string out;
  for (const auto& f : frames) {
    for (const auto& d : f.detections) {
      out += std::to_string(f.frame);
      out += ",-1,";
      append_box(out, d.bbox);
      out += ',';
      append_fixed(out, d.confidence);
      out += ",-1,-1,-1\n";
    }
  }
  return out;
}

std::string write_ground_truth(const std::vector<GroundTruthFrame>& frames) {
  std::string out = "frame,id,x,y,w,h\n";
  for (const auto& f : frames) {
    for (const auto& d : f.droplets) {
      out += std::to_string(f.frame_index);
      out += ',';
      out += std::to_string(d.true_id);
      out += ',';
      append_box(out, d.bbox);
      out += '\n';
    }
  }
  return out;
}

std::vector<GroundTruthRow> read_ground_truth(std::string_view text) {
  std::vector<GroundTruthRow> rows;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty() || (i == 0 && is_header(line, "frame,id,x,y,w,h"))) continue;
    const std::string where = line_ref(i + 1);
    const auto f = csv_fields(line);
    if (f.size() != 6) throw DataError(where + ": expected 6 fields (frame,id,x,y,w,h)");
    const int frame = parse_frame(f[0], where);
    const auto id = static_cast<int>(parse_int(f[1], where + " id"));
    rows.push_back({frame, id, parse_box(f, 2, where)});
  }
  return rows;
}

std::vector<Trajectory> ground_truth_trajectories(const std::vector<GroundTruthRow>& rows) {
  std::map<int, Trajectory> by_id;
  for (const auto& r : rows) {
    Trajectory& t = by_id[r.id];
    t.id = r.id;
    t.source_ids = {r.id};
    t.samples.push_back({r.frame, center(r.box)});
  }
  std::vector<Trajectory> out;
  for (auto& [id, t] : by_id) {
    std::stable_sort(t.samples.begin(), t.samples.end(),
                     [](const auto& a, const auto& b) { return a.frame < b.frame; });
    try {
      t.validate();
    } catch (const std::invalid_argument& e) {
      throw DataError(std::string("ground truth: ") + e.what());
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::string write_trajectories(const std::vector<Trajectory>& trajectories) {
  std::vector<const Trajectory*> sorted;
  for (const auto& t : trajectories) sorted.push_back(&t);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Trajectory* a, const Trajectory* b) { return a->id < b->id; });
  std::string out = "track_id,frame,cx,cy\n";
  for (const Trajectory* t : sorted) {
    for (const auto& s : t->samples) {
      out += std::to_string(t->id);
      out += ',';
      out += std::to_string(s.frame);
      out += ',';
      append_fixed(out, s.position.cx);
      out += ',';
      append_fixed(out, s.position.cy);
      out += '\n';
    }
  }
  return out;
}

std::vector<Trajectory> read_trajectories(std::string_view text) {
  std::map<int, Trajectory> by_id;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty() || (i == 0 && is_header(line, "track_id,frame,cx,cy"))) continue;
    const std::string where = line_ref(i + 1);
    const auto f = csv_fields(line);
    if (f.size() != 4) throw DataError(where + ": expected 4 fields (track_id,frame,cx,cy)");
    const auto id = static_cast<int>(parse_int(f[0], where + " track_id"));
    const int frame = parse_frame(f[1], where);
    Trajectory& t = by_id[id];
    t.id = id;
    t.source_ids = {id};
    if (!t.samples.empty() && frame <= t.samples.back().frame) {
      throw DataError(where + ": frames of track " + std::to_string(id) + " must increase");
    }
    t.samples.push_back({frame, {parse_double(f[2], where + " cx"), parse_double(f[3], where + " cy")}});
  }
  std::vector<Trajectory> out;
  for (auto& [id, t] : by_id) out.push_back(std::move(t));
  return out;
}

std::string write_counts(const CountSeries& counts, int first_frame) {
  std::string out = "frame,count\n";
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out += std::to_string(first_frame + static_cast<int>(i));
    out += ',';
    out += std::to_string(counts[i]);
    out += '\n';
  }
  return out;
}

CountSeries read_counts(std::string_view text) {
  CountSeries counts;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty() || (i == 0 && is_header(line, "frame,count"))) continue;
    const std::string where = line_ref(i + 1);
    const auto f = csv_fields(line);
    if (f.size() != 2) throw DataError(where + ": expected 2 fields (frame,count)");
    const int frame = parse_frame(f[0], where);
    if (frame != static_cast<int>(counts.size()) + 1) {
      throw DataError(where + ": count frames must run contiguously from 1");
    }
    const long long c = parse_int(f[1], where + " count");
    if (c < 0) throw DataError(where + ": negative count");
    counts.push_back(c);
  }
  return counts;
}

std::string write_track_rows(const std::vector<TrackRow>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += std::to_string(r.frame);
    out += ',';
    out += std::to_string(r.id);
    out += ',';
    append_box(out, r.box);
    out += ',';
    append_fixed(out, r.confidence);
    out += ",-1,-1,-1\n";
  }
  return out;
}

std::vector<TrackRow> read_track_rows(std::string_view text) {
  std::vector<TrackRow> rows;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty()) continue;
    const std::string where = line_ref(i + 1);
    const auto f = csv_fields(line);
    if (f.size() < 7) throw DataError(where + ": expected at least 7 comma-separated fields");
    const int frame = parse_frame(f[0], where);
    const auto id = static_cast<int>(parse_int(f[1], where + " id"));
    const BBox box = parse_box(f, 2, where);
    rows.push_back({frame, id, box, parse_double(f[6], where + " confidence")});
  }
  return rows;
}

void RunConfig::validate() const {
  auto wrap = [](const char* section, auto&& fn) {
    try {
      fn();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + section + ": " + e.what());
    }
  };
  wrap("tracker", [&] { tracker.validate(); });
  wrap("noise", [&] { noise.validate(); });
  wrap("scene", [&] { scene.validate(); });
  wrap("stitch", [&] { stitch.validate(); });
  wrap("datagen.image", [&] { datagen.image.validate(); });
  if (!(metrics.iou_threshold > 0.0 && metrics.iou_threshold < 1.0)) {
    throw ConfigError("config: metrics.iou_threshold must lie in (0, 1)");
  }
  if (metrics.dist_threshold && !(*metrics.dist_threshold > 0.0)) {
    throw ConfigError("config: metrics.dist_threshold must be > 0");
  }
  if (datagen.total < 0) throw ConfigError("config: datagen.total must be >= 0");
}

RunConfig load_config(std::string_view text) {
  json doc;
  if (trim(text).empty()) {
    doc = json::object();
  } else {
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
  }

  RunConfig c;
  Section root(doc, "");

  Section tr = root.sub("tracker");
  tr.integer("n_init", c.tracker.n_init);
  tr.integer("max_age", c.tracker.max_age);
  tr.number("iou_gate", c.tracker.iou_gate);
  tr.number("appearance_weight", c.tracker.appearance_weight);
  tr.integer("descriptor_budget", c.tracker.descriptor_budget);
  tr.number("gating_threshold", c.tracker.gating_threshold);
  Section kf = tr.sub("kalman");
  kf.number("pos_std_factor", c.tracker.kalman.pos_std_factor);
  kf.number("vel_std_factor", c.tracker.kalman.vel_std_factor);
  kf.number("meas_std_factor", c.tracker.kalman.meas_std_factor);
  kf.finish();
  tr.finish();

  Section nm = root.sub("noise");
  nm.number("miss_prob", c.noise.miss_prob);
  nm.number("false_positive_rate", c.noise.false_positive_rate);
  nm.number("jitter_std", c.noise.jitter_std);
  nm.pair("confidence_range", c.noise.confidence_lo, c.noise.confidence_hi);
  nm.seed("seed", c.noise.seed);
  nm.finish();

  Section sc = root.sub("scene");
  sc.number("channel_width", c.scene.channel_width);
  sc.number("channel_length", c.scene.channel_length);
  sc.number("orifice_width", c.scene.orifice_width);
  sc.number("orifice_position", c.scene.orifice_position);
  sc.number("orifice_length", c.scene.orifice_length);
  sc.number("taper_length", c.scene.taper_length);
  sc.integer("n_droplets", c.scene.n_droplets);
  sc.number("droplet_radius_mean", c.scene.droplet_radius_mean);
  sc.number("droplet_radius_std", c.scene.droplet_radius_std);
  sc.number("inflow_speed", c.scene.inflow_speed);
  sc.integer("n_frames", c.scene.n_frames);
  sc.number("deformation_k", c.scene.deformation_k);
  sc.seed("seed", c.scene.seed);
  sc.finish();

  Section st = root.sub("stitch");
  st.integer("max_gap", c.stitch.max_gap);
  st.optional_number("max_link_dist", c.stitch.max_link_dist);
  st.integer("velocity_window", c.stitch.velocity_window);
  st.finish();

  Section me = root.sub("metrics");
  me.number("iou_threshold", c.metrics.iou_threshold);
  me.optional_number("dist_threshold", c.metrics.dist_threshold);
  me.finish();

  Section dg = root.sub("datagen");
  dg.integer("total", c.datagen.total);
  dg.string("real_pool", c.datagen.real_pool);
  dg.boolean("synthetic_only", c.datagen.synthetic_only);
  dg.seed("master_seed", c.datagen.master_seed);
  Section im = dg.sub("image");
  im.integer("width", c.datagen.image.width);
  im.integer("height", c.datagen.image.height);
  im.pair("n_ellipses_range", c.datagen.image.n_ellipses_min, c.datagen.image.n_ellipses_max);
  im.pair("axis_range", c.datagen.image.axis_min, c.datagen.image.axis_max);
  im.boolean("allow_overlap", c.datagen.image.allow_overlap);
  im.finish();
  dg.finish();

  root.finish();
  c.validate();
  return c;
}

std::string dump_config(const RunConfig& c) {
  ordered_json j;
  j["tracker"] = {{"n_init", c.tracker.n_init},
                  {"max_age", c.tracker.max_age},
                  {"iou_gate", c.tracker.iou_gate},
                  {"appearance_weight", c.tracker.appearance_weight},
                  {"descriptor_budget", c.tracker.descriptor_budget},
                  {"gating_threshold", c.tracker.gating_threshold},
                  {"kalman",
                   {{"pos_std_factor", c.tracker.kalman.pos_std_factor},
                    {"vel_std_factor", c.tracker.kalman.vel_std_factor},
                    {"meas_std_factor", c.tracker.kalman.meas_std_factor}}}};
  j["noise"] = {{"miss_prob", c.noise.miss_prob},
                {"false_positive_rate", c.noise.false_positive_rate},
                {"jitter_std", c.noise.jitter_std},
                {"confidence_range", {c.noise.confidence_lo, c.noise.confidence_hi}},
                {"seed", c.noise.seed}};
  j["scene"] = {{"channel_width", c.scene.channel_width},
                {"channel_length", c.scene.channel_length},
                {"orifice_width", c.scene.orifice_width},
                {"orifice_position", c.scene.orifice_position},
                {"orifice_length", c.scene.orifice_length},
                {"taper_length", c.scene.taper_length},
                {"n_droplets", c.scene.n_droplets},
                {"droplet_radius_mean", c.scene.droplet_radius_mean},
                {"droplet_radius_std", c.scene.droplet_radius_std},
                {"inflow_speed", c.scene.inflow_speed},
                {"n_frames", c.scene.n_frames},
                {"deformation_k", c.scene.deformation_k},
                {"seed", c.scene.seed}};
  ordered_json stitch = {{"max_gap", c.stitch.max_gap}};
  stitch["max_link_dist"] = optional_json(c.stitch.max_link_dist);
  stitch["velocity_window"] = c.stitch.velocity_window;
  j["stitch"] = stitch;
  ordered_json metrics = {{"iou_threshold", c.metrics.iou_threshold}};
  metrics["dist_threshold"] = optional_json(c.metrics.dist_threshold);
  j["metrics"] = metrics;
  j["datagen"] = {
      {"total", c.datagen.total},
      {"real_pool", c.datagen.real_pool},
      {"synthetic_only", c.datagen.synthetic_only},
      {"master_seed", c.datagen.master_seed},
      {"image",
       {{"width", c.datagen.image.width},
        {"height", c.datagen.image.height},
        {"n_ellipses_range", {c.datagen.image.n_ellipses_min, c.datagen.image.n_ellipses_max}},
        {"axis_range", {c.datagen.image.axis_min, c.datagen.image.axis_max}},
        {"allow_overlap", c.datagen.image.allow_overlap}}}};
  return j.dump(2) + "\n";
}

void apply_seed(RunConfig& cfg, std::uint64_t seed) {
  cfg.scene.seed = seed;
  cfg.noise.seed = seed;
  cfg.datagen.master_seed = seed;
}

}  // namespace emtrack
