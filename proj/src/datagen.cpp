#include "emtrack/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "emtrack/parallel.hpp"
#include "emtrack/random.hpp"
#include "emtrack/text_format.hpp"
#include "json.hpp"

namespace emtrack {
namespace {

constexpr int kPlacementAttempts = 200;

std::uint8_t separated_channel(CounterRng& rng, std::uint8_t bg) {
  while (true) {
    const auto v = static_cast<int>(rng.uniform_int(0, 255));
    if (std::abs(v - static_cast<int>(bg)) >= kMinColorSeparation) {
      return static_cast<std::uint8_t>(v);
    }
  }
}

bool boxes_overlap(const BBox& a, const BBox& b) {
  return a.x() < b.right() && b.x() < a.right() && a.y() < b.bottom() && b.y() < a.bottom();
}

std::string index_name(const char* prefix, std::size_t i) {
  std::string digits = std::to_string(i);
  return std::string(prefix) + std::string(6 - std::min<std::size_t>(6, digits.size()), '0') +
         digits;
}

}  // namespace

void SyntheticImageSpec::validate() const {
  if (width < 1 || height < 1) throw std::invalid_argument("synthetic image: size must be >= 1");
  if (n_ellipses_min < 0 || n_ellipses_max < n_ellipses_min) {
    throw std::invalid_argument("synthetic image: invalid ellipse count range");
  }
  if (!(axis_min > 0.0) || axis_max < axis_min) {
    throw std::invalid_argument("synthetic image: invalid axis range");
  }
  if (2.0 * axis_max > std::min(width, height)) {
    throw std::invalid_argument("synthetic image: ellipses do not fit inside the image");
  }
}

SyntheticImage render_synthetic(const SyntheticImageSpec& spec) {
  spec.validate();
  CounterRng rng(spec.seed, "synthetic.image");
  const Rgb bg{static_cast<std::uint8_t>(rng.uniform_int(0, 255)),
               static_cast<std::uint8_t>(rng.uniform_int(0, 255)),
               static_cast<std::uint8_t>(rng.uniform_int(0, 255))};
  SyntheticImage out{Image(spec.width, spec.height, bg), {}, 0};
  out.requested = static_cast<int>(rng.uniform_int(spec.n_ellipses_min, spec.n_ellipses_max));
  for (int k = 0; k < out.requested; ++k) {
    for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
      Ellipse e;
      e.a = rng.uniform(spec.axis_min, spec.axis_max);
      e.b = rng.uniform(spec.axis_min, spec.axis_max);
      e.orientation = rng.uniform(0.0, std::numbers::pi);
      const BBox extent = e.bounds();
      const double hx = extent.w() / 2.0;
      const double hy = extent.h() / 2.0;
      e.cx = rng.uniform(hx, spec.width - hx);
      e.cy = rng.uniform(hy, spec.height - hy);
      const BBox box = e.bounds();
      if (!spec.allow_overlap &&
          std::any_of(out.boxes.begin(), out.boxes.end(),
                      [&](const BBox& o) { return boxes_overlap(o, box); })) {
        continue;
      }
      const Rgb color{separated_channel(rng, bg.r), separated_channel(rng, bg.g),
                      separated_channel(rng, bg.b)};
      fill_ellipse(out.image, e, color);
      out.boxes.push_back(box);
      break;
    }
  }
  return out;
}

std::string write_yolo_labels(const std::vector<BBox>& boxes, int width, int height) {
  constexpr double eps = 1e-9;
  std::string out;
  for (const BBox& b : boxes) {
    if (b.x() < -eps || b.y() < -eps || b.right() > width + eps || b.bottom() > height + eps) {
      throw std::invalid_argument("write_yolo_labels: box outside the image");
    }
    const Point c = center(b);
    out += "0 ";
    append_fixed(out, std::clamp(c.cx / width, 0.0, 1.0));
    out += ' ';
    append_fixed(out, std::clamp(c.cy / height, 0.0, 1.0));
    out += ' ';
    append_fixed(out, std::clamp(b.w() / width, 0.0, 1.0));
    out += ' ';
    append_fixed(out, std::clamp(b.h() / height, 0.0, 1.0));
    out += '\n';
  }
  return out;
}

std::vector<BBox> parse_yolo_labels(std::string_view text, int width, int height) {
  std::vector<BBox> boxes;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    for (auto f : split(line, ' ')) {
      if (!trim(f).empty()) fields.push_back(f);
    }
    const std::string where = "label line " + std::to_string(i + 1);
    if (fields.size() != 5) throw DataError(where + ": expected 5 fields");
    parse_int(fields[0], where + " class");
    double v[4];
    for (int k = 0; k < 4; ++k) {
      v[k] = parse_double(fields[k + 1], where);
      if (v[k] < 0.0 || v[k] > 1.0) throw DataError(where + ": value outside [0, 1]");
    }
    const double w = v[2] * width;
    const double h = v[3] * height;
    boxes.emplace_back(v[0] * width - w / 2.0, v[1] * height - h / 2.0, w, h);
  }
  return boxes;
}

std::vector<LabeledImage> scan_image_pool(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw DataError("real image pool is not a directory: " + dir.string());
  }
  std::vector<LabeledImage> pool;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext != ".ppm" && ext != ".png" && ext != ".jpg" && ext != ".jpeg" && ext != ".bmp") {
      continue;
    }
    auto label = entry.path();
    label.replace_extension(".txt");
    if (std::filesystem::is_regular_file(label)) pool.push_back({entry.path(), label});
  }
  std::sort(pool.begin(), pool.end(),
            [](const LabeledImage& a, const LabeledImage& b) { return a.image < b.image; });
  return pool;
}

int fraction_step(double fraction) {
  const double scaled = fraction * 10.0;
  const double step = std::round(scaled);
  if (!(std::abs(scaled - step) < 1e-9) || step < 0.0 || step > 10.0) {
    throw std::invalid_argument("synthetic fraction must be one of 0.0, 0.1, ..., 1.0");
  }
  return static_cast<int>(step);
}

void DatasetManifest::validate() const {
  const int step = fraction_step(synthetic_fraction);
  if (total < 0) throw std::invalid_argument("manifest: negative total");
  const auto n_syn = static_cast<std::size_t>(std::llround(step * total / 10.0));
  if (synthetic_entries.size() != n_syn ||
      real_entries.size() != static_cast<std::size_t>(total) - n_syn) {
    throw std::invalid_argument("manifest: entry counts do not match total and fraction");
  }
}

DatasetManifest compose(const std::vector<LabeledImage>& real_pool, double fraction, int total,
                        std::uint64_t master_seed, const SyntheticImageSpec& image_spec) {
  const int step = fraction_step(fraction);
  if (total < 0) throw std::invalid_argument("compose: total must be >= 0");
  const auto n_syn = static_cast<std::size_t>(std::llround(step * total / 10.0));
  const std::size_t n_real = static_cast<std::size_t>(total) - n_syn;
  if (real_pool.size() < n_real) {
    throw DataError("real image pool too small: need " + std::to_string(n_real) + " images, have " +
                    std::to_string(real_pool.size()) + " (short by " +
                    std::to_string(n_real - real_pool.size()) + ")");
  }

  DatasetManifest m;
  m.total = total;
  m.synthetic_fraction = step / 10.0;
  m.master_seed = master_seed;

  // Partial Fisher-Yates: the first n_real slots are a uniform sample.
  std::vector<std::size_t> idx(real_pool.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  CounterRng rng(master_seed, "compose.real", static_cast<std::uint64_t>(step));
  for (std::size_t i = 0; i < n_real; ++i) {
    const auto j = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(idx.size() - 1)));
    std::swap(idx[i], idx[j]);
    m.real_entries.push_back(real_pool[idx[i]]);
  }

  const std::uint64_t synth_base = derive_seed(master_seed, "compose.synthetic", step);
  for (std::size_t i = 0; i < n_syn; ++i) {
    SyntheticImageSpec spec = image_spec;
    spec.seed = derive_seed(synth_base, "image", i);
    m.synthetic_entries.push_back(spec);
  }
  return m;
}

std::string manifest_to_json(const DatasetManifest& m) {
  nlohmann::ordered_json j;
  j["total"] = m.total;
  j["synthetic_fraction"] = m.synthetic_fraction;
  j["master_seed"] = m.master_seed;
  j["real_entries"] = nlohmann::ordered_json::array();
  for (const auto& e : m.real_entries) {
    j["real_entries"].push_back({{"image", e.image.generic_string()},
                                 {"label", e.label.generic_string()}});
  }
  j["synthetic_entries"] = nlohmann::ordered_json::array();
  for (const auto& s : m.synthetic_entries) {
    j["synthetic_entries"].push_back({{"width", s.width},
                                      {"height", s.height},
                                      {"n_ellipses_range", {s.n_ellipses_min, s.n_ellipses_max}},
                                      {"axis_range", {s.axis_min, s.axis_max}},
                                      {"allow_overlap", s.allow_overlap},
                                      {"seed", s.seed}});
  }
  return j.dump(2) + "\n";
}

DatasetManifest manifest_from_json(std::string_view text) {
  DatasetManifest m;
  try {
    const auto j = nlohmann::json::parse(text);
    m.total = j.at("total").get<int>();
    m.synthetic_fraction = j.at("synthetic_fraction").get<double>();
    m.master_seed = j.at("master_seed").get<std::uint64_t>();
    for (const auto& e : j.at("real_entries")) {
      m.real_entries.push_back(
          {e.at("image").get<std::string>(), e.at("label").get<std::string>()});
    }
    for (const auto& e : j.at("synthetic_entries")) {
      SyntheticImageSpec s;
      s.width = e.at("width").get<int>();
      s.height = e.at("height").get<int>();
      s.n_ellipses_min = e.at("n_ellipses_range").at(0).get<int>();
      s.n_ellipses_max = e.at("n_ellipses_range").at(1).get<int>();
      s.axis_min = e.at("axis_range").at(0).get<double>();
      s.axis_max = e.at("axis_range").at(1).get<double>();
      s.allow_overlap = e.at("allow_overlap").get<bool>();
      s.seed = e.at("seed").get<std::uint64_t>();
      m.synthetic_entries.push_back(s);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("manifest: ") + e.what());
  }
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  return m;
}

void materialize(const DatasetManifest& m, const std::filesystem::path& out_dir, int jobs) {
  m.validate();
  const auto images = out_dir / "images";
  const auto labels = out_dir / "labels";
  std::filesystem::create_directories(images);
  std::filesystem::create_directories(labels);

  const std::size_t n_real = m.real_entries.size();
  parallel_for(n_real + m.synthetic_entries.size(), jobs, [&](std::size_t i) {
    if (i < n_real) {
      const auto& e = m.real_entries[i];
      const std::string stem = index_name("real_", i);
      write_file(images / (stem + e.image.extension().string()), read_file(e.image));
      write_file(labels / (stem + ".txt"), read_file(e.label));
      return;
    }
    const std::size_t k = i - n_real;
    const SyntheticImage s = render_synthetic(m.synthetic_entries[k]);
    const std::string stem = index_name("synth_", k);
    write_ppm(images / (stem + ".ppm"), s.image);
    write_file(labels / (stem + ".txt"),
               write_yolo_labels(s.boxes, s.image.width(), s.image.height()));
  });
  write_file(out_dir / "manifest.json", manifest_to_json(m));
}

}  // namespace emtrack
