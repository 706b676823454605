#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "emtrack/geometry.hpp"
#include "emtrack/image.hpp"

namespace emtrack {

struct SyntheticImageSpec {
  int width = 320;
  int height = 320;
  int n_ellipses_min = 3;
  int n_ellipses_max = 12;
  double axis_min = 8.0;   // semi-axis, pixels
  double axis_max = 40.0;
  // When false, boxes are kept disjoint; placement may then fall short.
  bool allow_overlap = true;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const SyntheticImageSpec&) const = default;
};

// Minimum per-channel separation between an ellipse and the background.
inline constexpr int kMinColorSeparation = 30;

struct SyntheticImage {
  Image image;
  std::vector<BBox> boxes;
  int requested = 0;  // ellipses drawn from the count range
};

// Uniform random background with randomly coloured, randomly rotated solid
// ellipses fully inside the image; one tight box per ellipse (ellipses may
// overlap; each is labelled by its own bounds).
SyntheticImage render_synthetic(const SyntheticImageSpec& spec);

// Single-class normalized labels: "0 cx/w cy/h bw/w bh/h", six decimals.
// Throws std::invalid_argument for boxes outside the image.
std::string write_yolo_labels(const std::vector<BBox>& boxes, int width, int height);
std::vector<BBox> parse_yolo_labels(std::string_view text, int width, int height);

struct LabeledImage {
  std::filesystem::path image;
  std::filesystem::path label;

  bool operator==(const LabeledImage&) const = default;
};

// Image files (.ppm/.png/.jpg/.jpeg/.bmp) with a same-stem .txt label, in
// file-name order.
std::vector<LabeledImage> scan_image_pool(const std::filesystem::path& dir);

struct DatasetManifest {
  int total = 800;
  double synthetic_fraction = 0.0;
  std::vector<LabeledImage> real_entries;
  std::vector<SyntheticImageSpec> synthetic_entries;
  std::uint64_t master_seed = 0;

  void validate() const;
  bool operator==(const DatasetManifest&) const = default;
};

inline constexpr int kDefaultDatasetTotal = 800;

// Eleven-step grid 0.0, 0.1, ..., 1.0 as step indices 0..10.
int fraction_step(double fraction);

// Fixed-size hybrid dataset: round(fraction * total) synthetic images (seeds
// derived from master_seed) and the rest sampled from the real pool without
// replacement. Throws DataError naming the shortfall if the pool is small.
DatasetManifest compose(const std::vector<LabeledImage>& real_pool, double fraction, int total,
                        std::uint64_t master_seed, const SyntheticImageSpec& image_spec = {});

std::string manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(std::string_view text);

// Writes images/ and labels/ (real_NNNNNN.* copied, synth_NNNNNN.ppm
// rendered) plus manifest.json into `out_dir`. Output bytes depend only on
// the manifest and the referenced real files.
void materialize(const DatasetManifest& m, const std::filesystem::path& out_dir, int jobs = 1);

}  // namespace emtrack
