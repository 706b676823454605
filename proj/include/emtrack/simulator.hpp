#pragma once

#include <cstdint>
#include <vector>

#include "emtrack/geometry.hpp"
#include "emtrack/image.hpp"
#include "emtrack/tracker.hpp"

namespace emtrack {

// Straight channel along +x of width `channel_width` (image rows) and length
// `channel_length` (image columns), with a constriction centred at
// `orifice_position`: a flat section of `orifice_length` joined to the full
// width by cosine tapers of `taper_length` on each side.
struct SceneConfig {
  double channel_width = 200.0;
  double channel_length = 800.0;
  double orifice_width = 80.0;
  double orifice_position = 420.0;
  double orifice_length = 40.0;
  double taper_length = 160.0;
  int n_droplets = 19;
  double droplet_radius_mean = 14.0;
  double droplet_radius_std = 1.5;
  // Centreline speed upstream of the constriction, pixels per frame.
  double inflow_speed = 2.0;
  int n_frames = 120;
  // Aspect ratio = 1 + k (local speed / inflow speed - 1).
  double deformation_k = 0.5;
  std::uint64_t seed = 2022;

  void validate() const;
  double local_width(double x) const;
  double centerline() const { return channel_width / 2.0; }
  // Centreline flow speed at axial position x (flux conservation).
  double centerline_speed(double x) const;
  bool operator==(const SceneConfig&) const = default;
};

struct DropletState {
  int true_id = 0;
  BBox bbox;
  double a = 1.0;  // semi-axis along `orientation`
  double b = 1.0;
  double orientation = 0.0;

  Ellipse ellipse() const;
};

struct GroundTruthFrame {
  int frame_index = 0;
  std::vector<DropletState> droplets;
};

struct NoiseModel {
  double miss_prob = 0.0;
  double false_positive_rate = 0.0;
  double jitter_std = 0.0;
  double confidence_lo = 0.5;
  double confidence_hi = 1.0;
  std::uint64_t seed = 7;

  void validate() const;
  bool operator==(const NoiseModel&) const = default;
};

struct Palette {
  Rgb background{222, 224, 214};
  Rgb wall{48, 52, 64};
  Rgb droplet{86, 132, 196};
};

// Kinematic emulsion: a parabolic axial profile scaled by flux conservation
// through the constriction, transverse positions following the converging
// streamlines, soft pairwise repulsion resolving overlaps and volume-
// preserving elongation along the flow. Droplets leave the scene once their
// box crosses the outlet. Frames are 1-based. Throws std::invalid_argument if
// the droplets cannot be placed (packing fraction above 0.9 or failed
// sequential placement).
std::vector<GroundTruthFrame> generate_scene(const SceneConfig& cfg);

// Detector emulation: independent misses, Gaussian jitter on x, y, w, h,
// Poisson false positives placed inside the channel, uniform confidences.
// Each frame draws from its own counter stream keyed by (seed, frame).
std::vector<DetectionFrame> corrupt(const std::vector<GroundTruthFrame>& gt, const NoiseModel& nm,
                                    const SceneConfig& scene);

Image render_frame(const GroundTruthFrame& frame, const SceneConfig& scene,
                   const Palette& palette = {});

}  // namespace emtrack
