#include "emtrack/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "emtrack/random.hpp"

namespace emtrack {
namespace {

// Axial profile u = u_c (1 - kProfileCurvature * eta^2), eta in [-1, 1].
constexpr double kProfileCurvature = 0.4;
// Per-frame displacement cap, in units of the inflow speed.
constexpr double kMaxDisplacement = 2.95;
constexpr int kRelaxationPasses = 40;
constexpr int kPlacementAttempts = 20000;

struct Droplet {
  int id = 0;
  double radius = 1.0;
  double x = 0.0;
  double y = 0.0;
  double a = 1.0;
  double b = 1.0;
  double orientation = 0.0;

  Ellipse ellipse() const { return {x, y, a, b, orientation}; }
};

void reshape(Droplet& d, const SceneConfig& cfg, double orientation) {
  const double ratio = cfg.centerline_speed(d.x) / cfg.inflow_speed;
  const double aspect = std::max(1.0, 1.0 + cfg.deformation_k * (ratio - 1.0));
  d.a = d.radius * std::sqrt(aspect);
  d.b = d.radius / std::sqrt(aspect);
  d.orientation = orientation;
}

double half_extent_y(const Droplet& d) {
  const double c = std::cos(d.orientation);
  const double s = std::sin(d.orientation);
  return std::sqrt(d.a * d.a * s * s + d.b * d.b * c * c);
}

double half_extent_x(const Droplet& d) {
  const double c = std::cos(d.orientation);
  const double s = std::sin(d.orientation);
  return std::sqrt(d.a * d.a * c * c + d.b * d.b * s * s);
}

void clamp_to_walls(Droplet& d, const SceneConfig& cfg) {
  const double half_w = cfg.local_width(d.x) / 2.0;
  const double hy = half_extent_y(d);
  const double yc = cfg.centerline();
  const double lo = yc - half_w + hy;
  const double hi = yc + half_w - hy;
  d.y = lo > hi ? yc : std::clamp(d.y, lo, hi);
  d.x = std::max(d.x, half_extent_x(d));
}

void separate(std::vector<Droplet>& drops, const SceneConfig& cfg) {
  for (int pass = 0; pass < kRelaxationPasses; ++pass) {
    bool moved = false;
    for (std::size_t i = 0; i < drops.size(); ++i) {
      for (std::size_t j = i + 1; j < drops.size(); ++j) {
        Droplet& p = drops[i];
        Droplet& q = drops[j];
        double dx = q.x - p.x;
        double dy = q.y - p.y;
        double dist = std::hypot(dx, dy);
        if (dist < 1e-9) {
          dx = 1.0;
          dy = 0.0;
          dist = 1e-9;
        }
        const double theta = std::atan2(dy, dx);
        const double need =
            p.ellipse().radius_along(theta) + q.ellipse().radius_along(theta);
        if (dist >= need) continue;
        const double push = (need - dist) / 2.0 + 1e-6;
        const double ux = dx / dist;
        const double uy = dy / dist;
        p.x -= push * ux;
        p.y -= push * uy;
        q.x += push * ux;
        q.y += push * uy;
        moved = true;
      }
    }
    for (Droplet& d : drops) clamp_to_walls(d, cfg);
    if (!moved) break;
  }
}

std::vector<Droplet> place(const SceneConfig& cfg) {
  CounterRng rng(cfg.seed, "scene.placement");
  const double x_hi =
      cfg.orifice_position - cfg.orifice_length / 2.0 - cfg.taper_length;
  double occupied = 0.0;
  std::vector<double> radii;
  for (int i = 0; i < cfg.n_droplets; ++i) {
    const double r = std::clamp(rng.normal(cfg.droplet_radius_mean, cfg.droplet_radius_std),
                                0.5 * cfg.droplet_radius_mean, 1.5 * cfg.droplet_radius_mean);
    radii.push_back(r);
    occupied += std::numbers::pi * r * r;
  }
  const double region = std::max(0.0, x_hi) * cfg.channel_width;
  if (cfg.n_droplets > 0 && (region <= 0.0 || occupied / region > 0.9)) {
    throw std::invalid_argument("scene: droplets cannot fit upstream of the orifice (packing "
                                "fraction above 0.9)");
  }

  std::vector<Droplet> drops;
  for (int i = 0; i < cfg.n_droplets; ++i) {
    const double r = radii[i];
    if (2.0 * r > cfg.channel_width || 2.0 * r > x_hi) {
      throw std::invalid_argument("scene: droplet larger than the upstream channel");
    }
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
      Droplet d;
      d.radius = r;
      d.x = rng.uniform(r, x_hi - r);
      d.y = rng.uniform(r, cfg.channel_width - r);
      placed = std::all_of(drops.begin(), drops.end(), [&](const Droplet& o) {
        return std::hypot(o.x - d.x, o.y - d.y) >= o.radius + r;
      });
      if (placed) {
        reshape(d, cfg, 0.0);
        drops.push_back(d);
      }
    }
    if (!placed) {
      throw std::invalid_argument("scene: sequential placement failed for droplet " +
                                  std::to_string(i + 1) + " of " +
                                  std::to_string(cfg.n_droplets));
    }
  }
  // Ids follow the flow: the front-most droplet is 1.
  std::stable_sort(drops.begin(), drops.end(),
                   [](const Droplet& p, const Droplet& q) { return p.x > q.x; });
  for (std::size_t i = 0; i < drops.size(); ++i) drops[i].id = static_cast<int>(i) + 1;
  return drops;
}

void advect(Droplet& d, const SceneConfig& cfg) {
  const double yc = cfg.centerline();
  auto axial_speed = [&](double x, double eta) {
    return cfg.centerline_speed(x) * (1.0 - kProfileCurvature * eta * eta);
  };
  const double eta = std::clamp((d.y - yc) / (cfg.local_width(d.x) / 2.0), -1.0, 1.0);
  // Midpoint rule along the streamline; eta is conserved by convergence.
  const double u0 = axial_speed(d.x, eta);
  const double u = axial_speed(d.x + u0 / 2.0, eta);
  const double x_new = d.x + u;
  const double y_new = yc + eta * cfg.local_width(x_new) / 2.0;
  const double orientation = std::atan2(y_new - d.y, x_new - d.x);
  d.x = x_new;
  d.y = y_new;
  reshape(d, cfg, orientation);
}

GroundTruthFrame snapshot(int frame_index, const std::vector<Droplet>& drops) {
  GroundTruthFrame f;
  f.frame_index = frame_index;
  for (const Droplet& d : drops) {
    f.droplets.push_back({d.id, d.ellipse().bounds(), d.a, d.b, d.orientation});
  }
  return f;
}

}  // namespace

void SceneConfig::validate() const {
  if (!(channel_width > 0.0) || !(channel_length > 0.0)) {
    throw std::invalid_argument("scene: channel dimensions must be positive");
  }
  if (!(orifice_width > 0.0) || !(orifice_width <= channel_width)) {
    throw std::invalid_argument("scene: orifice_width must lie in (0, channel_width]");
  }
  if (orifice_length < 0.0 || taper_length < 0.0) {
    throw std::invalid_argument("scene: orifice_length and taper_length must be >= 0");
  }
  if (n_droplets < 0) throw std::invalid_argument("scene: n_droplets must be >= 0");
  if (!(droplet_radius_mean > 0.0) || droplet_radius_std < 0.0) {
    throw std::invalid_argument("scene: droplet radii must be positive");
  }
  if (!(inflow_speed > 0.0)) throw std::invalid_argument("scene: inflow_speed must be positive");
  if (n_frames < 1) throw std::invalid_argument("scene: n_frames must be >= 1");
  if (deformation_k < 0.0) throw std::invalid_argument("scene: deformation_k must be >= 0");
}

double SceneConfig::local_width(double x) const {
  const double d = std::abs(x - orifice_position);
  const double half = orifice_length / 2.0;
  double s = 0.0;
  if (d <= half) {
    s = 1.0;
  } else if (d < half + taper_length) {
    s = 0.5 * (1.0 + std::cos(std::numbers::pi * (d - half) / taper_length));
  }
  return channel_width - (channel_width - orifice_width) * s;
}

double SceneConfig::centerline_speed(double x) const {
  return inflow_speed * channel_width / local_width(x);
}

Ellipse DropletState::ellipse() const {
  const Point c = center(bbox);
  return {c.cx, c.cy, a, b, orientation};
}

void NoiseModel::validate() const {
  if (!(miss_prob >= 0.0 && miss_prob <= 1.0)) {
    throw std::invalid_argument("noise: miss_prob must lie in [0, 1]");
  }
  if (!(false_positive_rate >= 0.0)) {
    throw std::invalid_argument("noise: false_positive_rate must be >= 0");
  }
  if (!(jitter_std >= 0.0)) throw std::invalid_argument("noise: jitter_std must be >= 0");
  if (!(confidence_lo >= 0.0 && confidence_lo <= confidence_hi && confidence_hi <= 1.0)) {
    throw std::invalid_argument("noise: confidence range must satisfy 0 <= lo <= hi <= 1");
  }
}

std::vector<GroundTruthFrame> generate_scene(const SceneConfig& cfg) {
  cfg.validate();
  std::vector<Droplet> drops = place(cfg);
  std::vector<GroundTruthFrame> frames;
  frames.reserve(cfg.n_frames);
  frames.push_back(snapshot(1, drops));
  const double max_step = kMaxDisplacement * cfg.inflow_speed;
  for (int frame = 2; frame <= cfg.n_frames; ++frame) {
    std::vector<Droplet> before = drops;
    for (Droplet& d : drops) advect(d, cfg);
    separate(drops, cfg);
    for (std::size_t i = 0; i < drops.size(); ++i) {
      const double dx = drops[i].x - before[i].x;
      const double dy = drops[i].y - before[i].y;
      const double step = std::hypot(dx, dy);
      if (step > max_step) {
        drops[i].x = before[i].x + dx * max_step / step;
        drops[i].y = before[i].y + dy * max_step / step;
      }
    }
    std::erase_if(drops, [&](const Droplet& d) {
      return d.x + half_extent_x(d) > cfg.channel_length;
    });
    frames.push_back(snapshot(frame, drops));
  }
  return frames;
}

std::vector<DetectionFrame> corrupt(const std::vector<GroundTruthFrame>& gt, const NoiseModel& nm,
                                    const SceneConfig& scene) {
  nm.validate();
  double size_w = 2.0 * scene.droplet_radius_mean;
  double size_h = size_w;
  std::size_t n_boxes = 0;
  double sum_w = 0.0;
  double sum_h = 0.0;
  for (const auto& f : gt) {
    for (const auto& d : f.droplets) {
      sum_w += d.bbox.w();
      sum_h += d.bbox.h();
      ++n_boxes;
    }
  }
  if (n_boxes > 0) {
    size_w = sum_w / static_cast<double>(n_boxes);
    size_h = sum_h / static_cast<double>(n_boxes);
  }
  size_w = std::min(size_w, scene.channel_length);
  size_h = std::min(size_h, scene.channel_width);

  std::vector<DetectionFrame> out;
  out.reserve(gt.size());
  for (const auto& f : gt) {
    CounterRng rng(nm.seed, "detector.noise", static_cast<std::uint64_t>(f.frame_index));
    DetectionFrame df;
    df.frame = f.frame_index;
    for (const auto& d : f.droplets) {
      if (rng.bernoulli(nm.miss_prob)) continue;
      double x = d.bbox.x();
      double y = d.bbox.y();
      double w = d.bbox.w();
      double h = d.bbox.h();
      if (nm.jitter_std > 0.0) {
        x += rng.normal(0.0, nm.jitter_std);
        y += rng.normal(0.0, nm.jitter_std);
        w = std::max(1.0, w + rng.normal(0.0, nm.jitter_std));
        h = std::max(1.0, h + rng.normal(0.0, nm.jitter_std));
      }
      const double conf = rng.uniform(nm.confidence_lo, nm.confidence_hi);
      df.detections.push_back({BBox(x, y, w, h), conf, std::nullopt});
    }
    const std::int64_t n_fp = rng.poisson(nm.false_positive_rate);
    for (std::int64_t k = 0; k < n_fp; ++k) {
      // Centre drawn uniformly over the channel interior (walls excluded).
      double cx = 0.0;
      double cy = 0.0;
      for (int attempt = 0; attempt < 100; ++attempt) {
        cx = rng.uniform(size_w / 2.0, scene.channel_length - size_w / 2.0);
        cy = rng.uniform(size_h / 2.0, scene.channel_width - size_h / 2.0);
        if (std::abs(cy - scene.centerline()) <= scene.local_width(cx) / 2.0) break;
      }
      const double conf = rng.uniform(nm.confidence_lo, nm.confidence_hi);
      df.detections.push_back(
          {BBox(cx - size_w / 2.0, cy - size_h / 2.0, size_w, size_h), conf, std::nullopt});
    }
    out.push_back(std::move(df));
  }
  return out;
}

Image render_frame(const GroundTruthFrame& frame, const SceneConfig& scene,
                   const Palette& palette) {
  const int width = static_cast<int>(std::ceil(scene.channel_length));
  const int height = static_cast<int>(std::ceil(scene.channel_width));
  Image img(width, height, palette.background);
  const double yc = scene.centerline();
  for (int x = 0; x < width; ++x) {
    const double half_w = scene.local_width(x + 0.5) / 2.0;
    for (int y = 0; y < height; ++y) {
      if (std::abs(y + 0.5 - yc) > half_w) img.set(x, y, palette.wall);
    }
  }
  for (const auto& d : frame.droplets) fill_ellipse(img, d.ellipse(), palette.droplet);
  return img;
}

}  // namespace emtrack
