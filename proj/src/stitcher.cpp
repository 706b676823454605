#include "emtrack/stitcher.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "emtrack/assignment.hpp"

namespace emtrack {
namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

Point extrapolate(const Trajectory& t, int window, int frame) {
  const auto& s = t.samples;
  const std::size_t n = s.size();
  const std::size_t first = n > static_cast<std::size_t>(window) ? n - window : 0;
  const TrajectorySample& a = s[first];
  const TrajectorySample& b = s.back();
  double vx = 0.0;
  double vy = 0.0;
  if (b.frame > a.frame) {
    vx = (b.position.cx - a.position.cx) / (b.frame - a.frame);
    vy = (b.position.cy - a.position.cy) / (b.frame - a.frame);
  }
  const double dt = frame - b.frame;
  return {b.position.cx + vx * dt, b.position.cy + vy * dt};
}

// One linking round; returns true if anything was merged.
bool link_round(std::vector<Trajectory>& segs, const StitchConfig& cfg) {
  const double limit = cfg.max_link_dist ? *cfg.max_link_dist : 3.0 * median_step(segs);
  const std::size_t n = segs.size();
  CostMatrix cost(n, n, kForbidden);
  bool any = false;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      const int gap = segs[b].first_frame() - segs[a].last_frame();
      if (gap <= 0 || gap > cfg.max_gap) continue;
      const Point guess = extrapolate(segs[a], cfg.velocity_window, segs[b].first_frame());
      const double err = distance(guess, segs[b].samples.front().position);
      if (err > limit) continue;
      cost.set(a, b, err);
      any = true;
    }
  }
  if (!any) return false;

  std::vector<std::size_t> next(n, kNone);
  std::vector<char> has_prev(n, 0);
  for (const auto& [a, b] : solve(cost).pairs) {
    next[a] = b;
    has_prev[b] = 1;
  }

  // Links always point forward in time, so chains are acyclic.
  std::vector<Trajectory> merged;
  for (std::size_t i = 0; i < n; ++i) {
    if (has_prev[i]) continue;
    Trajectory chain = segs[i];
    for (std::size_t j = next[i]; j != kNone; j = next[j]) {
      chain.samples.insert(chain.samples.end(), segs[j].samples.begin(), segs[j].samples.end());
      chain.source_ids.insert(chain.source_ids.end(), segs[j].source_ids.begin(),
                              segs[j].source_ids.end());
    }
    merged.push_back(std::move(chain));
  }
  segs = std::move(merged);
  return true;
}

}  // namespace

void StitchConfig::validate() const {
  if (max_gap < 0) throw std::invalid_argument("stitch.max_gap must be >= 0");
  if (max_link_dist && !(*max_link_dist > 0.0)) {
    throw std::invalid_argument("stitch.max_link_dist must be > 0");
  }
  if (velocity_window < 1) throw std::invalid_argument("stitch.velocity_window must be >= 1");
}

double median_step(const std::vector<Trajectory>& segments) {
  std::vector<double> steps;
  for (const auto& t : segments) {
    for (std::size_t i = 1; i < t.samples.size(); ++i) {
      if (t.samples[i].frame - t.samples[i - 1].frame != 1) continue;
      steps.push_back(distance(t.samples[i].position, t.samples[i - 1].position));
    }
  }
  if (steps.empty()) return 0.0;
  const std::size_t mid = steps.size() / 2;
  std::nth_element(steps.begin(), steps.begin() + mid, steps.end());
  if (steps.size() % 2 == 1) return steps[mid];
  const double upper = steps[mid];
  const double lower = *std::max_element(steps.begin(), steps.begin() + mid);
  return (lower + upper) / 2.0;
}

std::vector<Trajectory> stitch(const std::vector<Trajectory>& segments, const StitchConfig& cfg) {
  cfg.validate();
  for (const auto& s : segments) s.validate();
  std::vector<Trajectory> out = segments;
  while (link_round(out, cfg)) {
  }
  return out;
}

}  // namespace emtrack
