#pragma once

#include <optional>
#include <vector>

#include "emtrack/trajectory.hpp"

namespace emtrack {

struct StitchConfig {
  // Largest frame difference between a segment's end and its continuation.
  int max_gap = 10;
  // Largest extrapolation error of a link, pixels. Unset: 3 x the median
  // per-frame displacement of the segments being stitched.
  std::optional<double> max_link_dist;
  // Samples at the end of a segment used to estimate its velocity.
  int velocity_window = 5;

  void validate() const;
  bool operator==(const StitchConfig&) const = default;
};

// Median displacement over consecutive-frame sample pairs, 0 if none.
double median_step(const std::vector<Trajectory>& segments);

// Heuristic gap closing. A link A -> B is a candidate when B starts after A
// ends, within max_gap frames, and B's first centre lies within the link
// distance of A's constant-velocity extrapolation (velocity from A's last
// velocity_window samples). Links are chosen by minimum-cost assignment of
// segment ends to segment starts (cost = extrapolation error) and chains are
// merged; rounds repeat until no candidate remains, so the result is a fixed
// point. Merged trajectories keep the first segment's id, concatenate
// source_ids and appear at the position of their first segment.
std::vector<Trajectory> stitch(const std::vector<Trajectory>& segments, const StitchConfig& cfg);

}  // namespace emtrack
