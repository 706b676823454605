#pragma once

#include <vector>

#include "emtrack/geometry.hpp"

namespace emtrack {

struct TrajectorySample {
  int frame = 0;
  Point position;

  bool operator==(const TrajectorySample&) const = default;
};

// Identity-bearing sequence of centers. Frame indices are strictly
// increasing; `source_ids` lists the track ids merged into this trajectory.
struct Trajectory {
  int id = 0;
  std::vector<TrajectorySample> samples;
  std::vector<int> source_ids;

  int first_frame() const { return samples.front().frame; }
  int last_frame() const { return samples.back().frame; }
  // Throws std::invalid_argument when empty or frames are not increasing.
  void validate() const;

  bool operator==(const Trajectory&) const = default;
};

}  // namespace emtrack
