#include "emtrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "emtrack/assignment.hpp"

namespace emtrack {

double counting_error(const CountSeries& manual, const CountSeries& predicted) {
  if (manual.size() != predicted.size()) {
    throw std::invalid_argument("counting_error: series lengths differ (" +
                                std::to_string(manual.size()) + " vs " +
                                std::to_string(predicted.size()) + ")");
  }
  if (manual.empty()) throw std::invalid_argument("counting_error: empty series");
  double sum = 0.0;
  for (std::size_t i = 0; i < manual.size(); ++i) {
    const double diff = static_cast<double>(manual[i] - predicted[i]);
    sum += std::sqrt(diff * diff);
  }
  return sum / static_cast<double>(manual.size());
}

std::vector<DetectionFlag> match_detections(const std::vector<ScoredDetection>& detections,
                                            const std::vector<BBox>& ground_truth,
                                            double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw std::invalid_argument("match_detections: iou_threshold must lie in (0, 1)");
  }
  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return detections[a].confidence > detections[b].confidence;
  });

  std::vector<char> taken(ground_truth.size(), 0);
  std::vector<DetectionFlag> flags;
  flags.reserve(detections.size());
  for (std::size_t idx : order) {
    const ScoredDetection& det = detections[idx];
    double best = -1.0;
    std::size_t best_gt = ground_truth.size();
    for (std::size_t g = 0; g < ground_truth.size(); ++g) {
      if (taken[g]) continue;
      const double v = iou(det.box, ground_truth[g]);
      if (v > best) {
        best = v;
        best_gt = g;
      }
    }
    const bool tp = best_gt < ground_truth.size() && best >= iou_threshold;
    if (tp) taken[best_gt] = 1;
    flags.push_back({det.confidence, tp});
  }
  return flags;
}

std::vector<PRPoint> pr_curve(const std::vector<DetectionFlag>& flags, long long n_gt) {
  std::vector<PRPoint> curve;
  curve.reserve(flags.size());
  long long tp = 0;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (flags[i].true_positive) ++tp;
    const double recall = n_gt > 0 ? static_cast<double>(tp) / static_cast<double>(n_gt) : 0.0;
    const double precision = static_cast<double>(tp) / static_cast<double>(i + 1);
    curve.push_back({recall, precision, flags[i].confidence});
  }
  return curve;
}

double average_precision(const std::vector<DetectionFlag>& flags, long long n_gt) {
  if (n_gt < 0) throw std::invalid_argument("average_precision: negative n_gt");
  if (n_gt == 0) return flags.empty() ? 1.0 : 0.0;

  // Precision after k + 1 detections is tp[k] / (k + 1); compared exactly.
  std::vector<long long> tp(flags.size());
  long long running = 0;
  for (std::size_t k = 0; k < flags.size(); ++k) {
    running += flags[k].true_positive ? 1 : 0;
    tp[k] = running;
  }
  auto at_least = [&](std::size_t a, std::size_t b) {
    return tp[a] * static_cast<long long>(b + 1) >= tp[b] * static_cast<long long>(a + 1);
  };
  // best[i]: index of the highest precision at or after i (the envelope).
  std::vector<std::size_t> best(flags.size());
  for (std::size_t i = flags.size(); i-- > 0;) {
    best[i] = (i + 1 < flags.size() && at_least(best[i + 1], i)) ? best[i + 1] : i;
  }

  // Each true positive adds 1/n_gt of recall at its envelope precision. The
  // sum is carried as an unevaluated pair hi + lo (error-free transforms), so
  // rational results such as 5/6 come out correctly rounded.
  double hi = 0.0;
  double lo = 0.0;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (!flags[i].true_positive) continue;
    const double num = static_cast<double>(tp[best[i]]);
    const double den = static_cast<double>(best[i] + 1);
    const double q = num / den;
    const double q_err = std::fma(-q, den, num) / den;
    const double s = hi + q;
    const double bv = s - hi;
    lo += (hi - (s - bv)) + (q - bv) + q_err;
    hi = s;
  }
  const double n = static_cast<double>(n_gt);
  const double sum = hi + lo;
  const double sum_err = lo - (sum - hi);
  const double q = sum / n;
  return q + (std::fma(-q, n, sum) + sum_err) / n;
}

double sequence_average_precision(const std::vector<std::vector<ScoredDetection>>& detections,
                                  const std::vector<std::vector<BBox>>& ground_truth,
                                  double iou_threshold) {
  if (detections.size() != ground_truth.size()) {
    throw std::invalid_argument("sequence_average_precision: frame counts differ");
  }
  std::vector<DetectionFlag> pooled;
  long long n_gt = 0;
  for (std::size_t f = 0; f < detections.size(); ++f) {
    const auto flags = match_detections(detections[f], ground_truth[f], iou_threshold);
    pooled.insert(pooled.end(), flags.begin(), flags.end());
    n_gt += static_cast<long long>(ground_truth[f].size());
  }
  std::stable_sort(pooled.begin(), pooled.end(), [](const DetectionFlag& a, const DetectionFlag& b) {
    return a.confidence > b.confidence;
  });
  return average_precision(pooled, n_gt);
}

TrackingScore tracking_score(const std::vector<Trajectory>& predicted,
                             const std::vector<Trajectory>& ground_truth, double dist_threshold) {
  if (!(dist_threshold > 0.0)) {
    throw std::invalid_argument("tracking_score: dist_threshold must be positive");
  }
  struct Entry {
    int id;
    Point p;
  };
  std::map<int, std::vector<Entry>> pred_by_frame;
  std::map<int, std::vector<Entry>> gt_by_frame;
  for (const auto& t : predicted) {
    for (const auto& s : t.samples) pred_by_frame[s.frame].push_back({t.id, s.position});
  }
  for (const auto& t : ground_truth) {
    for (const auto& s : t.samples) gt_by_frame[s.frame].push_back({t.id, s.position});
  }

  // gt id -> frame -> matched predicted id
  std::map<int, std::map<int, int>> matched;
  for (const auto& [frame, gts] : gt_by_frame) {
    auto it = pred_by_frame.find(frame);
    if (it == pred_by_frame.end()) continue;
    const auto& preds = it->second;
    CostMatrix cost(gts.size(), preds.size(), kForbidden);
    for (std::size_t g = 0; g < gts.size(); ++g) {
      for (std::size_t p = 0; p < preds.size(); ++p) {
        const double d = distance(gts[g].p, preds[p].p);
        if (d <= dist_threshold) cost.set(g, p, d);
      }
    }
    for (const auto& [g, p] : solve(cost).pairs) matched[gts[g].id][frame] = preds[p].id;
  }

  TrackingScore score;
  score.gt_total = static_cast<long long>(ground_truth.size());
  for (const auto& t : ground_truth) {
    const auto& by_frame = matched[t.id];
    std::optional<int> previous;
    bool in_run = false;
    int run_id = 0;
    int run_last_frame = 0;
    bool full = !t.samples.empty();
    std::optional<int> full_id;
    for (const auto& s : t.samples) {
      auto it = by_frame.find(s.frame);
      if (it == by_frame.end()) {
        full = false;
        in_run = false;
        continue;
      }
      const int pid = it->second;
      if (previous && *previous != pid) ++score.id_switches;
      previous = pid;
      if (!in_run || run_id != pid || run_last_frame + 1 != s.frame) ++score.fragments;
      in_run = true;
      run_id = pid;
      run_last_frame = s.frame;
      if (!full_id) full_id = pid;
      if (*full_id != pid) full = false;
    }
    if (full) ++score.full_trajectories;
  }
  return score;
}

}  // namespace emtrack
