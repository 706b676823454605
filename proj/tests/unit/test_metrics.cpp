#include <cmath>
#include <tuple>

#include "doctest.h"
#include "emtrack/metrics.hpp"
#include "emtrack/random.hpp"

using namespace emtrack;

namespace {

Trajectory traj(int id, std::vector<std::tuple<int, double, double>> pts) {
  Trajectory t;
  t.id = id;
  t.source_ids = {id};
  for (auto [f, x, y] : pts) t.samples.push_back({f, Point{x, y}});
  return t;
}

std::vector<DetectionFlag> flags_of(std::initializer_list<bool> tps) {
  std::vector<DetectionFlag> out;
  double conf = 1.0;
  for (bool tp : tps) {
    out.push_back({conf, tp});
    conf -= 0.01;
  }
  return out;
}

}  // namespace

TEST_CASE("counting error examples") {
  CHECK(counting_error({3, 4, 5}, {3, 4, 5}) == 0.0);
  CHECK(counting_error({10, 12}, {9, 14}) == 1.5);
  CHECK(counting_error({7}, {10}) == 3.0);
  CHECK_THROWS_AS(counting_error({1, 2}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(counting_error({}, {}), std::invalid_argument);
}

TEST_CASE("counting error equals mean absolute error, is symmetric") {
  CounterRng rng(41, "metrics.count");
  for (int i = 0; i < 200; ++i) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, 50));
    CountSeries m(n), p(n);
    double mae = 0;
    for (std::size_t k = 0; k < n; ++k) {
      m[k] = rng.uniform_int(0, 40);
      p[k] = rng.uniform_int(0, 40);
      mae += std::abs(static_cast<double>(m[k] - p[k]));
    }
    mae /= static_cast<double>(n);
    CHECK(counting_error(m, p) == mae);
    CHECK(counting_error(m, p) == counting_error(p, m));
  }
}

TEST_CASE("match_detections") {
  const BBox g(0, 0, 10, 10);
  SUBCASE("exact detections are all true positives") {
    const auto f = match_detections({{g, 0.9}, {BBox(20, 0, 10, 10), 0.8}}, {g, BBox(20, 0, 10, 10)});
    REQUIRE(f.size() == 2);
    CHECK(f[0].true_positive);
    CHECK(f[1].true_positive);
  }
  SUBCASE("no ground truth") {
    const auto f = match_detections({{g, 0.9}}, {});
    REQUIRE(f.size() == 1);
    CHECK_FALSE(f[0].true_positive);
  }
  SUBCASE("higher confidence wins the shared ground truth") {
    // iou 0.9 at confidence 0.5, iou 0.8 at confidence 0.9
    const BBox a(0, 0, 9, 10);        // 90 / 100
    const BBox b(0, 0, 10, 12.5);     // 100 / 125
    REQUIRE(iou(a, g) == doctest::Approx(0.9));
    REQUIRE(iou(b, g) == doctest::Approx(0.8));
    const auto f = match_detections({{a, 0.5}, {b, 0.9}}, {g});
    REQUIRE(f.size() == 2);
    CHECK(f[0].confidence == 0.9);
    CHECK(f[0].true_positive);
    CHECK(f[1].confidence == 0.5);
    CHECK_FALSE(f[1].true_positive);
  }
  SUBCASE("equal confidences keep input order") {
    const auto f = match_detections({{BBox(0, 0, 9, 10), 0.7}, {g, 0.7}}, {g});
    CHECK(f[0].true_positive);
    CHECK_FALSE(f[1].true_positive);
  }
  SUBCASE("threshold validated") {
    CHECK_THROWS_AS(match_detections({}, {}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(match_detections({}, {}, 1.0), std::invalid_argument);
  }
}

TEST_CASE("pr curve") {
  const auto c = pr_curve(flags_of({true, false, true}), 2);
  REQUIRE(c.size() == 3);
  CHECK(c[0].recall == 0.5);
  CHECK(c[0].precision == 1.0);
  CHECK(c[1].precision == 0.5);
  CHECK(c[2].recall == 1.0);
  for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i].recall >= c[i - 1].recall);
}

TEST_CASE("average precision hand oracle") {
  CHECK(average_precision(flags_of({true, false, true}), 2) == 5.0 / 6.0);
  CHECK(average_precision(flags_of({true, true, true}), 3) == 1.0);
  CHECK(average_precision(flags_of({false, false}), 3) == 0.0);
  CHECK(average_precision({}, 0) == 1.0);
  CHECK(average_precision(flags_of({false}), 0) == 0.0);
  CHECK(average_precision({}, 4) == 0.0);
  // Misses cap recall: two of four found, both first.
  CHECK(average_precision(flags_of({true, true}), 4) == 0.5);
  // Envelope lifts the early low-precision point: precisions 0, 1/2, 2/3.
  CHECK(average_precision(flags_of({false, true, true}), 2) == 2.0 / 3.0);
  CHECK_THROWS_AS(average_precision({}, -1), std::invalid_argument);
}

TEST_CASE("average precision is invariant under confidence rescaling") {
  CounterRng rng(42, "metrics.ap");
  for (int i = 0; i < 50; ++i) {
    std::vector<std::vector<ScoredDetection>> dets(5), scaled(5);
    std::vector<std::vector<BBox>> gt(5);
    for (int f = 0; f < 5; ++f) {
      for (int k = 0; k < 4; ++k) {
        const BBox g(rng.uniform(0, 100), rng.uniform(0, 100), 10, 10);
        gt[f].push_back(g);
        if (rng.bernoulli(0.8)) {
          const BBox d(g.x() + rng.normal(0, 2), g.y() + rng.normal(0, 2), 10, 10);
          const double c = rng.uniform(0.1, 1.0);
          dets[f].push_back({d, c});
          scaled[f].push_back({d, c * 0.37});
        }
      }
    }
    CHECK(sequence_average_precision(dets, gt) == sequence_average_precision(scaled, gt));
  }
}

TEST_CASE("tracking score") {
  const auto gt = std::vector<Trajectory>{traj(1, {{1, 0, 0}, {2, 1, 0}, {3, 2, 0}, {4, 3, 0}}),
                                          traj(2, {{1, 0, 50}, {2, 1, 50}, {3, 2, 50}})};
  SUBCASE("renamed identical predictions") {
    auto pred = gt;
    pred[0].id = 70;
    pred[1].id = 3;
    const TrackingScore s = tracking_score(pred, gt, 1.0);
    CHECK(s.id_switches == 0);
    CHECK(s.full_trajectories == 2);
    CHECK(s.gt_total == 2);
    CHECK(s.fragments == 2);
  }
  SUBCASE("split mid-run") {
    const auto pred = std::vector<Trajectory>{traj(5, {{1, 0, 0}, {2, 1, 0}}),
                                              traj(6, {{3, 2, 0}, {4, 3, 0}})};
    const TrackingScore s = tracking_score(pred, {gt[0]}, 1.0);
    CHECK(s.id_switches == 1);
    CHECK(s.full_trajectories == 0);
    CHECK(s.fragments == 2);
  }
  SUBCASE("gap breaks a full trajectory but not the id") {
    const auto pred = std::vector<Trajectory>{traj(5, {{1, 0, 0}, {2, 1, 0}, {4, 3, 0}})};
    const TrackingScore s = tracking_score(pred, {gt[0]}, 1.0);
    CHECK(s.id_switches == 0);
    CHECK(s.full_trajectories == 0);
    CHECK(s.fragments == 2);
  }
  SUBCASE("matches beyond the distance threshold do not count") {
    const auto pred = std::vector<Trajectory>{traj(5, {{1, 0, 3}, {2, 1, 3}, {3, 2, 3}, {4, 3, 3}})};
    CHECK(tracking_score(pred, {gt[0]}, 2.0).full_trajectories == 0);
    CHECK(tracking_score(pred, {gt[0]}, 3.5).full_trajectories == 1);
  }
  SUBCASE("partial coverage") {
    std::vector<Trajectory> g, p;
    for (int i = 0; i < 19; ++i) {
      g.push_back(traj(i + 1, {{1, 0, 20.0 * i}, {2, 1, 20.0 * i}, {3, 2, 20.0 * i}}));
      if (i < 9) {
        p.push_back(traj(100 + i, {{1, 0, 20.0 * i}, {2, 1, 20.0 * i}, {3, 2, 20.0 * i}}));
      } else {
        p.push_back(traj(100 + i, {{1, 0, 20.0 * i}, {2, 1, 20.0 * i}}));
      }
    }
    const TrackingScore s = tracking_score(p, g, 2.0);
    CHECK(s.full_trajectories == 9);
    CHECK(s.gt_total == 19);
  }
  CHECK_THROWS_AS(tracking_score({}, gt, 0.0), std::invalid_argument);
  CHECK(tracking_score({}, {}, 1.0) == TrackingScore{});
}
