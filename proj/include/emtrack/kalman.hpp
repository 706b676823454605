#pragma once

#include <Eigen/Dense>

#include "emtrack/geometry.hpp"

namespace emtrack {

using Vector4 = Eigen::Matrix<double, 4, 1>;
using Matrix4 = Eigen::Matrix<double, 4, 4>;
using Vector8 = Eigen::Matrix<double, 8, 1>;
using Matrix8 = Eigen::Matrix<double, 8, 8>;

// Chi-square 0.95 quantile with 4 degrees of freedom.
inline constexpr double kChiSquare95Dof4 = 9.4877;

// Standard deviations are proportional to the box height. The aspect-ratio
// components use fixed multiples of the same factors, so the defaults give
// 1e-2 / 1e-5 / 1e-1 for the aspect process, aspect-velocity process and
// aspect measurement noise.
struct NoiseConfig {
  double pos_std_factor = 1.0 / 20.0;
  double vel_std_factor = 1.0 / 160.0;
  double meas_std_factor = 1.0 / 20.0;

  void validate() const;
  bool operator==(const NoiseConfig&) const = default;
};

// State (cx, cy, aspect, h, vcx, vcy, vaspect, vh); unit time step.
struct KalmanState {
  Vector8 mean = Vector8::Zero();
  Matrix8 covariance = Matrix8::Identity();

  Measurement position() const;
};

// Predicted measurement distribution.
struct Projection {
  Vector4 mean;
  Matrix4 covariance;
};

Vector4 as_vector(const Measurement& m);

KalmanState initiate(const Measurement& m, const NoiseConfig& cfg);
KalmanState predict(const KalmanState& s, const NoiseConfig& cfg);
KalmanState update(const KalmanState& s, const Measurement& m, const NoiseConfig& cfg);
Projection project(const KalmanState& s, const NoiseConfig& cfg);

// Squared Mahalanobis distance of `m` from the projected measurement
// distribution. Throws std::domain_error if the innovation covariance is not
// numerically positive definite.
double gating_distance(const KalmanState& s, const Measurement& m, const NoiseConfig& cfg = {});

}  // namespace emtrack
