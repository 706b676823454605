#include "emtrack/kalman.hpp"

#include <cmath>
#include <stdexcept>

namespace emtrack {
namespace {

constexpr double kAspectPosScale = 0.2;
constexpr double kAspectVelScale = 1.6e-3;
constexpr double kAspectMeasScale = 2.0;

Eigen::Matrix<double, 4, 8> measurement_matrix() {
  Eigen::Matrix<double, 4, 8> h = Eigen::Matrix<double, 4, 8>::Zero();
  h.leftCols<4>().setIdentity();
  return h;
}

Matrix8 transition_matrix() {
  Matrix8 f = Matrix8::Identity();
  f.topRightCorner<4, 4>().setIdentity();
  return f;
}

Matrix4 measurement_noise(double h, const NoiseConfig& cfg) {
  const double m = cfg.meas_std_factor;
  Vector4 std_dev(m * h, m * h, kAspectMeasScale * m, m * h);
  return std_dev.array().square().matrix().asDiagonal();
}

void require_finite(const Measurement& m, const char* who) {
  if (!std::isfinite(m.cx) || !std::isfinite(m.cy) || !std::isfinite(m.aspect) ||
      !std::isfinite(m.h)) {
    throw std::invalid_argument(std::string(who) + ": non-finite measurement");
  }
}

}  // namespace

void NoiseConfig::validate() const {
  if (!(pos_std_factor > 0.0) || !(vel_std_factor > 0.0) || !(meas_std_factor > 0.0)) {
    throw std::invalid_argument("NoiseConfig: all std factors must be positive");
  }
}

Measurement KalmanState::position() const { return {mean(0), mean(1), mean(2), mean(3)}; }

Vector4 as_vector(const Measurement& m) { return Vector4(m.cx, m.cy, m.aspect, m.h); }

KalmanState initiate(const Measurement& m, const NoiseConfig& cfg) {
  require_finite(m, "initiate");
  if (!(m.h > 0.0) || !(m.aspect > 0.0)) {
    throw std::invalid_argument("initiate: height and aspect must be positive");
  }
  const double p = cfg.pos_std_factor;
  const double v = cfg.vel_std_factor;
  const double h = m.h;
  KalmanState s;
  s.mean << m.cx, m.cy, m.aspect, m.h, 0.0, 0.0, 0.0, 0.0;
  Vector8 std_dev;
  std_dev << 2 * p * h, 2 * p * h, kAspectPosScale * p, 2 * p * h, 10 * v * h, 10 * v * h,
      kAspectVelScale * v, 10 * v * h;
  s.covariance = std_dev.array().square().matrix().asDiagonal();
  return s;
}

KalmanState predict(const KalmanState& s, const NoiseConfig& cfg) {
  const double p = cfg.pos_std_factor;
  const double v = cfg.vel_std_factor;
  const double h = s.mean(3);
  Vector8 std_dev;
  std_dev << p * h, p * h, kAspectPosScale * p, p * h, v * h, v * h, kAspectVelScale * v, v * h;
  const Matrix8 process = std_dev.array().square().matrix().asDiagonal();

  static const Matrix8 f = transition_matrix();
  KalmanState out;
  out.mean = f * s.mean;
  out.covariance = f * s.covariance * f.transpose() + process;
  return out;
}

Projection project(const KalmanState& s, const NoiseConfig& cfg) {
  static const Eigen::Matrix<double, 4, 8> hm = measurement_matrix();
  Projection pr;
  pr.mean = hm * s.mean;
  pr.covariance = hm * s.covariance * hm.transpose() + measurement_noise(s.mean(3), cfg);
  return pr;
}

KalmanState update(const KalmanState& s, const Measurement& m, const NoiseConfig& cfg) {
  require_finite(m, "update");
  static const Eigen::Matrix<double, 4, 8> hm = measurement_matrix();
  const Projection pr = project(s, cfg);
  const Eigen::LLT<Matrix4> chol(pr.covariance);
  if (chol.info() != Eigen::Success) {
    throw std::domain_error("update: innovation covariance is not positive definite");
  }
  // gain = P H^T S^-1, computed as (S^-1 H P)^T since S and P are symmetric.
  const Eigen::Matrix<double, 8, 4> gain =
      chol.solve(hm * s.covariance).transpose();
  const Vector4 innovation = as_vector(m) - pr.mean;

  KalmanState out;
  out.mean = s.mean + gain * innovation;
  out.covariance = s.covariance - gain * pr.covariance * gain.transpose();
  return out;
}

double gating_distance(const KalmanState& s, const Measurement& m, const NoiseConfig& cfg) {
  const Projection pr = project(s, cfg);
  const Eigen::LLT<Matrix4> chol(pr.covariance);
  if (chol.info() != Eigen::Success) {
    throw std::domain_error("gating_distance: innovation covariance is singular");
  }
  const Vector4 diag = chol.matrixL().toDenseMatrix().diagonal();
  if (diag.minCoeff() <= 1e-12 * diag.maxCoeff()) {
    throw std::domain_error("gating_distance: innovation covariance is singular");
  }
  const Vector4 d = as_vector(m) - pr.mean;
  const Vector4 z = chol.matrixL().solve(d);
  return z.squaredNorm();
}

}  // namespace emtrack
