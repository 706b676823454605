#include <cmath>
#include <stdexcept>

#include "oracles.hpp"

namespace oracle {

Mat zeros(int rows, int cols) { return Mat(rows, Vec(cols, 0.0)); }

Mat identity(int n) {
  Mat m = zeros(n, n);
  for (int i = 0; i < n; ++i) m[i][i] = 1.0;
  return m;
}

Mat multiply(const Mat& a, const Mat& b) {
  const std::size_t n = a.size(), k = b.size(), m = b[0].size();
  Mat out = zeros(static_cast<int>(n), static_cast<int>(m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < k; ++t) s += a[i][t] * b[t][j];
      out[i][j] = s;
    }
  return out;
}

Mat transpose(const Mat& a) {
  Mat out = zeros(static_cast<int>(a[0].size()), static_cast<int>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j) out[j][i] = a[i][j];
  return out;
}

Mat add(const Mat& a, const Mat& b) {
  Mat out = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j) out[i][j] += b[i][j];
  return out;
}

Mat subtract(const Mat& a, const Mat& b) {
  Mat out = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j) out[i][j] -= b[i][j];
  return out;
}

Vec apply(const Mat& a, const Vec& x) {
  Vec out(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) out[i] += a[i][j] * x[j];
  return out;
}

Mat inverse(Mat a) {
  const std::size_t n = a.size();
  Mat inv = identity(static_cast<int>(n));
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    if (a[pivot][col] == 0.0) throw std::runtime_error("oracle::inverse: singular");
    std::swap(a[pivot], a[col]);
    std::swap(inv[pivot], inv[col]);
    const double d = a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] /= d;
      inv[col][j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

namespace {

Mat transition() {
  Mat f = identity(8);
  for (int i = 0; i < 4; ++i) f[i][i + 4] = 1.0;
  return f;
}

Mat observation() {
  Mat h = zeros(4, 8);
  for (int i = 0; i < 4; ++i) h[i][i] = 1.0;
  return h;
}

Mat diagonal_of_squares(const Vec& std_dev) {
  Mat m = zeros(static_cast<int>(std_dev.size()), static_cast<int>(std_dev.size()));
  for (std::size_t i = 0; i < std_dev.size(); ++i) m[i][i] = std_dev[i] * std_dev[i];
  return m;
}

// Innovation covariance H P H^T + R with R from the current height estimate.
Mat innovation_cov(const DenseFilter& f) {
  const Mat h = observation();
  const double hh = f.mean[3];
  const double m = f.noise.meas;
  return add(multiply(multiply(h, f.cov), transpose(h)),
             diagonal_of_squares({m * hh, m * hh, 2.0 * m, m * hh}));
}

}  // namespace

DenseFilter::DenseFilter(const std::array<double, 4>& z, Noise n) : noise(n) {
  mean = {z[0], z[1], z[2], z[3], 0.0, 0.0, 0.0, 0.0};
  const double h = z[3], p = n.pos, v = n.vel;
  cov = diagonal_of_squares(
      {2 * p * h, 2 * p * h, 0.2 * p, 2 * p * h, 10 * v * h, 10 * v * h, 1.6e-3 * v, 10 * v * h});
}

void DenseFilter::predict() {
  const double h = mean[3], p = noise.pos, v = noise.vel;
  const Mat f = transition();
  const Mat q = diagonal_of_squares({p * h, p * h, 0.2 * p, p * h, v * h, v * h, 1.6e-3 * v, v * h});
  mean = apply(f, mean);
  cov = add(multiply(multiply(f, cov), transpose(f)), q);
}

void DenseFilter::update(const std::array<double, 4>& z) {
  const Mat h = observation();
  const Mat s = innovation_cov(*this);
  const Mat k = multiply(multiply(cov, transpose(h)), inverse(s));
  Vec y(4);
  for (int i = 0; i < 4; ++i) y[i] = z[i] - mean[i];
  const Vec dx = apply(k, y);
  for (int i = 0; i < 8; ++i) mean[i] += dx[i];
  cov = multiply(subtract(identity(8), multiply(k, h)), cov);
}

double DenseFilter::mahalanobis(const std::array<double, 4>& z) const {
  const Mat s_inv = inverse(innovation_cov(*this));
  Vec y(4);
  for (int i = 0; i < 4; ++i) y[i] = z[i] - mean[i];
  const Vec t = apply(s_inv, y);
  double d = 0.0;
  for (int i = 0; i < 4; ++i) d += y[i] * t[i];
  return d;
}

}  // namespace oracle
