#include "emtrack/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace emtrack {

BBox::BBox(double x, double y, double w, double h) : x_(x), y_(y), w_(w), h_(h) {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(w) || !std::isfinite(h)) {
    throw std::invalid_argument("BBox: non-finite coordinate");
  }
  if (!(w > 0.0) || !(h > 0.0)) {
    throw std::invalid_argument("BBox: width and height must be positive (got w=" +
                                std::to_string(w) + ", h=" + std::to_string(h) + ")");
  }
}

double iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x(), b.x());
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y(), b.y());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

Point center(const BBox& b) { return {b.x() + b.w() / 2.0, b.y() + b.h() / 2.0}; }

double distance(const Point& a, const Point& b) { return std::hypot(a.cx - b.cx, a.cy - b.cy); }

Measurement to_measurement(const BBox& b) {
  const Point c = center(b);
  return {c.cx, c.cy, b.w() / b.h(), b.h()};
}

BBox from_measurement(const Measurement& m) {
  if (!(m.aspect > 0.0) || !(m.h > 0.0) || !std::isfinite(m.aspect) || !std::isfinite(m.h)) {
    throw std::invalid_argument("from_measurement: aspect and height must be positive");
  }
  const double w = m.aspect * m.h;
  return BBox(m.cx - w / 2.0, m.cy - m.h / 2.0, w, m.h);
}

}  // namespace emtrack
