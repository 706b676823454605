#pragma once

#include <stdexcept>

namespace emtrack {

// Axis-aligned box in top-left / width / height pixel form. Coordinates are
// real-valued; zero-area and non-finite boxes are rejected on construction.
class BBox {
 public:
  BBox(double x, double y, double w, double h);

  double x() const { return x_; }
  double y() const { return y_; }
  double w() const { return w_; }
  double h() const { return h_; }
  double right() const { return x_ + w_; }
  double bottom() const { return y_ + h_; }
  double area() const { return w_ * h_; }

  bool operator==(const BBox&) const = default;

 private:
  double x_;
  double y_;
  double w_;
  double h_;
};

struct Point {
  double cx = 0.0;
  double cy = 0.0;

  bool operator==(const Point&) const = default;
};

// Kalman measurement parametrization: center, aspect ratio w/h and height.
struct Measurement {
  double cx = 0.0;
  double cy = 0.0;
  double aspect = 1.0;
  double h = 1.0;
};

double iou(const BBox& a, const BBox& b);
Point center(const BBox& b);
double distance(const Point& a, const Point& b);

Measurement to_measurement(const BBox& b);
// Throws std::invalid_argument when aspect or h is not positive and finite.
BBox from_measurement(const Measurement& m);

}  // namespace emtrack
