#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "emtrack/geometry.hpp"

namespace emtrack {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  bool operator==(const Rgb&) const = default;
};

// Integer pixel rectangle [x0, x1) x [y0, y1).
struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  bool empty() const { return x1 <= x0 || y1 <= y0; }
};

class Image {
 public:
  Image() = default;
  Image(int width, int height, Rgb fill = {});

  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<std::uint8_t>& data() const { return data_; }

  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);
  PixelRect bounds() const { return {0, 0, width_, height_}; }

  bool operator==(const Image&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

// Filled ellipse with semi-axes a (along orientation) and b, rotated by
// `orientation` radians counter-clockwise in image coordinates.
struct Ellipse {
  double cx = 0.0;
  double cy = 0.0;
  double a = 1.0;
  double b = 1.0;
  double orientation = 0.0;

  bool contains(double px, double py) const;
  // Tight axis-aligned bounds of the ellipse.
  BBox bounds() const;
  // Radius along the world-frame direction `theta`.
  double radius_along(double theta) const;
};

// Rasterizes by testing pixel centers; returns the number of pixels painted.
std::size_t fill_ellipse(Image& img, const Ellipse& e, Rgb color);
PixelRect clip(const PixelRect& r, const PixelRect& to);

// Binary portable pixmap (P6, maxval 255).
std::string encode_ppm(const Image& img);
Image decode_ppm(const std::string& bytes);
void write_ppm(const std::filesystem::path& path, const Image& img);
Image read_ppm(const std::filesystem::path& path);

}  // namespace emtrack
