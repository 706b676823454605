#include "emtrack/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "emtrack/text_format.hpp"

namespace emtrack {

Image::Image(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw std::invalid_argument("Image: negative size");
  data_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill.r;
    data_[i + 1] = fill.g;
    data_[i + 2] = fill.b;
  }
}

Rgb Image::at(int x, int y) const {
  const std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  return {data_[i], data_[i + 1], data_[i + 2]};
}

void Image::set(int x, int y, Rgb c) {
  const std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  data_[i] = c.r;
  data_[i + 1] = c.g;
  data_[i + 2] = c.b;
}

bool Ellipse::contains(double px, double py) const {
  const double dx = px - cx;
  const double dy = py - cy;
  const double c = std::cos(orientation);
  const double s = std::sin(orientation);
  const double u = c * dx + s * dy;
  const double v = -s * dx + c * dy;
  return (u * u) / (a * a) + (v * v) / (b * b) <= 1.0;
}

BBox Ellipse::bounds() const {
  const double c = std::cos(orientation);
  const double s = std::sin(orientation);
  const double hx = std::sqrt(a * a * c * c + b * b * s * s);
  const double hy = std::sqrt(a * a * s * s + b * b * c * c);
  return BBox(cx - hx, cy - hy, 2.0 * hx, 2.0 * hy);
}

double Ellipse::radius_along(double theta) const {
  const double psi = theta - orientation;
  const double bc = b * std::cos(psi);
  const double as = a * std::sin(psi);
  return a * b / std::sqrt(bc * bc + as * as);
}

PixelRect clip(const PixelRect& r, const PixelRect& to) {
  return {std::max(r.x0, to.x0), std::max(r.y0, to.y0), std::min(r.x1, to.x1),
          std::min(r.y1, to.y1)};
}

std::size_t fill_ellipse(Image& img, const Ellipse& e, Rgb color) {
  const BBox box = e.bounds();
  const PixelRect scan = clip({static_cast<int>(std::floor(box.x())) - 1,
                               static_cast<int>(std::floor(box.y())) - 1,
                               static_cast<int>(std::ceil(box.right())) + 1,
                               static_cast<int>(std::ceil(box.bottom())) + 1},
                              img.bounds());
  std::size_t painted = 0;
  for (int y = scan.y0; y < scan.y1; ++y) {
    for (int x = scan.x0; x < scan.x1; ++x) {
      if (e.contains(x + 0.5, y + 0.5)) {
        img.set(x, y, color);
        ++painted;
      }
    }
  }
  return painted;
}

std::string encode_ppm(const Image& img) {
  std::string out = "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) +
                    "\n255\n";
  out.append(reinterpret_cast<const char*>(img.data().data()), img.data().size());
  return out;
}

Image decode_ppm(const std::string& bytes) {
  std::size_t pos = 0;
  auto next_token = [&]() {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return bytes.substr(start, pos - start);
  };
  if (next_token() != "P6") throw DataError("ppm: missing P6 magic");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(next_token());
    h = std::stoi(next_token());
    maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    throw DataError("ppm: malformed header");
  }
  if (maxval != 255 || w < 0 || h < 0) throw DataError("ppm: unsupported header");
  ++pos;  // single whitespace after maxval
  const std::size_t n = static_cast<std::size_t>(w) * h * 3;
  if (bytes.size() < pos + n) throw DataError("ppm: truncated pixel data");
  Image img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = pos + (static_cast<std::size_t>(y) * w + x) * 3;
      img.set(x, y,
              {static_cast<std::uint8_t>(bytes[i]), static_cast<std::uint8_t>(bytes[i + 1]),
               static_cast<std::uint8_t>(bytes[i + 2])});
    }
  }
  return img;
}

void write_ppm(const std::filesystem::path& path, const Image& img) {
  write_file(path, encode_ppm(img));
}

Image read_ppm(const std::filesystem::path& path) { return decode_ppm(read_file(path)); }

}  // namespace emtrack
