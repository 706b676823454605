#include "helpers.hpp"

#include <map>

#include "emtrack/datagen.hpp"
#include "emtrack/text_format.hpp"

namespace testing {

namespace {
std::map<std::string, std::string> snapshot(const std::filesystem::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    files[std::filesystem::relative(e.path(), root).string()] = emtrack::read_file(e.path());
  }
  return files;
}
}  // namespace

bool same_tree(const std::filesystem::path& a, const std::filesystem::path& b) {
  return snapshot(a) == snapshot(b);
}

void make_pool(const std::filesystem::path& dir, int n) {
  using namespace emtrack;
  std::filesystem::create_directories(dir);
  for (int i = 0; i < n; ++i) {
    SyntheticImageSpec spec;
    spec.width = spec.height = 32;
    spec.axis_min = 3;
    spec.axis_max = 8;
    spec.n_ellipses_min = 1;
    spec.n_ellipses_max = 2;
    spec.seed = 1000 + i;
    const auto s = render_synthetic(spec);
    const std::string stem = "img" + std::to_string(100 + i);
    write_ppm(dir / (stem + ".ppm"), s.image);
    write_file(dir / (stem + ".txt"), write_yolo_labels(s.boxes, 32, 32));
  }
  write_file(dir / "notes.md", "not an image\n");
  write_file(dir / "orphan.ppm", encode_ppm(Image(2, 2)));
}

}  // namespace testing
