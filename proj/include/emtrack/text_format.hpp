#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace emtrack {

// Malformed or inconsistent input data (as opposed to a usage error).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Locale-independent fixed-point formatting; "-0.000000" is normalized to
// "0.000000" so byte output does not depend on the sign of rounded zeros.
std::string format_fixed(double v, int decimals = 6);
void append_fixed(std::string& out, double v, int decimals = 6);

// Strict locale-independent parsing of the whole (trimmed) field.
// Throws DataError mentioning `what` on failure.
double parse_double(std::string_view field, std::string_view what = "value");
long long parse_int(std::string_view field, std::string_view what = "value");

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
// Lines without their terminators; a trailing newline yields no empty line.
std::vector<std::string_view> split_lines(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace emtrack
