#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace emtrack {

// Marker for a disallowed (row, col) pair. Forbidden pairs are removed from
// the matching graph; they are never selected, regardless of other costs.
inline constexpr double kForbidden = std::numeric_limits<double>::infinity();

class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  // Row-major costs; every entry must be finite or kForbidden.
  CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> costs);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return costs_[r * cols_ + c]; }
  bool allowed(std::size_t r, std::size_t c) const { return (*this)(r, c) != kForbidden; }
  void set(std::size_t r, std::size_t c, double cost);
  void forbid(std::size_t r, std::size_t c) { costs_[r * cols_ + c] = kForbidden; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> costs_;
};

struct Assignment {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // sorted by row
  std::vector<std::size_t> unmatched_rows;
  std::vector<std::size_t> unmatched_cols;
};

// Among all maximum-cardinality matchings that avoid forbidden pairs, returns
// one of minimum total cost. Ties are broken towards the lexicographically
// smallest pair list. O((rows + cols)^3) for the optimum plus a tie-breaking
// pass over the equality subgraph of the optimal duals.
Assignment solve(const CostMatrix& costs);

// Sum of the matched entries, accumulated in row order.
double total_cost(const CostMatrix& costs, const Assignment& a);

}  // namespace emtrack
