#include "emtrack/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace emtrack {
namespace {

void check_entry(double v) {
  if (std::isnan(v) || v == -std::numeric_limits<double>::infinity()) {
    throw std::invalid_argument("CostMatrix: entries must be finite or kForbidden");
  }
}

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

// Square problem of size rows + cols. Every real row has a private dummy
// column and every real column a private dummy row, both at `penalty`; the
// dummy block is free. A perfect matching always exists, and the penalty
// makes any extra real pair worth more than any cost difference, so the
// optimum has maximum real cardinality.
class PaddedProblem {
 public:
  explicit PaddedProblem(const CostMatrix& c) : c_(c), rows_(c.rows()), cols_(c.cols()) {
    n_ = rows_ + cols_;
    double max_abs = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t k = 0; k < cols_; ++k) {
        if (c.allowed(r, k)) max_abs = std::max(max_abs, std::abs(c(r, k)));
      }
    }
    penalty_ = static_cast<double>(std::min(rows_, cols_)) * max_abs + 1.0;
    tolerance_ = 1e-10 * std::max(1.0, 2.0 * penalty_);
  }

  std::size_t size() const { return n_; }

  double cost(std::size_t i, std::size_t j) const {
    if (i < rows_) {
      if (j < cols_) return c_(i, j);
      return j - cols_ == i ? penalty_ : kForbidden;
    }
    if (j < cols_) return i - rows_ == j ? penalty_ : kForbidden;
    return 0.0;
  }

  double tolerance() const { return tolerance_; }

 private:
  const CostMatrix& c_;
  std::size_t rows_;
  std::size_t cols_;
  std::size_t n_ = 0;
  double penalty_ = 1.0;
  double tolerance_ = 1e-10;
};

struct DualSolution {
  std::vector<std::size_t> row_to_col;
  std::vector<std::size_t> col_to_row;
  std::vector<double> u;  // row potentials
  std::vector<double> v;  // column potentials
};

// Shortest augmenting path Hungarian method (Kuhn-Munkres with potentials).
DualSolution hungarian(const PaddedProblem& pb) {
  const std::size_t n = pb.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based internally; column 0 is the virtual root.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double a = pb.cost(i0 - 1, j - 1);
        if (a != kForbidden) {
          const double cur = a - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      if (j1 == 0) throw std::logic_error("hungarian: no augmenting path");
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  DualSolution s;
  s.row_to_col.assign(n, kNone);
  s.col_to_row.assign(n, kNone);
  s.u.assign(u.begin() + 1, u.end());
  s.v.assign(v.begin() + 1, v.end());
  for (std::size_t j = 1; j <= n; ++j) {
    s.row_to_col[p[j] - 1] = j - 1;
    s.col_to_row[j - 1] = p[j] - 1;
  }
  return s;
}

// Every perfect matching inside the equality subgraph of optimal duals is
// optimal. Walk the real rows in order and pin each to the smallest column
// (real columns first, then its dummy, i.e. "unmatched") that still admits
// a perfect equality matching, repairing the current matching along an
// alternating path.
class TieBreaker {
 public:
  TieBreaker(const PaddedProblem& pb, DualSolution& s, std::size_t rows, std::size_t cols)
      : pb_(pb), s_(s), rows_(rows), cols_(cols), fixed_(pb.size(), 0) {}

  void run() {
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t x : candidates(r)) {
        if (try_pin(r, x)) break;
      }
      fixed_[r] = 1;
    }
  }

 private:
  bool tight(std::size_t i, std::size_t j) const {
    const double a = pb_.cost(i, j);
    return a != kForbidden && a - s_.u[i] - s_.v[j] <= pb_.tolerance();
  }

  std::vector<std::size_t> candidates(std::size_t r) const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < cols_; ++c) {
      if (tight(r, c)) out.push_back(c);
    }
    if (tight(r, cols_ + r)) out.push_back(cols_ + r);
    return out;
  }

  bool try_pin(std::size_t r, std::size_t x) {
    if (s_.row_to_col[r] == x) return true;
    const std::size_t displaced = s_.col_to_row[x];
    if (fixed_[displaced]) return false;
    const std::size_t freed = s_.row_to_col[r];

    // BFS: `displaced` needs a new column; reaching `freed` closes the cycle.
    const std::size_t n = pb_.size();
    std::vector<std::size_t> parent(n, kNone);
    std::vector<char> seen(n, 0);
    std::queue<std::size_t> queue;
    queue.push(displaced);
    seen[displaced] = 1;
    seen[r] = 1;
    while (!queue.empty()) {
      const std::size_t q = queue.front();
      queue.pop();
      for (std::size_t y = 0; y < n; ++y) {
        if (y == x || y == s_.row_to_col[q] || !tight(q, y)) continue;
        if (y == freed) {
          apply(r, x, displaced, q, parent);
          return true;
        }
        const std::size_t next = s_.col_to_row[y];
        if (seen[next] || fixed_[next]) continue;
        seen[next] = 1;
        parent[next] = q;
        queue.push(next);
      }
    }
    return false;
  }

  // Row `last` takes the freed column; each row on the path takes the old
  // column of its successor; finally `r` takes `x`.
  void apply(std::size_t r, std::size_t x, std::size_t displaced, std::size_t last,
             const std::vector<std::size_t>& parent) {
    std::size_t row = last;
    std::size_t col = s_.row_to_col[r];
    while (true) {
      const std::size_t old = s_.row_to_col[row];
      s_.row_to_col[row] = col;
      s_.col_to_row[col] = row;
      if (row == displaced) break;
      col = old;
      row = parent[row];
    }
    s_.row_to_col[r] = x;
    s_.col_to_row[x] = r;
  }

  const PaddedProblem& pb_;
  DualSolution& s_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<char> fixed_;
};

}  // namespace

CostMatrix::CostMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), costs_(rows * cols, fill) {
  check_entry(fill);
}

CostMatrix::CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> costs)
    : rows_(rows), cols_(cols), costs_(std::move(costs)) {
  if (costs_.size() != rows * cols) throw std::invalid_argument("CostMatrix: size mismatch");
  for (double v : costs_) check_entry(v);
}

void CostMatrix::set(std::size_t r, std::size_t c, double cost) {
  check_entry(cost);
  costs_[r * cols_ + c] = cost;
}

Assignment solve(const CostMatrix& costs) {
  const std::size_t rows = costs.rows();
  const std::size_t cols = costs.cols();
  Assignment out;
  if (rows == 0 || cols == 0) {
    for (std::size_t r = 0; r < rows; ++r) out.unmatched_rows.push_back(r);
    for (std::size_t c = 0; c < cols; ++c) out.unmatched_cols.push_back(c);
    return out;
  }

  const PaddedProblem pb(costs);
  DualSolution s = hungarian(pb);
  TieBreaker(pb, s, rows, cols).run();

  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t c = s.row_to_col[r];
    if (c < cols) {
      out.pairs.emplace_back(r, c);
    } else {
      out.unmatched_rows.push_back(r);
    }
  }
  for (std::size_t c = 0; c < cols; ++c) {
    if (s.col_to_row[c] >= rows) out.unmatched_cols.push_back(c);
  }
  return out;
}

double total_cost(const CostMatrix& costs, const Assignment& a) {
  double sum = 0.0;
  for (const auto& [r, c] : a.pairs) sum += costs(r, c);
  return sum;
}

}  // namespace emtrack
