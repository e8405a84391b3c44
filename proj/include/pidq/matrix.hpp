#pragma once

#include <cstddef>
#include <vector>

namespace pidq {

// Dense row-major matrix of probability mass. Just enough surface for
// marginal tables; anything heavier belongs in the caller.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), v(static_cast<size_t>(r) * c, fill) {}

  double& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }

  double sum() const {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }

  std::vector<double> row_sums() const {
    std::vector<double> s(rows, 0.0);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) s[r] += at(r, c);
    return s;
  }

  std::vector<double> col_sums() const {
    std::vector<double> s(cols, 0.0);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) s[c] += at(r, c);
    return s;
  }
};

}  // namespace pidq
