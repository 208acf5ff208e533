#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "kepla/errors.hpp"

namespace kepla {

// Dense row-major matrix of 64-bit floats. Vectors are n x 1 columns by
// convention, scalars are 1 x 1. All model math runs in double precision.
struct Tensor {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;
  bool requires_grad = false;

  Tensor() = default;
  Tensor(int r, int c, double fill = 0.0, bool rg = false);

  static Tensor scalar(double x, bool rg = false);
  static Tensor column(std::vector<double> x, bool rg = false);
  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> data,
                          bool rg = false);

  double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }

  int size() const { return rows * cols; }
  bool empty() const { return size() == 0; }
  bool is_scalar() const { return rows == 1 && cols == 1; }
  bool is_column() const { return cols == 1; }
  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }

  // Value of a 1x1 tensor.
  double item() const;

  // Extracts column c as an n x 1 tensor.
  Tensor column_at(int c) const;

  bool all_finite() const;
};

// Validity flags over one axis (columns of a matrix, rows of a column
// vector); nonzero = valid.
using Mask = std::vector<std::uint8_t>;

Mask all_valid(int n);
int count_valid(const Mask& m);
bool fully_valid(const Mask& m);

}  // namespace kepla
