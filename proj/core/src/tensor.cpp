#include "kepla/tensor.hpp"

#include <cmath>

namespace kepla {

Tensor::Tensor(int r, int c, double fill, bool rg)
    : rows(r), cols(c), requires_grad(rg) {
  if (r < 0 || c < 0) {
    throw DimensionError("tensor dimensions must be non-negative");
  }
  v.assign(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill);
}

Tensor Tensor::scalar(double x, bool rg) {
  Tensor t(1, 1, x, rg);
  return t;
}

Tensor Tensor::column(std::vector<double> x, bool rg) {
  Tensor t;
  t.rows = static_cast<int>(x.size());
  t.cols = 1;
  t.v = std::move(x);
  t.requires_grad = rg;
  return t;
}

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> data,
                         bool rg) {
  Tensor t;
  t.rows = static_cast<int>(data.size());
  t.cols = t.rows == 0 ? 0 : static_cast<int>(data.begin()->size());
  t.requires_grad = rg;
  t.v.reserve(static_cast<std::size_t>(t.rows) * t.cols);
  for (const auto& row : data) {
    if (static_cast<int>(row.size()) != t.cols) {
      throw DimensionError("ragged row lengths in tensor literal");
    }
    t.v.insert(t.v.end(), row.begin(), row.end());
  }
  return t;
}

double Tensor::item() const {
  if (!is_scalar()) {
    throw DimensionError("item() requires a 1x1 tensor");
  }
  return v[0];
}

Tensor Tensor::column_at(int c) const {
  if (c < 0 || c >= cols) {
    throw DimensionError("column index out of range");
  }
  Tensor out(rows, 1);
  for (int r = 0; r < rows; ++r) {
    out.v[r] = at(r, c);
  }
  return out;
}

bool Tensor::all_finite() const {
  for (double x : v) {
    if (!std::isfinite(x)) {
      return false;
    }
  }
  return true;
}

Mask all_valid(int n) {
  return Mask(static_cast<std::size_t>(n), 1);
}

int count_valid(const Mask& m) {
  int k = 0;
  for (auto b : m) {
    k += b ? 1 : 0;
  }
  return k;
}

bool fully_valid(const Mask& m) {
  return count_valid(m) == static_cast<int>(m.size());
}

}  // namespace kepla
