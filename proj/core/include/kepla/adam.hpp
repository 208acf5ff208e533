#pragma once

#include <cstdint>

#include "kepla/tensor.hpp"

namespace kepla {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First and second moment estimates for one parameter tensor. t counts the
// steps already applied and drives bias correction.
struct AdamState {
  Tensor m;
  Tensor v;
  std::uint64_t t = 0;

  explicit AdamState(const Tensor& shape_like)
      : m(shape_like.rows, shape_like.cols), v(shape_like.rows, shape_like.cols) {}
  AdamState() = default;
};

// One bias-corrected Adam update, in place on param.
void adam_step(Tensor& param, const Tensor& grad, AdamState& state,
               const AdamConfig& cfg);

}  // namespace kepla
