#include "kepla/adam.hpp"

#include <cmath>

namespace kepla {

void adam_step(Tensor& param, const Tensor& grad, AdamState& state,
               const AdamConfig& cfg) {
  if (!param.same_shape(grad)) {
    throw DimensionError("adam_step gradient shape must match the parameter");
  }
  if (state.m.empty()) {
    state.m = Tensor(param.rows, param.cols);
    state.v = Tensor(param.rows, param.cols);
  }
  if (!state.m.same_shape(param)) {
    throw DimensionError("adam_step state shape must match the parameter");
  }
  state.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (int i = 0; i < param.size(); ++i) {
    const double g = grad.v[i];
    state.m.v[i] = cfg.beta1 * state.m.v[i] + (1.0 - cfg.beta1) * g;
    state.v.v[i] = cfg.beta2 * state.v.v[i] + (1.0 - cfg.beta2) * g * g;
    const double mhat = state.m.v[i] / bc1;
    const double vhat = state.v.v[i] / bc2;
    param.v[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

}  // namespace kepla
