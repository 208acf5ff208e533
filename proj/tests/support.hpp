#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "kepla/rng.hpp"
#include "kepla/tape.hpp"
#include "kepla/tensor.hpp"

namespace kepla::testing {

inline Tensor random_tensor(Rng& rng, int rows, int cols, double lo = -1.0,
                            double hi = 1.0) {
  Tensor t(rows, cols);
  for (double& x : t.v) {
    x = rng.uniform(lo, hi);
  }
  return t;
}

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
  double worst = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::fabs(a.v[i] - b.v[i]));
  }
  return worst;
}

// Builds a scalar expression from leaf tensors. The builder receives a fresh
// tape plus one Var per input (in order) and returns the root.
using ScalarBuilder = std::function<Var(Tape&, const std::vector<Var>&)>;

inline double eval_scalar(const std::vector<Tensor>& inputs,
                          const ScalarBuilder& build) {
  Tape tape;
  std::vector<Var> vars;
  vars.reserve(inputs.size());
  for (const Tensor& t : inputs) {
    vars.push_back(tape.constant(t));
  }
  return tape.value(build(tape, vars)).item();
}

// Central finite differences against reverse-mode gradients over every
// element of every input. Returns the worst relative error, with the
// denominator floored so near-zero gradients compare absolutely.
inline double finite_diff_check(const std::vector<Tensor>& inputs,
                                const ScalarBuilder& build, double h = 1e-6) {
  Tape tape;
  std::vector<Var> vars;
  vars.reserve(inputs.size());
  for (const Tensor& t : inputs) {
    vars.push_back(tape.param(t));
  }
  tape.backward(build(tape, vars));

  double worst = 0.0;
  for (std::size_t which = 0; which < inputs.size(); ++which) {
    const Tensor analytic = tape.grad(vars[which]);
    std::vector<Tensor> probe = inputs;
    for (int i = 0; i < probe[which].size(); ++i) {
      const double keep = probe[which].v[i];
      probe[which].v[i] = keep + h;
      const double fp = eval_scalar(probe, build);
      probe[which].v[i] = keep - h;
      const double fm = eval_scalar(probe, build);
      probe[which].v[i] = keep;
      const double fd = (fp - fm) / (2.0 * h);
      const double a = analytic.v[i];
      const double err =
          std::fabs(a - fd) / std::max({1e-8, std::fabs(a), std::fabs(fd)});
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace kepla::testing
