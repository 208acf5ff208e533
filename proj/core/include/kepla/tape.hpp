#pragma once

#include <vector>

#include "kepla/tensor.hpp"

namespace kepla {

// Handle into a Tape. Only valid for the tape that produced it.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Reverse-mode autodiff tape over Tensor values.
//
// Every primitive evaluates eagerly and records one node; creation order is
// the topological order, so backward() is a single reverse sweep. A tape is
// single-shot: build a graph, call backward() once on a scalar root, read
// gradients, then discard the tape.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf insertion. put() honours t.requires_grad; the wrappers force it.
  Var put(Tensor t);
  Var constant(Tensor t);
  Var param(Tensor t);

  const Tensor& value(Var x) const;
  // Gradient of the last backward() root with respect to x. Zeros if x did
  // not participate or backward() has not run.
  Tensor grad(Var x) const;

  // C = A * B, (r x k) * (k x c).
  Var matmul(Var a, Var b);
  // Elementwise A + B for identical shapes, or column broadcast when B is
  // r x 1 and A is r x c (bias add).
  Var add(Var a, Var b);
  // Elementwise A * B.
  Var hadamard(Var a, Var b);
  // c * A for a compile-time constant c (not differentiated through c).
  Var scale(Var a, double c);
  Var tanh(Var a);
  Var relu(Var a);
  // Softmax over the valid entries of an n x 1 vector; masked entries are
  // exactly zero in the output. mask.size() must equal n.
  Var softmax_masked(Var a, const Mask& mask);
  // Row-wise mean over valid columns: (r x c, mask of c) -> r x 1.
  Var mean_masked(Var a, const Mask& mask);
  // Frobenius norm -> 1 x 1.
  Var l2_norm(Var a);
  // Stacks column vectors top to bottom -> (sum n_i) x 1.
  Var concat(const std::vector<Var>& parts);
  Var transpose(Var a);
  // Mean absolute error between same-shape tensors -> 1 x 1.
  Var mae(Var a, Var b);
  // Sums across columns: r x c -> r x 1.
  Var sum_columns(Var a);

  // Accumulates d(root)/d(node) for every recorded node; root must be 1 x 1.
  // Calling twice on the same tape is an error.
  void backward(Var root);

  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  enum class Op {
    kLeaf,
    kMatmul,
    kAdd,
    kAddBias,
    kHadamard,
    kScale,
    kTanh,
    kRelu,
    kSoftmaxMasked,
    kMeanMasked,
    kL2Norm,
    kConcat,
    kTranspose,
    kMae,
    kSumColumns,
  };

  struct Node {
    Op op = Op::kLeaf;
    std::vector<int> srcs;
    Tensor val;
    Tensor grad;          // allocated lazily during backward
    bool needs_grad = false;
    Mask mask;            // masked ops
    double factor = 0.0;  // scale
    std::vector<int> arg_idx;  // concat offsets
  };

  Var push(Node n);
  const Node& node(Var x) const;
  Tensor& grad_ref(int id);

  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

}  // namespace kepla
