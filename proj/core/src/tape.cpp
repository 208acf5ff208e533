#include "kepla/tape.hpp"

#include <cmath>
#include <limits>

namespace kepla {

namespace {

// C = A * B. i-k-j order keeps the inner loop contiguous; rows of A coming
// from one-hot selection matrices are mostly zero, so skipping zero a saves
// the whole inner pass.
void gemm_nn(const Tensor& a, const Tensor& b, Tensor& c) {
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = &a.v[static_cast<std::size_t>(i) * a.cols];
    double* crow = &c.v[static_cast<std::size_t>(i) * c.cols];
    for (int k = 0; k < a.cols; ++k) {
      const double av = arow[k];
      if (av == 0.0) {
        continue;
      }
      const double* brow = &b.v[static_cast<std::size_t>(k) * b.cols];
      for (int j = 0; j < b.cols; ++j) {
        crow[j] += av * brow[j];
      }
    }
  }
}

// C += A * B^T.
void gemm_nt_acc(const Tensor& a, const Tensor& b, Tensor& c) {
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = &a.v[static_cast<std::size_t>(i) * a.cols];
    double* crow = &c.v[static_cast<std::size_t>(i) * c.cols];
    for (int j = 0; j < b.rows; ++j) {
      const double* brow = &b.v[static_cast<std::size_t>(j) * b.cols];
      double acc = 0.0;
      for (int k = 0; k < a.cols; ++k) {
        acc += arow[k] * brow[k];
      }
      crow[j] += acc;
    }
  }
}

// C += A^T * B.
void gemm_tn_acc(const Tensor& a, const Tensor& b, Tensor& c) {
  for (int k = 0; k < a.rows; ++k) {
    const double* arow = &a.v[static_cast<std::size_t>(k) * a.cols];
    const double* brow = &b.v[static_cast<std::size_t>(k) * b.cols];
    for (int i = 0; i < a.cols; ++i) {
      const double av = arow[i];
      if (av == 0.0) {
        continue;
      }
      double* crow = &c.v[static_cast<std::size_t>(i) * c.cols];
      for (int j = 0; j < b.cols; ++j) {
        crow[j] += av * brow[j];
      }
    }
  }
}

double sign0(double x) {
  if (x > 0.0) return 1.0;
  if (x < 0.0) return -1.0;
  return 0.0;
}

}  // namespace

Var Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

const Tape::Node& Tape::node(Var x) const {
  if (x.id < 0 || x.id >= static_cast<int>(nodes_.size())) {
    throw ContractError("variable does not belong to this tape");
  }
  return nodes_[static_cast<std::size_t>(x.id)];
}

Tensor& Tape::grad_ref(int id) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (n.grad.empty() && n.val.size() > 0) {
    n.grad = Tensor(n.val.rows, n.val.cols);
  }
  return n.grad;
}

Var Tape::put(Tensor t) {
  Node n;
  n.op = Op::kLeaf;
  n.needs_grad = t.requires_grad;
  n.val = std::move(t);
  return push(std::move(n));
}

Var Tape::constant(Tensor t) {
  t.requires_grad = false;
  return put(std::move(t));
}

Var Tape::param(Tensor t) {
  t.requires_grad = true;
  return put(std::move(t));
}

const Tensor& Tape::value(Var x) const {
  return node(x).val;
}

Tensor Tape::grad(Var x) const {
  const Node& n = node(x);
  if (n.grad.empty()) {
    return Tensor(n.val.rows, n.val.cols);
  }
  return n.grad;
}

Var Tape::matmul(Var a, Var b) {
  const Node& na = node(a);
  const Node& nb = node(b);
  if (na.val.cols != nb.val.rows) {
    throw DimensionError("matmul inner dimensions disagree");
  }
  Node n;
  n.op = Op::kMatmul;
  n.srcs = {a.id, b.id};
  n.needs_grad = na.needs_grad || nb.needs_grad;
  n.val = Tensor(na.val.rows, nb.val.cols);
  gemm_nn(na.val, nb.val, n.val);
  return push(std::move(n));
}

Var Tape::add(Var a, Var b) {
  const Node& na = node(a);
  const Node& nb = node(b);
  const bool bias = nb.val.cols == 1 && na.val.rows == nb.val.rows && na.val.cols != 1;
  if (!na.val.same_shape(nb.val) && !bias) {
    throw DimensionError("add requires equal shapes or an r x 1 bias");
  }
  Node n;
  n.op = na.val.same_shape(nb.val) ? Op::kAdd : Op::kAddBias;
  n.srcs = {a.id, b.id};
  n.needs_grad = na.needs_grad || nb.needs_grad;
  n.val = na.val;
  n.val.requires_grad = false;
  if (n.op == Op::kAdd) {
    for (int i = 0; i < n.val.size(); ++i) {
      n.val.v[i] += nb.val.v[i];
    }
  } else {
    for (int r = 0; r < n.val.rows; ++r) {
      const double bb = nb.val.v[r];
      for (int c = 0; c < n.val.cols; ++c) {
        n.val.at(r, c) += bb;
      }
    }
  }
  return push(std::move(n));
}

Var Tape::hadamard(Var a, Var b) {
  const Node& na = node(a);
  const Node& nb = node(b);
  if (!na.val.same_shape(nb.val)) {
    throw DimensionError("hadamard requires equal shapes");
  }
  Node n;
  n.op = Op::kHadamard;
  n.srcs = {a.id, b.id};
  n.needs_grad = na.needs_grad || nb.needs_grad;
  n.val = na.val;
  n.val.requires_grad = false;
  for (int i = 0; i < n.val.size(); ++i) {
    n.val.v[i] *= nb.val.v[i];
  }
  return push(std::move(n));
}

Var Tape::scale(Var a, double c) {
  const Node& na = node(a);
  Node n;
  n.op = Op::kScale;
  n.srcs = {a.id};
  n.needs_grad = na.needs_grad;
  n.factor = c;
  n.val = na.val;
  n.val.requires_grad = false;
  for (double& x : n.val.v) {
    x *= c;
  }
  return push(std::move(n));
}

Var Tape::tanh(Var a) {
  const Node& na = node(a);
  Node n;
  n.op = Op::kTanh;
  n.srcs = {a.id};
  n.needs_grad = na.needs_grad;
  n.val = na.val;
  n.val.requires_grad = false;
  for (double& x : n.val.v) {
    x = std::tanh(x);
  }
  return push(std::move(n));
}

Var Tape::relu(Var a) {
  const Node& na = node(a);
  Node n;
  n.op = Op::kRelu;
  n.srcs = {a.id};
  n.needs_grad = na.needs_grad;
  n.val = na.val;
  n.val.requires_grad = false;
  for (double& x : n.val.v) {
    x = x > 0.0 ? x : 0.0;
  }
  return push(std::move(n));
}

Var Tape::softmax_masked(Var a, const Mask& mask) {
  const Node& na = node(a);
  if (na.val.cols != 1) {
    throw DimensionError("softmax_masked expects an n x 1 vector");
  }
  if (static_cast<int>(mask.size()) != na.val.rows) {
    throw DimensionError("softmax_masked mask length must match the vector");
  }
  if (count_valid(mask) == 0) {
    throw DegenerateInputError("softmax_masked over an empty mask");
  }
  Node n;
  n.op = Op::kSoftmaxMasked;
  n.srcs = {a.id};
  n.needs_grad = na.needs_grad;
  n.mask = mask;
  n.val = Tensor(na.val.rows, 1);
  double hi = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < na.val.rows; ++i) {
    if (mask[i] && na.val.v[i] > hi) {
      hi = na.val.v[i];
    }
  }
  double denom = 0.0;
  for (int i = 0; i < na.val.rows; ++i) {
    if (mask[i]) {
      n.val.v[i] = std::exp(na.val.v[i] - hi);
      denom += n.val.v[i];
    }
  }
  for (int i = 0; i < na.val.rows; ++i) {
    if (mask[i]) {
      n.val.v[i] /= denom;
    }
  }
  return push(std::move(n));
}

Var Tape::mean_masked(Var a, const Mask& mask) {
  const Node& na = node(a);
  if (static_cast<int>(mask.size()) != na.val.cols) {
    throw DimensionError("mean_masked mask length must match column count");
  }
  const int k = count_valid(mask);
  if (k == 0) {
    throw DegenerateInputError("mean_masked over an empty mask");
  }
  Node n;
  n.op = Op::kMeanMasked;
  n.srcs = {a.id};
  n.needs_grad = na.needs_grad;
  n.mask = mask;
  n.val = Tensor(na.val.rows, 1);
  for (int r = 0; r < na.val.rows; ++r) {
    double acc = 0.0;
    for (int c = 0; c < na.val.cols; ++c) {
      if (mask[c]) {
        acc += na.val.at(r, c);
      }
    }
    n.val.v[r] = acc / k;
  }
  return push(std::move(n));
}

Var Tape::l2_norm(Var a) {
  const Node& na = node(a);
  Node n;
  n.op = Op::kL2Norm;
  n.srcs = {a.id};
  n.needs_grad = na.needs_grad;
  double acc = 0.0;
  for (double x : na.val.v) {
    acc += x * x;
  }
  n.val = Tensor::scalar(std::sqrt(acc));
  return push(std::move(n));
}

Var Tape::concat(const std::vector<Var>& parts) {
  if (parts.empty()) {
    throw DimensionError("concat of zero vectors");
  }
  Node n;
  n.op = Op::kConcat;
  int total = 0;
  for (Var p : parts) {
    const Node& np = node(p);
    if (np.val.cols != 1) {
      throw DimensionError("concat expects column vectors");
    }
    n.srcs.push_back(p.id);
    n.needs_grad = n.needs_grad || np.needs_grad;
    n.arg_idx.push_back(total);
    total += np.val.rows;
  }
  n.val = Tensor(total, 1);
  for (std::size_t i = 0; i < n.srcs.size(); ++i) {
    const Tensor& part = nodes_[static_cast<std::size_t>(n.srcs[i])].val;
    for (int r = 0; r < part.rows; ++r) {
      n.val.v[static_cast<std::size_t>(n.arg_idx[i]) + r] = part.v[r];
    }
  }
  return push(std::move(n));
}

Var Tape::transpose(Var a) {
  const Node& na = node(a);
  Node n;
  n.op = Op::kTranspose;
  n.srcs = {a.id};
  n.needs_grad = na.needs_grad;
  n.val = Tensor(na.val.cols, na.val.rows);
  for (int r = 0; r < na.val.rows; ++r) {
    for (int c = 0; c < na.val.cols; ++c) {
      n.val.at(c, r) = na.val.at(r, c);
    }
  }
  return push(std::move(n));
}

Var Tape::mae(Var a, Var b) {
  const Node& na = node(a);
  const Node& nb = node(b);
  if (!na.val.same_shape(nb.val)) {
    throw DimensionError("mae requires equal shapes");
  }
  if (na.val.size() == 0) {
    throw DegenerateInputError("mae over zero elements");
  }
  Node n;
  n.op = Op::kMae;
  n.srcs = {a.id, b.id};
  n.needs_grad = na.needs_grad || nb.needs_grad;
  double acc = 0.0;
  for (int i = 0; i < na.val.size(); ++i) {
    acc += std::fabs(na.val.v[i] - nb.val.v[i]);
  }
  n.val = Tensor::scalar(acc / na.val.size());
  return push(std::move(n));
}

Var Tape::sum_columns(Var a) {
  const Node& na = node(a);
  Node n;
  n.op = Op::kSumColumns;
  n.srcs = {a.id};
  n.needs_grad = na.needs_grad;
  n.val = Tensor(na.val.rows, 1);
  for (int r = 0; r < na.val.rows; ++r) {
    double acc = 0.0;
    for (int c = 0; c < na.val.cols; ++c) {
      acc += na.val.at(r, c);
    }
    n.val.v[r] = acc;
  }
  return push(std::move(n));
}

void Tape::backward(Var root) {
  if (backward_done_) {
    throw ContractError("backward() already ran on this tape");
  }
  const Node& nr = node(root);
  if (!nr.val.is_scalar()) {
    throw ContractError("backward() root must be 1 x 1");
  }
  backward_done_ = true;
  grad_ref(root.id).v[0] = 1.0;

  for (int id = root.id; id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.op == Op::kLeaf || !n.needs_grad || n.grad.empty()) {
      continue;
    }
    const Tensor& g = n.grad;
    switch (n.op) {
      case Op::kMatmul: {
        const Node& na = nodes_[static_cast<std::size_t>(n.srcs[0])];
        const Node& nb = nodes_[static_cast<std::size_t>(n.srcs[1])];
        if (na.needs_grad) {
          gemm_nt_acc(g, nb.val, grad_ref(n.srcs[0]));
        }
        if (nb.needs_grad) {
          gemm_tn_acc(na.val, g, grad_ref(n.srcs[1]));
        }
        break;
      }
      case Op::kAdd: {
        for (int s = 0; s < 2; ++s) {
          if (nodes_[static_cast<std::size_t>(n.srcs[s])].needs_grad) {
            Tensor& d = grad_ref(n.srcs[s]);
            for (int i = 0; i < g.size(); ++i) {
              d.v[i] += g.v[i];
            }
          }
        }
        break;
      }
      case Op::kAddBias: {
        if (nodes_[static_cast<std::size_t>(n.srcs[0])].needs_grad) {
          Tensor& d = grad_ref(n.srcs[0]);
          for (int i = 0; i < g.size(); ++i) {
            d.v[i] += g.v[i];
          }
        }
        if (nodes_[static_cast<std::size_t>(n.srcs[1])].needs_grad) {
          Tensor& d = grad_ref(n.srcs[1]);
          for (int r = 0; r < g.rows; ++r) {
            double acc = 0.0;
            for (int c = 0; c < g.cols; ++c) {
              acc += g.at(r, c);
            }
            d.v[r] += acc;
          }
        }
        break;
      }
      case Op::kHadamard: {
        const Node& na = nodes_[static_cast<std::size_t>(n.srcs[0])];
        const Node& nb = nodes_[static_cast<std::size_t>(n.srcs[1])];
        if (na.needs_grad) {
          Tensor& d = grad_ref(n.srcs[0]);
          for (int i = 0; i < g.size(); ++i) {
            d.v[i] += g.v[i] * nb.val.v[i];
          }
        }
        if (nb.needs_grad) {
          Tensor& d = grad_ref(n.srcs[1]);
          for (int i = 0; i < g.size(); ++i) {
            d.v[i] += g.v[i] * na.val.v[i];
          }
        }
        break;
      }
      case Op::kScale: {
        Tensor& d = grad_ref(n.srcs[0]);
        for (int i = 0; i < g.size(); ++i) {
          d.v[i] += n.factor * g.v[i];
        }
        break;
      }
      case Op::kTanh: {
        Tensor& d = grad_ref(n.srcs[0]);
        for (int i = 0; i < g.size(); ++i) {
          d.v[i] += g.v[i] * (1.0 - n.val.v[i] * n.val.v[i]);
        }
        break;
      }
      case Op::kRelu: {
        const Node& na = nodes_[static_cast<std::size_t>(n.srcs[0])];
        Tensor& d = grad_ref(n.srcs[0]);
        for (int i = 0; i < g.size(); ++i) {
          if (na.val.v[i] > 0.0) {
            d.v[i] += g.v[i];
          }
        }
        break;
      }
      case Op::kSoftmaxMasked: {
        Tensor& d = grad_ref(n.srcs[0]);
        double dot = 0.0;
        for (int i = 0; i < g.rows; ++i) {
          if (n.mask[i]) {
            dot += g.v[i] * n.val.v[i];
          }
        }
        for (int i = 0; i < g.rows; ++i) {
          if (n.mask[i]) {
            d.v[i] += n.val.v[i] * (g.v[i] - dot);
          }
        }
        break;
      }
      case Op::kMeanMasked: {
        const Node& na = nodes_[static_cast<std::size_t>(n.srcs[0])];
        Tensor& d = grad_ref(n.srcs[0]);
        const int k = count_valid(n.mask);
        for (int r = 0; r < na.val.rows; ++r) {
          const double gr = g.v[r] / k;
          for (int c = 0; c < na.val.cols; ++c) {
            if (n.mask[c]) {
              d.at(r, c) += gr;
            }
          }
        }
        break;
      }
      case Op::kL2Norm: {
        const Node& na = nodes_[static_cast<std::size_t>(n.srcs[0])];
        const double y = n.val.v[0];
        if (y != 0.0) {
          Tensor& d = grad_ref(n.srcs[0]);
          const double s = g.v[0] / y;
          for (int i = 0; i < na.val.size(); ++i) {
            d.v[i] += s * na.val.v[i];
          }
        }
        break;
      }
      case Op::kConcat: {
        for (std::size_t i = 0; i < n.srcs.size(); ++i) {
          const Node& np = nodes_[static_cast<std::size_t>(n.srcs[i])];
          if (!np.needs_grad) {
            continue;
          }
          Tensor& d = grad_ref(n.srcs[i]);
          for (int r = 0; r < np.val.rows; ++r) {
            d.v[r] += g.v[static_cast<std::size_t>(n.arg_idx[i]) + r];
          }
        }
        break;
      }
      case Op::kTranspose: {
        Tensor& d = grad_ref(n.srcs[0]);
        for (int r = 0; r < g.rows; ++r) {
          for (int c = 0; c < g.cols; ++c) {
            d.at(c, r) += g.at(r, c);
          }
        }
        break;
      }
      case Op::kMae: {
        const Node& na = nodes_[static_cast<std::size_t>(n.srcs[0])];
        const Node& nb = nodes_[static_cast<std::size_t>(n.srcs[1])];
        const double s = g.v[0] / na.val.size();
        if (na.needs_grad) {
          Tensor& d = grad_ref(n.srcs[0]);
          for (int i = 0; i < na.val.size(); ++i) {
            d.v[i] += s * sign0(na.val.v[i] - nb.val.v[i]);
          }
        }
        if (nb.needs_grad) {
          Tensor& d = grad_ref(n.srcs[1]);
          for (int i = 0; i < na.val.size(); ++i) {
            d.v[i] -= s * sign0(na.val.v[i] - nb.val.v[i]);
          }
        }
        break;
      }
      case Op::kSumColumns: {
        const Node& na = nodes_[static_cast<std::size_t>(n.srcs[0])];
        Tensor& d = grad_ref(n.srcs[0]);
        for (int r = 0; r < na.val.rows; ++r) {
          for (int c = 0; c < na.val.cols; ++c) {
            d.at(r, c) += g.v[r];
          }
        }
        break;
      }
      case Op::kLeaf:
        break;
    }
  }
}

}  // namespace kepla
