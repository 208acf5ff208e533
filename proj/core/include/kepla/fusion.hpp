#pragma once

#include <optional>
#include <vector>

#include "kepla/encoders.hpp"
#include "kepla/tape.hpp"

namespace kepla {

// Pairwise fragment-atom interaction scores with the validity masks of
// both axes. Downstream reductions ignore masked rows/columns.
struct InteractionMap {
  Var v;        // M x N
  Mask p_mask;  // fragment validity, length M
  Mask d_mask;  // atom validity, length N
};

// V = H_p^T H_d over the local representations.
InteractionMap interaction_map(Tape& tape, const EncodedLocal& protein,
                               const EncodedLocal& ligand);

// Probability vectors over unmasked positions; masked entries exactly 0.
struct AttentionWeights {
  Var alpha_p;  // M x 1
  Var alpha_d;  // N x 1
};

// alpha_p = softmax((1/sqrt(d)) * tanh(mean over valid atoms of each
// fragment row)); alpha_d symmetric through the transposed map.
AttentionWeights cross_attention(Tape& tape, const InteractionMap& map, int d);

// f = H_p alpha_p (+concat+) H_d alpha_d, protein half first -> 2D x 1.
Var joint_representation(Tape& tape, Var h_p, Var h_d,
                         const AttentionWeights& attention);

// Affinity decoder: 2D -> hidden -> 1 with one ReLU in between and no
// output activation.
struct DecoderParams {
  DenseLayer hidden;
  DenseLayer out;
};

Var predict_affinity(Tape& tape, Var f, const DecoderParams& decoder);

// Mean absolute error over a batch of predictions (B x 1 columns).
Var pla_loss(Tape& tape, Var predictions, Var labels);

// L = L_PLA + beta * L_KGE + lambda * ||Theta||_2^2. The KGE term is
// skipped when absent or beta is 0; the penalty sums squared entries of
// every supplied parameter.
Var total_loss(Tape& tape, Var l_pla, std::optional<Var> l_kge, double beta,
               double lambda, const std::vector<Var>& params);

// Joint-representation strategies: full cross attention, one-sided
// attention (the other side mean-pooled), or attention-free max-pool
// concatenation. The non-cross paths exist as ablation baselines.
enum class FusionKind {
  kCross,
  kProteinAttention,
  kLigandAttention,
  kConcat,
};

// Per-row maximum over valid columns: r x c -> r x 1. The subgradient
// routes to the first maximizing valid column.
Var max_pool_valid(Tape& tape, Var h, const Mask& mask);

// Softmax((1/sqrt(d)) * tanh(local^T global)) over valid columns.
Var one_side_attention(Tape& tape, Var local, Var global, const Mask& mask,
                       int d);

struct FusionResult {
  Var f;  // 2D x 1
  std::optional<Var> alpha_p;
  std::optional<Var> alpha_d;
};

FusionResult fuse(Tape& tape, const EncodedLocal& protein,
                  const EncodedLocal& ligand, FusionKind kind);

}  // namespace kepla
