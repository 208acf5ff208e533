#include "kepla/fusion.hpp"

#include <cmath>

#include "kepla/errors.hpp"

namespace kepla {

InteractionMap interaction_map(Tape& tape, const EncodedLocal& protein,
                               const EncodedLocal& ligand) {
  const Tensor& hp = tape.value(protein.h);
  const Tensor& hd = tape.value(ligand.h);
  if (hp.rows != hd.rows) {
    throw DimensionError("feature width mismatch between protein (" +
                         std::to_string(hp.rows) + ") and ligand (" +
                         std::to_string(hd.rows) + ")");
  }
  InteractionMap map;
  map.v = tape.matmul(tape.transpose(protein.h), ligand.h);
  map.p_mask = protein.mask;
  map.d_mask = ligand.mask;
  return map;
}

AttentionWeights cross_attention(Tape& tape, const InteractionMap& map,
                                 int d) {
  if (d <= 0) throw ContractError("feature width must be positive");
  if (count_valid(map.p_mask) == 0 || count_valid(map.d_mask) == 0) {
    throw DegenerateInputError("attention over a fully masked axis");
  }
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  AttentionWeights out;
  out.alpha_p = tape.softmax_masked(
      tape.scale(tape.tanh(tape.mean_masked(map.v, map.d_mask)), inv_sqrt_d),
      map.p_mask);
  out.alpha_d = tape.softmax_masked(
      tape.scale(
          tape.tanh(tape.mean_masked(tape.transpose(map.v), map.p_mask)),
          inv_sqrt_d),
      map.d_mask);
  return out;
}

Var joint_representation(Tape& tape, Var h_p, Var h_d,
                         const AttentionWeights& attention) {
  return tape.concat({tape.matmul(h_p, attention.alpha_p),
                      tape.matmul(h_d, attention.alpha_d)});
}

Var predict_affinity(Tape& tape, Var f, const DecoderParams& decoder) {
  const Var hidden =
      tape.relu(tape.add(tape.matmul(decoder.hidden.w, f), decoder.hidden.b));
  return tape.add(tape.matmul(decoder.out.w, hidden), decoder.out.b);
}

Var pla_loss(Tape& tape, Var predictions, Var labels) {
  const Tensor& p = tape.value(predictions);
  if (p.empty()) throw DegenerateInputError("empty prediction batch");
  return tape.mae(predictions, labels);
}

Var total_loss(Tape& tape, Var l_pla, std::optional<Var> l_kge, double beta,
               double lambda, const std::vector<Var>& params) {
  if (beta < 0.0 || lambda < 0.0) {
    throw ContractError("loss trade-off coefficients must be nonnegative");
  }
  Var loss = l_pla;
  if (l_kge && beta > 0.0) {
    loss = tape.add(loss, tape.scale(*l_kge, beta));
  }
  if (lambda > 0.0 && !params.empty()) {
    Var penalty;
    bool first = true;
    for (Var p : params) {
      const Var norm = tape.l2_norm(p);
      const Var sq = tape.hadamard(norm, norm);
      penalty = first ? sq : tape.add(penalty, sq);
      first = false;
    }
    loss = tape.add(loss, tape.scale(penalty, lambda));
  }
  return loss;
}

Var max_pool_valid(Tape& tape, Var h, const Mask& mask) {
  const Tensor& val = tape.value(h);
  if (static_cast<int>(mask.size()) != val.cols) {
    throw DimensionError("mask length must match column count");
  }
  if (count_valid(mask) == 0) {
    throw DegenerateInputError("max pooling over a fully masked matrix");
  }
  // Constant indicator of the first per-row argmax among valid columns;
  // multiplying by it and summing columns realizes the max and its
  // subgradient within the fixed primitive set.
  Tensor indicator(val.rows, val.cols, 0.0);
  for (int i = 0; i < val.rows; ++i) {
    int best = -1;
    for (int j = 0; j < val.cols; ++j) {
      if (!mask[static_cast<std::size_t>(j)]) continue;
      if (best < 0 || val.at(i, j) > val.at(i, best)) best = j;
    }
    indicator.at(i, best) = 1.0;
  }
  return tape.sum_columns(tape.hadamard(h, tape.constant(indicator)));
}

Var one_side_attention(Tape& tape, Var local, Var global, const Mask& mask,
                       int d) {
  if (d <= 0) throw ContractError("feature width must be positive");
  const Var scores = tape.matmul(tape.transpose(local), global);
  return tape.softmax_masked(
      tape.scale(tape.tanh(scores), 1.0 / std::sqrt(static_cast<double>(d))),
      mask);
}

FusionResult fuse(Tape& tape, const EncodedLocal& protein,
                  const EncodedLocal& ligand, FusionKind kind) {
  const Tensor& hp = tape.value(protein.h);
  const Tensor& hd = tape.value(ligand.h);
  if (hp.rows != hd.rows) {
    throw DimensionError("feature width mismatch between protein and ligand");
  }
  const int d = hp.rows;
  FusionResult out;
  switch (kind) {
    case FusionKind::kCross: {
      const InteractionMap map = interaction_map(tape, protein, ligand);
      const AttentionWeights aw = cross_attention(tape, map, d);
      out.f = joint_representation(tape, protein.h, ligand.h, aw);
      out.alpha_p = aw.alpha_p;
      out.alpha_d = aw.alpha_d;
      break;
    }
    case FusionKind::kProteinAttention: {
      const Var global_d = tape.mean_masked(ligand.h, ligand.mask);
      const Var alpha_p =
          one_side_attention(tape, protein.h, global_d, protein.mask, d);
      out.f = tape.concat({tape.matmul(protein.h, alpha_p), global_d});
      out.alpha_p = alpha_p;
      break;
    }
    case FusionKind::kLigandAttention: {
      const Var global_p = tape.mean_masked(protein.h, protein.mask);
      const Var alpha_d =
          one_side_attention(tape, ligand.h, global_p, ligand.mask, d);
      out.f = tape.concat({global_p, tape.matmul(ligand.h, alpha_d)});
      out.alpha_d = alpha_d;
      break;
    }
    case FusionKind::kConcat: {
      out.f = tape.concat({max_pool_valid(tape, protein.h, protein.mask),
                           max_pool_valid(tape, ligand.h, ligand.mask)});
      break;
    }
  }
  return out;
}

}  // namespace kepla
