#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "kepla/config.hpp"
#include "kepla/kg.hpp"
#include "kepla/tensor.hpp"

namespace kepla {

// Fixed architecture constants not exposed through RunConfig.
inline constexpr int kDecoderHidden = 512;
inline constexpr int kProteinDnnLayers = 2;
inline constexpr int kGcnLayers = 3;

// Every trainable tensor of the model, in plain storage. The canonical
// order (and the names used by checkpoints and the optimizer) is the
// visit order of for_each_param.
struct ModelParams {
  // Protein side. residue_table is d_p x 23 and exists only for the
  // trainable provider; with a file provider it stays empty.
  Tensor residue_table;
  std::vector<std::pair<Tensor, Tensor>> dnn;  // d_p -> D, D -> D
  Tensor protein_head_w;                       // D x D
  Tensor protein_head_b;                       // D x 1
  // Ligand side.
  Tensor ligand_input_w;                       // D x 74, no bias
  std::vector<std::pair<Tensor, Tensor>> gcn;  // three D -> D layers
  Tensor ligand_head_w;                        // D x D
  Tensor ligand_head_b;                        // D x 1
  // Affinity decoder: 2D -> hidden -> 1 with one ReLU.
  Tensor decoder_hidden_w;  // hidden x 2D
  Tensor decoder_hidden_b;  // hidden x 1
  Tensor decoder_out_w;     // 1 x hidden
  Tensor decoder_out_b;     // 1 x 1
  // Knowledge-embedding tables, one column per tail entity / relation.
  Tensor kg_tails;
  Tensor kg_relations;

  bool has_residue_table() const { return !residue_table.empty(); }

  // Visits every parameter with its canonical name, in a fixed order.
  void for_each_param(
      const std::function<void(const std::string&, Tensor&)>& fn);
  void for_each_param(
      const std::function<void(const std::string&, const Tensor&)>& fn) const;
  int param_count() const;
};

// Fresh parameters. Dense weights draw from U[-1/sqrt(fan_in),
// +1/sqrt(fan_in)] with zero biases, the residue table from
// U[-1/sqrt(23), +1/sqrt(23)], and the knowledge tables from
// U[-0.5/sqrt(D), +0.5/sqrt(D)]. Consumption order is the canonical
// parameter order, so initialization is a pure function of
// (config, d_p, kg shape). d_p is the residue-embedding width: config.d
// for the trainable provider, the file's width otherwise.
ModelParams init_model_params(const RunConfig& config, int d_p,
                              const KnowledgeGraph& kg);

}  // namespace kepla
