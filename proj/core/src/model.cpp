#include "kepla/model.hpp"

#include <cmath>

#include "kepla/encoders.hpp"
#include "kepla/errors.hpp"
#include "kepla/rng.hpp"

namespace kepla {

namespace {

// Seed stream tag separating initialization draws from every other RNG
// consumer keyed off the run seed.
constexpr std::uint64_t kInitStream = 0x494e4954;  // "INIT"

// Templated so one traversal serves both const and mutable access.
template <typename Params, typename Fn>
void visit_params(Params& p, const Fn& fn) {
  if (!p.residue_table.empty()) fn("protein.table", p.residue_table);
  for (std::size_t i = 0; i < p.dnn.size(); ++i) {
    const std::string base = "protein.dnn" + std::to_string(i + 1);
    fn(base + ".w", p.dnn[i].first);
    fn(base + ".b", p.dnn[i].second);
  }
  fn("protein.head.w", p.protein_head_w);
  fn("protein.head.b", p.protein_head_b);
  fn("ligand.input.w", p.ligand_input_w);
  for (std::size_t i = 0; i < p.gcn.size(); ++i) {
    const std::string base = "ligand.gcn" + std::to_string(i + 1);
    fn(base + ".w", p.gcn[i].first);
    fn(base + ".b", p.gcn[i].second);
  }
  fn("ligand.head.w", p.ligand_head_w);
  fn("ligand.head.b", p.ligand_head_b);
  fn("decoder.hidden.w", p.decoder_hidden_w);
  fn("decoder.hidden.b", p.decoder_hidden_b);
  fn("decoder.out.w", p.decoder_out_w);
  fn("decoder.out.b", p.decoder_out_b);
  fn("kg.tails", p.kg_tails);
  fn("kg.relations", p.kg_relations);
}

Tensor uniform_tensor(Rng& rng, int rows, int cols, double bound) {
  Tensor t(rows, cols);
  for (double& x : t.v) x = rng.uniform(-bound, bound);
  return t;
}

Tensor dense_weight(Rng& rng, int rows, int fan_in) {
  return uniform_tensor(rng, rows, fan_in, 1.0 / std::sqrt(double(fan_in)));
}

}  // namespace

void ModelParams::for_each_param(
    const std::function<void(const std::string&, Tensor&)>& fn) {
  visit_params(*this, fn);
}

void ModelParams::for_each_param(
    const std::function<void(const std::string&, const Tensor&)>& fn) const {
  visit_params(*this, fn);
}

int ModelParams::param_count() const {
  int count = 0;
  for_each_param([&count](const std::string&, const Tensor&) { ++count; });
  return count;
}

ModelParams init_model_params(const RunConfig& config, int d_p,
                              const KnowledgeGraph& kg) {
  validate_run_config(config);
  if (d_p <= 0) throw ContractError("residue embedding width must be positive");
  const int d = config.d;
  Rng rng(mix_seed(config.seed, kInitStream));

  ModelParams p;
  if (config.provider == ProviderMode::kTrainable) {
    if (d_p != d) {
      throw ContractError(
          "trainable provider uses the latent width as its embedding width");
    }
    p.residue_table =
        uniform_tensor(rng, d_p, kResidueCount, 1.0 / std::sqrt(23.0));
  }
  p.dnn.reserve(kProteinDnnLayers);
  int fan_in = d_p;
  for (int i = 0; i < kProteinDnnLayers; ++i) {
    p.dnn.emplace_back(dense_weight(rng, d, fan_in), Tensor(d, 1));
    fan_in = d;
  }
  p.protein_head_w = dense_weight(rng, d, d);
  p.protein_head_b = Tensor(d, 1);
  p.ligand_input_w = dense_weight(rng, d, kAtomFeatureDim);
  p.gcn.reserve(kGcnLayers);
  for (int i = 0; i < kGcnLayers; ++i) {
    p.gcn.emplace_back(dense_weight(rng, d, d), Tensor(d, 1));
  }
  p.ligand_head_w = dense_weight(rng, d, d);
  p.ligand_head_b = Tensor(d, 1);
  p.decoder_hidden_w = dense_weight(rng, kDecoderHidden, 2 * d);
  p.decoder_hidden_b = Tensor(kDecoderHidden, 1);
  p.decoder_out_w = dense_weight(rng, 1, kDecoderHidden);
  p.decoder_out_b = Tensor(1, 1);

  const double kg_bound = 0.5 / std::sqrt(double(d));
  p.kg_tails = uniform_tensor(rng, d, kg.tail_count(), kg_bound);
  p.kg_relations = uniform_tensor(rng, d, kg.relation_count(), kg_bound);
  return p;
}

}  // namespace kepla
