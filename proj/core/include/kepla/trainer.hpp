#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "kepla/checkpoint.hpp"
#include "kepla/config.hpp"
#include "kepla/datasets.hpp"
#include "kepla/fusion.hpp"
#include "kepla/kg.hpp"
#include "kepla/metrics.hpp"
#include "kepla/model.hpp"
#include "kepla/tape.hpp"

namespace kepla {

// Tape-side view of the parameters, bound in canonical order. `all` holds
// the same variables flat, for the L2 penalty and optimizer bookkeeping.
struct BoundParams {
  ProviderBinding provider;
  std::vector<DenseLayer> dnn;
  Var protein_head_w, protein_head_b;
  Var ligand_input_w;
  std::vector<DenseLayer> gcn;
  Var ligand_head_w, ligand_head_b;
  DecoderParams decoder;
  Var kg_tails, kg_relations;
  std::vector<Var> all;
};

// Binds every parameter onto the tape, as trainable leaves or constants.
// With a file provider, `embeddings` supplies the residue matrices.
BoundParams bind_params(Tape& tape, const ModelParams& params, bool trainable,
                        const EmbeddingFile* embeddings = nullptr);

// Wires pre-created variables (one per parameter, canonical order) into the
// structured view. Finite-difference harness hook.
BoundParams bind_param_vars(const ModelParams& shapes,
                            const std::vector<Var>& vars,
                            const EmbeddingFile* embeddings = nullptr);

// One complex through both encoders, fusion, and the decoder.
struct SampleForward {
  Var y_hat;
  FusionResult fusion;
  EncodedLocal protein;
  EncodedLocal ligand;
};

SampleForward forward_sample(Tape& tape, const BoundParams& bound,
                             const RunConfig& config,
                             const std::string& protein_id,
                             const std::string& sequence, const Molecule& mol);

// Triples grouped by head entity id, for per-batch gathering.
using TriplesByHead = std::unordered_map<int, std::vector<KgTriple>>;
TriplesByHead index_triples_by_head(const KnowledgeGraph& kg);

// The full training objective for one mini-batch: mean absolute prediction
// error, plus the mean score of the batch-associated triples when the
// knowledge loss is active, plus the L2 penalty. Heads appearing several
// times in a batch contribute their triples once.
struct BatchObjective {
  Var total;
  Var l_pla;
  std::optional<Var> l_kge;
  int triple_count = 0;
};

BatchObjective build_batch_objective(Tape& tape, const BoundParams& bound,
                                     const RunConfig& config,
                                     const std::vector<const ComplexSample*>& batch,
                                     const std::vector<const Molecule*>& mols,
                                     const KnowledgeGraph& kg,
                                     const TriplesByHead& triples_by_head);

struct EpochLog {
  int epoch = 0;  // 1-based
  double l_pla = 0.0;
  double l_kge = 0.0;  // 0 when no triples were gathered
  double val_rmse = 0.0;
};

struct TrainResult {
  Checkpoint best;
  std::vector<EpochLog> epochs;
  std::string log_text;  // one structured line per epoch, deterministic
};

// Full training run: per-epoch reshuffle (seeded from run seed and epoch
// index), mini-batch Adam steps on the joint objective, per-epoch
// validation RMSE, lowest-validation-RMSE snapshot returned. Aborts with
// diagnostics when the loss stops being finite.
TrainResult train(const RunConfig& config,
                  const std::vector<ComplexSample>& data,
                  const DatasetSplit& split, const KnowledgeGraph& kg,
                  const EmbeddingFile* embeddings = nullptr);

// Parameters and config reassembled from a checkpoint, with names and
// layer structure validated.
struct LoadedModel {
  RunConfig config;
  ModelParams params;
};

LoadedModel restore_model(const Checkpoint& ckpt);

// Scalar affinity plus the attention weights (empty tensors for fusion
// variants without the respective weights).
struct Prediction {
  double y_hat = 0.0;
  Tensor alpha_p;
  Tensor alpha_d;
};

Prediction predict_complex(const LoadedModel& model,
                           const std::string& sequence,
                           const std::string& smiles,
                           const EmbeddingFile* embeddings = nullptr,
                           const std::string& protein_id = "");

// Metrics plus raw predictions for one split partition.
struct PartitionReport {
  std::string partition;
  MetricsReport metrics;
  std::vector<std::string> ids;
  std::vector<double> predictions;
  std::vector<double> labels;
};

// Evaluates every non-empty partition of the split.
std::vector<PartitionReport> evaluate_checkpoint(
    const Checkpoint& ckpt, const std::vector<ComplexSample>& data,
    const DatasetSplit& split, const EmbeddingFile* embeddings = nullptr);

// Throws unless the graph's entity/relation id maps match the ones the
// checkpoint was trained with.
void verify_kg_compatibility(const Checkpoint& ckpt,
                             const KnowledgeGraph& kg);

// Ranks tail entities for a protein or ligand entity: the entity's head
// embedding comes from encoding its features found in `data`.
std::vector<NearestEntity> explain_kg(
    const Checkpoint& ckpt, const KnowledgeGraph& kg,
    const std::vector<ComplexSample>& data, const std::string& entity_id,
    std::optional<EntityType> tail_filter, int k,
    const EmbeddingFile* embeddings = nullptr);

// Text export of one prediction: the affinity, per-fragment weights, and
// per-atom weights with the top fifth of atoms marked.
std::string attention_report(const Prediction& prediction,
                             const Molecule& mol);

}  // namespace kepla
