#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kepla/rng.hpp"
#include "kepla/tape.hpp"
#include "kepla/tensor.hpp"

namespace kepla {

// Head entities are proteins and ligands; tails are GO terms (biological
// process, cellular component, molecular function) or ligand properties
// (molecular descriptor, chemical feature).
enum class EntityType : std::uint8_t {
  kProtein,
  kLigand,
  kBp,
  kCc,
  kMf,
  kMd,
  kCf,
};

bool is_head_type(EntityType t);
bool is_go_type(EntityType t);
bool is_lp_type(EntityType t);

// Prefix of a serialized entity id ("P:", "L:", "BP:", "CC:", "MF:",
// "MD:", "CF:").
const char* entity_prefix(EntityType t);
std::optional<EntityType> entity_type_from_prefix(const std::string& id);

struct KgEntity {
  std::string id;    // prefixed id as written in the triple file
  std::string name;  // id with the type prefix stripped
  EntityType type;
  int tail_slot = -1;  // column in the tail-embedding table; -1 for heads
};

struct KgTriple {
  int head = -1;
  int relation = -1;
  int tail = -1;
};

// Typed triple store. Enforces on insertion: heads are proteins/ligands,
// tails are GO/LP entities, protein heads pair only with GO tails, ligand
// heads only with LP tails, and no triple appears twice.
class KnowledgeGraph {
 public:
  int add_entity(const std::string& prefixed_id);  // idempotent
  int add_relation(const std::string& name);       // idempotent
  void add_triple(int head, int relation, int tail);

  int entity_count() const { return static_cast<int>(entities_.size()); }
  int relation_count() const { return static_cast<int>(relations_.size()); }
  int tail_count() const { return tail_count_; }
  int triple_count() const { return static_cast<int>(triples_.size()); }

  const KgEntity& entity(int id) const;
  const std::string& relation_name(int id) const;
  int find_entity(const std::string& prefixed_id) const;  // -1 when absent
  int find_relation(const std::string& name) const;       // -1 when absent
  const std::vector<KgTriple>& triples() const { return triples_; }

  int entity_count_of(EntityType t) const;
  int triple_count_with_tail(EntityType t) const;
  int protein_go_triple_count() const;
  int ligand_lp_triple_count() const;

  // True when the relation occurs in at least one triple whose tail has
  // the given type.
  bool relation_seen_with(int relation, EntityType tail_type) const;

  // Multi-line human-readable count summary.
  std::string summary() const;

 private:
  std::vector<KgEntity> entities_;
  std::map<std::string, int> entity_index_;
  std::vector<std::string> relations_;
  std::map<std::string, int> relation_index_;
  std::vector<KgTriple> triples_;
  std::set<std::uint64_t> triple_keys_;
  std::vector<std::uint8_t> relation_tail_types_;  // bitmask by EntityType
  int tail_count_ = 0;
};

// Parses `head<TAB>relation<TAB>tail` lines. Empty lines are skipped;
// malformed lines, type-rule violations, and duplicates raise InputError
// with the 1-based line number.
KnowledgeGraph ingest_triples(const std::string& path);

// Learnable tables: one column per tail entity / relation.
struct KgTables {
  Tensor tails;      // D x tail_count
  Tensor relations;  // D x relation_count
};

// Uniform init on [-0.5/sqrt(D), 0.5/sqrt(D)].
KgTables init_kg_tables(const KnowledgeGraph& kg, int d, Rng& rng);

// ||h * r - t|| over equal-width columns (protein-GO scoring).
double score_rotate(const Tensor& h, const Tensor& r, const Tensor& t);
// ||h + r - t|| (ligand-LP scoring).
double score_transe(const Tensor& h, const Tensor& r, const Tensor& t);

// A mini-batch of triples with the encoder-produced head embeddings
// (D x 1 tape variables, parallel to `triples`).
struct KgBatch {
  std::vector<KgTriple> triples;
  std::vector<Var> heads;
};

// Mean of routed triple scores: protein heads through the rotation score,
// ligand heads through the translation score. Differentiable with respect
// to the head embeddings and both tables.
Var kge_loss(Tape& tape, const KnowledgeGraph& kg, const KgBatch& batch,
             Var tails, Var relations);

// Margin-ranking variant with one uniformly sampled corrupt tail (same
// type, different entity) per triple: mean of
// relu(margin + score(true) - score(corrupt)). Off by default upstream.
Var kge_loss_margin(Tape& tape, const KnowledgeGraph& kg, const KgBatch& batch,
                    Var tails, Var relations, double margin, Rng& rng);

struct NearestEntity {
  int rank = 0;
  std::string relation;
  std::string entity_id;
  std::string entity_name;
  double score = 0.0;
};

// Ranks candidate tails for a head embedding: per tail, the minimal routed
// score over every relation seen with that tail's type; ascending by
// (score, entity id). `tail_filter` narrows to one tail type; empty means
// every type legal for the head side (GO for proteins, LP for ligands).
std::vector<NearestEntity> nearest_entities(
    const KnowledgeGraph& kg, const Tensor& head_embedding, bool head_is_protein,
    std::optional<EntityType> tail_filter, int k, const KgTables& tables);

// `rank<TAB>relation<TAB>entity_id<TAB>entity_name<TAB>score` lines.
std::string format_nearest(const std::vector<NearestEntity>& results);

}  // namespace kepla
