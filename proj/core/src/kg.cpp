#include "kepla/kg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "kepla/errors.hpp"

namespace kepla {

namespace {

constexpr EntityType kAllTypes[] = {
    EntityType::kProtein, EntityType::kLigand, EntityType::kBp,
    EntityType::kCc,      EntityType::kMf,     EntityType::kMd,
    EntityType::kCf,
};

int type_bit(EntityType t) { return 1 << static_cast<int>(t); }

Tensor column_selector(int height, int index) {
  Tensor e(height, 1, 0.0);
  e.at(index, 0) = 1.0;
  return e;
}

}  // namespace

bool is_head_type(EntityType t) {
  return t == EntityType::kProtein || t == EntityType::kLigand;
}

bool is_go_type(EntityType t) {
  return t == EntityType::kBp || t == EntityType::kCc || t == EntityType::kMf;
}

bool is_lp_type(EntityType t) {
  return t == EntityType::kMd || t == EntityType::kCf;
}

const char* entity_prefix(EntityType t) {
  switch (t) {
    case EntityType::kProtein: return "P:";
    case EntityType::kLigand: return "L:";
    case EntityType::kBp: return "BP:";
    case EntityType::kCc: return "CC:";
    case EntityType::kMf: return "MF:";
    case EntityType::kMd: return "MD:";
    case EntityType::kCf: return "CF:";
  }
  return "";
}

std::optional<EntityType> entity_type_from_prefix(const std::string& id) {
  for (EntityType t : kAllTypes) {
    const std::string prefix = entity_prefix(t);
    if (id.size() > prefix.size() && id.compare(0, prefix.size(), prefix) == 0) {
      return t;
    }
  }
  return std::nullopt;
}

int KnowledgeGraph::add_entity(const std::string& prefixed_id) {
  const auto it = entity_index_.find(prefixed_id);
  if (it != entity_index_.end()) return it->second;
  const auto type = entity_type_from_prefix(prefixed_id);
  if (!type) {
    throw InputError("entity id '" + prefixed_id +
                     "' lacks a recognized type prefix");
  }
  KgEntity e;
  e.id = prefixed_id;
  e.name = prefixed_id.substr(std::string(entity_prefix(*type)).size());
  e.type = *type;
  if (!is_head_type(*type)) e.tail_slot = tail_count_++;
  const int id = static_cast<int>(entities_.size());
  entities_.push_back(std::move(e));
  entity_index_.emplace(prefixed_id, id);
  return id;
}

int KnowledgeGraph::add_relation(const std::string& name) {
  if (name.empty()) throw InputError("empty relation name");
  const auto it = relation_index_.find(name);
  if (it != relation_index_.end()) return it->second;
  const int id = static_cast<int>(relations_.size());
  relations_.push_back(name);
  relation_index_.emplace(name, id);
  relation_tail_types_.push_back(0);
  return id;
}

void KnowledgeGraph::add_triple(int head, int relation, int tail) {
  if (head < 0 || head >= entity_count() || tail < 0 ||
      tail >= entity_count()) {
    throw LookupError("triple references an unknown entity");
  }
  if (relation < 0 || relation >= relation_count()) {
    throw LookupError("triple references an unknown relation");
  }
  const EntityType ht = entities_[static_cast<std::size_t>(head)].type;
  const EntityType tt = entities_[static_cast<std::size_t>(tail)].type;
  if (!is_head_type(ht)) {
    throw InputError("triple head '" +
                     entities_[static_cast<std::size_t>(head)].id +
                     "' must be a protein or ligand");
  }
  if (is_head_type(tt)) {
    throw InputError("triple tail '" +
                     entities_[static_cast<std::size_t>(tail)].id +
                     "' must be a GO or ligand-property entity");
  }
  if (ht == EntityType::kProtein && !is_go_type(tt)) {
    throw InputError("protein head may only pair with GO tails, got '" +
                     entities_[static_cast<std::size_t>(tail)].id + "'");
  }
  if (ht == EntityType::kLigand && !is_lp_type(tt)) {
    throw InputError(
        "ligand head may only pair with ligand-property tails, got '" +
        entities_[static_cast<std::size_t>(tail)].id + "'");
  }
  const std::uint64_t key = (static_cast<std::uint64_t>(head) << 40) |
                            (static_cast<std::uint64_t>(relation) << 20) |
                            static_cast<std::uint64_t>(tail);
  if (!triple_keys_.insert(key).second) {
    throw InputError("duplicate triple " +
                     entities_[static_cast<std::size_t>(head)].id + " -> " +
                     entities_[static_cast<std::size_t>(tail)].id);
  }
  triples_.push_back({head, relation, tail});
  relation_tail_types_[static_cast<std::size_t>(relation)] |=
      static_cast<std::uint8_t>(type_bit(tt));
}

const KgEntity& KnowledgeGraph::entity(int id) const {
  if (id < 0 || id >= entity_count()) throw LookupError("unknown entity id");
  return entities_[static_cast<std::size_t>(id)];
}

const std::string& KnowledgeGraph::relation_name(int id) const {
  if (id < 0 || id >= relation_count()) {
    throw LookupError("unknown relation id");
  }
  return relations_[static_cast<std::size_t>(id)];
}

int KnowledgeGraph::find_entity(const std::string& prefixed_id) const {
  const auto it = entity_index_.find(prefixed_id);
  return it == entity_index_.end() ? -1 : it->second;
}

int KnowledgeGraph::find_relation(const std::string& name) const {
  const auto it = relation_index_.find(name);
  return it == relation_index_.end() ? -1 : it->second;
}

int KnowledgeGraph::entity_count_of(EntityType t) const {
  int n = 0;
  for (const KgEntity& e : entities_) n += (e.type == t) ? 1 : 0;
  return n;
}

int KnowledgeGraph::triple_count_with_tail(EntityType t) const {
  int n = 0;
  for (const KgTriple& tr : triples_) {
    n += (entities_[static_cast<std::size_t>(tr.tail)].type == t) ? 1 : 0;
  }
  return n;
}

int KnowledgeGraph::protein_go_triple_count() const {
  return triple_count_with_tail(EntityType::kBp) +
         triple_count_with_tail(EntityType::kCc) +
         triple_count_with_tail(EntityType::kMf);
}

int KnowledgeGraph::ligand_lp_triple_count() const {
  return triple_count_with_tail(EntityType::kMd) +
         triple_count_with_tail(EntityType::kCf);
}

bool KnowledgeGraph::relation_seen_with(int relation,
                                        EntityType tail_type) const {
  if (relation < 0 || relation >= relation_count()) {
    throw LookupError("unknown relation id");
  }
  return (relation_tail_types_[static_cast<std::size_t>(relation)] &
          type_bit(tail_type)) != 0;
}

std::string KnowledgeGraph::summary() const {
  static constexpr const char* kLabels[] = {"protein", "ligand", "BP", "CC",
                                            "MF",      "MD",     "CF"};
  std::ostringstream out;
  out << "entities\t" << entity_count() << "\n";
  for (EntityType t : kAllTypes) {
    out << "entities:" << kLabels[static_cast<int>(t)] << "\t"
        << entity_count_of(t) << "\n";
  }
  out << "relations\t" << relation_count() << "\n";
  out << "triples\t" << triple_count() << "\n";
  out << "triples:protein-GO\t" << protein_go_triple_count() << "\n";
  out << "triples:ligand-LP\t" << ligand_lp_triple_count() << "\n";
  for (EntityType t : kAllTypes) {
    if (is_head_type(t)) continue;
    out << "triples:" << kLabels[static_cast<int>(t)] << "\t"
        << triple_count_with_tail(t) << "\n";
  }
  return out.str();
}

KnowledgeGraph ingest_triples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open triple file: " + path);
  KnowledgeGraph kg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t tab1 = line.find('\t');
    const std::size_t tab2 =
        tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab1 == std::string::npos || tab2 == std::string::npos ||
        line.find('\t', tab2 + 1) != std::string::npos) {
      throw InputError("malformed triple at line " + std::to_string(line_no) +
                       ": expected head<TAB>relation<TAB>tail");
    }
    const std::string head_id = line.substr(0, tab1);
    const std::string rel_name = line.substr(tab1 + 1, tab2 - tab1 - 1);
    const std::string tail_id = line.substr(tab2 + 1);
    if (head_id.empty() || rel_name.empty() || tail_id.empty()) {
      throw InputError("malformed triple at line " + std::to_string(line_no) +
                       ": empty field");
    }
    try {
      const int head = kg.add_entity(head_id);
      const int rel = kg.add_relation(rel_name);
      const int tail = kg.add_entity(tail_id);
      kg.add_triple(head, rel, tail);
    } catch (const Error& e) {
      throw InputError(std::string(e.what()) + " (line " +
                       std::to_string(line_no) + ")");
    }
  }
  return kg;
}

KgTables init_kg_tables(const KnowledgeGraph& kg, int d, Rng& rng) {
  if (d <= 0) throw ContractError("embedding width must be positive");
  const double bound = 0.5 / std::sqrt(static_cast<double>(d));
  KgTables tables;
  tables.tails = Tensor(d, kg.tail_count());
  for (double& x : tables.tails.v) x = rng.uniform(-bound, bound);
  tables.relations = Tensor(d, kg.relation_count());
  for (double& x : tables.relations.v) x = rng.uniform(-bound, bound);
  return tables;
}

namespace {

void check_score_args(const Tensor& h, const Tensor& r, const Tensor& t) {
  if (!h.is_column() || !r.is_column() || !t.is_column()) {
    throw DimensionError("triple scores expect column vectors");
  }
  if (h.rows != r.rows || h.rows != t.rows) {
    throw DimensionError("triple score width mismatch");
  }
}

}  // namespace

double score_rotate(const Tensor& h, const Tensor& r, const Tensor& t) {
  check_score_args(h, r, t);
  double sq = 0.0;
  for (int i = 0; i < h.rows; ++i) {
    const double d = h.at(i, 0) * r.at(i, 0) - t.at(i, 0);
    sq += d * d;
  }
  return std::sqrt(sq);
}

double score_transe(const Tensor& h, const Tensor& r, const Tensor& t) {
  check_score_args(h, r, t);
  double sq = 0.0;
  for (int i = 0; i < h.rows; ++i) {
    const double d = h.at(i, 0) + r.at(i, 0) - t.at(i, 0);
    sq += d * d;
  }
  return std::sqrt(sq);
}

namespace {

// Routed triple score on the tape: rotation for protein heads,
// translation for ligand heads.
Var routed_score(Tape& tape, const KnowledgeGraph& kg, const KgTriple& triple,
                 Var head, Var tails, Var relations) {
  const KgEntity& head_ent = kg.entity(triple.head);
  const KgEntity& tail_ent = kg.entity(triple.tail);
  if (tail_ent.tail_slot < 0) {
    throw LookupError("entity '" + tail_ent.id + "' has no tail embedding");
  }
  const Tensor& t_table = tape.value(tails);
  const Tensor& r_table = tape.value(relations);
  if (tail_ent.tail_slot >= t_table.cols) {
    throw LookupError("tail table narrower than tail slot");
  }
  if (triple.relation < 0 || triple.relation >= r_table.cols) {
    throw LookupError("relation table lacks relation " +
                      std::to_string(triple.relation));
  }
  const Var t = tape.matmul(
      tails, tape.constant(column_selector(t_table.cols, tail_ent.tail_slot)));
  const Var r = tape.matmul(
      relations, tape.constant(column_selector(r_table.cols, triple.relation)));
  Var combined;
  if (head_ent.type == EntityType::kProtein) {
    combined = tape.hadamard(head, r);
  } else if (head_ent.type == EntityType::kLigand) {
    combined = tape.add(head, r);
  } else {
    throw InputError("triple head '" + head_ent.id +
                     "' is not a protein or ligand");
  }
  return tape.l2_norm(tape.add(combined, tape.scale(t, -1.0)));
}

Var mean_of_scalars(Tape& tape, const std::vector<Var>& scores) {
  const Var stacked = tape.concat(scores);
  return tape.mean_masked(tape.transpose(stacked),
                          all_valid(static_cast<int>(scores.size())));
}

}  // namespace

Var kge_loss(Tape& tape, const KnowledgeGraph& kg, const KgBatch& batch,
             Var tails, Var relations) {
  if (batch.triples.empty()) {
    throw DegenerateInputError("empty knowledge-graph batch");
  }
  if (batch.triples.size() != batch.heads.size()) {
    throw DimensionError("one head embedding required per triple");
  }
  std::vector<Var> scores;
  scores.reserve(batch.triples.size());
  for (std::size_t i = 0; i < batch.triples.size(); ++i) {
    scores.push_back(routed_score(tape, kg, batch.triples[i], batch.heads[i],
                                  tails, relations));
  }
  return mean_of_scalars(tape, scores);
}

Var kge_loss_margin(Tape& tape, const KnowledgeGraph& kg, const KgBatch& batch,
                    Var tails, Var relations, double margin, Rng& rng) {
  if (batch.triples.empty()) {
    throw DegenerateInputError("empty knowledge-graph batch");
  }
  if (batch.triples.size() != batch.heads.size()) {
    throw DimensionError("one head embedding required per triple");
  }
  // Candidate corrupt tails grouped by type, in entity-id order.
  std::vector<std::vector<int>> by_type(7);
  for (int e = 0; e < kg.entity_count(); ++e) {
    const KgEntity& ent = kg.entity(e);
    if (ent.tail_slot >= 0) {
      by_type[static_cast<std::size_t>(ent.type)].push_back(e);
    }
  }
  std::vector<Var> terms;
  terms.reserve(batch.triples.size());
  const Var margin_term = tape.constant(Tensor::scalar(margin));
  for (std::size_t i = 0; i < batch.triples.size(); ++i) {
    const KgTriple& triple = batch.triples[i];
    const Var positive =
        routed_score(tape, kg, triple, batch.heads[i], tails, relations);
    const auto& pool =
        by_type[static_cast<std::size_t>(kg.entity(triple.tail).type)];
    Var term;
    if (pool.size() < 2) {
      // No distinct corrupt tail exists; the ranking term degenerates to
      // relu(margin), a constant, so only the positive score contributes.
      term = tape.relu(tape.add(margin_term, tape.scale(positive, 0.0)));
    } else {
      int corrupt = triple.tail;
      while (corrupt == triple.tail) {
        corrupt = pool[static_cast<std::size_t>(rng.below(pool.size()))];
      }
      KgTriple negative = triple;
      negative.tail = corrupt;
      const Var neg_score =
          routed_score(tape, kg, negative, batch.heads[i], tails, relations);
      term = tape.relu(tape.add(tape.add(margin_term, positive),
                                tape.scale(neg_score, -1.0)));
    }
    terms.push_back(term);
  }
  return mean_of_scalars(tape, terms);
}

std::vector<NearestEntity> nearest_entities(
    const KnowledgeGraph& kg, const Tensor& head_embedding,
    bool head_is_protein, std::optional<EntityType> tail_filter, int k,
    const KgTables& tables) {
  if (k <= 0) throw ContractError("k must be positive");
  if (!head_embedding.is_column()) {
    throw DimensionError("head embedding must be a column vector");
  }
  if (tables.tails.rows != head_embedding.rows ||
      tables.relations.rows != head_embedding.rows) {
    throw DimensionError("embedding width mismatch between head and tables");
  }
  if (tail_filter) {
    const bool compatible = head_is_protein ? is_go_type(*tail_filter)
                                            : is_lp_type(*tail_filter);
    if (!compatible) {
      throw ContractError("tail type filter incompatible with the head side");
    }
  }

  struct Scored {
    double score;
    std::string id;
    std::string name;
    std::string relation;
  };
  std::vector<Scored> scored;
  for (int e = 0; e < kg.entity_count(); ++e) {
    const KgEntity& ent = kg.entity(e);
    if (ent.tail_slot < 0) continue;
    const bool side_ok =
        head_is_protein ? is_go_type(ent.type) : is_lp_type(ent.type);
    if (!side_ok) continue;
    if (tail_filter && ent.type != *tail_filter) continue;
    if (ent.tail_slot >= tables.tails.cols) {
      throw LookupError("tail table narrower than tail slot");
    }
    const Tensor t = tables.tails.column_at(ent.tail_slot);
    double best = 0.0;
    int best_rel = -1;
    for (int rel = 0; rel < kg.relation_count(); ++rel) {
      if (!kg.relation_seen_with(rel, ent.type)) continue;
      if (rel >= tables.relations.cols) {
        throw LookupError("relation table narrower than relation id");
      }
      const Tensor r = tables.relations.column_at(rel);
      const double s = head_is_protein ? score_rotate(head_embedding, r, t)
                                       : score_transe(head_embedding, r, t);
      if (best_rel < 0 || s < best) {
        best = s;
        best_rel = rel;
      }
    }
    if (best_rel < 0) continue;  // no relation ever used with this tail type
    scored.push_back({best, ent.id, ent.name, kg.relation_name(best_rel)});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.id < b.id;
  });
  if (static_cast<int>(scored.size()) > k) {
    scored.resize(static_cast<std::size_t>(k));
  }
  std::vector<NearestEntity> out;
  out.reserve(scored.size());
  for (std::size_t i = 0; i < scored.size(); ++i) {
    out.push_back({static_cast<int>(i) + 1, scored[i].relation, scored[i].id,
                   scored[i].name, scored[i].score});
  }
  return out;
}

std::string format_nearest(const std::vector<NearestEntity>& results) {
  std::ostringstream out;
  char buf[64];
  for (const NearestEntity& r : results) {
    std::snprintf(buf, sizeof(buf), "%.6f", r.score);
    out << r.rank << "\t" << r.relation << "\t" << r.entity_id << "\t"
        << r.entity_name << "\t" << buf << "\n";
  }
  return out.str();
}

}  // namespace kepla
