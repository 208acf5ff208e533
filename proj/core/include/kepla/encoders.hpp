#pragma once

#include <string>
#include <vector>

#include "kepla/chem.hpp"
#include "kepla/embeddings.hpp"
#include "kepla/tape.hpp"

namespace kepla {

// 20 standard amino acids plus X, B, U; unknown letters collapse to X.
inline constexpr char kResidueAlphabet[] = "ACDEFGHIKLMNPQRSTVWYXBU";
inline constexpr int kResidueCount = 23;

// Index into the alphabet. Case-insensitive; letters outside the alphabet
// map to X; anything else is an input error.
int residue_index(char c);
std::vector<int> residue_indices(const std::string& seq);

struct DenseLayer {
  Var w;
  Var b;
};

// Local representation: D x M matrix on the tape plus column validity.
struct EncodedLocal {
  Var h;
  Mask mask;
  int valid = 0;
};

// Average-pools non-overlapping s-column windows: D_p x K -> D_p x (K/s).
// s must divide the column count; a fragment is valid iff it overlaps
// [0, valid_len).
EncodedLocal pool_smers(Tape& tape, Var m_p, int s, int valid_len);

// Residue embedding source. Exactly one mode is active: a trainable
// D_p x 23 table living on the tape, or a read-only embedding file keyed
// by protein id.
struct ProviderBinding {
  Var residue_table;
  const EmbeddingFile* file = nullptr;
  bool trainable() const { return file == nullptr; }
};

// Embedding -> s-mer pooling -> DNN with ReLU after every layer. Sequences
// longer than k_max are truncated. pad_to_cols forces extra all-zero
// fragment columns (testing hook; 0 means minimal width).
EncodedLocal encode_protein(Tape& tape, const std::string& protein_id,
                            const std::string& seq,
                            const ProviderBinding& provider,
                            const std::vector<DenseLayer>& dnn, int s,
                            int k_max, int pad_to_cols = 0);

// 74-dim atom features -> linear projection -> 3 GCN layers over the
// self-loop adjacency with symmetric degree normalization. Oversize
// molecules are an input error, never truncated.
EncodedLocal encode_ligand(Tape& tape, const Molecule& mol, Var w_proj,
                           const std::vector<DenseLayer>& gcn, int n_max,
                           int pad_to_cols = 0);

// h = W_k * mean(valid columns) + b_k.
Var global_project(Tape& tape, const EncodedLocal& local, Var w_k, Var b_k);

// Normalized 1-mer (23) + 2-mer (529) composition blocks, concatenated.
std::vector<double> psc_features(const std::string& seq);

double cosine_distance(const std::vector<double>& a,
                       const std::vector<double>& b);

}  // namespace kepla
