#include "kepla/encoders.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>

#include "kepla/errors.hpp"

namespace kepla {

namespace {

int alphabet_slot(char upper) {
  const char* p = std::strchr(kResidueAlphabet, upper);
  if (p == nullptr || upper == '\0') return -1;
  return static_cast<int>(p - kResidueAlphabet);
}

}  // namespace

int residue_index(char c) {
  const unsigned char uc = static_cast<unsigned char>(c);
  if (!std::isalpha(uc)) {
    throw InputError(std::string("invalid residue character '") + c + "'");
  }
  const char upper = static_cast<char>(std::toupper(uc));
  const int slot = alphabet_slot(upper);
  if (slot >= 0) return slot;
  return alphabet_slot('X');
}

std::vector<int> residue_indices(const std::string& seq) {
  std::vector<int> out;
  out.reserve(seq.size());
  for (char c : seq) out.push_back(residue_index(c));
  return out;
}

EncodedLocal pool_smers(Tape& tape, Var m_p, int s, int valid_len) {
  if (s <= 0) throw ContractError("s-mer width must be positive");
  const Tensor& m = tape.value(m_p);
  if (m.cols % s != 0) {
    throw DimensionError("column count " + std::to_string(m.cols) +
                         " is not a multiple of s-mer width " +
                         std::to_string(s));
  }
  if (valid_len < 0 || valid_len > m.cols) {
    throw ContractError("valid length out of range");
  }
  const int frags = m.cols / s;
  if (frags == 0) throw DegenerateInputError("cannot pool an empty matrix");

  // Constant pooling matrix: column j averages source columns [j*s, (j+1)*s).
  Tensor pool(m.cols, frags);
  const double inv = 1.0 / static_cast<double>(s);
  for (int j = 0; j < frags; ++j) {
    for (int t = 0; t < s; ++t) pool.at(j * s + t, j) = inv;
  }

  EncodedLocal out;
  out.h = tape.matmul(m_p, tape.constant(pool));
  out.valid = (valid_len + s - 1) / s;
  out.mask.assign(static_cast<std::size_t>(frags), 0);
  for (int j = 0; j < out.valid; ++j) out.mask[static_cast<std::size_t>(j)] = 1;
  return out;
}

namespace {

// Applies the layer stack and, when any column is padding, one final
// constant 0/1 mask. Every layer acts column-wise (matmul from the left,
// per-row bias, ReLU), so zero padding can only leak into padded columns,
// never out of them; a single mask at the end restores exact zeros there.
Var run_column_stack(Tape& tape, Var h, const std::vector<DenseLayer>& layers,
                     const Mask& mask, int rows_hint) {
  for (const DenseLayer& layer : layers) {
    h = tape.relu(tape.add(tape.matmul(layer.w, h), layer.b));
  }
  if (!fully_valid(mask)) {
    const Tensor& val = tape.value(h);
    Tensor keep(val.rows, val.cols, 0.0);
    for (int i = 0; i < val.rows; ++i) {
      for (int j = 0; j < val.cols; ++j) {
        if (mask[static_cast<std::size_t>(j)]) keep.at(i, j) = 1.0;
      }
    }
    h = tape.hadamard(h, tape.constant(keep));
  }
  (void)rows_hint;
  return h;
}

}  // namespace

EncodedLocal encode_protein(Tape& tape, const std::string& protein_id,
                            const std::string& seq,
                            const ProviderBinding& provider,
                            const std::vector<DenseLayer>& dnn, int s,
                            int k_max, int pad_to_cols) {
  if (s <= 0) throw ContractError("s-mer width must be positive");
  if (k_max < s) throw ContractError("residue cap smaller than s-mer width");
  const int k_cap = k_max - k_max % s;  // largest usable multiple of s

  Var m_p;
  int valid_len = 0;
  if (provider.trainable()) {
    const std::vector<int> idx = residue_indices(seq);
    if (idx.empty()) throw InputError("empty protein sequence");
    valid_len = std::min<int>(static_cast<int>(idx.size()), k_cap);
    const int frags =
        std::max((valid_len + s - 1) / s, std::max(pad_to_cols, 1));
    const int k_eff = frags * s;
    // One-hot selector: column t picks the table column of residue t.
    Tensor sel(kResidueCount, k_eff, 0.0);
    for (int t = 0; t < valid_len; ++t) {
      sel.at(idx[static_cast<std::size_t>(t)], t) = 1.0;
    }
    m_p = tape.matmul(provider.residue_table, tape.constant(sel));
  } else {
    const Tensor rec = provider.file->load(protein_id);
    if (rec.cols == 0) throw InputError("empty embedding record");
    valid_len = std::min(rec.cols, k_cap);
    const int frags =
        std::max((valid_len + s - 1) / s, std::max(pad_to_cols, 1));
    const int k_eff = frags * s;
    Tensor padded(rec.rows, k_eff, 0.0);
    for (int i = 0; i < rec.rows; ++i) {
      for (int j = 0; j < valid_len; ++j) padded.at(i, j) = rec.at(i, j);
    }
    m_p = tape.constant(std::move(padded));
  }

  EncodedLocal pooled = pool_smers(tape, m_p, s, valid_len);
  pooled.h = run_column_stack(tape, pooled.h, dnn, pooled.mask,
                              tape.value(pooled.h).rows);
  return pooled;
}

EncodedLocal encode_ligand(Tape& tape, const Molecule& mol, Var w_proj,
                           const std::vector<DenseLayer>& gcn, int n_max,
                           int pad_to_cols) {
  const int n = mol.atom_count();
  if (n == 0) throw InputError("molecule has no atoms");
  if (n > n_max) {
    throw InputError("molecule has " + std::to_string(n) +
                     " atoms, above the cap of " + std::to_string(n_max));
  }
  const int width = std::max(n, pad_to_cols);

  const auto feats = featurize_atoms(mol);
  Tensor m_d(kAtomFeatureDim, width, 0.0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < kAtomFeatureDim; ++i) {
      m_d.at(i, j) = static_cast<double>(feats[static_cast<std::size_t>(j)]
                                              [static_cast<std::size_t>(i)]);
    }
  }

  // Self-loop adjacency with symmetric degree normalization; padded
  // rows/columns stay zero so padding atoms never exchange messages.
  Tensor a_hat(width, width, 0.0);
  std::vector<double> inv_sqrt_deg(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    inv_sqrt_deg[static_cast<std::size_t>(i)] =
        1.0 / std::sqrt(static_cast<double>(mol.adjacency[i].size()));
  }
  for (int i = 0; i < n; ++i) {
    for (int j : mol.adjacency[i]) {
      a_hat.at(i, j) = inv_sqrt_deg[static_cast<std::size_t>(i)] *
                       inv_sqrt_deg[static_cast<std::size_t>(j)];
    }
  }

  EncodedLocal out;
  out.valid = n;
  out.mask.assign(static_cast<std::size_t>(width), 0);
  for (int j = 0; j < n; ++j) out.mask[static_cast<std::size_t>(j)] = 1;

  Var h = tape.matmul(w_proj, tape.constant(std::move(m_d)));
  const Var adj = tape.constant(std::move(a_hat));
  for (const DenseLayer& layer : gcn) {
    h = tape.relu(tape.add(tape.matmul(layer.w, tape.matmul(h, adj)), layer.b));
  }
  if (!fully_valid(out.mask)) {
    const Tensor& val = tape.value(h);
    Tensor keep(val.rows, val.cols, 0.0);
    for (int i = 0; i < val.rows; ++i) {
      for (int j = 0; j < n; ++j) keep.at(i, j) = 1.0;
    }
    h = tape.hadamard(h, tape.constant(keep));
  }
  out.h = h;
  return out;
}

Var global_project(Tape& tape, const EncodedLocal& local, Var w_k, Var b_k) {
  return tape.add(tape.matmul(w_k, tape.mean_masked(local.h, local.mask)),
                  b_k);
}

std::vector<double> psc_features(const std::string& seq) {
  const std::vector<int> idx = residue_indices(seq);
  if (idx.empty()) throw InputError("empty protein sequence");
  const int n = kResidueCount;
  std::vector<double> out(static_cast<std::size_t>(n + n * n), 0.0);
  const double inv1 = 1.0 / static_cast<double>(idx.size());
  for (int i : idx) out[static_cast<std::size_t>(i)] += inv1;
  if (idx.size() >= 2) {
    const double inv2 = 1.0 / static_cast<double>(idx.size() - 1);
    for (std::size_t t = 0; t + 1 < idx.size(); ++t) {
      out[static_cast<std::size_t>(n + idx[t] * n + idx[t + 1])] += inv2;
    }
  }
  return out;
}

double cosine_distance(const std::vector<double>& a,
                       const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw DimensionError("cosine distance needs equal-length vectors");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return (na == nb) ? 0.0 : 1.0;
  return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace kepla
