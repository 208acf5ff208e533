#pragma once

#include <cstdint>
#include <string>

#include "kepla/fusion.hpp"

namespace kepla {

// Which triple families feed the knowledge-embedding loss.
enum class KgMode { kFull, kProteinOnly, kLigandOnly, kOff };

// Where residue embeddings come from: a trainable per-residue table, or a
// read-only file of precomputed per-protein matrices.
enum class ProviderMode { kTrainable, kFile };

// Every run-level hyperparameter. Serializes to line-oriented
// `key = value` text; parsing rejects unknown and duplicate keys.
struct RunConfig {
  int d = 128;           // latent width
  int s = 9;             // pooling window (residues per fragment)
  int k_max = 1080;      // residue capacity; longer sequences truncate
  int n_max = 290;       // atom capacity; larger molecules are rejected
  double beta = 0.1;     // knowledge-loss weight
  double lambda = 1e-5;  // L2 penalty weight
  double lr = 1e-4;
  int batch_size = 64;
  int max_epochs = 200;
  std::uint64_t seed = 0;
  ProviderMode provider = ProviderMode::kTrainable;
  std::string provider_path;  // embedding file; required in file mode
  KgMode kg = KgMode::kFull;
  FusionKind fusion = FusionKind::kCross;

  bool operator==(const RunConfig&) const = default;
};

const char* to_string(KgMode mode);
const char* to_string(ProviderMode mode);
const char* to_string(FusionKind kind);

// Parses `key = value` lines. Blank lines and `#` comments are ignored.
// Unknown keys, duplicate keys, malformed values, and out-of-range values
// are input errors carrying the line number.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

// Canonical snapshot: every field, fixed order, lossless numerics.
// parse_run_config(serialize_run_config(c)) == c.
std::string serialize_run_config(const RunConfig& config);

// Enforces positivity and enum constraints; throws on violation.
void validate_run_config(const RunConfig& config);

}  // namespace kepla
