#pragma once

#include <map>
#include <string>
#include <vector>

#include "kepla/tensor.hpp"

namespace kepla {

// Precomputed residue-embedding store. Binary little-endian layout:
// header {magic "KEPLAEMB", version u32, D_p u32, count u64}, then per
// record {id length u16, id bytes, K u32, float32 matrix D_p x K
// row-major}. A plain-text sidecar at <path>.idx lists `id<TAB>offset`.
class EmbeddingFile {
 public:
  static constexpr const char* kMagic = "KEPLAEMB";
  static constexpr std::uint32_t kVersion = 1;

  // Writes the store and its index sidecar. Matrices are D_p x K_i, stored
  // as float32.
  static void write(const std::string& path, int d_p,
                    const std::vector<std::pair<std::string, Tensor>>& records);

  explicit EmbeddingFile(const std::string& path);

  int d_p() const { return d_p_; }
  bool contains(const std::string& id) const { return offsets_.count(id) != 0; }
  std::vector<std::string> ids() const;

  // Loads one record as doubles; LookupError when absent.
  Tensor load(const std::string& id) const;

 private:
  std::string path_;
  int d_p_ = 0;
  std::map<std::string, std::uint64_t> offsets_;
};

}  // namespace kepla
