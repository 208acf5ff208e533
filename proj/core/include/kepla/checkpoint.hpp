#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kepla/tensor.hpp"

namespace kepla {

inline constexpr char kCheckpointMagic[] = "KEPLACKPT";
inline constexpr std::uint32_t kCheckpointVersion = 1;

// Serialized training state: the config snapshot that produced it, the
// best epoch with its validation RMSE, every parameter tensor by canonical
// name, and the entity/relation id maps pinning the knowledge-table
// columns to graph entities. Reloading reproduces bit-identical
// predictions.
struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  std::string config_text;
  std::uint32_t epoch = 0;  // 1-based epoch the snapshot was taken at
  double val_rmse = 0.0;
  std::vector<std::pair<std::string, Tensor>> params;
  std::vector<std::string> kg_entity_ids;      // by entity id
  std::vector<std::string> kg_relation_names;  // by relation id

  // Stored tensor by name; throws LookupError when absent.
  const Tensor& param(const std::string& name) const;
  bool has_param(const std::string& name) const;
};

// Little-endian binary with magic "KEPLACKPT"; all floats as 64-bit, so a
// save/load round trip is bitwise lossless.
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace kepla
