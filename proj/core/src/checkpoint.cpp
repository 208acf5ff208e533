#include "kepla/checkpoint.hpp"

#include <fstream>

#include "kepla/binio.hpp"
#include "kepla/errors.hpp"

namespace kepla {

namespace {

constexpr std::size_t kMagicLen = 9;

void write_string(std::ostream& out, const std::string& s) {
  if (s.size() > 0xFFFF) throw ContractError("string too long for format");
  write_u16(out, static_cast<std::uint16_t>(s.size()));
  write_bytes(out, s);
}

std::string read_string(std::istream& in) {
  return read_bytes(in, read_u16(in));
}

}  // namespace

const Tensor& Checkpoint::param(const std::string& name) const {
  for (const auto& [key, tensor] : params) {
    if (key == name) return tensor;
  }
  throw LookupError("checkpoint has no parameter '" + name + "'");
}

bool Checkpoint::has_param(const std::string& name) const {
  for (const auto& [key, tensor] : params) {
    if (key == name) return true;
  }
  return false;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint: " + path);
  write_bytes(out, kCheckpointMagic);
  write_u32(out, ckpt.version);
  if (ckpt.config_text.size() > 0xFFFFFFFFull) {
    throw ContractError("config snapshot too large");
  }
  write_u32(out, static_cast<std::uint32_t>(ckpt.config_text.size()));
  write_bytes(out, ckpt.config_text);
  write_u32(out, ckpt.epoch);
  write_f64(out, ckpt.val_rmse);

  write_u32(out, static_cast<std::uint32_t>(ckpt.params.size()));
  for (const auto& [name, tensor] : ckpt.params) {
    write_string(out, name);
    write_u32(out, static_cast<std::uint32_t>(tensor.rows));
    write_u32(out, static_cast<std::uint32_t>(tensor.cols));
    for (double x : tensor.v) write_f64(out, x);
  }
  write_u32(out, static_cast<std::uint32_t>(ckpt.kg_entity_ids.size()));
  for (const std::string& id : ckpt.kg_entity_ids) write_string(out, id);
  write_u32(out, static_cast<std::uint32_t>(ckpt.kg_relation_names.size()));
  for (const std::string& name : ckpt.kg_relation_names) {
    write_string(out, name);
  }
  out.flush();
  if (!out) throw IoError("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  if (read_bytes(in, kMagicLen) != kCheckpointMagic) {
    throw IoError("not a checkpoint file (bad magic): " + path);
  }
  Checkpoint ckpt;
  ckpt.version = read_u32(in);
  if (ckpt.version != kCheckpointVersion) {
    throw IoError("unsupported checkpoint version " +
                  std::to_string(ckpt.version));
  }
  ckpt.config_text = read_bytes(in, read_u32(in));
  ckpt.epoch = read_u32(in);
  ckpt.val_rmse = read_f64(in);

  const std::uint32_t param_count = read_u32(in);
  ckpt.params.reserve(param_count);
  for (std::uint32_t i = 0; i < param_count; ++i) {
    const std::string name = read_string(in);
    const int rows = static_cast<int>(read_u32(in));
    const int cols = static_cast<int>(read_u32(in));
    Tensor t(rows, cols);
    for (double& x : t.v) x = read_f64(in);
    ckpt.params.emplace_back(name, std::move(t));
  }
  const std::uint32_t entity_count = read_u32(in);
  ckpt.kg_entity_ids.reserve(entity_count);
  for (std::uint32_t i = 0; i < entity_count; ++i) {
    ckpt.kg_entity_ids.push_back(read_string(in));
  }
  const std::uint32_t relation_count = read_u32(in);
  ckpt.kg_relation_names.reserve(relation_count);
  for (std::uint32_t i = 0; i < relation_count; ++i) {
    ckpt.kg_relation_names.push_back(read_string(in));
  }
  return ckpt;
}

}  // namespace kepla
