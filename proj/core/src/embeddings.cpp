#include "kepla/embeddings.hpp"

#include <fstream>

#include "kepla/binio.hpp"

namespace kepla {

void EmbeddingFile::write(const std::string& path, int d_p,
                          const std::vector<std::pair<std::string, Tensor>>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open for writing: " + path);
  }
  write_bytes(out, kMagic);
  write_u32(out, kVersion);
  write_u32(out, static_cast<std::uint32_t>(d_p));
  write_u64(out, records.size());

  std::ofstream idx(path + ".idx", std::ios::trunc);
  if (!idx) {
    throw IoError("cannot open for writing: " + path + ".idx");
  }
  for (const auto& [id, matrix] : records) {
    if (matrix.rows != d_p) {
      throw DimensionError("embedding record row count must equal D_p");
    }
    if (id.size() > 0xffff) {
      throw InputError("embedding id too long: " + id);
    }
    idx << id << '\t' << static_cast<std::uint64_t>(out.tellp()) << '\n';
    write_u16(out, static_cast<std::uint16_t>(id.size()));
    write_bytes(out, id);
    write_u32(out, static_cast<std::uint32_t>(matrix.cols));
    for (double x : matrix.v) {
      write_f32(out, static_cast<float>(x));
    }
  }
  if (!out || !idx) {
    throw IoError("write failed: " + path);
  }
}

EmbeddingFile::EmbeddingFile(const std::string& path) : path_(path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open embedding file: " + path);
  }
  if (read_bytes(in, 8) != kMagic) {
    throw IoError("bad embedding file magic: " + path);
  }
  const std::uint32_t version = read_u32(in);
  if (version != kVersion) {
    throw IoError("unsupported embedding file version");
  }
  d_p_ = static_cast<int>(read_u32(in));
  const std::uint64_t count = read_u64(in);
  for (std::uint64_t r = 0; r < count; ++r) {
    const std::uint64_t offset = static_cast<std::uint64_t>(in.tellg());
    const std::uint16_t id_len = read_u16(in);
    const std::string id = read_bytes(in, id_len);
    const std::uint32_t k = read_u32(in);
    if (!offsets_.emplace(id, offset).second) {
      throw IoError("duplicate embedding id: " + id);
    }
    in.seekg(static_cast<std::streamoff>(4ull * d_p_ * k), std::ios::cur);
    if (!in) {
      throw IoError("truncated embedding file: " + path);
    }
  }
}

std::vector<std::string> EmbeddingFile::ids() const {
  std::vector<std::string> out;
  out.reserve(offsets_.size());
  for (const auto& [id, off] : offsets_) {
    out.push_back(id);
  }
  return out;
}

Tensor EmbeddingFile::load(const std::string& id) const {
  const auto it = offsets_.find(id);
  if (it == offsets_.end()) {
    throw LookupError("no embedding for protein id: " + id);
  }
  std::ifstream in(path_, std::ios::binary);
  if (!in) {
    throw IoError("cannot open embedding file: " + path_);
  }
  in.seekg(static_cast<std::streamoff>(it->second));
  const std::uint16_t id_len = read_u16(in);
  read_bytes(in, id_len);
  const std::uint32_t k = read_u32(in);
  Tensor m(d_p_, static_cast<int>(k));
  for (double& x : m.v) {
    x = static_cast<double>(read_f32(in));
  }
  return m;
}

}  // namespace kepla
