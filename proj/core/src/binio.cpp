#include "kepla/binio.hpp"

#include <cstring>
#include <istream>
#include <ostream>

namespace kepla {

namespace {

void put(std::ostream& out, std::uint64_t x, int bytes) {
  char buf[8];
  for (int i = 0; i < bytes; ++i) {
    buf[i] = static_cast<char>((x >> (8 * i)) & 0xff);
  }
  out.write(buf, bytes);
}

std::uint64_t take(std::istream& in, int bytes) {
  char buf[8] = {};
  in.read(buf, bytes);
  if (in.gcount() != bytes) {
    throw IoError("unexpected end of file");
  }
  std::uint64_t x = 0;
  for (int i = 0; i < bytes; ++i) {
    x |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
  }
  return x;
}

}  // namespace

void write_u16(std::ostream& out, std::uint16_t x) { put(out, x, 2); }
void write_u32(std::ostream& out, std::uint32_t x) { put(out, x, 4); }
void write_u64(std::ostream& out, std::uint64_t x) { put(out, x, 8); }

void write_f32(std::ostream& out, float x) {
  std::uint32_t bits;
  std::memcpy(&bits, &x, 4);
  put(out, bits, 4);
}

void write_f64(std::ostream& out, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, 8);
  put(out, bits, 8);
}

void write_bytes(std::ostream& out, const std::string& s) {
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint16_t read_u16(std::istream& in) { return static_cast<std::uint16_t>(take(in, 2)); }
std::uint32_t read_u32(std::istream& in) { return static_cast<std::uint32_t>(take(in, 4)); }
std::uint64_t read_u64(std::istream& in) { return take(in, 8); }

float read_f32(std::istream& in) {
  const std::uint32_t bits = read_u32(in);
  float x;
  std::memcpy(&x, &bits, 4);
  return x;
}

double read_f64(std::istream& in) {
  const std::uint64_t bits = read_u64(in);
  double x;
  std::memcpy(&x, &bits, 8);
  return x;
}

std::string read_bytes(std::istream& in, std::size_t n) {
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw IoError("unexpected end of file");
  }
  return s;
}

}  // namespace kepla
