#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "kepla/errors.hpp"

namespace kepla {

// Little-endian primitives shared by the embedding and checkpoint formats.
// Explicit byte packing keeps the files identical across hosts.
void write_u16(std::ostream& out, std::uint16_t x);
void write_u32(std::ostream& out, std::uint32_t x);
void write_u64(std::ostream& out, std::uint64_t x);
void write_f32(std::ostream& out, float x);
void write_f64(std::ostream& out, double x);
void write_bytes(std::ostream& out, const std::string& s);

std::uint16_t read_u16(std::istream& in);
std::uint32_t read_u32(std::istream& in);
std::uint64_t read_u64(std::istream& in);
float read_f32(std::istream& in);
double read_f64(std::istream& in);
std::string read_bytes(std::istream& in, std::size_t n);

}  // namespace kepla
