#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kepla {

// Error taxonomy used across the library. Every failure path throws one of
// these; callers that care about the category catch the concrete type.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shape mismatch in a kernel primitive or parameter wiring.
struct DimensionError : Error {
  using Error::Error;
};

// API misuse: non-scalar backward root, replayed tape, misaligned optimizer
// state, non-positive learning rate.
struct ContractError : Error {
  using Error::Error;
};

// Reductions with nothing to reduce: all-masked softmax/mean, zero valid
// columns in a pooling step.
struct DegenerateInputError : Error {
  using Error::Error;
};

// Rejected domain input: unusable residue character, oversize molecule,
// out-of-range configuration value.
struct InputError : Error {
  using Error::Error;
};

// Unknown id in a store, graph, or checkpoint.
struct LookupError : Error {
  using Error::Error;
};

// A split or training protocol cannot be satisfied on the given data.
struct ProtocolError : Error {
  using Error::Error;
};

// File format or filesystem failure.
struct IoError : Error {
  using Error::Error;
};

// Text parse failure; carries the byte offset (or line number for
// line-oriented formats) of the offending input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace kepla
