#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace kepla {

// All stochastic behaviour flows through this wrapper so runs with the same
// seed produce byte-identical results across platforms. std::mt19937_64 has
// a portable output sequence; the distributions in <random> do not, hence
// the explicit uniform mappings here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
  }

  // Uniform integer in [0, n) by rejection, bias-free.
  std::uint64_t below(std::uint64_t n);

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& xs) {
    for (std::size_t i = xs.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(xs[i - 1], xs[j]);
    }
  }

 private:
  std::mt19937_64 eng_;
};

// Stable mix of a base seed with a stream label (epoch index, parameter
// ordinal) so sub-streams are independent but reproducible.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace kepla
