#pragma once

#include <cstdint>
#include <vector>

namespace peelmc {

// All randomness in this project flows through one generator family:
// xoshiro256** (Blackman & Vigna) seeded through the splitmix64 expander,
// as recommended by its authors. Independent streams are derived
// deterministically from a 64-bit master seed and a stream index, so a
// run is reproducible from (master_seed) alone and trials can be
// simulated in any order or in parallel without sharing generator state.

// One step of splitmix64; advances `state` and returns the next output.
std::uint64_t splitmix64_next(std::uint64_t& state);

// Deterministic, well-mixed seed for sub-stream `stream` of `master`.
// Nesting is fine: derive_seed(derive_seed(master, cell), trial).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

class Rng {
public:
  explicit Rng(std::uint64_t seed);

  // Generator for sub-stream `stream` of `master`.
  static Rng stream(std::uint64_t master, std::uint64_t stream);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next();

  // Unbiased integer in [0, bound). bound must be nonzero.
  std::uint64_t uniform_below(std::uint64_t bound);

  // Double in [0, 1) with 53 random bits.
  double uniform01();

private:
  std::uint64_t s_[4];
  std::uint64_t seed_;
};

// Exact Binomial(n, p) sample. Small means use CDF inversion by sequential
// search; large means use the BTRS transformed-rejection sampler of
// Hoermann (1993), which is exact (no normal approximation anywhere).
// Valid for any n >= 0 up to ~1e15 and p in [0, 1].
std::int64_t sample_binomial(Rng& rng, std::int64_t n, double p);

// Exact multinomial sample via the conditional-binomial chain.
// p must have size >= 1 and sum to 1 (within rounding).
std::vector<std::int64_t> sample_multinomial(Rng& rng, std::int64_t n,
                                             const std::vector<double>& p);

}  // namespace peelmc
