#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace pricelab {

std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for the named substream `stream` of repetition `index`. Distinct
/// (stream, index) pairs hash to unrelated generator states, so adding or
/// removing a consumer never shifts another consumer's draws.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                          std::uint64_t index = 0);

/// Thin wrapper around mt19937_64 with platform-independent variates.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // [0, 1) with 53 random bits.
  double uniform();
  // Unbiased integer in [0, n).
  std::size_t uniform_index(std::size_t n);
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace pricelab
