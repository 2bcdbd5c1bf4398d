#include "pricelab/rng.hpp"

#include <cmath>
#include <numbers>

namespace pricelab {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                          std::uint64_t index) {
  // FNV-1a over the stream name, then mixed with the master seed and index.
  std::uint64_t name_hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : stream) {
    name_hash ^= ch;
    name_hash *= 0x100000001b3ULL;
  }
  std::uint64_t state = master;
  std::uint64_t out = splitmix64(state);
  state ^= name_hash;
  out ^= splitmix64(state);
  state ^= index * 0xd1b54a32d192ed03ULL;
  out ^= splitmix64(state);
  return out;
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t Rng::uniform_index(std::size_t n) {
  const std::uint64_t bound = n;
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = engine_();
    if (x >= threshold) return static_cast<std::size_t>(x % bound);
  }
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace pricelab
