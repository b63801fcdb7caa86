#include "discpar/rng.hpp"

#include "discpar/error.hpp"

namespace discpar {

namespace {
__extension__ using u128 = unsigned __int128;
}  // namespace

std::size_t Rng::below(std::size_t n) {
  if (n == 0) throw ConfigError("Rng::below: empty range");
  // Lemire's multiply-shift with rejection; unbiased and stdlib-independent.
  const std::uint64_t bound = n;
  for (;;) {
    const u128 product = static_cast<u128>(engine_()) * bound;
    const auto low = static_cast<std::uint64_t>(product);
    if (low >= (-bound) % bound) return static_cast<std::size_t>(product >> 64);
  }
}

std::size_t Rng::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (weights.empty() || !(total > 0.0)) throw ConfigError("Rng::categorical: no positive weight");
  double u = uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  // Rounding fell off the end; return the last positive entry.
  for (std::size_t i = weights.size(); i > 0; --i) {
    if (weights[i - 1] > 0.0) return i - 1;
  }
  return weights.size() - 1;
}

Rng Rng::fork(std::uint64_t stream) const {
  // splitmix64 over (seed, stream)
  std::uint64_t z = seed_ + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return Rng(z ^ (z >> 31));
}

}  // namespace discpar
