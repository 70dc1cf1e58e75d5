#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace luq {

// Deterministic RNG with cheap substream derivation. All samplers are
// implemented in-house so that a (seed, stream) pair yields the same draws
// on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(splitmix(seed ^ kStreamSalt)) {}

  // Independent stream for item `index` (trajectory, tree, start, ...).
  // Parallel and serial execution see identical per-item draws.
  Rng substream(std::uint64_t index) const {
    return Rng(splitmix(state_ + 0x9E3779B97F4A7C15ULL * (index + 1)));
  }

  std::uint64_t next_u64() {
    // xorshift64* step on top of a splitmix-initialized state
    std::uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545F4914F6CDD1DULL;
  }

  // Uniform double in [0, 1), 53-bit resolution.
  double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi) {
    if (hi < lo) throw std::invalid_argument("uniform_int: hi < lo");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return lo + static_cast<int>(x % span);
  }

  bool bernoulli(double p) { return u01() < p; }

  // Box-Muller; one uniform pair per variate keeps calls stateless.
  double normal() {
    const double u1 = 1.0 - u01();
    const double u2 = u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  int binomial(int n, double p) {
    int k = 0;
    for (int i = 0; i < n; ++i) k += bernoulli(p) ? 1 : 0;
    return k;
  }

  // Knuth multiplication method; means here stay below ~exp(3.5).
  int poisson(double mean) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson: negative mean");
    const double limit = std::exp(-mean);
    double prod = 1.0;
    int k = -1;
    do {
      ++k;
      prod *= u01();
    } while (prod > limit && k < 1000000);
    return k;
  }

  // Index in [0, probs.size()) with the given (normalized) probabilities.
  int categorical(std::span<const double> probs) {
    const double u = u01();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  }

  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

 private:
  static constexpr std::uint64_t kStreamSalt = 0xA02B0C94C3A18F6DULL;
  std::uint64_t state_;
};

}  // namespace luq
