#pragma once

// Deterministic randomness utilities. All draws go through Rng, which wraps
// std::mt19937_64 (whose output stream is fixed by the standard) and applies
// portable bounded-draw / shuffle algorithms on top. Nothing here depends on
// implementation-defined distribution internals, so identical seeds give
// identical streams on every platform.

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace msat::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Pure combiner used to derive per-example seeds from (root seed, index).
// Results are independent of iteration order and worker count.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  return splitmix64(root ^ splitmix64(index));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform draw in [0, n). Rejection keeps the draw unbiased.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    std::uint64_t x;
    do {
      x = next();
    } while (x < threshold);
    return x % n;
  }

  // Uniform draw in [lo, hi], inclusive.
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("Rng::range: lo > hi");
    const std::uint64_t span =
        static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    return lo + static_cast<std::int64_t>(below(span));
  }

  // Uniform double in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Index drawn proportionally to w[i]. Weights must be non-negative with a
  // positive sum (validated by callers).
  std::size_t weighted(std::span<const double> w) {
    double total = 0.0;
    for (double x : w) total += x;
    const double u = unit() * total;
    double cum = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] > 0.0) last_positive = i;
      cum += w[i];
      if (u < cum) return i;
    }
    return last_positive;
  }

  // Fisher-Yates with our own bounded draw; std::shuffle is not portable.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace msat::rng
