#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace rlrel::rng {

// SplitMix64 output mix. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Seed for one resampling stream, a pure function of the base seed and the
// stream coordinates (test id, iteration, task, ...). Results never depend on
// which thread draws from which stream.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(base);
  for (auto p : path) h = mix64(h ^ mix64(p));
  return h;
}

// SplitMix64 generator; cheap to construct, which matters because every
// (iteration, task) pair gets a fresh stream.
class SplitMix64 {
public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() {
    const std::uint64_t z = state_;
    state_ += 0x9E3779B97F4A7C15ull;
    return mix64(z);
  }

private:
  std::uint64_t state_;
};

// Uniform integer in [0, n), n > 0. Rejection sampling keeps it unbiased and
// identical across standard libraries.
template <class Engine>
std::size_t uniform_below(Engine& eng, std::size_t n) {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = eng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

// Fisher-Yates shuffle using uniform_below.
template <class RandomIt, class Engine>
void shuffle(RandomIt first, RandomIt last, Engine& eng) {
  const auto n = static_cast<std::size_t>(last - first);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = uniform_below(eng, i);
    std::swap(first[static_cast<std::ptrdiff_t>(i - 1)], first[static_cast<std::ptrdiff_t>(j)]);
  }
}

} // namespace rlrel::rng
