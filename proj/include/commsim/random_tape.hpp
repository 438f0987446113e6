#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace commsim {

/// Seeded public-randomness stream shared by all simulated endpoints.
///
/// Counter based: bit block i of the tape is a fixed mix of (seed, i), so the
/// same seed and the same sequence of draws reproduce the same values on any
/// platform. Sub-tapes derived from a label are independent streams that do
/// not advance the parent.
class RandomTape {
 public:
  using result_type = std::uint64_t;

  explicit RandomTape(std::uint64_t seed = 0) : seed_(seed) {}

  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] std::uint64_t position() const { return position_; }

  [[nodiscard]] RandomTape derive(std::string_view label) const;
  [[nodiscard]] RandomTape derive(std::string_view label, std::uint64_t index) const;

  std::uint64_t next_u64();
  /// Uniform on [0, bound); bound must be positive.
  std::uint64_t uniform(std::uint64_t bound);
  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform_real();
  bool bernoulli(double p);

  /// Fisher-Yates shuffle driven by this tape.
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  /// Uniform random permutation of 0..n-1.
  std::vector<std::size_t> permutation(std::size_t n);
  /// Uniform m-subset of 0..n-1, in random order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t m);

  // UniformRandomBitGenerator interface.
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next_u64(); }

 private:
  std::uint64_t seed_;
  std::uint64_t position_ = 0;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

}  // namespace commsim
