#include "commsim/random_tape.hpp"

#include <numeric>
#include <stdexcept>

namespace commsim {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

RandomTape RandomTape::derive(std::string_view label) const {
  return RandomTape(mix64(seed_ ^ mix64(fnv1a(label) + kGolden)));
}

RandomTape RandomTape::derive(std::string_view label, std::uint64_t index) const {
  return RandomTape(mix64(derive(label).seed() + mix64(index + 1)));
}

std::uint64_t RandomTape::next_u64() {
  ++position_;
  return mix64(seed_ + position_ * kGolden);
}

namespace {
__extension__ using u128 = unsigned __int128;
}  // namespace

std::uint64_t RandomTape::uniform(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform bound must be positive");
  // Lemire's multiply-shift with rejection.
  std::uint64_t x = next_u64();
  auto m = static_cast<u128>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = next_u64();
      m = static_cast<u128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double RandomTape::uniform_real() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

bool RandomTape::bernoulli(double p) { return uniform_real() < p; }

std::vector<std::size_t> RandomTape::permutation(std::size_t n) {
  std::vector<std::size_t> out(n);
  std::iota(out.begin(), out.end(), std::size_t{0});
  shuffle(std::span<std::size_t>(out));
  return out;
}

std::vector<std::size_t> RandomTape::sample_without_replacement(std::size_t n, std::size_t m) {
  if (m > n) throw std::invalid_argument("cannot sample more elements than the population");
  std::vector<std::size_t> out;
  out.reserve(m);
  if (m * 4 < n) {
    // Floyd's algorithm keeps the cost proportional to m for sparse draws.
    std::vector<bool> taken(n, false);
    for (std::size_t j = n - m; j < n; ++j) {
      auto t = static_cast<std::size_t>(uniform(j + 1));
      if (taken[t]) t = j;
      taken[t] = true;
      out.push_back(t);
    }
    shuffle(std::span<std::size_t>(out));
    return out;
  }
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < m; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform(n - i));
    std::swap(pool[i], pool[j]);
    out.push_back(pool[i]);
  }
  return out;
}

}  // namespace commsim
