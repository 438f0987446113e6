#include "commsim/coding.hpp"

#include <bit>
#include <stdexcept>

namespace commsim::coding {

unsigned ceil_log2(std::uint64_t n) {
  if (n <= 1) return 0;
  return static_cast<unsigned>(64 - std::countl_zero(n - 1));
}

void write_gamma(BitVector& out, std::uint64_t value) {
  if (value == 0) throw std::invalid_argument("gamma code is defined for values >= 1");
  const auto width = static_cast<unsigned>(std::bit_width(value));
  for (unsigned i = 1; i < width; ++i) out.push_back(false);
  out.append_bits(value, width);
}

std::uint64_t read_gamma(BitReader& in) {
  unsigned zeros = 0;
  while (!in.read_bit()) {
    if (++zeros > 63) throw std::runtime_error("gamma code too long");
  }
  std::uint64_t value = 1;
  for (unsigned i = 0; i < zeros; ++i) value = (value << 1) | (in.read_bit() ? 1U : 0U);
  return value;
}

std::size_t gamma_length(std::uint64_t value) {
  return 2 * static_cast<std::size_t>(std::bit_width(value)) - 1;
}

void write_fixed(BitVector& out, std::uint64_t value, unsigned width) {
  if (width < 64 && (value >> width) != 0) throw std::invalid_argument("value does not fit in width");
  out.append_bits(value, width);
}

std::uint64_t read_fixed(BitReader& in, unsigned width) { return in.read_bits(width); }

void write_index_set(BitVector& out, std::span<const std::size_t> sorted_indices) {
  write_gamma(out, sorted_indices.size() + 1);
  std::size_t next = 0;
  for (auto i : sorted_indices) {
    if (i < next) throw std::invalid_argument("index set must be sorted and distinct");
    write_gamma(out, i - next + 1);
    next = i + 1;
  }
}

std::vector<std::size_t> read_index_set(BitReader& in, std::size_t universe) {
  try {
    const std::uint64_t count = read_gamma(in) - 1;
    if (count > universe) throw std::runtime_error("index set larger than universe");
    std::vector<std::size_t> out;
    out.reserve(count);
    std::size_t next = 0;
    for (std::uint64_t c = 0; c < count; ++c) {
      const std::uint64_t gap = read_gamma(in);
      const std::size_t index = next + gap - 1;
      if (index >= universe) throw std::runtime_error("decoded index out of range");
      out.push_back(index);
      next = index + 1;
    }
    return out;
  } catch (const std::out_of_range&) {
    throw std::runtime_error("truncated index set");
  }
}

}  // namespace commsim::coding
