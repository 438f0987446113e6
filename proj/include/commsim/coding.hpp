#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "commsim/bit_vector.hpp"

namespace commsim::coding {

/// Smallest w with 2^w >= n; 0 for n <= 1.
unsigned ceil_log2(std::uint64_t n);

/// Elias gamma code of value >= 1: floor(log2 v) zeros, then v in binary.
void write_gamma(BitVector& out, std::uint64_t value);
std::uint64_t read_gamma(BitReader& in);
/// Length in bits of the gamma code of value.
std::size_t gamma_length(std::uint64_t value);

void write_fixed(BitVector& out, std::uint64_t value, unsigned width);
std::uint64_t read_fixed(BitReader& in, unsigned width);

/// Coordinate set as gamma(|S|+1) followed by gamma-coded gaps of the sorted
/// indices (first gap is index+1). The empty set costs exactly one bit.
void write_index_set(BitVector& out, std::span<const std::size_t> sorted_indices);
/// Throws std::runtime_error on malformed input or an index >= universe.
std::vector<std::size_t> read_index_set(BitReader& in, std::size_t universe);

}  // namespace commsim::coding
