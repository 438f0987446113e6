#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace commsim {

/// Fixed-length bit sequence backed by 64-bit words.
///
/// Used both for player inputs (coordinates 0..n-1) and for message
/// payloads, which grow through push_back/append_bits. Bits past size()
/// in the last word are always zero.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t n, bool value = false);

  /// Parses a string of '0'/'1' characters; the first character is bit 0.
  static BitVector from_string(std::string_view bits);
  /// Parses hex produced by to_hex(); bit 0 is the high bit of the first digit.
  static BitVector from_hex(std::string_view hex, std::size_t n);
  static BitVector from_indices(std::size_t n, std::span<const std::size_t> indices);

  [[nodiscard]] std::size_t size() const { return size_; }
  [[nodiscard]] bool empty() const { return size_ == 0; }

  [[nodiscard]] bool test(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1U;
  }
  void set(std::size_t i, bool value = true);
  void flip(std::size_t i);

  void push_back(bool bit);
  /// Appends the low `width` bits of `value`, most significant first.
  void append_bits(std::uint64_t value, unsigned width);
  void append(const BitVector& other);

  [[nodiscard]] std::size_t count() const;
  /// Sorted positions of the one bits.
  [[nodiscard]] std::vector<std::size_t> indices() const;

  [[nodiscard]] std::string to_string() const;
  [[nodiscard]] std::string to_hex() const;

  [[nodiscard]] std::span<const std::uint64_t> words() const { return words_; }
  [[nodiscard]] std::span<std::uint64_t> words() { return words_; }

  BitVector& operator^=(const BitVector& other);
  BitVector& operator|=(const BitVector& other);
  BitVector& operator&=(const BitVector& other);
  [[nodiscard]] BitVector operator~() const;

  friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }
  friend BitVector operator|(BitVector a, const BitVector& b) { return a |= b; }
  friend BitVector operator&(BitVector a, const BitVector& b) { return a &= b; }
  friend bool operator==(const BitVector& a, const BitVector& b) = default;

 private:
  void require_same_size(const BitVector& other) const;
  void clear_tail();

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Sequential reader over a BitVector, the inverse of push_back/append_bits.
class BitReader {
 public:
  explicit BitReader(const BitVector& bits) : bits_(&bits) {}

  [[nodiscard]] bool at_end() const { return pos_ >= bits_->size(); }
  [[nodiscard]] std::size_t position() const { return pos_; }
  [[nodiscard]] std::size_t remaining() const { return bits_->size() - pos_; }

  /// Throws std::out_of_range when the payload is exhausted.
  bool read_bit();
  std::uint64_t read_bits(unsigned width);

 private:
  const BitVector* bits_;
  std::size_t pos_ = 0;
};

}  // namespace commsim
