#include "commsim/bit_vector.hpp"

#include <bit>
#include <stdexcept>

namespace commsim {

namespace {

std::size_t word_count(std::size_t bits) { return (bits + 63) / 64; }

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

BitVector::BitVector(std::size_t n, bool value) : size_(n), words_(word_count(n), value ? ~0ULL : 0ULL) {
  clear_tail();
}

BitVector BitVector::from_string(std::string_view bits) {
  BitVector out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      out.set(i);
    } else if (bits[i] != '0') {
      throw std::invalid_argument("bit string may only contain '0' and '1'");
    }
  }
  return out;
}

BitVector BitVector::from_hex(std::string_view hex, std::size_t n) {
  if (hex.size() != (n + 3) / 4) {
    throw std::invalid_argument("hex length does not match bit count");
  }
  BitVector out(n);
  for (std::size_t d = 0; d < hex.size(); ++d) {
    const int v = hex_value(hex[d]);
    if (v < 0) throw std::invalid_argument("invalid hex digit");
    for (int b = 0; b < 4; ++b) {
      const std::size_t i = d * 4 + static_cast<std::size_t>(b);
      const bool bit = (v >> (3 - b)) & 1;
      if (i < n) {
        out.set(i, bit);
      } else if (bit) {
        throw std::invalid_argument("nonzero padding in hex bit string");
      }
    }
  }
  return out;
}

BitVector BitVector::from_indices(std::size_t n, std::span<const std::size_t> indices) {
  BitVector out(n);
  for (auto i : indices) {
    if (i >= n) throw std::out_of_range("index out of range");
    out.set(i);
  }
  return out;
}

void BitVector::set(std::size_t i, bool value) {
  const std::uint64_t mask = 1ULL << (i & 63);
  if (value) {
    words_[i >> 6] |= mask;
  } else {
    words_[i >> 6] &= ~mask;
  }
}

void BitVector::flip(std::size_t i) { words_[i >> 6] ^= 1ULL << (i & 63); }

void BitVector::push_back(bool bit) {
  if ((size_ & 63) == 0) words_.push_back(0);
  ++size_;
  if (bit) set(size_ - 1);
}

void BitVector::append_bits(std::uint64_t value, unsigned width) {
  for (unsigned b = width; b-- > 0;) push_back((value >> b) & 1U);
}

void BitVector::append(const BitVector& other) {
  for (std::size_t i = 0; i < other.size(); ++i) push_back(other.test(i));
}

std::size_t BitVector::count() const {
  std::size_t total = 0;
  for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

std::vector<std::size_t> BitVector::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t word = words_[w];
    while (word != 0) {
      out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(word)));
      word &= word - 1;
    }
  }
  return out;
}

std::string BitVector::to_string() const {
  std::string out(size_, '0');
  for (std::size_t i = 0; i < size_; ++i) {
    if (test(i)) out[i] = '1';
  }
  return out;
}

std::string BitVector::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve((size_ + 3) / 4);
  for (std::size_t d = 0; d * 4 < size_; ++d) {
    int v = 0;
    for (int b = 0; b < 4; ++b) {
      const std::size_t i = d * 4 + static_cast<std::size_t>(b);
      v = (v << 1) | ((i < size_ && test(i)) ? 1 : 0);
    }
    out.push_back(kDigits[v]);
  }
  return out;
}

BitVector& BitVector::operator^=(const BitVector& other) {
  require_same_size(other);
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
  return *this;
}

BitVector& BitVector::operator|=(const BitVector& other) {
  require_same_size(other);
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= other.words_[w];
  return *this;
}

BitVector& BitVector::operator&=(const BitVector& other) {
  require_same_size(other);
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= other.words_[w];
  return *this;
}

BitVector BitVector::operator~() const {
  BitVector out = *this;
  for (auto& w : out.words_) w = ~w;
  out.clear_tail();
  return out;
}

void BitVector::require_same_size(const BitVector& other) const {
  if (size_ != other.size_) throw std::invalid_argument("bit vector length mismatch");
}

void BitVector::clear_tail() {
  if ((size_ & 63) != 0 && !words_.empty()) {
    words_.back() &= (1ULL << (size_ & 63)) - 1;
  }
}

bool BitReader::read_bit() {
  if (pos_ >= bits_->size()) throw std::out_of_range("read past end of payload");
  return bits_->test(pos_++);
}

std::uint64_t BitReader::read_bits(unsigned width) {
  std::uint64_t v = 0;
  for (unsigned b = 0; b < width; ++b) v = (v << 1) | (read_bit() ? 1U : 0U);
  return v;
}

}  // namespace commsim
