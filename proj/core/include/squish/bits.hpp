#pragma once

// Bit strings packed most-significant-bit first, plus a random-access
// bit source abstraction used by the decoder.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace squish {

class BitString {
 public:
  BitString() = default;
  /// Parses a string of '0'/'1' characters.
  static BitString from_string(std::string_view bits);
  /// Wraps packed bytes; `bit_count` may end mid-byte.
  static BitString from_bytes(std::span<const std::uint8_t> bytes, std::size_t bit_count);

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  bool operator[](std::size_t i) const noexcept { return (bytes_[i >> 3] >> (7 - (i & 7))) & 1u; }

  void push_back(bool bit);
  /// Appends the low `count` bits of `value`, most significant first.
  void append_bits(std::uint64_t value, unsigned count);
  void append(const BitString& other);
  void clear() noexcept {
    bytes_.clear();
    size_ = 0;
  }

  /// Copy of bits [pos, pos + count); bits past the end read as zero.
  BitString substr(std::size_t pos, std::size_t count) const;
  /// Value of bits [pos, pos + count) with count <= 64; zero past the end.
  std::uint64_t read_bits(std::size_t pos, unsigned count) const;

  /// Packed storage; the final partial byte is zero padded.
  const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }
  std::string to_string() const;

  bool is_prefix_of(const BitString& other) const;

  friend bool operator==(const BitString& a, const BitString& b) {
    return a.size_ == b.size_ && a.bytes_ == b.bytes_;
  }
  /// Lexicographic order on the bit sequence; a proper prefix sorts first.
  friend std::strong_ordering operator<=>(const BitString& a, const BitString& b);

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t size_ = 0;
};

/// Random-access bit stream. Reads past size() return 0.
class BitSource {
 public:
  virtual ~BitSource() = default;
  virtual bool bit(std::size_t pos) const = 0;
  virtual std::size_t size() const = 0;
};

/// Bit source over packed bytes owned elsewhere.
class SpanBitSource final : public BitSource {
 public:
  SpanBitSource(std::span<const std::uint8_t> bytes, std::size_t bit_count)
      : bytes_(bytes), bits_(std::min(bit_count, bytes.size() * 8)) {}
  explicit SpanBitSource(const BitString& s) : SpanBitSource(s.bytes(), s.size()) {}

  bool bit(std::size_t pos) const override {
    if (pos >= bits_) return false;
    return (bytes_[pos >> 3] >> (7 - (pos & 7))) & 1u;
  }
  std::size_t size() const override { return bits_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t bits_;
};

}  // namespace squish
