#include "squish/bits.hpp"

#include <stdexcept>

namespace squish {

BitString BitString::from_string(std::string_view bits) {
  BitString s;
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("bit string may only contain '0' and '1'");
    s.push_back(c == '1');
  }
  return s;
}

BitString BitString::from_bytes(std::span<const std::uint8_t> bytes, std::size_t bit_count) {
  if (bit_count > bytes.size() * 8) throw std::invalid_argument("bit count exceeds byte span");
  BitString s;
  s.bytes_.assign(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>((bit_count + 7) / 8));
  s.size_ = bit_count;
  if (bit_count % 8) s.bytes_.back() &= static_cast<std::uint8_t>(0xFFu << (8 - bit_count % 8));
  return s;
}

void BitString::push_back(bool bit) {
  if ((size_ & 7) == 0) bytes_.push_back(0);
  if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (size_ & 7));
  ++size_;
}

void BitString::append_bits(std::uint64_t value, unsigned count) {
  for (unsigned i = count; i-- > 0;) push_back((value >> i) & 1u);
}

void BitString::append(const BitString& other) {
  if ((size_ & 7) == 0) {
    bytes_.insert(bytes_.end(), other.bytes_.begin(), other.bytes_.end());
    size_ += other.size_;
    return;
  }
  for (std::size_t i = 0; i < other.size_; ++i) push_back(other[i]);
}

BitString BitString::substr(std::size_t pos, std::size_t count) const {
  BitString s;
  for (std::size_t i = 0; i < count; ++i) s.push_back(pos + i < size_ && (*this)[pos + i]);
  return s;
}

std::uint64_t BitString::read_bits(std::size_t pos, unsigned count) const {
  std::uint64_t v = 0;
  for (unsigned i = 0; i < count; ++i) v = (v << 1) | ((pos + i < size_ && (*this)[pos + i]) ? 1u : 0u);
  return v;
}

std::string BitString::to_string() const {
  std::string out;
  out.reserve(size_);
  for (std::size_t i = 0; i < size_; ++i) out.push_back((*this)[i] ? '1' : '0');
  return out;
}

bool BitString::is_prefix_of(const BitString& other) const {
  if (size_ > other.size_) return false;
  for (std::size_t i = 0; i < size_; ++i)
    if ((*this)[i] != other[i]) return false;
  return true;
}

std::strong_ordering operator<=>(const BitString& a, const BitString& b) {
  const std::size_t n = std::min(a.size_, b.size_);
  const std::size_t full = n / 8;
  for (std::size_t i = 0; i < full; ++i)
    if (a.bytes_[i] != b.bytes_[i]) return a.bytes_[i] <=> b.bytes_[i];
  for (std::size_t i = full * 8; i < n; ++i)
    if (a[i] != b[i]) return a[i] <=> b[i];
  return a.size_ <=> b.size_;
}

}  // namespace squish
