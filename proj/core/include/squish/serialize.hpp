#pragma once

// Little-endian byte framing used by the archive and model sections.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "squish/error.hpp"

namespace squish {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void varint(std::uint64_t v);
  void f32(float v);
  void f64(double v);
  void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  /// Varint length followed by the raw bytes.
  void blob(std::span<const std::uint8_t> b);
  void str(const std::string& s);

  const std::vector<std::uint8_t>& data() const noexcept { return buf_; }
  std::vector<std::uint8_t> take() noexcept { return std::move(buf_); }
  std::size_t size() const noexcept { return buf_.size(); }

 private:
  std::vector<std::uint8_t> buf_;
};

/// Bounds-checked reader; every underflow throws FormatError.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  std::uint64_t varint();
  /// varint that must fit in `limit`; guards allocation sizes.
  std::size_t count(std::size_t limit);
  float f32();
  double f64();
  std::span<const std::uint8_t> bytes(std::size_t n);
  std::span<const std::uint8_t> blob();
  std::string str();

  std::size_t position() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }
  bool at_end() const noexcept { return pos_ == data_.size(); }
  /// Throws FormatError when bytes are left over.
  void expect_end(const char* what) const;

 private:
  void need(std::size_t n) const;

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace squish
