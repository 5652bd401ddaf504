#pragma once

// Cross-tuple delta coding: codes are sorted and the leading floor(log2 n)
// bits of each are replaced by the unary-coded difference to the previous
// code's leading bits.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "squish/bits.hpp"

namespace squish {

struct DeltaBlock {
  std::size_t n = 0;
  unsigned l = 0;
  BitString payload;
  /// Original code lengths, in sorted order.
  std::vector<std::size_t> lengths;
};

/// floor(log2 n); 0 for n <= 1.
unsigned delta_prefix_width(std::size_t n) noexcept;

/// v ones followed by a zero.
BitString unary(std::uint64_t v);

/// Order in which delta_encode emits the codes: by zero-padded content,
/// then by original length, then by input position.
std::vector<std::size_t> delta_order(std::span<const BitString> codes);

DeltaBlock delta_encode(std::span<const BitString> codes);

/// The codes in sorted order. Throws FormatError (decoded_rows = index of
/// the failing entry) on a malformed unary run or truncated payload.
std::vector<BitString> delta_decode(const DeltaBlock& block);

}  // namespace squish
