#include "squish/delta.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include "squish/error.hpp"

namespace squish {

namespace {

BitString padded(const BitString& s, unsigned l) {
  BitString out = s;
  while (out.size() < l) out.push_back(false);
  return out;
}

}  // namespace

unsigned delta_prefix_width(std::size_t n) noexcept {
  return n <= 1 ? 0 : static_cast<unsigned>(std::bit_width(n) - 1);
}

BitString unary(std::uint64_t v) {
  BitString out;
  for (std::uint64_t i = 0; i < v; ++i) out.push_back(true);
  out.push_back(false);
  return out;
}

std::vector<std::size_t> delta_order(std::span<const BitString> codes) {
  const unsigned l = delta_prefix_width(codes.size());
  std::vector<BitString> keys;
  keys.reserve(codes.size());
  for (const auto& c : codes) keys.push_back(padded(c, l));
  std::vector<std::size_t> idx(codes.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (auto c = keys[a] <=> keys[b]; c != 0) return c < 0;
    return codes[a].size() < codes[b].size();
  });
  return idx;
}

DeltaBlock delta_encode(std::span<const BitString> codes) {
  DeltaBlock block;
  block.n = codes.size();
  block.l = delta_prefix_width(codes.size());
  std::uint64_t prev = 0;
  for (std::size_t i : delta_order(codes)) {
    const BitString p = padded(codes[i], block.l);
    const std::uint64_t a = p.read_bits(0, block.l);
    block.payload.append(unary(a - prev));
    block.payload.append(p.substr(block.l, p.size() - block.l));
    block.lengths.push_back(codes[i].size());
    prev = a;
  }
  return block;
}

std::vector<BitString> delta_decode(const DeltaBlock& block) {
  if (block.lengths.size() != block.n) throw FormatError("delta block length table size mismatch");
  if (block.l != delta_prefix_width(block.n)) throw FormatError("delta block prefix width mismatch");
  std::vector<BitString> out;
  out.reserve(block.n);
  std::size_t pos = 0;
  std::uint64_t a = 0;
  const std::uint64_t limit = block.l == 0 ? 0 : (std::uint64_t{1} << block.l) - 1;
  for (std::size_t i = 0; i < block.n; ++i) {
    for (;;) {
      if (pos >= block.payload.size())
        throw FormatError("delta payload truncated in entry " + std::to_string(i), i);
      if (!block.payload[pos++]) break;
      if (++a > limit) throw FormatError("malformed unary run in entry " + std::to_string(i), i);
    }
    const std::size_t len = block.lengths[i];
    const std::size_t suffix = len > block.l ? len - block.l : 0;
    if (pos + suffix > block.payload.size())
      throw FormatError("delta payload truncated in entry " + std::to_string(i), i);
    BitString code;
    code.append_bits(a, block.l);
    code.append(block.payload.substr(pos, suffix));
    pos += suffix;
    out.push_back(code.substr(0, len));
  }
  if (pos != block.payload.size()) throw FormatError("trailing bits in delta payload", block.n);
  return out;
}

}  // namespace squish
