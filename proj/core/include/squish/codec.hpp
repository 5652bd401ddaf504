#pragma once

// Finite-precision arithmetic coding over probability intervals.
//
// Intervals live on a fixed-point grid with `precision` fraction bits. The
// encoder folds each branch interval into the working interval with a
// deterministic approximation of the interval product that
//   (1) never leaves the exact product, and
//   (2) after emitting every determined leading bit, leaves a working
//       interval no narrower than 2^-min_width_log2.
// The decoder runs the very same routine, so both sides hold bit-identical
// working intervals after every branch.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "squish/bits.hpp"
#include "squish/error.hpp"

namespace squish {

/// Real-valued probability interval [l, r] within [0, 1].
struct ProbabilityInterval {
  double l = 0.0;
  double r = 1.0;

  double width() const noexcept { return r - l; }
  friend bool operator==(const ProbabilityInterval&, const ProbabilityInterval&) = default;
};

/// Exact composition: the second interval nested inside the first.
ProbabilityInterval interval_product(const ProbabilityInterval& a, const ProbabilityInterval& b);

struct ApproxConfig {
  unsigned precision = 63;       // fraction bits of the grid
  unsigned min_width_log2 = 40;  // minimum interval width is 2^-min_width_log2

  /// Throws ConfigError unless 2^-precision < 2^-min_width_log2 <= 1/4.
  void validate() const;
  std::uint64_t one() const noexcept { return std::uint64_t{1} << precision; }
  std::uint64_t min_width() const noexcept { return std::uint64_t{1} << (precision - min_width_log2); }

  friend bool operator==(const ApproxConfig&, const ApproxConfig&) = default;
};

/// Interval with endpoints in units of 2^-precision; hi may equal one().
struct GridInterval {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  std::uint64_t width() const noexcept { return hi - lo; }
  friend bool operator==(const GridInterval&, const GridInterval&) = default;
};

GridInterval to_grid(const ProbabilityInterval& iv, const ApproxConfig& cfg);
ProbabilityInterval to_real(const GridInterval& iv, const ApproxConfig& cfg);

/// Tiles [0, 1] with one grid interval per branch. Every width is at least
/// the configured minimum; branches that would fall short are raised to it
/// and the remaining mass is shared proportionally among the others.
std::vector<GridInterval> cumulative_intervals(std::span<const double> probabilities,
                                               const ApproxConfig& cfg);

namespace detail {
using u128 = unsigned __int128;
}

/// Deterministic product of the working interval `cur` and branch interval
/// `pi`, followed by renormalization. Each bit that becomes determined is
/// passed to `emit`; the renormalized interval is returned.
///
/// Preconditions: `cur` is renormalized (it straddles 1/2 or is [0, 1]) and
/// both widths are at least cfg.min_width().
template <class Emit>
GridInterval det_product(GridInterval cur, GridInterval pi, const ApproxConfig& cfg, Emit&& emit) {
  using detail::u128;
  const unsigned p = cfg.precision;
  const u128 half = u128{1} << (2 * p - 1);
  const u128 w = cur.hi - cur.lo;
  u128 a = (u128{cur.lo} << p) + w * pi.lo;
  u128 b = (u128{cur.lo} << p) + w * pi.hi;
  // After rounding to the grid the width must still reach min_width.
  const u128 threshold = (u128{1} << (2 * p - cfg.min_width_log2)) + (u128{2} << p);
  for (;;) {
    if (b <= half) {
      emit(false);
      a <<= 1;
      b <<= 1;
    } else if (a >= half) {
      emit(true);
      a = (a - half) << 1;
      b = (b - half) << 1;
    } else if (b - a >= threshold) {
      break;
    } else if (half - a >= b - half) {
      b = half;  // keep the larger side of 1/2
    } else {
      a = half;
    }
  }
  std::uint64_t lo = static_cast<std::uint64_t>((a + (u128{1} << p) - 1) >> p);
  std::uint64_t hi = static_cast<std::uint64_t>(b >> p);
  const std::uint64_t ghalf = std::uint64_t{1} << (p - 1);
  for (;;) {
    if (hi <= ghalf) {
      emit(false);
      lo <<= 1;
      hi <<= 1;
    } else if (lo >= ghalf) {
      emit(true);
      lo = (lo - ghalf) << 1;
      hi = (hi - ghalf) << 1;
    } else {
      break;
    }
  }
  return {lo, hi};
}

/// Result of det_product in closed form: the absolute interval is
/// (prefix + rest / 2^precision) / 2^prefix.size().
struct DetProduct {
  BitString prefix;
  GridInterval rest;
};

DetProduct det_product(const GridInterval& cur, const GridInterval& pi, const ApproxConfig& cfg);

/// Smallest k and M with [M 2^-k, (M + 1) 2^-k] inside `iv`.
std::pair<unsigned, std::uint64_t> terminal_interval(const GridInterval& iv, const ApproxConfig& cfg);

/// Streaming encoder for one tuple (or any interval sequence).
class Encoder {
 public:
  explicit Encoder(ApproxConfig cfg = {});

  void push(const GridInterval& pi);
  /// Appends the terminal dyadic interval and returns the complete code.
  /// A code is never empty: an otherwise empty code is the single bit 0.
  /// The encoder is reset for the next sequence.
  BitString finish();

  const GridInterval& state() const noexcept { return state_; }
  const BitString& bits() const noexcept { return code_; }
  const ApproxConfig& config() const noexcept { return cfg_; }

 private:
  ApproxConfig cfg_;
  GridInterval state_;
  BitString code_;
};

/// Encodes a whole interval sequence as one code.
BitString encode(std::span<const GridInterval> intervals, const ApproxConfig& cfg = {});

/// Streaming decoder mirroring Encoder. Codes are read starting at `start`
/// in `source`; consecutive codes can be decoded back to back.
///
/// The decoder keeps a 2*precision-bit window of upcoming bits. Each bit is
/// loaded into the window once and the stream position only moves forward.
class Decoder {
 public:
  Decoder(const BitSource& source, std::size_t start = 0, ApproxConfig cfg = {});

  /// Picks the branch whose interval contains the coded point. `branches`
  /// must be sorted and non-overlapping (cumulative_intervals output).
  /// Throws FormatError if the bits are inconsistent with every branch.
  std::size_t next_branch(std::span<const GridInterval> branches);

  /// Consumes the terminal bits of the current code and resets the working
  /// interval. Throws FormatError when the code runs past the source.
  void finish();

  /// Absolute position of the next unconsumed bit.
  std::size_t position() const noexcept { return pos_; }
  const GridInterval& state() const noexcept { return state_; }
  /// Bits consumed since the current code started.
  std::size_t code_bits() const noexcept { return pos_ - code_start_; }

 private:
  bool top_bit() const noexcept;
  void consume(bool expected);

  const BitSource& source_;
  ApproxConfig cfg_;
  GridInterval state_;
  detail::u128 window_ = 0;
  std::size_t pos_;
  std::size_t code_start_;
};

}  // namespace squish
