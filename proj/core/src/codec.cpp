#include "squish/codec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace squish {

using detail::u128;

ProbabilityInterval interval_product(const ProbabilityInterval& a, const ProbabilityInterval& b) {
  const double w = a.r - a.l;
  return {a.l + w * b.l, a.l + w * b.r};
}

void ApproxConfig::validate() const {
  if (precision < 8 || precision > 63)
    throw ConfigError("codec precision must be between 8 and 63 bits, got " + std::to_string(precision));
  if (min_width_log2 < 2 || min_width_log2 >= precision)
    throw ConfigError("minimum interval width must satisfy 2^-precision < width <= 1/4");
}

GridInterval to_grid(const ProbabilityInterval& iv, const ApproxConfig& cfg) {
  const long double one = static_cast<long double>(cfg.one());
  auto snap = [&](double x) {
    const long double v = std::clamp(static_cast<long double>(x), 0.0L, 1.0L) * one;
    return static_cast<std::uint64_t>(std::llroundl(v));
  };
  return {snap(iv.l), snap(iv.r)};
}

ProbabilityInterval to_real(const GridInterval& iv, const ApproxConfig& cfg) {
  const long double one = static_cast<long double>(cfg.one());
  return {static_cast<double>(iv.lo / one), static_cast<double>(iv.hi / one)};
}

std::vector<GridInterval> cumulative_intervals(std::span<const double> probabilities,
                                               const ApproxConfig& cfg) {
  const std::size_t k = probabilities.size();
  if (k == 0) throw ConfigError("branch distribution has no branches");
  const std::uint64_t one = cfg.one();
  const std::uint64_t min_w = cfg.min_width();
  if (static_cast<u128>(k) * min_w > one)
    throw ConfigError("too many branches for the minimum interval width");
  for (double p : probabilities)
    if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError("branch probability must be finite and >= 0");

  std::vector<bool> pinned(k, false);
  std::size_t pinned_count = 0;
  long double free_mass = 0.0L;
  long double budget = 0.0L;
  for (;;) {
    free_mass = 0.0L;
    for (std::size_t i = 0; i < k; ++i)
      if (!pinned[i]) free_mass += probabilities[i];
    budget = static_cast<long double>(one - pinned_count * min_w);
    if (free_mass <= 0.0L) break;
    bool changed = false;
    for (std::size_t i = 0; i < k; ++i) {
      if (pinned[i]) continue;
      if (probabilities[i] / free_mass * budget < static_cast<long double>(min_w)) {
        pinned[i] = true;
        ++pinned_count;
        changed = true;
      }
    }
    if (!changed) break;
  }

  std::vector<std::uint64_t> widths(k, min_w);
  const std::size_t free_count = k - pinned_count;
  for (std::size_t i = 0; i < k; ++i) {
    if (pinned[i]) continue;
    const long double share =
        free_mass > 0.0L ? probabilities[i] / free_mass * budget : budget / static_cast<long double>(free_count);
    widths[i] = std::max(min_w, static_cast<std::uint64_t>(std::floor(share)));
  }

  u128 total = 0;
  for (auto w : widths) total += w;
  // Rounding slack goes to the widest free branch (first on ties), or to the
  // most probable branch when every branch was pinned.
  std::size_t sink = 0;
  if (free_count > 0) {
    bool found = false;
    for (std::size_t i = 0; i < k; ++i)
      if (!pinned[i] && (!found || widths[i] > widths[sink])) {
        sink = i;
        found = true;
      }
  } else {
    for (std::size_t i = 1; i < k; ++i)
      if (probabilities[i] > probabilities[sink]) sink = i;
  }
  if (total <= one) {
    widths[sink] += static_cast<std::uint64_t>(one - total);
  } else {
    widths[sink] -= static_cast<std::uint64_t>(total - one);
  }

  std::vector<GridInterval> out(k);
  std::uint64_t lo = 0;
  for (std::size_t i = 0; i < k; ++i) {
    out[i] = {lo, lo + widths[i]};
    lo += widths[i];
  }
  out.back().hi = one;
  return out;
}

DetProduct det_product(const GridInterval& cur, const GridInterval& pi, const ApproxConfig& cfg) {
  DetProduct out;
  out.rest = det_product(cur, pi, cfg, [&](bool bit) { out.prefix.push_back(bit); });
  return out;
}

std::pair<unsigned, std::uint64_t> terminal_interval(const GridInterval& iv, const ApproxConfig& cfg) {
  const u128 one = cfg.one();
  for (unsigned k = 0; k <= cfg.precision; ++k) {
    const u128 unit = one >> k;
    const u128 m = (iv.lo + unit - 1) / unit;
    if ((m + 1) * unit <= iv.hi) return {k, static_cast<std::uint64_t>(m)};
  }
  throw ConfigError("interval too narrow for a terminal code");
}

Encoder::Encoder(ApproxConfig cfg) : cfg_(cfg), state_{0, cfg.one()} { cfg_.validate(); }

void Encoder::push(const GridInterval& pi) {
  if (pi.hi > cfg_.one() || pi.lo >= pi.hi || pi.width() < cfg_.min_width())
    throw ConfigError("branch interval narrower than the minimum width");
  state_ = det_product(state_, pi, cfg_, [&](bool bit) { code_.push_back(bit); });
}

BitString Encoder::finish() {
  const auto [k, m] = terminal_interval(state_, cfg_);
  code_.append_bits(m, k);
  if (code_.empty()) code_.push_back(false);
  BitString out = std::move(code_);
  code_.clear();
  state_ = {0, cfg_.one()};
  return out;
}

BitString encode(std::span<const GridInterval> intervals, const ApproxConfig& cfg) {
  Encoder enc(cfg);
  for (const auto& iv : intervals) enc.push(iv);
  return enc.finish();
}

Decoder::Decoder(const BitSource& source, std::size_t start, ApproxConfig cfg)
    : source_(source), cfg_(cfg), state_{0, cfg.one()}, pos_(start), code_start_(start) {
  cfg_.validate();
  const unsigned window_bits = 2 * cfg_.precision;
  for (unsigned i = 0; i < window_bits; ++i) window_ = (window_ << 1) | (source_.bit(start + i) ? 1u : 0u);
}

bool Decoder::top_bit() const noexcept { return (window_ >> (2 * cfg_.precision - 1)) & 1u; }

void Decoder::consume(bool expected) {
  if (pos_ >= source_.size()) throw FormatError("code stream truncated");
  if (top_bit() != expected) throw FormatError("code stream inconsistent with the model");
  const unsigned window_bits = 2 * cfg_.precision;
  const u128 mask = (u128{1} << window_bits) - 1;
  window_ = ((window_ << 1) & mask) | (source_.bit(pos_ + window_bits) ? 1u : 0u);
  ++pos_;
}

std::size_t Decoder::next_branch(std::span<const GridInterval> branches) {
  if (branches.empty()) throw ConfigError("no branches to decode");
  const unsigned p = cfg_.precision;
  const u128 base = u128{state_.lo} << p;
  const u128 w = state_.width();
  std::size_t lo = 0;
  std::size_t hi = branches.size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (window_ < base + w * branches[mid].hi)
      hi = mid;
    else
      lo = mid + 1;
  }
  if (lo == branches.size() || window_ < base + w * branches[lo].lo)
    throw FormatError("code point outside every branch interval");
  const GridInterval& pick = branches[lo];
  if (pick.width() < cfg_.min_width()) throw ConfigError("branch interval narrower than the minimum width");
  state_ = det_product(state_, pick, cfg_, [&](bool bit) { consume(bit); });
  return lo;
}

void Decoder::finish() {
  const auto [k, m] = terminal_interval(state_, cfg_);
  for (unsigned i = k; i-- > 0;) consume((m >> i) & 1u);
  if (code_bits() == 0) consume(false);
  state_ = {0, cfg_.one()};
  code_start_ = pos_;
}

}  // namespace squish
