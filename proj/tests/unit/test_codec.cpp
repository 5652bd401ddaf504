#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "reference_coder.hpp"
#include "squish/codec.hpp"

using namespace squish;
using namespace squish::testing;

namespace {

const ApproxConfig kCfg;

Rational q(long a, long b = 1) { return Rational(a, b); }

Rational pow2(unsigned k) { return Rational(boost::multiprecision::cpp_int(1) << k); }

// Absolute interval described by a det_product result.
RInterval absolute(const DetProduct& d, const ApproxConfig& cfg) {
  Rational base{0};
  Rational scale{1};
  for (std::size_t i = 0; i < d.prefix.size(); ++i) {
    scale /= 2;
    if (d.prefix[i]) base += scale;
  }
  const RInterval rest = rational(d.rest, cfg);
  return {base + scale * rest.l, base + scale * rest.r};
}

GridInterval random_renormalized(std::mt19937_64& rng, const ApproxConfig& cfg) {
  const std::uint64_t half = cfg.one() / 2;
  for (;;) {
    const int mode = std::uniform_int_distribution<int>(0, 2)(rng);
    std::uint64_t w = mode == 0 ? cfg.min_width() + rng() % 1024
                                : std::uniform_int_distribution<std::uint64_t>(cfg.min_width(), cfg.one())(rng);
    if (mode == 2) w = cfg.min_width() << std::uniform_int_distribution<int>(0, 30)(rng);
    if (w > cfg.one()) continue;
    const std::uint64_t lo_min = half > w ? half - w + 1 : 0;
    const std::uint64_t lo_max = std::min<std::uint64_t>(half - 1, cfg.one() - w);
    if (lo_min > lo_max) continue;
    const std::uint64_t lo = std::uniform_int_distribution<std::uint64_t>(lo_min, lo_max)(rng);
    return {lo, lo + w};
  }
}

GridInterval random_branch(std::mt19937_64& rng, const ApproxConfig& cfg) {
  const int mode = std::uniform_int_distribution<int>(0, 2)(rng);
  std::uint64_t w = mode == 0 ? cfg.min_width() + rng() % 1024
                              : std::uniform_int_distribution<std::uint64_t>(cfg.min_width(), cfg.one())(rng);
  if (mode == 2) w = cfg.min_width() << std::uniform_int_distribution<int>(0, 39)(rng);
  const std::uint64_t lo = std::uniform_int_distribution<std::uint64_t>(0, cfg.one() - w)(rng);
  return {lo, lo + w};
}

std::vector<GridInterval> random_distribution(std::mt19937_64& rng, const ApproxConfig& cfg) {
  const std::size_t k = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
  std::vector<double> p(k);
  for (auto& x : p) x = std::uniform_int_distribution<int>(0, 4)(rng) == 0 ? 1e-14 : std::uniform_real_distribution<double>()(rng);
  double sum = 0;
  for (double x : p) sum += x;
  for (auto& x : p) x /= sum;
  return cumulative_intervals(p, cfg);
}

}  // namespace

TEST(IntervalProduct, FigureTwoFixture) {
  auto iv = interval_product(interval_product({0, 0.4}, {0.3, 1}), {0, 0.3});
  EXPECT_NEAR(iv.l, 0.12, 1e-15);
  EXPECT_NEAR(iv.r, 0.204, 1e-15);
  RInterval exact;
  for (const auto& x : {RInterval{q(0), q(2, 5)}, RInterval{q(3, 10), q(1)}, RInterval{q(0), q(3, 10)}})
    exact = product(exact, x);
  EXPECT_EQ(exact, (RInterval{q(12, 100), q(204, 1000)}));
}

TEST(IntervalProduct, UnitIsIdentity) {
  const ProbabilityInterval b{0.25, 0.625};
  EXPECT_EQ(interval_product({0, 1}, b), b);
}

TEST(IntervalProduct, WidthIsProductOfWidths) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    if (a > b) std::swap(a, b);
    if (c > d) std::swap(c, d);
    const auto exact = product({Rational(a), Rational(b)}, {Rational(c), Rational(d)});
    EXPECT_EQ(exact.width(), (Rational(b) - Rational(a)) * (Rational(d) - Rational(c)));
    EXPECT_NEAR(interval_product({a, b}, {c, d}).width(), (b - a) * (d - c), 1e-15);
  }
}

TEST(ApproxConfig, Validation) {
  EXPECT_NO_THROW(kCfg.validate());
  EXPECT_EQ(kCfg.min_width(), std::uint64_t{1} << 23);
  EXPECT_THROW((ApproxConfig{63, 1}.validate()), ConfigError);
  EXPECT_THROW((ApproxConfig{40, 40}.validate()), ConfigError);
  EXPECT_THROW((ApproxConfig{64, 40}.validate()), ConfigError);
  EXPECT_NO_THROW((ApproxConfig{16, 8}.validate()));
}

TEST(CumulativeIntervals, EvenSplit) {
  const std::vector<double> p{0.5, 0.5};
  const auto iv = cumulative_intervals(p, kCfg);
  ASSERT_EQ(iv.size(), 2u);
  EXPECT_EQ(iv[0], (GridInterval{0, kCfg.one() / 2}));
  EXPECT_EQ(iv[1], (GridInterval{kCfg.one() / 2, kCfg.one()}));
}

TEST(CumulativeIntervals, GeometricRoot) {
  const std::vector<double> p{0.1, 0.9};
  const auto iv = cumulative_intervals(p, kCfg);
  EXPECT_EQ(iv[0].lo, 0u);
  EXPECT_NEAR(to_real(iv[0], kCfg).r, 0.1, 1e-15);
  EXPECT_EQ(iv[0].hi, iv[1].lo);
  EXPECT_EQ(iv[1].hi, kCfg.one());
}

// 2^-40 is about 9.1e-13, so 1e-12 already clears the minimum width.
TEST(CumulativeIntervals, TinyBranchIsRaisedToMinimum) {
  const std::vector<double> p{1e-13, 1.0 - 1e-13};
  const auto iv = cumulative_intervals(p, kCfg);
  EXPECT_EQ(iv[0].width(), kCfg.min_width());
  EXPECT_EQ(iv[1].width(), kCfg.one() - kCfg.min_width());
}

TEST(CumulativeIntervals, ZeroProbabilityStillCodable) {
  const std::vector<double> p{0.0, 1.0, 0.0};
  const auto iv = cumulative_intervals(p, kCfg);
  for (const auto& g : iv) EXPECT_GE(g.width(), kCfg.min_width());
}

TEST(CumulativeIntervals, TilesUnitInterval) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 2000; ++t) {
    const auto iv = random_distribution(rng, kCfg);
    EXPECT_EQ(iv.front().lo, 0u);
    EXPECT_EQ(iv.back().hi, kCfg.one());
    for (std::size_t i = 0; i < iv.size(); ++i) {
      EXPECT_GE(iv[i].width(), kCfg.min_width());
      if (i) {
        EXPECT_EQ(iv[i - 1].hi, iv[i].lo);
      }
    }
  }
}

TEST(CumulativeIntervals, RejectsTooManyBranches) {
  const ApproxConfig small{8, 2};
  const std::vector<double> p(5, 0.2);
  EXPECT_THROW(cumulative_intervals(p, small), ConfigError);
  EXPECT_THROW(cumulative_intervals(std::vector<double>{}, kCfg), ConfigError);
}

TEST(DetProduct, SubsetOfExactProductAndWideEnough) {
  std::mt19937_64 rng(3);
  const std::uint64_t half = kCfg.one() / 2;
  for (int t = 0; t < 20000; ++t) {
    const GridInterval cur = t % 10 == 0 ? GridInterval{0, kCfg.one()} : random_renormalized(rng, kCfg);
    const GridInterval pi = random_branch(rng, kCfg);
    const DetProduct d = det_product(cur, pi, kCfg);
    const RInterval exact = product(rational(cur, kCfg), rational(pi, kCfg));
    EXPECT_TRUE(exact.contains(absolute(d, kCfg))) << t;
    EXPECT_GE(d.rest.width(), kCfg.min_width());
    EXPECT_TRUE(d.rest.lo < half && d.rest.hi > half);
  }
}

TEST(DetProduct, UnitWorkingIntervalStaysInsideBranch) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 2000; ++t) {
    const GridInterval pi = random_branch(rng, kCfg);
    const DetProduct d = det_product({0, kCfg.one()}, pi, kCfg);
    EXPECT_TRUE(rational(pi, kCfg).contains(absolute(d, kCfg)));
    EXPECT_GE(d.rest.width(), kCfg.min_width());
  }
}

TEST(DetProduct, ExactWhenNoRoundingNeeded) {
  const GridInterval half{0, kCfg.one() / 2};
  const DetProduct d = det_product({0, kCfg.one()}, half, kCfg);
  EXPECT_EQ(d.prefix.to_string(), "0");
  EXPECT_EQ(d.rest, (GridInterval{0, kCfg.one()}));
}

TEST(TerminalInterval, SmallestDyadic) {
  const std::uint64_t one = kCfg.one();
  EXPECT_EQ(terminal_interval({0, one}, kCfg), (std::pair<unsigned, std::uint64_t>{0, 0}));
  EXPECT_EQ(terminal_interval({one / 3, one / 9 * 7}, kCfg), (std::pair<unsigned, std::uint64_t>{2, 2}));
  EXPECT_EQ(terminal_interval({one / 2 - 1, one / 2 + 1}, kCfg).first, 63u);
}

TEST(Encoder, TraceExampleCode) {
  const std::vector<ProbabilityInterval> path{{1.0 / 3, 0.5}, {0.25, 0.5}, {0.5, 2.0 / 3}};
  std::vector<GridInterval> g;
  for (const auto& p : path) g.push_back(to_grid(p, kCfg));
  EXPECT_EQ(encode(g, kCfg).to_string(), "01100110");
  std::vector<RInterval> r{{q(1, 3), q(1, 2)}, {q(1, 4), q(1, 2)}, {q(1, 2), q(2, 3)}};
  EXPECT_EQ(reference_encode(r), "01100110");
}

TEST(Encoder, UnitIntervalGivesShortCode) {
  const GridInterval unit{0, kCfg.one()};
  const auto code = encode(std::span(&unit, 1), kCfg);
  EXPECT_LE(code.size(), 2u);
  EXPECT_EQ(code.to_string(), "0");
  EXPECT_EQ(encode(std::span<const GridInterval>{}, kCfg).to_string(), "0");
  EXPECT_EQ(reference_encode(std::vector<RInterval>{RInterval{}}), "");
}

TEST(Encoder, RejectsNarrowIntervals) {
  Encoder enc(kCfg);
  EXPECT_THROW(enc.push({0, kCfg.min_width() - 1}), ConfigError);
  EXPECT_THROW(enc.push({5, 5}), ConfigError);
  EXPECT_THROW(enc.push({0, kCfg.one() + 1}), ConfigError);
}

TEST(Encoder, ResetsAfterFinish) {
  Encoder enc(kCfg);
  enc.push({0, kCfg.one() / 4});
  const auto a = enc.finish();
  enc.push({0, kCfg.one() / 4});
  EXPECT_EQ(enc.finish(), a);
  EXPECT_EQ(enc.state(), (GridInterval{0, kCfg.one()}));
}

TEST(ReferenceCoder, LengthBound) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 12)(rng);
    std::vector<RInterval> path;
    Rational prob{1};
    for (std::size_t i = 0; i < n; ++i) {
      const long den = std::uniform_int_distribution<long>(2, 50)(rng);
      long a = std::uniform_int_distribution<long>(0, den - 1)(rng);
      long b = std::uniform_int_distribution<long>(0, den - 1)(rng);
      if (a > b) std::swap(a, b);
      path.push_back({q(a, den), q(b + 1, den)});
      prob *= path.back().width();
    }
    const std::string code = reference_encode(path);
    // len <= floor(-log2 prob) + 2  <=>  prob * 2^(len - 2) <= 1
    const std::size_t len = code.size();
    if (len >= 2) {
      EXPECT_LE(prob * pow2(static_cast<unsigned>(len - 2)), Rational(1)) << t;
    }
  }
}

TEST(Encoder, LengthWithinReferencePlusGridSlack) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 30)(rng);
    std::vector<GridInterval> path;
    double bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      path.push_back(random_branch(rng, kCfg));
      bits -= std::log2(static_cast<double>(path.back().width()) / static_cast<double>(kCfg.one()));
    }
    const auto code = encode(path, kCfg);
    EXPECT_LE(static_cast<double>(code.size()), std::floor(bits + 1e-9) + 2 + static_cast<double>(n)) << t;
  }
}

TEST(Decoder, SingleAlternativeReadsNothing) {
  const BitString empty;
  const SpanBitSource src(empty);
  Decoder dec(src, 0, kCfg);
  const GridInterval unit{0, kCfg.one()};
  EXPECT_EQ(dec.next_branch(std::span(&unit, 1)), 0u);
  EXPECT_EQ(dec.position(), 0u);
}

TEST(Decoder, RoundTripAndLockStep) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 100000; ++t) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(0, 12)(rng);
    std::vector<std::vector<GridInterval>> models;
    std::vector<std::size_t> picks;
    std::vector<GridInterval> states;
    Encoder enc(kCfg);
    for (std::size_t i = 0; i < n; ++i) {
      models.push_back(random_distribution(rng, kCfg));
      picks.push_back(std::uniform_int_distribution<std::size_t>(0, models.back().size() - 1)(rng));
      enc.push(models.back()[picks.back()]);
      states.push_back(enc.state());
    }
    const BitString code = enc.finish();
    const SpanBitSource src(code);
    Decoder dec(src, 0, kCfg);
    std::size_t last = 0;
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_EQ(dec.next_branch(models[i]), picks[i]) << t;
      ASSERT_EQ(dec.state(), states[i]) << t;
      ASSERT_GE(dec.position(), last);
      last = dec.position();
    }
    dec.finish();
    ASSERT_EQ(dec.position(), code.size()) << t;
  }
}

TEST(Decoder, BackToBackCodes) {
  std::mt19937_64 rng(8);
  const std::vector<double> p{0.2, 0.5, 0.3};
  const auto model = cumulative_intervals(p, kCfg);
  std::vector<std::vector<std::size_t>> seqs;
  BitString stream;
  for (int t = 0; t < 200; ++t) {
    std::vector<std::size_t> s(std::uniform_int_distribution<std::size_t>(0, 20)(rng));
    Encoder enc(kCfg);
    for (auto& x : s) {
      x = std::uniform_int_distribution<std::size_t>(0, 2)(rng);
      enc.push(model[x]);
    }
    stream.append(enc.finish());
    seqs.push_back(s);
  }
  const SpanBitSource src(stream);
  Decoder dec(src, 0, kCfg);
  for (const auto& s : seqs) {
    for (auto x : s) ASSERT_EQ(dec.next_branch(model), x);
    dec.finish();
  }
  EXPECT_EQ(dec.position(), stream.size());
}

TEST(Decoder, TruncatedCodeIsFormatError) {
  const std::vector<double> p{0.01, 0.99};
  const auto model = cumulative_intervals(p, kCfg);
  Encoder enc(kCfg);
  for (int i = 0; i < 10; ++i) enc.push(model[0]);
  const BitString code = enc.finish();
  const BitString cut = code.substr(0, code.size() / 2);
  const SpanBitSource src(cut);
  Decoder dec(src, 0, kCfg);
  EXPECT_THROW(
      {
        for (int i = 0; i < 10; ++i) dec.next_branch(model);
        dec.finish();
      },
      FormatError);
}

TEST(Decoder, NonOverlappingFinalIntervals) {
  const std::vector<double> p{0.6, 0.1, 0.3};
  const auto model = cumulative_intervals(p, kCfg);
  std::vector<RInterval> finals;
  for (int id = 0; id < 243; ++id) {
    GridInterval cur{0, kCfg.one()};
    Rational base{0}, scale{1};
    int x = id;
    for (int i = 0; i < 5; ++i, x /= 3) {
      const DetProduct d = det_product(cur, model[x % 3], kCfg);
      for (std::size_t b = 0; b < d.prefix.size(); ++b) {
        scale /= 2;
        if (d.prefix[b]) base += scale;
      }
      cur = d.rest;
    }
    const RInterval rest = rational(cur, kCfg);
    finals.push_back({base + scale * rest.l, base + scale * rest.r});
  }
  std::sort(finals.begin(), finals.end(), [](const auto& a, const auto& b) { return a.l < b.l; });
  for (std::size_t i = 1; i < finals.size(); ++i) EXPECT_LE(finals[i - 1].r, finals[i].l);
}

TEST(ReferenceDecoder, TraceRowsTenAndSixteen) {
  const std::vector<std::vector<Rational>> cuts{{q(1, 3), q(1, 2)}, {q(1, 4), q(1, 2)}, {q(1, 2), q(2, 3)}};
  std::vector<std::vector<RInterval>> alts;
  for (const auto& c : cuts) alts.push_back(tiling(c));
  const auto trace = reference_decode("01100110", alts);
  ASSERT_EQ(trace.steps.size(), 3u);
  EXPECT_EQ(trace.branches, (std::vector<std::size_t>{1, 1, 1}));
  EXPECT_EQ(trace.steps[1].it, (RInterval{q(1, 2), q(2, 3)}));
  EXPECT_EQ(trace.steps[1].ib, (RInterval{q(1, 2), q(5, 8)}));
  EXPECT_EQ(trace.steps[1].bits_read, 5u);
  EXPECT_EQ(trace.steps[2].it, (RInterval{q(1, 3), q(4, 9)}));
  EXPECT_EQ(trace.steps[2].ib, (RInterval{q(3, 8), q(7, 16)}));
  EXPECT_EQ(trace.steps[2].bits_read, 8u);
}

// After reading "01" the bits interval [1/4, 1/2] still overlaps [0, 1/3], so
// the first branch can only resolve after a third bit.
TEST(ReferenceDecoder, FirstBranchNeedsThreeBits) {
  const std::vector<std::vector<Rational>> cuts{{q(1, 3), q(1, 2)}, {q(1, 4), q(1, 2)}, {q(1, 2), q(2, 3)}};
  std::vector<std::vector<RInterval>> alts;
  for (const auto& c : cuts) alts.push_back(tiling(c));
  const auto trace = reference_decode("01100110", alts);
  ASSERT_FALSE(trace.steps.empty());
  EXPECT_EQ(trace.steps[0].it, (RInterval{q(1, 3), q(1, 2)}));
  EXPECT_EQ(trace.steps[0].ib, (RInterval{q(3, 8), q(1, 2)}));
  EXPECT_EQ(trace.steps[0].bits_read, 3u);
  EXPECT_FALSE((RInterval{q(1, 3), q(1, 2)}).contains(RInterval{q(1, 4), q(1, 2)}));
}

TEST(ReferenceDecoder, MatchesReferenceEncoder) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    std::vector<std::vector<RInterval>> alts;
    std::vector<RInterval> path;
    std::vector<std::size_t> picks;
    for (std::size_t i = 0; i < n; ++i) {
      const long den = std::uniform_int_distribution<long>(3, 12)(rng);
      std::vector<Rational> cuts;
      for (long c = 1; c < den; ++c)
        if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) cuts.push_back(q(c, den));
      alts.push_back(tiling(cuts));
      picks.push_back(std::uniform_int_distribution<std::size_t>(0, alts.back().size() - 1)(rng));
      path.push_back(alts.back()[picks.back()]);
    }
    const auto trace = reference_decode(reference_encode(path), alts);
    EXPECT_FALSE(trace.exhausted);
    EXPECT_EQ(trace.branches, picks) << t;
  }
}
