// Acceptance suite. Prints one PASS/FAIL line per criterion; the exit status
// is nonzero when any selected criterion fails.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "reference_coder.hpp"
#include "squish/codec.hpp"
#include "squish/delta.hpp"
#include "squish/storage.hpp"
#include "synthetic.hpp"

using namespace squish;
using namespace squish::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

struct Criterion {
  int id;
  const char* title;
  double limit_seconds;
  std::function<void(Outcome&)> run;
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

Rational q(long a, long b = 1) { return Rational(a, b); }

// Absolute interval after folding `intervals` with the fixed-precision product.
RInterval fixed_chain(std::span<const GridInterval> intervals, const ApproxConfig& cfg) {
  GridInterval cur{0, cfg.one()};
  std::string prefix;
  for (const auto& pi : intervals) {
    const DetProduct d = det_product(cur, pi, cfg);
    prefix += d.prefix.to_string();
    cur = d.rest;
  }
  Rational scale{1};
  Rational base{0};
  for (char c : prefix) {
    scale /= 2;
    if (c == '1') base += scale;
  }
  const RInterval rest = rational(cur, cfg);
  return {base + scale * rest.l, base + scale * rest.r};
}

// 1. Figure 2 fixture.
void figure2(Outcome& o) {
  const std::vector<RInterval> chain{{q(0), q(2, 5)}, {q(3, 10), q(1)}, {q(0), q(3, 10)}};
  RInterval exact;
  for (const auto& iv : chain) exact = product(exact, iv);
  o.check(exact == RInterval{q(3, 25), q(51, 250)}, "rational product is [0.12, 0.204]");

  const ApproxConfig cfg;
  std::vector<GridInterval> grid;
  for (const auto& iv : chain)
    grid.push_back(to_grid({static_cast<double>(iv.l), static_cast<double>(iv.r)}, cfg));
  const RInterval fixed = fixed_chain(grid, cfg);
  const Rational tol{Rational(1) / Rational(boost::multiprecision::cpp_int(1) << 40)};
  const Rational dl = abs(fixed.l - exact.l);
  const Rational dr = abs(fixed.r - exact.r);
  o.check(dl <= tol && dr <= tol, "fixed-precision endpoints within 2^-40");
  o.detail << "exact " << to_string(exact) << ", fixed-precision deviation "
           << static_cast<double>(std::max(dl, dr)) << " (tolerance 2^-40)";
}

// 2. Decoding trace example.
void table5(Outcome& o) {
  const std::vector<RInterval> path{{q(1, 3), q(1, 2)}, {q(1, 4), q(1, 2)}, {q(1, 2), q(2, 3)}};
  const std::string expected = "01100110";
  const std::string ref = reference_encode(path);
  o.check(ref == expected, "rational encoder emits 01100110 (got " + ref + ")");

  const ApproxConfig cfg;
  std::vector<std::vector<GridInterval>> alternatives;
  std::vector<std::vector<RInterval>> ralternatives;
  const std::vector<std::vector<Rational>> cuts{{q(1, 3), q(1, 2)}, {q(1, 4), q(1, 2)}, {q(1, 2), q(2, 3)}};
  for (const auto& c : cuts) {
    ralternatives.push_back(tiling(c));
    std::vector<GridInterval> g;
    for (const auto& iv : ralternatives.back())
      g.push_back(to_grid({static_cast<double>(iv.l), static_cast<double>(iv.r)}, cfg));
    alternatives.push_back(std::move(g));
  }
  Encoder enc(cfg);
  for (const auto& a : alternatives) enc.push(a[1]);
  const std::string fixed = enc.finish().to_string();
  o.check(fixed == expected, "fixed-precision encoder emits 01100110 (got " + fixed + ")");

  const BitString code = BitString::from_string(expected);
  const SpanBitSource src(code);
  Decoder dec(src, 0, cfg);
  std::vector<std::size_t> fixed_branches;
  for (const auto& a : alternatives) fixed_branches.push_back(dec.next_branch(a));
  dec.finish();
  o.check(fixed_branches == std::vector<std::size_t>{1, 1, 1} && dec.position() == expected.size(),
          "fixed-precision decoder replays the branch sequence");

  const ReferenceDecode trace = reference_decode(expected, ralternatives);
  o.check(!trace.exhausted && trace.branches == std::vector<std::size_t>{1, 1, 1},
          "rational decoder replays the branch sequence");
  struct Row {
    int step;
    RInterval it;
    RInterval ib;
    std::size_t bits;
  };
  const Row rows[] = {{4, {q(1, 3), q(1, 2)}, {q(1, 4), q(1, 2)}, 2},
                      {10, {q(1, 2), q(2, 3)}, {q(1, 2), q(5, 8)}, 5},
                      {16, {q(1, 3), q(4, 9)}, {q(3, 8), q(7, 16)}, 8}};
  for (std::size_t i = 0; i < 3 && i < trace.steps.size(); ++i) {
    const auto& got = trace.steps[i];
    const bool ok = got.it == rows[i].it && got.ib == rows[i].ib && got.bits_read == rows[i].bits;
    o.detail << " row " << rows[i].step << ": I_t=" << to_string(got.it) << " I_b=" << to_string(got.ib) << " after "
             << got.bits_read << " bits" << (ok ? " (match)" : " (expected I_t=" + to_string(rows[i].it) + " I_b=" +
                                                               to_string(rows[i].ib) + " after " +
                                                               std::to_string(rows[i].bits) + " bits)");
    o.check(ok, "trace row " + std::to_string(rows[i].step));
  }
}

// 3. Mixed-schema round trip.
void round_trip(Outcome& o) {
  std::mt19937_64 rng(2024);
  const double tolerances[] = {0.0, 1e-4, 1e-2};
  std::size_t rows = 0;
  std::size_t bad = 0;
  std::size_t datasets = 0;
  for (int round = 0; rows < 100000; ++round) {
    const double tol = tolerances[round % 3];
    const Schema schema = mixed_schema(rng, tol);
    const Dataset data = mixed_dataset(schema, 2000, rng);
    CompressOptions opts;
    opts.index = round % 2 == 1;
    const Archive archive = Archive::parse(compress(data, opts));
    std::size_t i = 0;
    archive.decode_all([&](const Tuple& t) {
      if (!closeness_check(data.rows[i], t, schema)) ++bad;
      ++i;
    });
    if (i != data.size()) bad += data.size() - i;
    rows += data.size();
    ++datasets;
  }
  o.check(bad == 0, "every row passes closeness_check");
  o.detail << rows << " rows over " << datasets << " schemas, " << bad << " failures";
}

struct Compressed {
  CompressStats stats;
  std::size_t archive_bits = 0;
  std::size_t body_bits = 0;
};

Compressed run_compress(const Dataset& data, const CompressOptions& opts = {}) {
  Compressed c;
  const auto bytes = compress(data, opts, &c.stats);
  const Archive archive = Archive::parse(bytes);
  c.archive_bits = bytes.size() * 8;
  c.body_bits = archive.body_section_bytes() * 8;
  return c;
}

// 4. Pairwise-dependent family.
void pairwise(Outcome& o) {
  const std::size_t n = 10000;
  const std::size_t m = 100;
  const Dataset data = pairwise_dataset(n, m, 7);
  const Compressed c = run_compress(data);
  const auto& s = c.stats.structure;
  bool twins = s.edge_count() == m / 2;
  for (std::size_t i = 0; i < m / 2; ++i)
    twins = twins && s.parents[i].empty() && s.parents[i + m / 2] == std::vector<std::size_t>{i};
  o.check(twins, "structure is exactly the 50 twin edges");
  const double per_tuple = static_cast<double>(c.stats.data_bits) / n;
  o.check(per_tuple >= 50.0 && per_tuple <= 52.0, "data bits per tuple in [50, 52]");
  o.check(static_cast<double>(c.body_bits) <= static_cast<double>(c.stats.model_bits) + 52.0 * n,
          "body <= model_bits + 52n");
  o.check(c.stats.model_bits <= 6400, "model_bits <= 6400");
  o.detail << s.edge_count() << " edges, " << fmt(per_tuple) << " data bits/tuple, body " << c.body_bits
           << " bits <= " << c.stats.model_bits + 52 * n << ", model " << c.stats.model_bits << " bits";
}

// 5. Markov chain.
void markov(Outcome& o) {
  const std::size_t n = 10000;
  const std::size_t m = 100;
  const Compressed c = run_compress(markov_dataset(n, m, 11));
  const double per_column = static_cast<double>(c.stats.data_bits) / static_cast<double>(n * m);
  o.check(per_column >= 1.40 && per_column <= 1.50, "data bits per column in [1.40, 1.50]");
  o.check(per_column < 2.0, "below the 2-bit baseline");
  o.detail << fmt(per_column) << " bits/column (entropy " << fmt(markov_entropy(m) / m) << ", baseline 2.0)";
}

// 6. Clustered tuples.
void clustered(Outcome& o) {
  const std::size_t n = 10000;
  const Compressed c = run_compress(clustered_dataset(n, 100, 0.2, 13));
  const double per_tuple = static_cast<double>(c.stats.data_bits) / n;
  o.check(per_tuple >= 72.0 && per_tuple <= 76.0, "data bits per tuple in [72, 76]");
  o.detail << fmt(per_tuple) << " bits/tuple (entropy " << fmt(clustered_entropy(100, 0.2)) << ")";
}

// 7. Near-optimality on small random networks.
void small_networks(Outcome& o) {
  const std::size_t n = 100000;
  double worst = -1e300;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t m = std::uniform_int_distribution<std::size_t>(2, 5)(rng);
    const RandomNetwork net = RandomNetwork::generate(m, 4, 2, rng);
    const Compressed c = run_compress(net.sample(n, rng));
    const double h = net.entropy() * n;
    const double excess = (static_cast<double>(c.body_bits) - h) / n;
    worst = std::max(worst, excess);
    o.check(static_cast<double>(c.body_bits) <= h + 5.0 * n, "network seed " + std::to_string(seed));
  }
  o.detail << "20 networks, worst body excess over H(D) " << fmt(worst) << " bits/tuple (limit 5)";
}

// 8. Numeric coding bracket.
void gaussian(Outcome& o) {
  const std::size_t n = 100000;
  for (const double eps : {0.01, 0.05}) {
    std::mt19937_64 rng(eps == 0.01 ? 17 : 19);
    std::normal_distribution<double> g(0.0, 1.0);
    Dataset data{Schema({{"x", NumericKind{false, std::nullopt}, eps}}), {}};
    for (std::size_t i = 0; i < n; ++i) data.rows.push_back({g(rng)});
    const Compressed c = run_compress(data);
    const double mean = static_cast<double>(c.stats.data_bits) / n;
    const CodeLengthBracket b = gaussian_bracket(1.0, eps, 2 * eps);
    o.check(mean >= b.lower && mean <= b.upper, "eps " + fmt(eps, 2) + " inside the bracket");
    o.detail << " eps=" << fmt(eps, 2) << ": " << fmt(b.lower) << " <= " << fmt(mean) << " <= " << fmt(b.upper) << ";";
  }
}

// 9. Delta coding savings.
void delta(Outcome& o) {
  const std::size_t n = 4096;
  std::mt19937_64 rng(23);
  std::vector<BitString> codes(n);
  for (auto& c : codes) c.append_bits(rng() & ((std::uint64_t{1} << 40) - 1), 40);
  const DeltaBlock block = delta_encode(codes);
  const double raw = 40.0 * n;
  const double saved = raw - static_cast<double>(block.payload.size());
  const double target = 0.9 * n * (std::log2(static_cast<double>(n)) - 2.0);
  o.check(saved >= target, "savings >= 0.9 n (log2 n - 2)");
  auto sorted = codes;
  std::sort(sorted.begin(), sorted.end());
  o.check(delta_decode(block) == sorted, "round trip");
  o.detail << "saved " << saved << " bits, required " << target;
}

// Branch list for one fuzz step, rebuilt identically by encoder and decoder.
struct FuzzStep {
  std::vector<GridInterval> branches;
  std::size_t pick;
};

FuzzStep fuzz_step(std::mt19937_64& rng, const ApproxConfig& cfg) {
  const std::size_t k = std::uniform_int_distribution<std::size_t>(2, 6)(rng);
  std::vector<double> p(k);
  const std::size_t tiny = std::uniform_int_distribution<std::size_t>(0, k - 1)(rng);
  for (std::size_t i = 0; i < k; ++i) p[i] = i == tiny ? 1e-15 : std::uniform_real_distribution<double>(0.1, 1.0)(rng);
  const double sum = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& x : p) x /= sum;
  FuzzStep s{cumulative_intervals(p, cfg), tiny};
  if (std::uniform_int_distribution<int>(0, 9)(rng) == 0) s.pick = std::uniform_int_distribution<std::size_t>(0, k - 1)(rng);
  return s;
}

// 10. Precision stress.
void precision_fuzz(Outcome& o) {
  const std::size_t steps = 1000000;
  const ApproxConfig cfg;
  const std::uint64_t half = cfg.one() / 2;
  std::mt19937_64 rng(29);
  Encoder enc(cfg);
  std::vector<GridInterval> states;
  states.reserve(steps);
  std::size_t violations = 0;
  std::size_t minimal = 0;
  for (std::size_t i = 0; i < steps; ++i) {
    const FuzzStep s = fuzz_step(rng, cfg);
    if (s.branches[s.pick].width() == cfg.min_width()) ++minimal;
    enc.push(s.branches[s.pick]);
    const GridInterval st = enc.state();
    const bool renormalized = (st.lo < half && st.hi > half) || (st.lo == 0 && st.hi == cfg.one());
    if (st.width() < cfg.min_width() || !renormalized || st.hi > cfg.one()) ++violations;
    states.push_back(st);
  }
  const BitString code = enc.finish();

  rng.seed(29);
  const SpanBitSource src(code);
  Decoder dec(src, 0, cfg);
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < steps; ++i) {
    const FuzzStep s = fuzz_step(rng, cfg);
    if (dec.next_branch(s.branches) != s.pick || dec.state() != states[i]) ++mismatches;
  }
  dec.finish();
  o.check(violations == 0, "encoder invariants hold at every step");
  o.check(mismatches == 0, "decoder replays every branch in lock-step");
  o.check(dec.position() == code.size(), "decoder consumes exactly the code");
  o.check(minimal * 2 > steps, "most steps take a minimal-width branch");
  o.detail << steps << " steps (" << minimal << " minimal-width), " << code.size() << " bits, " << violations
           << " invariant violations, " << mismatches << " mismatches";
}

// 11. Prefix freedom.
void prefix_freedom(Outcome& o) {
  const ApproxConfig cfg;
  const std::vector<double> p{0.5, 0.3, 0.2};
  const auto branches = cumulative_intervals(p, cfg);
  std::size_t total = 0;
  std::size_t clashes = 0;
  for (std::size_t len = 1; len <= 8; ++len) {
    std::size_t count = 1;
    for (std::size_t i = 0; i < len; ++i) count *= 3;
    std::vector<BitString> codes;
    codes.reserve(count);
    for (std::size_t id = 0; id < count; ++id) {
      Encoder enc(cfg);
      std::size_t x = id;
      for (std::size_t i = 0; i < len; ++i, x /= 3) enc.push(branches[x % 3]);
      codes.push_back(enc.finish());
    }
    for (std::size_t a = 0; a < count; ++a)
      for (std::size_t b = 0; b < count; ++b)
        if (a != b && codes[a].is_prefix_of(codes[b])) ++clashes;
    total += count;
  }
  o.check(clashes == 0, "no code is a prefix of another of the same length");
  o.detail << total << " sequences of length 1..8, " << clashes << " prefix pairs";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "Run a single criterion (1-11)")->check(CLI::Range(1, 11));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "interval product fixture", 5, figure2},
      {2, "encode/decode trace example", 5, table5},
      {3, "mixed-schema round trip", 60, round_trip},
      {4, "pairwise-dependent family", 30, pairwise},
      {5, "Markov chain family", 30, markov},
      {6, "clustered family", 30, clustered},
      {7, "small random networks", 120, small_networks},
      {8, "Gaussian code length bracket", 60, gaussian},
      {9, "delta coding savings", 5, delta},
      {10, "precision fuzz", 60, precision_fuzz},
      {11, "prefix freedom", 5, prefix_freedom},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.check(secs <= c.limit_seconds, "runtime limit " + fmt(c.limit_seconds, 0) + " s");
    std::printf("%s criterion %d: %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.str().c_str(),
                secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
