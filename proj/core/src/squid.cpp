#include "squish/squid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace squish {

namespace {

double require_number(const Value& v) {
  const auto* d = std::get_if<double>(&v);
  if (!d) throw std::invalid_argument("expected a numeric value, got " + to_string(v));
  return *d;
}

void require_inner(bool is_end) {
  if (is_end) throw std::logic_error("operation needs a non-leaf node");
}

}  // namespace

BranchDistribution::BranchDistribution(std::vector<double> probabilities) : p_(std::move(probabilities)) {
  if (p_.empty()) throw ConfigError("branch distribution needs at least one branch");
  double sum = 0.0;
  bool positive = false;
  for (double p : p_) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError("branch probability must be finite and >= 0");
    positive = positive || p > 0.0;
    sum += p;
  }
  if (!positive) throw ConfigError("branch distribution has no positive probability");
  if (std::fabs(sum - 1.0) > 1e-9) throw ConfigError("branch probabilities must sum to 1");
}

// ---------------------------------------------------------------------------

CategoricalSquid::CategoricalSquid(std::shared_ptr<const std::vector<double>> law) : law_(std::move(law)) {
  if (!law_ || law_->empty()) throw ConfigError("categorical tree needs a non-empty law");
}

BranchDistribution CategoricalSquid::generate_branch() const {
  require_inner(is_end());
  return BranchDistribution(*law_);
}

std::size_t CategoricalSquid::get_branch(const Value& v) const {
  require_inner(is_end());
  const auto* c = std::get_if<Cat>(&v);
  if (!c) throw std::invalid_argument("expected a categorical value, got " + to_string(v));
  if (c->index >= law_->size()) throw std::invalid_argument("category index outside the domain");
  return c->index;
}

void CategoricalSquid::choose_branch(std::size_t b) {
  require_inner(is_end());
  if (b >= law_->size()) throw std::out_of_range("branch index out of range");
  chosen_ = static_cast<long>(b);
}

LeafOutcome CategoricalSquid::get_result() const {
  if (!is_end()) throw std::logic_error("get_result needs a leaf");
  return {Cat{static_cast<std::uint32_t>(chosen_)}, 0.0};
}

// ---------------------------------------------------------------------------

RealBisectionSquid::RealBisectionSquid(NumericLaw law, Range root, double tolerance)
    : law_(law), root_(root), tolerance_(tolerance), lo_(root.lo), hi_(root.hi) {}

bool RealBisectionSquid::is_end() const {
  const double m = mid();
  return hi_ - lo_ < 2.0 * tolerance_ || !(lo_ < m && m < hi_);
}

BranchDistribution RealBisectionSquid::generate_branch() const {
  require_inner(is_end());
  const double left = left_share(law_, lo_, mid(), hi_);
  return BranchDistribution({left, 1.0 - left});
}

std::size_t RealBisectionSquid::get_branch(const Value& v) const {
  require_inner(is_end());
  const double x = std::clamp(require_number(v), root_.lo, root_.hi);
  const bool inside = (x > lo_ || (x == lo_ && lo_ == root_.lo)) && x <= hi_;
  if (!inside) throw std::invalid_argument("value outside the node interval");
  return x <= mid() ? 0 : 1;
}

void RealBisectionSquid::choose_branch(std::size_t b) {
  require_inner(is_end());
  if (b > 1) throw std::out_of_range("bisection nodes have two branches");
  const double m = mid();
  if (b == 0)
    hi_ = m;
  else
    lo_ = m;
}

LeafOutcome RealBisectionSquid::get_result() const {
  if (!is_end()) throw std::logic_error("get_result needs a leaf");
  return {lo_ + (hi_ - lo_) * 0.5, (hi_ - lo_) * 0.5};
}

// ---------------------------------------------------------------------------

IntegerBisectionSquid::IntegerBisectionSquid(NumericLaw law, std::int64_t lo, std::int64_t hi, double tolerance)
    : law_(law), root_lo_(lo), root_hi_(hi), tolerance_(tolerance), a_(lo), b_(hi) {
  if (lo > hi) throw ConfigError("integer tree needs lo <= hi");
}

bool IntegerBisectionSquid::is_end() const {
  return static_cast<double>((b_ - a_ + 1) / 2) <= tolerance_;
}

BranchDistribution IntegerBisectionSquid::generate_branch() const {
  require_inner(is_end());
  const double m = static_cast<double>(split()) + 0.5;
  const double left = left_share(law_, static_cast<double>(a_) - 0.5, m, static_cast<double>(b_) + 0.5);
  return BranchDistribution({left, 1.0 - left});
}

std::size_t IntegerBisectionSquid::get_branch(const Value& v) const {
  require_inner(is_end());
  const double clamped =
      std::clamp(require_number(v), static_cast<double>(root_lo_), static_cast<double>(root_hi_));
  const auto x = static_cast<std::int64_t>(std::llround(clamped));
  if (x < a_ || x > b_) throw std::invalid_argument("value outside the node range");
  return x <= split() ? 0 : 1;
}

void IntegerBisectionSquid::choose_branch(std::size_t b) {
  require_inner(is_end());
  if (b > 1) throw std::out_of_range("bisection nodes have two branches");
  const std::int64_t m = split();
  if (b == 0)
    b_ = m;
  else
    a_ = m + 1;
}

LeafOutcome IntegerBisectionSquid::get_result() const {
  if (!is_end()) throw std::logic_error("get_result needs a leaf");
  const std::int64_t rep = split();
  return {static_cast<double>(rep), static_cast<double>(b_ - rep)};
}

// ---------------------------------------------------------------------------

void BigramModel::observe(const std::string& s) {
  if (frozen_) throw std::logic_error("bigram model already frozen");
  std::size_t prev = kStart;
  for (unsigned char c : s) {
    auto& row = counts_[prev];
    if (row.empty()) row.assign(kAlphabet, 0);
    ++row[c];
    prev = c;
  }
}

void BigramModel::freeze() {
  auto uniform = std::make_shared<const std::vector<double>>(kAlphabet, 1.0 / kAlphabet);
  for (std::size_t ctx = 0; ctx <= kAlphabet; ++ctx) {
    const auto& row = counts_[ctx];
    if (row.empty()) {
      laws_[ctx] = uniform;
      continue;
    }
    double total = 0.0;
    for (auto c : row) total += c;
    std::vector<double> law(kAlphabet);
    for (std::size_t i = 0; i < kAlphabet; ++i) law[i] = (row[i] + 1.0) / (total + kAlphabet);
    laws_[ctx] = std::make_shared<const std::vector<double>>(std::move(law));
  }
  frozen_ = true;
}

std::shared_ptr<const std::vector<double>> BigramModel::distribution(std::size_t context) const {
  if (!frozen_) throw std::logic_error("bigram model not frozen");
  return laws_.at(context);
}

double BigramModel::probability(std::size_t context, std::uint8_t next) const {
  return (*distribution(context))[next];
}

std::size_t BigramModel::nonzero_entries() const noexcept {
  std::size_t n = 0;
  for (const auto& row : counts_)
    for (auto c : row) n += c != 0;
  return n;
}

std::vector<BigramModel::Entry> BigramModel::entries() const {
  std::vector<Entry> out;
  for (std::size_t ctx = 0; ctx <= kAlphabet; ++ctx)
    for (std::size_t i = 0; i < counts_[ctx].size(); ++i)
      if (counts_[ctx][i] != 0)
        out.push_back({static_cast<std::uint16_t>(ctx), static_cast<std::uint8_t>(i), counts_[ctx][i]});
  return out;
}

BigramModel BigramModel::from_entries(std::span<const Entry> entries) {
  BigramModel m;
  for (const auto& e : entries) {
    if (e.context > kAlphabet) throw ConfigError("bigram context out of range");
    auto& row = m.counts_[e.context];
    if (row.empty()) row.assign(kAlphabet, 0);
    row[e.next] = e.count;
  }
  m.freeze();
  return m;
}

// ---------------------------------------------------------------------------

StringSquid::StringSquid(IntegerBisectionSquid length, std::shared_ptr<const BigramModel> chars)
    : length_(std::move(length)), chars_(std::move(chars)) {
  if (!chars_ || !chars_->frozen()) throw ConfigError("string tree needs a frozen character model");
}

std::size_t StringSquid::target_length() const {
  return static_cast<std::size_t>(std::get<double>(length_.get_result().representative));
}

bool StringSquid::is_end() const { return !in_length_phase() && built_.size() == target_length(); }

BranchDistribution StringSquid::generate_branch() const {
  require_inner(is_end());
  if (in_length_phase()) return length_.generate_branch();
  const std::size_t ctx =
      built_.empty() ? BigramModel::kStart : static_cast<unsigned char>(built_.back());
  return BranchDistribution(*chars_->distribution(ctx));
}

std::size_t StringSquid::get_branch(const Value& v) const {
  require_inner(is_end());
  const auto* s = std::get_if<std::string>(&v);
  if (!s) throw std::invalid_argument("expected a string value, got " + to_string(v));
  if (in_length_phase()) {
    if (s->size() > static_cast<std::size_t>(length_.node_hi()) ||
        s->size() < static_cast<std::size_t>(length_.node_lo()))
      throw std::invalid_argument("string length outside the node range");
    return length_.get_branch(static_cast<double>(s->size()));
  }
  if (s->size() != target_length()) throw std::invalid_argument("string length differs from the decoded length");
  return static_cast<unsigned char>((*s)[built_.size()]);
}

void StringSquid::choose_branch(std::size_t b) {
  require_inner(is_end());
  if (in_length_phase()) {
    length_.choose_branch(b);
    return;
  }
  if (b >= BigramModel::kAlphabet) throw std::out_of_range("character branch out of range");
  built_.push_back(static_cast<char>(b));
}

LeafOutcome StringSquid::get_result() const {
  if (!is_end()) throw std::logic_error("get_result needs a leaf");
  return {built_, 0.0};
}

// ---------------------------------------------------------------------------

GeometricSquid::GeometricSquid(double stop) : stop_(stop) {
  if (!(stop > 0.0 && stop < 1.0)) throw ConfigError("geometric stop probability must be in (0, 1)");
}

BranchDistribution GeometricSquid::generate_branch() const {
  require_inner(is_end());
  return BranchDistribution({stop_, 1.0 - stop_});
}

std::size_t GeometricSquid::get_branch(const Value& v) const {
  require_inner(is_end());
  const double x = require_number(v);
  if (!(x > static_cast<double>(k_ - 1))) throw std::invalid_argument("value outside the node region");
  return x <= static_cast<double>(k_) ? 0 : 1;
}

void GeometricSquid::choose_branch(std::size_t b) {
  require_inner(is_end());
  if (b > 1) throw std::out_of_range("geometric nodes have two branches");
  if (b == 0)
    leaf_ = true;
  else
    ++k_;
}

LeafOutcome GeometricSquid::get_result() const {
  if (!is_end()) throw std::logic_error("get_result needs a leaf");
  return {static_cast<double>(k_) - 0.5, 0.5};
}

// ---------------------------------------------------------------------------

NumericTree::NumericTree(NumericLaw law, Range root, double tolerance, bool integer)
    : law_(law), root_(root), tolerance_(tolerance), integer_(integer) {}

std::unique_ptr<Squid> NumericTree::cursor() const {
  if (integer_)
    return std::make_unique<IntegerBisectionSquid>(law_, static_cast<std::int64_t>(std::floor(root_.lo)),
                                                   static_cast<std::int64_t>(std::ceil(root_.hi)), tolerance_);
  return std::make_unique<RealBisectionSquid>(law_, root_, tolerance_);
}

double NumericTree::code_bits(double v) const {
  double bits = 0.0;
  if (integer_) {
    auto a = static_cast<std::int64_t>(std::floor(root_.lo));
    auto b = static_cast<std::int64_t>(std::ceil(root_.hi));
    const auto x = static_cast<std::int64_t>(std::llround(std::clamp(v, static_cast<double>(a), static_cast<double>(b))));
    while (static_cast<double>((b - a + 1) / 2) > tolerance_) {
      const std::int64_t m = a + (b - a) / 2;
      const double left = left_share(law_, static_cast<double>(a) - 0.5, static_cast<double>(m) + 0.5,
                                     static_cast<double>(b) + 0.5);
      if (x <= m) {
        bits -= std::log2(left);
        b = m;
      } else {
        bits -= std::log2(1.0 - left);
        a = m + 1;
      }
    }
    return bits;
  }
  double lo = root_.lo;
  double hi = root_.hi;
  const double x = std::clamp(v, lo, hi);
  for (;;) {
    const double m = lo + (hi - lo) * 0.5;
    if (hi - lo < 2.0 * tolerance_ || !(lo < m && m < hi)) break;
    const double left = left_share(law_, lo, m, hi);
    if (x <= m) {
      bits -= std::log2(left);
      hi = m;
    } else {
      bits -= std::log2(1.0 - left);
      lo = m;
    }
  }
  return bits;
}

double NumericTree::quantize(double v) const {
  auto cur = cursor();
  while (!cur->is_end()) cur->choose_branch(cur->get_branch(v));
  return std::get<double>(cur->get_result().representative);
}

NumericTree build_numerical_tree(const NumericLaw& law, const Range& root, double tolerance, bool integer) {
  if (!(root.lo < root.hi) && !(integer && root.lo == root.hi))
    throw ConfigError("numeric tree needs lo < hi");
  if (!(tolerance >= 0.0) || !std::isfinite(tolerance)) throw ConfigError("tolerance must be finite and >= 0");
  if (law.family != NumericFamily::Uniform && !(law.scale > 0.0))
    throw ConfigError("scale parameter must be positive");
  const double magnitude = std::max(std::fabs(root.lo), std::fabs(root.hi));
  if (integer) {
    if (magnitude > 9.0e15) throw ConfigError("integer range exceeds exactly representable values");
  } else {
    if (tolerance == 0.0) throw ConfigError("lossless coding of real-valued columns is not supported");
    if (tolerance < std::ldexp(magnitude, -44))
      throw ConfigError("tolerance is below the resolution of doubles over this range");
  }
  return NumericTree(law, root, tolerance, integer);
}

// ---------------------------------------------------------------------------

StringTree::StringTree(NumericLaw length_law, std::size_t max_length, std::shared_ptr<const BigramModel> chars)
    : length_law_(length_law), max_length_(max_length), chars_(std::move(chars)) {}

std::unique_ptr<Squid> StringTree::cursor() const {
  return std::make_unique<StringSquid>(
      IntegerBisectionSquid(length_law_, 0, static_cast<std::int64_t>(max_length_), 0.0), chars_);
}

double StringTree::code_bits(const std::string& s) const {
  const NumericTree lengths(length_law_, Range{0.0, static_cast<double>(max_length_)}, 0.0, true);
  double bits = lengths.code_bits(static_cast<double>(s.size()));
  std::size_t prev = BigramModel::kStart;
  for (unsigned char c : s) {
    bits -= std::log2(chars_->probability(prev, c));
    prev = c;
  }
  return bits;
}

StringTree build_string_tree(const NumericLaw& length_law, std::size_t max_length,
                             std::shared_ptr<const BigramModel> chars) {
  if (!chars || !chars->frozen()) throw ConfigError("string tree needs a frozen character model");
  return StringTree(length_law, max_length, std::move(chars));
}

}  // namespace squish
