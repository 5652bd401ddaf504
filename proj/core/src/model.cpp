#include "squish/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace squish {

namespace {

constexpr std::size_t kMaxContexts = std::size_t{1} << 20;

double round_down_f32(double x) {
  float f = static_cast<float>(x);
  if (static_cast<double>(f) > x) f = std::nextafter(f, -std::numeric_limits<float>::infinity());
  return f;
}

double round_up_f32(double x) {
  float f = static_cast<float>(x);
  if (static_cast<double>(f) < x) f = std::nextafter(f, std::numeric_limits<float>::infinity());
  return f;
}

bool is_f32(double x) { return static_cast<double>(static_cast<float>(x)) == x; }

void write_law(ByteWriter& out, const NumericLaw& law) {
  out.u8(static_cast<std::uint8_t>(law.family));
  if (law.family == NumericFamily::Uniform) return;
  out.f32(static_cast<float>(law.location));
  out.f32(static_cast<float>(law.scale));
}

NumericLaw read_law(ByteReader& in) {
  const auto family = in.u8();
  if (family > 2) throw FormatError("unknown distribution family " + std::to_string(family));
  NumericLaw law{static_cast<NumericFamily>(family), 0.0, 1.0};
  if (law.family == NumericFamily::Uniform) return law;
  law.location = in.f32();
  law.scale = in.f32();
  if (!std::isfinite(law.location) || !(law.scale > 0.0) || !std::isfinite(law.scale))
    throw FormatError("invalid distribution parameters");
  return law;
}

std::size_t family_count(const std::vector<NumericLaw>& laws, const std::vector<bool>& seen, NumericFamily f) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < laws.size(); ++i) n += seen[i] && laws[i].family == f;
  return n;
}

std::string family_summary(const std::vector<NumericLaw>& laws, const std::vector<bool>& seen) {
  std::string out;
  for (auto f : {NumericFamily::Uniform, NumericFamily::Gaussian, NumericFamily::Laplace}) {
    const std::size_t n = family_count(laws, seen, f);
    if (n == 0) continue;
    if (!out.empty()) out += ' ';
    out += std::string(family_name(f)) + "=" + std::to_string(n);
  }
  return out.empty() ? "none" : out;
}

std::size_t seen_count(const std::vector<bool>& seen) {
  return static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true));
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<ColumnDomain> derive_domains(const Schema& schema, std::span<const Tuple> rows) {
  std::vector<ColumnDomain> out(schema.size());
  for (std::size_t c = 0; c < schema.size(); ++c) {
    const Column& col = schema.column(c);
    if (const auto* num = std::get_if<NumericKind>(&col.kind)) {
      Range r{0.0, 1.0};
      if (num->range) {
        r = *num->range;
      } else if (!rows.empty()) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& t : rows) {
          const double v = std::get<double>(t.at(c));
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        if (!num->integer) {
          lo -= col.tolerance;
          hi += col.tolerance;
          if (!(lo < hi)) hi = lo + 1.0;
        }
        r = {lo, hi};
      }
      out[c].range = {round_down_f32(r.lo), round_up_f32(r.hi)};
      if (num->integer) out[c].range = {std::floor(out[c].range.lo), std::ceil(out[c].range.hi)};
    } else if (const auto* str = std::get_if<StringKind>(&col.kind)) {
      std::size_t max = 0;
      if (str->max_length) {
        max = *str->max_length;
      } else {
        for (const auto& t : rows) max = std::max(max, std::get<std::string>(t.at(c)).size());
      }
      out[c].max_length = max;
    }
  }
  return out;
}

NumericTree column_tree(const Column& column, const ColumnDomain& domain, const NumericLaw& law) {
  const auto& num = std::get<NumericKind>(column.kind);
  return build_numerical_tree(law, domain.range, column.tolerance, num.integer);
}

Tuple quantize(const Schema& schema, std::span<const ColumnDomain> domains, const Tuple& t) {
  Tuple out = t;
  for (std::size_t c = 0; c < schema.size(); ++c) {
    const Column& col = schema.column(c);
    if (is_numeric(col.kind)) out[c] = column_tree(col, domains[c]).quantize(std::get<double>(t[c]));
  }
  return out;
}

Interpreter default_interpreter(const Column& column, const ColumnDomain& domain, std::size_t bins) {
  if (const auto* cat = std::get_if<CategoricalKind>(&column.kind)) return Interpreter::identity(cat->domain_size);
  if (is_numeric(column.kind)) return Interpreter::equal_width(domain.range, bins);
  std::vector<double> cuts;
  if (domain.max_length < bins) {
    for (std::size_t k = 0; k < domain.max_length; ++k) cuts.push_back(static_cast<double>(k));
  } else {
    const double w = static_cast<double>(domain.max_length) / static_cast<double>(bins);
    for (std::size_t k = 1; k < bins; ++k) cuts.push_back(w * static_cast<double>(k));
  }
  return Interpreter::string_length(std::move(cuts));
}

// ---------------------------------------------------------------------------

ContextMap::ContextMap(std::vector<std::size_t> parents, std::vector<Interpreter> interpreters)
    : parents_(std::move(parents)), interpreters_(std::move(interpreters)) {
  if (parents_.size() != interpreters_.size()) throw ConfigError("one interpreter per parent is required");
  size_ = 1;
  for (const auto& it : interpreters_) {
    const std::size_t card = it.cardinality();
    if (card == 0) throw ConfigError("context interpreters must produce categorical values");
    size_ = size_ > std::numeric_limits<std::size_t>::max() / card ? std::numeric_limits<std::size_t>::max()
                                                                      : size_ * card;
  }
}

ParentContext ContextMap::context(const Tuple& t) const {
  ParentContext ctx;
  ctx.reserve(parents_.size());
  for (std::size_t i = 0; i < parents_.size(); ++i) ctx.push_back(interpreters_[i].interpret(t.at(parents_[i])));
  return ctx;
}

std::size_t ContextMap::index(const ParentContext& ctx) const {
  if (ctx.size() != parents_.size()) throw std::invalid_argument("parent context arity mismatch");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    const auto* c = std::get_if<Cat>(&ctx[i]);
    const std::size_t card = interpreters_[i].cardinality();
    if (!c || c->index >= card) throw std::invalid_argument("parent context value out of range");
    idx = idx * card + c->index;
  }
  return idx;
}

void ContextMap::write(ByteWriter& out) const {
  out.varint(parents_.size());
  for (std::size_t i = 0; i < parents_.size(); ++i) {
    out.varint(parents_[i]);
    interpreters_[i].write(out);
  }
}

ContextMap ContextMap::read(ByteReader& in) {
  const std::size_t n = in.count(64);
  std::vector<std::size_t> parents(n);
  std::vector<Interpreter> interpreters;
  for (std::size_t i = 0; i < n; ++i) {
    parents[i] = in.count(1u << 24);
    interpreters.push_back(Interpreter::read(in));
  }
  try {
    return ContextMap(std::move(parents), std::move(interpreters));
  } catch (const ConfigError& e) {
    throw FormatError(std::string("bad context map: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

void SquidModel::read_tuple(const Tuple& t) {
  if (fitted_) throw std::logic_error("read_tuple after end_of_data");
  observe(contexts_.index_of(t), t.at(target_));
  ++rows_;
}

void SquidModel::end_of_data() {
  if (fitted_) throw std::logic_error("end_of_data called twice");
  if (rows_ == 0) throw ConfigError("cannot fit a model without data");
  fit();
  fitted_ = true;
}

void SquidModel::require_fitted() const {
  if (!fitted_) throw std::logic_error("model is not fitted");
}

ModelCost SquidModel::get_model_cost() const {
  require_fitted();
  return {kBitsPerParameter * static_cast<double>(params_), data_bits_};
}

std::size_t SquidModel::parameter_count() const {
  require_fitted();
  return params_;
}

std::unique_ptr<Squid> SquidModel::get_prob_tree(const ParentContext& ctx) const {
  require_fitted();
  return tree(contexts_.index(ctx));
}

std::vector<std::uint8_t> SquidModel::write_model() const {
  require_fitted();
  ByteWriter out;
  out.u8(static_cast<std::uint8_t>(kind_));
  out.varint(target_);
  contexts_.write(out);
  write_body(out);
  return out.take();
}

std::unique_ptr<SquidModel> SquidModel::read_model(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  const auto kind = in.u8();
  const std::size_t target = in.count(1u << 24);
  ContextMap contexts = ContextMap::read(in);
  if (contexts.size() > kMaxContexts) throw FormatError("context table too large");
  std::unique_ptr<SquidModel> model;
  try {
    switch (kind) {
      case 0: model = CategoricalModel::read_body(target, std::move(contexts), in); break;
      case 1: model = NumericModel::read_body(target, std::move(contexts), in); break;
      case 2: model = StringModel::read_body(target, std::move(contexts), in); break;
      default: throw FormatError("unknown model kind " + std::to_string(kind));
    }
  } catch (const ConfigError& e) {
    throw FormatError(std::string("invalid model: ") + e.what());
  }
  in.expect_end("model");
  return model;
}

// ---------------------------------------------------------------------------

CategoricalModel::CategoricalModel(std::size_t target, std::size_t domain_size, ContextMap contexts, bool smoothing)
    : SquidModel(ModelKind::Categorical, target, std::move(contexts)), k_(domain_size), smoothing_(smoothing) {
  if (k_ == 0) throw ConfigError("categorical model needs a non-empty domain");
  if (context_map().size() > kMaxContexts) throw ConfigError("context table too large");
  counts_.resize(context_map().size());
  stored_.resize(context_map().size());
  laws_.resize(context_map().size());
  uniform_ = std::make_shared<const std::vector<double>>(k_, 1.0 / static_cast<double>(k_));
}

const std::vector<std::uint64_t>& CategoricalModel::counts(std::size_t ctx) const {
  static const std::vector<std::uint64_t> none;
  const auto& c = counts_.at(ctx);
  return c.empty() ? none : c;
}

std::shared_ptr<const std::vector<double>> CategoricalModel::law(std::size_t ctx) const {
  require_fitted();
  const auto& l = laws_.at(ctx);
  return l ? l : uniform_;
}

void CategoricalModel::observe(std::size_t ctx, const Value& v) {
  const auto* c = std::get_if<Cat>(&v);
  if (!c || c->index >= k_) throw std::invalid_argument("categorical value outside the domain");
  auto& row = counts_[ctx];
  if (row.empty()) row.assign(k_, 0);
  ++row[c->index];
}

void CategoricalModel::install(std::size_t ctx, const std::vector<float>& head) {
  std::vector<double> law(k_);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < k_; ++i) {
    if (!(head[i] >= 0.0f) || !std::isfinite(head[i])) throw ConfigError("invalid stored probability");
    law[i] = head[i];
    sum += law[i];
  }
  if (sum <= 1.0) {
    law[k_ - 1] = 1.0 - sum;
  } else {
    law[k_ - 1] = 0.0;
    for (auto& p : law) p /= sum;
  }
  stored_[ctx] = head;
  laws_[ctx] = std::make_shared<const std::vector<double>>(std::move(law));
}

void CategoricalModel::fit() {
  data_bits_ = 0.0;
  params_ = 0;
  for (std::size_t ctx = 0; ctx < counts_.size(); ++ctx) {
    const auto& row = counts_[ctx];
    if (row.empty()) continue;
    const double total = static_cast<double>(std::accumulate(row.begin(), row.end(), std::uint64_t{0}));
    std::vector<float> head(k_ - 1);
    for (std::size_t i = 0; i + 1 < k_; ++i) {
      const double p = smoothing_ ? (static_cast<double>(row[i]) + 1.0) / (total + static_cast<double>(k_))
                                  : static_cast<double>(row[i]) / total;
      head[i] = static_cast<float>(p);
    }
    install(ctx, head);
    const auto& law = *laws_[ctx];
    for (std::size_t i = 0; i < k_; ++i)
      if (row[i] > 0) data_bits_ -= static_cast<double>(row[i]) * std::log2(law[i]);
    params_ += k_ - 1;
  }
}

std::unique_ptr<Squid> CategoricalModel::tree(std::size_t ctx) const { return std::make_unique<CategoricalSquid>(law(ctx)); }

void CategoricalModel::write_body(ByteWriter& out) const {
  out.varint(k_);
  out.u8(smoothing_ ? 1 : 0);
  std::size_t seen = 0;
  for (const auto& s : laws_) seen += s != nullptr;
  out.varint(seen);
  for (std::size_t ctx = 0; ctx < laws_.size(); ++ctx) {
    if (!laws_[ctx]) continue;
    out.varint(ctx);
    for (float p : stored_[ctx]) out.f32(p);
  }
}

std::unique_ptr<CategoricalModel> CategoricalModel::read_body(std::size_t target, ContextMap contexts, ByteReader& in) {
  const std::size_t k = in.count(1u << 24);
  const bool smoothing = in.u8() != 0;
  auto m = std::make_unique<CategoricalModel>(target, k, std::move(contexts), smoothing);
  const std::size_t seen = in.count(m->laws_.size());
  std::size_t prev = 0;
  for (std::size_t i = 0; i < seen; ++i) {
    const std::size_t ctx = in.count(m->laws_.size() - 1);
    if (i > 0 && ctx <= prev) throw FormatError("context indices must increase");
    prev = ctx;
    if (in.remaining() < 4 * (k - 1)) throw FormatError("unexpected end of data");
    std::vector<float> head(k - 1);
    for (auto& p : head) p = in.f32();
    m->install(ctx, head);
  }
  m->params_ = seen * (k - 1);
  m->mark_loaded();
  return m;
}

std::string CategoricalModel::describe() const {
  std::size_t seen = 0;
  for (const auto& s : laws_) seen += s != nullptr;
  return "categorical k=" + std::to_string(k_) + " contexts=" + std::to_string(seen) + "/" +
         std::to_string(laws_.size());
}

// ---------------------------------------------------------------------------

NumericLaw fit_law(NumericFamily family, std::span<const double> values, double scale_floor) {
  if (values.empty()) throw ConfigError("cannot fit a distribution without data");
  const auto finish = [&](double loc, double scale) {
    float s = static_cast<float>(std::max(scale, scale_floor));
    s = std::max(s, std::numeric_limits<float>::min());
    return NumericLaw{family, static_cast<float>(loc), s};
  };
  const double n = static_cast<double>(values.size());
  switch (family) {
    case NumericFamily::Uniform:
      return {};
    case NumericFamily::Gaussian: {
      const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      return finish(mean, std::sqrt(ss / n));
    }
    case NumericFamily::Laplace: {
      std::vector<double> sorted(values.begin(), values.end());
      std::sort(sorted.begin(), sorted.end());
      const std::size_t h = sorted.size() / 2;
      const double median = sorted.size() % 2 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
      double dev = 0.0;
      for (double v : sorted) dev += std::fabs(v - median);
      return finish(median, dev / n);
    }
  }
  return {};
}

std::pair<NumericLaw, double> select_law(std::span<const double> values, double scale_floor,
                                         const std::function<double(const NumericLaw&)>& bits) {
  std::pair<NumericLaw, double> best{};
  double best_cost = std::numeric_limits<double>::infinity();
  for (auto f : {NumericFamily::Uniform, NumericFamily::Gaussian, NumericFamily::Laplace}) {
    const NumericLaw law = fit_law(f, values, scale_floor);
    const double b = bits(law);
    const double cost = kBitsPerParameter * static_cast<double>(law.parameter_count()) + b;
    if (cost < best_cost) {
      best_cost = cost;
      best = {law, b};
    }
  }
  return best;
}

NumericModel::NumericModel(std::size_t target, bool integer, double tolerance, Range root, ContextMap contexts)
    : SquidModel(ModelKind::Numeric, target, std::move(contexts)),
      integer_(integer),
      tolerance_(tolerance),
      root_(root) {
  if (!is_f32(root.lo) || !is_f32(root.hi)) throw ConfigError("numeric root range must hold float32 values");
  build_numerical_tree({}, root_, tolerance_, integer_);
  if (context_map().size() > kMaxContexts) throw ConfigError("context table too large");
  values_.resize(context_map().size());
  laws_.resize(context_map().size());
  seen_.assign(context_map().size(), false);
}

const std::vector<double>& NumericModel::values(std::size_t ctx) const { return values_.at(ctx); }

const NumericLaw& NumericModel::law(std::size_t ctx) const {
  require_fitted();
  return laws_.at(ctx);
}

double NumericModel::scale_floor() const noexcept {
  return std::max({tolerance_, integer_ ? 0.5 : 0.0, root_.width() * 1e-6});
}

void NumericModel::observe(std::size_t ctx, const Value& v) {
  const auto* x = std::get_if<double>(&v);
  if (!x) throw std::invalid_argument("numeric model needs a numeric value");
  if (*x < root_.lo || *x > root_.hi) ++clamped_;
  values_[ctx].push_back(*x);
}

void NumericModel::fit() {
  data_bits_ = 0.0;
  params_ = 2;
  for (std::size_t ctx = 0; ctx < values_.size(); ++ctx) {
    const auto& vals = values_[ctx];
    if (vals.empty()) continue;
    auto [law, bits] = select_law(vals, scale_floor(), [&](const NumericLaw& l) {
      const NumericTree t(l, root_, tolerance_, integer_);
      double b = 0.0;
      for (double v : vals) b += t.code_bits(v);
      return b;
    });
    laws_[ctx] = law;
    seen_[ctx] = true;
    data_bits_ += bits;
    params_ += law.parameter_count();
  }
}

std::unique_ptr<Squid> NumericModel::tree(std::size_t ctx) const {
  return NumericTree(law(ctx), root_, tolerance_, integer_).cursor();
}

void NumericModel::write_body(ByteWriter& out) const {
  out.u8(integer_ ? 1 : 0);
  out.f64(tolerance_);
  out.f32(static_cast<float>(root_.lo));
  out.f32(static_cast<float>(root_.hi));
  out.varint(seen_count(seen_));
  for (std::size_t ctx = 0; ctx < laws_.size(); ++ctx) {
    if (!seen_[ctx]) continue;
    out.varint(ctx);
    write_law(out, laws_[ctx]);
  }
}

std::unique_ptr<NumericModel> NumericModel::read_body(std::size_t target, ContextMap contexts, ByteReader& in) {
  const bool integer = in.u8() != 0;
  const double tolerance = in.f64();
  const double lo = in.f32();
  const double hi = in.f32();
  auto m = std::make_unique<NumericModel>(target, integer, tolerance, Range{lo, hi}, std::move(contexts));
  const std::size_t seen = in.count(m->laws_.size());
  m->params_ = 2;
  std::size_t prev = 0;
  for (std::size_t i = 0; i < seen; ++i) {
    const std::size_t ctx = in.count(m->laws_.size() - 1);
    if (i > 0 && ctx <= prev) throw FormatError("context indices must increase");
    prev = ctx;
    m->laws_[ctx] = read_law(in);
    m->seen_[ctx] = true;
    m->params_ += m->laws_[ctx].parameter_count();
  }
  m->mark_loaded();
  return m;
}

std::string NumericModel::describe() const {
  std::ostringstream os;
  os << (integer_ ? "integer" : "real") << " range=[" << root_.lo << ", " << root_.hi << "] "
     << family_summary(laws_, seen_);
  return os.str();
}

// ---------------------------------------------------------------------------

StringModel::StringModel(std::size_t target, std::size_t max_length, ContextMap contexts)
    : SquidModel(ModelKind::String, target, std::move(contexts)),
      max_length_(max_length),
      chars_(std::make_shared<BigramModel>()) {
  if (max_length_ > (std::size_t{1} << 31)) throw ConfigError("maximum string length too large");
  if (context_map().size() > kMaxContexts) throw ConfigError("context table too large");
  lengths_.resize(context_map().size());
  laws_.resize(context_map().size());
  seen_.assign(context_map().size(), false);
}

const NumericLaw& StringModel::length_law(std::size_t ctx) const {
  require_fitted();
  return laws_.at(ctx);
}

void StringModel::observe(std::size_t ctx, const Value& v) {
  const auto* s = std::get_if<std::string>(&v);
  if (!s) throw std::invalid_argument("string model needs a string value");
  if (s->size() > max_length_) throw std::invalid_argument("string longer than the model's maximum length");
  lengths_[ctx].push_back(static_cast<double>(s->size()));
  chars_->observe(*s);
}

void StringModel::fit() {
  chars_->freeze();
  data_bits_ = 0.0;
  const double floor = std::max(0.5, static_cast<double>(max_length_) * 1e-6);
  const Range root{0.0, static_cast<double>(max_length_)};
  std::size_t law_params = 0;
  for (std::size_t ctx = 0; ctx < lengths_.size(); ++ctx) {
    const auto& lens = lengths_[ctx];
    if (lens.empty()) continue;
    auto [law, bits] = select_law(lens, floor, [&](const NumericLaw& l) {
      const NumericTree t(l, root, 0.0, true);
      double b = 0.0;
      for (double v : lens) b += t.code_bits(v);
      return b;
    });
    laws_[ctx] = law;
    seen_[ctx] = true;
    data_bits_ += bits;
    law_params += law.parameter_count();
  }
  for (const auto& e : chars_->entries())
    data_bits_ -= static_cast<double>(e.count) * std::log2(chars_->probability(e.context, e.next));
  params_ = 1 + law_params + chars_->nonzero_entries();
}

std::unique_ptr<Squid> StringModel::tree(std::size_t ctx) const {
  return StringTree(length_law(ctx), max_length_, chars_).cursor();
}

void StringModel::write_body(ByteWriter& out) const {
  out.varint(max_length_);
  out.varint(seen_count(seen_));
  for (std::size_t ctx = 0; ctx < laws_.size(); ++ctx) {
    if (!seen_[ctx]) continue;
    out.varint(ctx);
    write_law(out, laws_[ctx]);
  }
  const auto entries = chars_->entries();
  out.varint(entries.size());
  for (const auto& e : entries) {
    out.u16(e.context);
    out.u8(e.next);
    out.u32(e.count);
  }
}

std::unique_ptr<StringModel> StringModel::read_body(std::size_t target, ContextMap contexts, ByteReader& in) {
  const std::size_t max_length = in.count(std::size_t{1} << 31);
  auto m = std::make_unique<StringModel>(target, max_length, std::move(contexts));
  const std::size_t seen = in.count(m->laws_.size());
  std::size_t law_params = 0;
  std::size_t prev = 0;
  for (std::size_t i = 0; i < seen; ++i) {
    const std::size_t ctx = in.count(m->laws_.size() - 1);
    if (i > 0 && ctx <= prev) throw FormatError("context indices must increase");
    prev = ctx;
    m->laws_[ctx] = read_law(in);
    m->seen_[ctx] = true;
    law_params += m->laws_[ctx].parameter_count();
  }
  const std::size_t n = in.count(in.remaining() / 7);
  std::vector<BigramModel::Entry> entries(n);
  for (auto& e : entries) {
    e.context = in.u16();
    e.next = in.u8();
    e.count = in.u32();
    if (e.count == 0) throw FormatError("zero bigram count");
  }
  m->chars_ = std::make_shared<BigramModel>(BigramModel::from_entries(entries));
  m->params_ = 1 + law_params + m->chars_->nonzero_entries();
  m->mark_loaded();
  return m;
}

std::string StringModel::describe() const {
  return "string max_length=" + std::to_string(max_length_) + " length " + family_summary(laws_, seen_) +
         " bigrams=" + std::to_string(chars_->nonzero_entries());
}

// ---------------------------------------------------------------------------

ContextMap make_context_map(const Schema& schema, std::span<const ColumnDomain> domains,
                            std::span<const std::size_t> parents, const ModelOptions& opts) {
  std::vector<Interpreter> interpreters;
  for (std::size_t p : parents) {
    if (p >= schema.size()) throw ConfigError("parent column index out of range");
    interpreters.push_back(default_interpreter(schema.column(p), domains[p], opts.bins));
  }
  return ContextMap(std::vector<std::size_t>(parents.begin(), parents.end()), std::move(interpreters));
}

std::unique_ptr<SquidModel> make_model(const Schema& schema, std::span<const ColumnDomain> domains,
                                       std::size_t target, std::span<const std::size_t> parents,
                                       const ModelOptions& opts) {
  if (target >= schema.size()) throw ConfigError("target column index out of range");
  if (domains.size() != schema.size()) throw ConfigError("one column domain per column is required");
  for (std::size_t i = 0; i < parents.size(); ++i) {
    if (parents[i] == target) throw ConfigError("a column cannot be its own parent");
    for (std::size_t j = 0; j < i; ++j)
      if (parents[i] == parents[j]) throw ConfigError("duplicate parent column");
  }
  ContextMap ctx = make_context_map(schema, domains, parents, opts);
  if (ctx.size() > opts.context_cap)
    throw ConfigError("parent set of column '" + schema.column(target).name + "' needs " +
                      std::to_string(ctx.size()) + " contexts, above the cap of " + std::to_string(opts.context_cap));
  const Column& col = schema.column(target);
  if (const auto* cat = std::get_if<CategoricalKind>(&col.kind))
    return std::make_unique<CategoricalModel>(target, cat->domain_size, std::move(ctx), opts.smoothing);
  if (const auto* num = std::get_if<NumericKind>(&col.kind))
    return std::make_unique<NumericModel>(target, num->integer, col.tolerance, domains[target].range, std::move(ctx));
  return std::make_unique<StringModel>(target, domains[target].max_length, std::move(ctx));
}

}  // namespace squish
