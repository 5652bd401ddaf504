#include "squish/storage.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

#include "squish/delta.hpp"
#include "squish/serialize.hpp"

namespace squish {

namespace {

constexpr std::uint8_t kMagic[4] = {'S', 'Q', 'S', 'H'};
constexpr std::uint8_t kFlagDelta = 1;
constexpr std::uint8_t kFlagIndex = 2;

double interval_bits(const GridInterval& iv, const ApproxConfig& cfg) {
  return -std::log2(static_cast<double>(iv.width()) / static_cast<double>(cfg.one()));
}

void write_schema(ByteWriter& out, const Schema& schema) {
  out.varint(schema.size());
  for (const auto& col : schema.columns()) {
    out.str(col.name);
    if (const auto* cat = std::get_if<CategoricalKind>(&col.kind)) {
      out.u8(0);
      out.varint(cat->domain_size);
      out.varint(cat->labels.size());
      for (const auto& l : cat->labels) out.str(l);
    } else if (const auto* num = std::get_if<NumericKind>(&col.kind)) {
      out.u8(1);
      out.u8(num->integer ? 1 : 0);
      out.u8(num->range ? 1 : 0);
      if (num->range) {
        out.f64(num->range->lo);
        out.f64(num->range->hi);
      }
    } else {
      const auto& str = std::get<StringKind>(col.kind);
      out.u8(2);
      out.u8(str.max_length ? 1 : 0);
      if (str.max_length) out.varint(*str.max_length);
    }
    out.f64(col.tolerance);
  }
}

Schema read_schema(ByteReader& in) {
  const std::size_t m = in.count(in.remaining());
  std::vector<Column> cols;
  for (std::size_t i = 0; i < m; ++i) {
    Column col;
    col.name = in.str();
    switch (in.u8()) {
      case 0: {
        CategoricalKind k;
        k.domain_size = in.count(std::size_t{1} << 32);
        k.labels.resize(in.count(in.remaining()));
        for (auto& l : k.labels) l = in.str();
        col.kind = std::move(k);
        break;
      }
      case 1: {
        NumericKind k;
        k.integer = in.u8() != 0;
        if (in.u8() != 0) {
          const double lo = in.f64();
          const double hi = in.f64();
          k.range = Range{lo, hi};
        }
        col.kind = k;
        break;
      }
      case 2: {
        StringKind k;
        if (in.u8() != 0) k.max_length = in.count(std::size_t{1} << 31);
        col.kind = k;
        break;
      }
      default:
        throw FormatError("unknown column kind");
    }
    col.tolerance = in.f64();
    cols.push_back(std::move(col));
  }
  try {
    return Schema(std::move(cols));
  } catch (const ConfigError& e) {
    throw FormatError(std::string("invalid schema: ") + e.what());
  }
}

void write_structure(ByteWriter& out, const BayesNetStructure& s) {
  out.varint(s.size());
  for (std::size_t c : s.order) out.varint(c);
  for (const auto& ps : s.parents) {
    out.varint(ps.size());
    for (std::size_t p : ps) out.varint(p);
  }
}

BayesNetStructure read_structure(ByteReader& in, std::size_t m) {
  if (in.count(m) != m) throw FormatError("structure does not match the schema");
  BayesNetStructure s;
  s.order.resize(m);
  for (auto& c : s.order) c = in.count(m);
  s.parents.resize(m);
  for (auto& ps : s.parents) {
    ps.resize(in.count(m));
    for (auto& p : ps) p = in.count(m);
  }
  try {
    s.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("invalid structure: ") + e.what());
  }
  return s;
}

bool kind_matches(const AttributeKind& kind, ModelKind mk) {
  if (std::holds_alternative<CategoricalKind>(kind)) return mk == ModelKind::Categorical;
  if (std::holds_alternative<NumericKind>(kind)) return mk == ModelKind::Numeric;
  return mk == ModelKind::String;
}

/// The l prefix bits of a delta entry followed by the rest of the payload.
class PrefixedSource final : public BitSource {
 public:
  PrefixedSource(std::uint64_t prefix, unsigned l, const BitSource& payload, std::size_t offset)
      : prefix_(prefix), l_(l), payload_(payload), offset_(offset) {}

  bool bit(std::size_t pos) const override {
    if (pos < l_) return (prefix_ >> (l_ - 1 - pos)) & 1u;
    return payload_.bit(offset_ + pos - l_);
  }
  std::size_t size() const override { return l_ + (payload_.size() - std::min(offset_, payload_.size())); }

 private:
  std::uint64_t prefix_;
  unsigned l_;
  const BitSource& payload_;
  std::size_t offset_;
};

std::string describe_type(const Column& col) {
  std::ostringstream os;
  if (const auto* cat = std::get_if<CategoricalKind>(&col.kind)) {
    os << "categorical(" << cat->domain_size << ")";
  } else if (const auto* num = std::get_if<NumericKind>(&col.kind)) {
    os << (num->integer ? "integer" : "real");
    if (num->range) os << " [" << num->range->lo << ", " << num->range->hi << "]";
  } else {
    os << "string";
    if (const auto& max = std::get<StringKind>(col.kind).max_length) os << "(" << *max << ")";
  }
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------

Tuple TupleCoder::encode(const Tuple& t, Encoder& enc) const {
  Tuple rec(schema->size(), Value{Cat{0}});
  for (std::size_t c : order) {
    auto cur = models[c]->tree_for(rec);
    const Value& v = t.at(c);
    while (!cur->is_end()) {
      const BranchDistribution d = cur->generate_branch();
      const auto iv = cumulative_intervals(d.probabilities(), codec);
      std::size_t b = 0;
      try {
        b = cur->get_branch(v);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("column '" + schema->column(c).name + "': " + e.what());
      }
      enc.push(iv[b]);
      cur->choose_branch(b);
    }
    rec[c] = cur->get_result().representative;
  }
  return rec;
}

Tuple TupleCoder::decode(Decoder& dec, std::vector<double>* bits) const {
  Tuple rec(schema->size(), Value{Cat{0}});
  for (std::size_t c : order) {
    auto cur = models[c]->tree_for(rec);
    while (!cur->is_end()) {
      const BranchDistribution d = cur->generate_branch();
      const auto iv = cumulative_intervals(d.probabilities(), codec);
      const std::size_t b = dec.next_branch(iv);
      if (bits) (*bits)[c] += interval_bits(iv[b], codec);
      cur->choose_branch(b);
    }
    rec[c] = cur->get_result().representative;
  }
  return rec;
}

std::vector<std::uint8_t> compress(const Dataset& data, const CompressOptions& opts, CompressStats* stats) {
  if (opts.delta && opts.index)
    throw ConfigError("delta coding reorders tuples, so it cannot be combined with the offset index");
  opts.codec.validate();
  const Schema& schema = data.schema;
  const std::size_t n = data.rows.size();
  const std::size_t m = schema.size();
  CompressStats local;
  CompressStats& st = stats ? *stats : local;
  st = CompressStats{};
  st.rows = n;

  const auto domains = derive_domains(schema, data.rows);
  if (n > 0)
    for (std::size_t c = 0; c < m; ++c)
      if (is_numeric(schema.column(c).kind)) {
        try {
          column_tree(schema.column(c), domains[c]);
        } catch (const ConfigError& e) {
          throw ConfigError("column '" + schema.column(c).name + "': " + e.what());
        }
      }

  std::vector<Tuple> quantized;
  quantized.reserve(n);
  for (const auto& t : data.rows) quantized.push_back(quantize(schema, domains, t));

  BayesNetStructure structure;
  if (opts.structure) {
    structure = *opts.structure;
    if (structure.size() != m) throw ConfigError("structure does not match the schema");
    structure.validate();
  } else if (n > 0) {
    std::vector<Tuple> sample;
    for (std::size_t i : sample_indices(n, opts.search)) sample.push_back(quantized[i]);
    structure = learn_structure(schema, domains, sample, opts.search, &st.search);
  } else {
    structure = BayesNetStructure::from_parents(std::vector<std::vector<std::size_t>>(m));
  }
  st.structure = structure;

  std::vector<std::unique_ptr<SquidModel>> models;
  if (n > 0) models = fit_full(schema, domains, quantized, structure, opts.search.model);
  for (const auto& model : models) st.model_bits += 32 * model->parameter_count();

  const TupleCoder coder{&schema, models, structure.order, opts.codec};
  Encoder enc(opts.codec);
  st.codes.reserve(n);
  for (const auto& t : data.rows) {
    const Tuple rec = coder.encode(t, enc);
    st.codes.push_back(enc.finish());
    for (std::size_t c = 0; c < m; ++c)
      if (is_numeric(schema.column(c).kind) &&
          !(std::fabs(std::get<double>(t[c]) - std::get<double>(rec[c])) <= schema.column(c).tolerance))
        ++st.clamped;
  }

  ByteWriter out;
  out.bytes(kMagic);
  out.u16(kFormatVersion);
  out.u8((opts.delta ? kFlagDelta : 0) | (opts.index ? kFlagIndex : 0));
  {
    ByteWriter s;
    write_schema(s, schema);
    out.blob(s.data());
  }
  {
    ByteWriter s;
    write_structure(s, structure);
    out.blob(s.data());
  }
  {
    ByteWriter s;
    s.varint(models.size());
    for (const auto& model : models) s.blob(model->write_model());
    out.blob(s.data());
  }
  ByteWriter body;
  body.u8(static_cast<std::uint8_t>(opts.codec.precision));
  body.u8(static_cast<std::uint8_t>(opts.codec.min_width_log2));
  body.varint(n);
  std::vector<std::size_t> offsets;
  BitString stream;
  if (opts.delta) {
    const DeltaBlock block = delta_encode(st.codes);
    body.varint(block.l);
    stream = block.payload;
  } else {
    for (const auto& code : st.codes) {
      offsets.push_back(stream.size());
      stream.append(code);
    }
  }
  body.varint(stream.size());
  body.bytes(stream.bytes());
  st.data_bits = stream.size();
  out.blob(body.data());
  if (opts.index) {
    ByteWriter s;
    s.varint(n);
    std::size_t prev = 0;
    for (std::size_t off : offsets) {
      s.varint(off - prev);
      prev = off;
    }
    out.blob(s.data());
  }
  return out.take();
}

// ---------------------------------------------------------------------------

Archive Archive::parse(std::vector<std::uint8_t> bytes, bool lenient) {
  Archive a;
  a.bytes_ = std::move(bytes);
  ByteReader in(a.bytes_);
  const auto magic = in.bytes(4);
  if (!std::equal(magic.begin(), magic.end(), std::begin(kMagic))) throw FormatError("not a squish archive");
  const std::uint16_t version = in.u16();
  if (version != kFormatVersion) throw FormatError("unsupported archive version " + std::to_string(version));
  const std::uint8_t flags = in.u8();
  if (flags & ~(kFlagDelta | kFlagIndex)) throw FormatError("unknown archive flags");
  a.delta_ = flags & kFlagDelta;
  a.index_ = flags & kFlagIndex;
  if (a.delta_ && a.index_) throw FormatError("delta and index flags are mutually exclusive");

  {
    ByteReader s(in.blob());
    a.schema_ = read_schema(s);
    s.expect_end("schema section");
  }
  const std::size_t m = a.schema_.size();
  {
    ByteReader s(in.blob());
    a.structure_ = read_structure(s, m);
    s.expect_end("structure section");
  }
  {
    ByteReader s(in.blob());
    const std::size_t count = s.count(m);
    for (std::size_t i = 0; i < count; ++i) {
      auto model = SquidModel::read_model(s.blob());
      if (model->target() != i) throw FormatError("models out of column order");
      if (!kind_matches(a.schema_.column(i).kind, model->kind())) throw FormatError("model kind does not match column");
      if (model->context_map().parents() != a.structure_.parents[i])
        throw FormatError("model parents differ from the structure");
      a.models_.push_back(std::move(model));
    }
    s.expect_end("model section");
  }
  a.header_size_ = in.position();

  std::span<const std::uint8_t> body_bytes;
  {
    const std::size_t len = static_cast<std::size_t>(in.varint());
    if (len > in.remaining()) {
      if (!lenient) throw FormatError("body section truncated");
      a.truncated_ = true;
      body_bytes = in.bytes(in.remaining());
    } else {
      body_bytes = in.bytes(len);
    }
  }
  a.body_section_bytes_ = body_bytes.size();
  ByteReader body(body_bytes);
  try {
    const unsigned precision = body.u8();
    const unsigned min_width = body.u8();
    a.codec_ = ApproxConfig{precision, min_width};
    try {
      a.codec_.validate();
    } catch (const ConfigError& e) {
      throw FormatError(e.what());
    }
    a.n_ = body.count(std::size_t{1} << 48);
    if (a.n_ > 0 && a.models_.size() != m) throw FormatError("archive holds rows but no models");
    if (a.delta_) {
      a.delta_l_ = static_cast<unsigned>(body.count(64));
      if (a.delta_l_ != delta_prefix_width(a.n_)) throw FormatError("delta prefix width mismatch");
    }
    a.body_bits_ = static_cast<std::size_t>(body.varint());
    if (a.body_bits_ / 8 > (std::size_t{1} << 48)) throw FormatError("body too large");
    a.body_offset_ = static_cast<std::size_t>(body_bytes.data() - a.bytes_.data()) + body.position();
    const std::size_t need = (a.body_bits_ + 7) / 8;
    if (body.remaining() < need) {
      if (!a.truncated_) throw FormatError("body shorter than its bit count");
      a.available_bits_ = body.remaining() * 8;
    } else {
      if (body.remaining() > need) throw FormatError("trailing bytes in body section");
      a.available_bits_ = a.body_bits_;
    }
  } catch (const FormatError&) {
    if (!a.truncated_) throw;
    // The readable prefix ended inside the body header; nothing decodes.
    a.available_bits_ = 0;
    a.body_offset_ = a.bytes_.size();
    return a;
  }

  if (a.index_ && !a.truncated_) {
    ByteReader s(in.blob());
    if (s.count(a.n_) != a.n_) throw FormatError("index size differs from the row count");
    std::size_t pos = 0;
    for (std::size_t i = 0; i < a.n_; ++i) {
      const std::size_t d = s.count(a.body_bits_);
      if (i > 0 && d == 0) throw FormatError("index offsets must increase");
      pos += d;
      if (pos >= a.body_bits_) throw FormatError("index offset beyond the code stream");
      a.offsets_.push_back(pos);
    }
    s.expect_end("index section");
  }
  if (!a.truncated_) in.expect_end("archive");
  return a;
}

TupleCoder Archive::coder() const { return TupleCoder{&schema_, models_, structure_.order, codec_}; }

void Archive::decode_impl(const std::function<void(const Tuple&)>& sink, std::vector<double>* bits) const {
  const std::span<const std::uint8_t> packed(bytes_.data() + std::min(body_offset_, bytes_.size()),
                                             bytes_.size() - std::min(body_offset_, bytes_.size()));
  const SpanBitSource stream(packed, available_bits_);
  const TupleCoder tc = coder();
  std::size_t done = 0;
  const auto fail = [&](const std::string& what) -> FormatError {
    return FormatError(what + " (after " + std::to_string(done) + " of " + std::to_string(n_) + " rows)", done);
  };
  try {
    if (!delta_) {
      Decoder dec(stream, 0, codec_);
      for (; done < n_;) {
        Tuple t = tc.decode(dec, bits);
        dec.finish();
        ++done;
        sink(t);
      }
      if (dec.position() != body_bits_) throw FormatError("trailing bits after the last code");
    } else {
      const std::uint64_t limit = delta_l_ == 0 ? 0 : (std::uint64_t{1} << delta_l_) - 1;
      std::size_t pos = 0;
      std::uint64_t prefix = 0;
      for (; done < n_;) {
        for (;;) {
          if (pos >= stream.size()) throw FormatError("delta payload truncated");
          if (!stream.bit(pos++)) break;
          if (++prefix > limit) throw FormatError("malformed unary run");
        }
        const PrefixedSource src(prefix, delta_l_, stream, pos);
        Decoder dec(src, 0, codec_);
        Tuple t = tc.decode(dec, bits);
        dec.finish();
        pos += dec.position() > delta_l_ ? dec.position() - delta_l_ : 0;
        ++done;
        sink(t);
      }
      if (pos != body_bits_) throw FormatError("trailing bits after the last code");
    }
  } catch (const FormatError& e) {
    throw fail(e.what());
  }
  if (truncated_) throw fail("archive truncated");
}

void Archive::decode_all(const std::function<void(const Tuple&)>& sink) const { decode_impl(sink, nullptr); }

std::vector<Tuple> Archive::decode_all() const {
  std::vector<Tuple> out;
  out.reserve(n_);
  decode_all([&](const Tuple& t) { out.push_back(t); });
  return out;
}

Tuple Archive::read_tuple_at(std::size_t i) const {
  if (!index_) {
    throw ConfigError(delta_ ? "archive is delta coded; delta coding reorders tuples and rules out random access"
                             : "archive has no offset index (compress with --index)");
  }
  if (i >= n_) throw std::out_of_range("row " + std::to_string(i) + " out of range (archive has " + std::to_string(n_) + " rows)");
  if (i >= offsets_.size()) throw FormatError("offset index missing", 0);
  const SpanBitSource stream({bytes_.data() + body_offset_, bytes_.size() - body_offset_}, available_bits_);
  Decoder dec(stream, offsets_[i], codec_);
  Tuple t = coder().decode(dec);
  dec.finish();
  return t;
}

std::uint64_t Archive::model_bits() const {
  std::uint64_t bits = 0;
  for (const auto& model : models_) bits += 32 * model->parameter_count();
  return bits;
}

// ---------------------------------------------------------------------------

ArchiveReport inspect(const Archive& archive) {
  ArchiveReport r;
  r.delta = archive.delta();
  r.index = archive.index_;
  r.rows = archive.rows();
  r.total_bytes = archive.total_bytes();
  r.model_bits = archive.model_bits();
  r.data_bits = archive.body_bits();
  r.framing_bits = archive.framing_bits();
  r.edges = archive.structure().edge_count();
  const Schema& schema = archive.schema();
  std::vector<double> bits(schema.size(), 0.0);
  if (archive.rows() > 0) archive.decode_impl([](const Tuple&) {}, &bits);
  for (std::size_t c = 0; c < schema.size(); ++c) {
    const Column& col = schema.column(c);
    ColumnReport cr;
    cr.name = col.name;
    cr.type = describe_type(col);
    cr.tolerance = col.tolerance;
    for (std::size_t p : archive.structure().parents[c]) cr.parents.push_back(schema.column(p).name);
    if (c < archive.models().size()) {
      const auto& model = archive.models()[c];
      cr.model = model->describe();
      cr.parameters = model->parameter_count();
      cr.model_bits = 32.0 * static_cast<double>(cr.parameters);
    }
    cr.data_bits = bits[c];
    r.columns.push_back(std::move(cr));
  }
  return r;
}

std::string format_report(const ArchiveReport& r) {
  std::ostringstream os;
  os << "format: squish v" << r.version << "\n"
     << "rows: " << r.rows << "\n"
     << "columns: " << r.columns.size() << "\n"
     << "bytes: " << r.total_bytes << "\n"
     << "flags: delta=" << (r.delta ? "on" : "off") << " index=" << (r.index ? "on" : "off") << "\n"
     << "bits: model=" << r.model_bits << " data=" << r.data_bits << " framing=" << r.framing_bits << "\n"
     << "structure: " << r.edges << " edges\n";
  for (const auto& c : r.columns) {
    os << "  " << c.name << " <-";
    if (c.parents.empty()) os << " (none)";
    for (std::size_t i = 0; i < c.parents.size(); ++i) os << (i ? ", " : " ") << c.parents[i];
    os << "\n";
  }
  os << "column details:\n";
  os.setf(std::ios::fixed);
  os.precision(1);
  for (const auto& c : r.columns) {
    os << "  " << c.name << ": " << c.type;
    if (c.tolerance > 0.0) {
      os.unsetf(std::ios::fixed);
      os.precision(6);
      os << " tolerance=" << c.tolerance;
      os.setf(std::ios::fixed);
      os.precision(1);
    }
    os << " | " << (c.model.empty() ? "no model" : c.model) << " | params=" << c.parameters
       << " model_bits=" << c.model_bits << " data_bits=" << c.data_bits << "\n";
  }
  return os.str();
}

BayesNetStructure parse_structure(std::istream& in, const Schema& schema) {
  std::vector<std::vector<std::size_t>> parents(schema.size());
  std::vector<bool> declared(schema.size(), false);
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  };
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError("expected 'child: parent, ...'", lineno);
    const std::string child = trim(line.substr(0, colon));
    const auto ci = schema.index_of(child);
    if (!ci) throw ParseError("unknown column '" + child + "'", lineno);
    if (declared[*ci]) throw ParseError("column '" + child + "' listed twice", lineno);
    declared[*ci] = true;
    std::stringstream rest(line.substr(colon + 1));
    for (std::string item; std::getline(rest, item, ',');) {
      item = trim(item);
      if (item.empty()) continue;
      const auto pi = schema.index_of(item);
      if (!pi) throw ParseError("unknown column '" + item + "'", lineno);
      parents[*ci].push_back(*pi);
    }
  }
  return BayesNetStructure::from_parents(std::move(parents));
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading '" + path + "'");
  return bytes;
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error writing '" + path + "'");
}

}  // namespace squish
