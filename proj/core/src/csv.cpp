#include "squish/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace squish {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

std::optional<double> parse_double(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  const char* b = t.data();
  if (*b == '+') ++b;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(b, t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

double require_double(const std::string& text, const std::string& what) {
  auto v = parse_double(text);
  if (!v) throw ConfigError(what + ": '" + text + "' is not a number");
  return *v;
}

std::size_t require_count(const std::string& text, const std::string& what) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) throw ConfigError(what + ": '" + text + "' is not a count");
  return v;
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

double resolve(const ToleranceSpec& spec, std::span<const Tuple> rows, std::size_t c) {
  if (!spec.percent) return spec.value;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& t : rows) {
    const double v = std::get<double>(t[c]);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return rows.empty() ? 0.0 : spec.value / 100.0 * (hi - lo);
}

}  // namespace

bool CsvReader::next(std::vector<std::string>& fields) {
  fields.clear();
  int ch = in_.get();
  if (ch == std::char_traits<char>::eof()) return false;
  record_line_ = line_;
  blank_ = ch == '\n' || ch == '\r';
  std::string field;
  bool quoted = false;
  bool after_quote = false;
  for (;; ch = in_.get()) {
    if (ch == std::char_traits<char>::eof()) {
      if (quoted) throw ParseError("unterminated quoted field", record_line_);
      fields.push_back(std::move(field));
      return true;
    }
    const char c = static_cast<char>(ch);
    if (quoted) {
      if (c == opts_.quote) {
        if (in_.peek() == opts_.quote) {
          in_.get();
          field.push_back(c);
        } else {
          quoted = false;
          after_quote = true;
        }
      } else {
        if (c == '\n') ++line_;
        field.push_back(c);
      }
      continue;
    }
    if (c == opts_.delimiter) {
      fields.push_back(std::move(field));
      field.clear();
      after_quote = false;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && in_.peek() == '\n') in_.get();
      ++line_;
      fields.push_back(std::move(field));
      return true;
    } else if (after_quote) {
      throw ParseError("unexpected character after closing quote", line_);
    } else if (c == opts_.quote && field.empty()) {
      quoted = true;
    } else {
      field.push_back(c);
    }
  }
}

void write_csv_row(std::ostream& out, std::span<const std::string> fields, CsvOptions opts) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << opts.delimiter;
    const std::string& f = fields[i];
    const bool needs_quote = f.find_first_of(std::string{opts.delimiter, opts.quote, '\n', '\r'}) != std::string::npos ||
                             (fields.size() == 1 && f.empty());
    if (!needs_quote) {
      out << f;
      continue;
    }
    out << opts.quote;
    for (char c : f) {
      if (c == opts.quote) out << opts.quote;
      out << c;
    }
    out << opts.quote;
  }
  out << '\n';
}

ToleranceSpec ToleranceSpec::parse(const std::string& text) {
  std::string t = trim(text);
  ToleranceSpec spec;
  if (!t.empty() && t.back() == '%') {
    spec.percent = true;
    t.pop_back();
  }
  auto v = parse_double(t);
  if (!v || *v < 0.0) throw ConfigError("invalid tolerance '" + text + "'");
  spec.value = *v;
  return spec;
}

IngestionConfig parse_ingestion_config(std::istream& in) {
  IngestionConfig cfg;
  std::map<std::string, ToleranceSpec> tolerances;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno);
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "delimiter") {
        if (value == "tab" || value == "\\t") value = "\t";
        if (value.size() != 1) throw ConfigError("delimiter must be a single character");
        cfg.csv.delimiter = value[0];
      } else if (key == "quote") {
        if (value.size() != 1) throw ConfigError("quote must be a single character");
        cfg.csv.quote = value[0];
      } else if (key == "header") {
        cfg.header = parse_bool(value, key);
      } else if (key.rfind("column.", 0) == 0) {
        ColumnSpec spec;
        spec.name = key.substr(7);
        if (spec.name.empty()) throw ConfigError("empty column name");
        for (const auto& c : cfg.columns)
          if (c.name == spec.name) throw ConfigError("column '" + spec.name + "' declared twice");
        const auto words = split_words(value);
        if (words.empty()) throw ConfigError("column '" + spec.name + "' needs a type");
        const std::string& type = words[0];
        const std::string what = "column '" + spec.name + "'";
        if (type == "categorical") {
          CategoricalKind k;
          if (words.size() > 1) {
            k.labels.assign(words.begin() + 1, words.end());
            k.domain_size = k.labels.size();
            spec.fixed_labels = true;
          }
          spec.kind = k;
        } else if (type == "integer" || type == "real") {
          NumericKind k;
          k.integer = type == "integer";
          if (words.size() == 3) {
            k.range = Range{require_double(words[1], what), require_double(words[2], what)};
          } else if (words.size() != 1) {
            throw ConfigError(what + ": expected '" + type + " [lo hi]'");
          }
          spec.kind = k;
        } else if (type == "string") {
          StringKind k;
          if (words.size() == 2) {
            k.max_length = require_count(words[1], what);
          } else if (words.size() != 1) {
            throw ConfigError(what + ": expected 'string [max_length]'");
          }
          spec.kind = k;
        } else {
          throw ConfigError(what + ": unknown type '" + type + "'");
        }
        cfg.columns.push_back(std::move(spec));
      } else if (key.rfind("tolerance.", 0) == 0) {
        tolerances[key.substr(10)] = ToleranceSpec::parse(value);
      } else {
        throw ConfigError("unknown key '" + key + "'");
      }
    } catch (const ConfigError& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  if (cfg.columns.empty()) throw ConfigError("schema file declares no columns");
  for (const auto& [name, tol] : tolerances) {
    auto it = std::find_if(cfg.columns.begin(), cfg.columns.end(), [&](const ColumnSpec& c) { return c.name == name; });
    if (it == cfg.columns.end()) throw ConfigError("tolerance given for unknown column '" + name + "'");
    if (!is_numeric(it->kind) && tol.value != 0.0)
      throw ConfigError("column '" + name + "' is not numeric and cannot take a tolerance");
    it->tolerance = tol;
  }
  return cfg;
}

IngestionConfig load_ingestion_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open schema file '" + path + "'");
  return parse_ingestion_config(in);
}

Dataset ingest_csv(std::istream& in, const IngestionConfig& cfg) {
  const std::size_t m = cfg.columns.size();
  CsvReader reader(in, cfg.csv);
  std::vector<std::string> fields;
  std::vector<std::size_t> source(m);
  for (std::size_t i = 0; i < m; ++i) source[i] = i;
  std::size_t width = m;
  if (cfg.header) {
    if (!reader.next(fields)) throw ParseError("missing header row", 1);
    width = fields.size();
    for (std::size_t i = 0; i < m; ++i) {
      auto it = std::find_if(fields.begin(), fields.end(), [&](const std::string& f) { return trim(f) == cfg.columns[i].name; });
      if (it == fields.end()) throw ConfigError("column '" + cfg.columns[i].name + "' not found in the header");
      source[i] = static_cast<std::size_t>(it - fields.begin());
    }
    if (width != m) throw ConfigError("header has " + std::to_string(width) + " columns, schema declares " + std::to_string(m));
  }

  std::vector<std::unordered_map<std::string, std::uint32_t>> dict(m);
  std::vector<std::vector<std::string>> labels(m);
  for (std::size_t i = 0; i < m; ++i)
    if (const auto* k = std::get_if<CategoricalKind>(&cfg.columns[i].kind); k && cfg.columns[i].fixed_labels) {
      labels[i] = k->labels;
      for (std::size_t j = 0; j < labels[i].size(); ++j) dict[i].emplace(labels[i][j], static_cast<std::uint32_t>(j));
    }

  std::vector<Tuple> rows;
  while (reader.next(fields)) {
    if (reader.blank()) continue;
    if (fields.size() != width)
      throw ParseError("expected " + std::to_string(width) + " fields, got " + std::to_string(fields.size()), reader.line());
    Tuple t(m);
    for (std::size_t i = 0; i < m; ++i) {
      const ColumnSpec& spec = cfg.columns[i];
      const std::string& f = fields[source[i]];
      if (std::holds_alternative<CategoricalKind>(spec.kind)) {
        auto it = dict[i].find(f);
        if (it == dict[i].end()) {
          if (spec.fixed_labels) throw ParseError("column '" + spec.name + "': unknown category '" + f + "'", reader.line());
          it = dict[i].emplace(f, static_cast<std::uint32_t>(labels[i].size())).first;
          labels[i].push_back(f);
        }
        t[i] = Cat{it->second};
      } else if (const auto* num = std::get_if<NumericKind>(&spec.kind)) {
        auto v = parse_double(f);
        if (!v) throw ParseError("column '" + spec.name + "': '" + f + "' is not a number", reader.line());
        if (num->integer && *v != std::nearbyint(*v))
          throw ParseError("column '" + spec.name + "': '" + f + "' is not an integer", reader.line());
        t[i] = *v;
      } else {
        const auto& max = std::get<StringKind>(spec.kind).max_length;
        if (max && f.size() > *max)
          throw ParseError("column '" + spec.name + "': string longer than " + std::to_string(*max), reader.line());
        t[i] = f;
      }
    }
    rows.push_back(std::move(t));
  }

  std::vector<Column> columns;
  for (std::size_t i = 0; i < m; ++i) {
    Column col{cfg.columns[i].name, cfg.columns[i].kind, 0.0};
    if (auto* k = std::get_if<CategoricalKind>(&col.kind)) {
      k->labels = labels[i];
      k->domain_size = std::max<std::size_t>(1, labels[i].size());
      if (labels[i].empty()) k->labels.clear();
    }
    if (cfg.columns[i].tolerance && is_numeric(col.kind)) col.tolerance = resolve(*cfg.columns[i].tolerance, rows, i);
    columns.push_back(std::move(col));
  }
  Dataset data{Schema(std::move(columns)), {}};
  data.rows.reserve(rows.size());
  for (auto& t : rows) data.add(std::move(t));
  return data;
}

Dataset ingest_csv_file(const std::string& path, const IngestionConfig& cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open input file '" + path + "'");
  return ingest_csv(in, cfg);
}

Dataset with_tolerances(Dataset data, const std::optional<ToleranceSpec>& global,
                        const std::map<std::string, ToleranceSpec>& per_column) {
  for (const auto& [name, spec] : per_column) {
    auto idx = data.schema.index_of(name);
    if (!idx) throw ConfigError("tolerance given for unknown column '" + name + "'");
    if (!is_numeric(data.schema.column(*idx).kind) && spec.value != 0.0)
      throw ConfigError("column '" + name + "' is not numeric and cannot take a tolerance");
  }
  std::vector<Column> columns = data.schema.columns();
  for (std::size_t i = 0; i < columns.size(); ++i) {
    Column& col = columns[i];
    if (!is_numeric(col.kind)) continue;
    if (auto it = per_column.find(col.name); it != per_column.end()) {
      col.tolerance = resolve(it->second, data.rows, i);
    } else if (col.tolerance == 0.0 && global) {
      col.tolerance = resolve(*global, data.rows, i);
    }
  }
  data.schema = Schema(std::move(columns));
  return data;
}

std::string format_value(const Column& column, const Value& v) {
  if (const auto* c = std::get_if<Cat>(&v)) {
    const auto& k = std::get<CategoricalKind>(column.kind);
    if (c->index < k.labels.size()) return k.labels[c->index];
    return std::to_string(c->index);
  }
  if (const auto* d = std::get_if<double>(&v)) {
    char buf[64];
    const auto& num = std::get<NumericKind>(column.kind);
    if (num.integer && std::fabs(*d) < 9.2e18) {
      auto r = std::to_chars(buf, buf + sizeof buf, static_cast<long long>(std::llround(*d)));
      return std::string(buf, r.ptr);
    }
    auto r = std::to_chars(buf, buf + sizeof buf, *d);
    return std::string(buf, r.ptr);
  }
  return std::get<std::string>(v);
}

void write_csv(std::ostream& out, const Schema& schema, std::span<const Tuple> rows, bool header, CsvOptions opts) {
  std::vector<std::string> fields(schema.size());
  if (header) {
    for (std::size_t i = 0; i < schema.size(); ++i) fields[i] = schema.column(i).name;
    write_csv_row(out, fields, opts);
  }
  for (const auto& t : rows) {
    for (std::size_t i = 0; i < schema.size(); ++i) fields[i] = format_value(schema.column(i), t[i]);
    write_csv_row(out, fields, opts);
  }
}

}  // namespace squish
