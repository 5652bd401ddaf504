#include "squish/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace squish {

namespace {

void check_kind(const Column& c) {
  if (const auto* cat = std::get_if<CategoricalKind>(&c.kind)) {
    if (cat->domain_size < 1) throw ConfigError("column '" + c.name + "': empty categorical domain");
    if (!cat->labels.empty() && cat->labels.size() != cat->domain_size)
      throw ConfigError("column '" + c.name + "': dictionary size differs from domain size");
  } else if (const auto* num = std::get_if<NumericKind>(&c.kind)) {
    if (num->range && !(num->range->lo < num->range->hi))
      throw ConfigError("column '" + c.name + "': declared range needs lo < hi");
  }
  if (!(c.tolerance >= 0.0) || !std::isfinite(c.tolerance))
    throw ConfigError("column '" + c.name + "': tolerance must be a finite non-negative number");
  if (!is_numeric(c.kind) && c.tolerance != 0.0)
    throw ConfigError("column '" + c.name + "': only numeric columns accept a tolerance");
}

}  // namespace

Schema::Schema(std::vector<Column> columns) : columns_(std::move(columns)) {
  std::set<std::string> seen;
  for (const auto& c : columns_) {
    if (!seen.insert(c.name).second) throw ConfigError("duplicate column name '" + c.name + "'");
    check_kind(c);
  }
}

std::optional<std::size_t> Schema::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i].name == name) return i;
  return std::nullopt;
}

void Dataset::add(Tuple t) {
  if (auto v = validate_tuple(schema, t))
    throw ConfigError("row " + std::to_string(rows.size()) + ": " + v->message);
  rows.push_back(std::move(t));
}

std::optional<Violation> validate_tuple(const Schema& schema, const Tuple& t) {
  if (t.size() != schema.size()) {
    return Violation{std::min(t.size(), schema.size()),
                     "arity mismatch: expected " + std::to_string(schema.size()) + " values, got " +
                         std::to_string(t.size())};
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto& col = schema.column(i);
    const Value& v = t[i];
    if (const auto* cat = std::get_if<CategoricalKind>(&col.kind)) {
      const auto* c = std::get_if<Cat>(&v);
      if (!c) return Violation{i, "column '" + col.name + "': expected a categorical value"};
      if (c->index >= cat->domain_size)
        return Violation{i, "column '" + col.name + "': category index " + std::to_string(c->index) +
                                " out of range"};
    } else if (is_numeric(col.kind)) {
      const auto* d = std::get_if<double>(&v);
      if (!d) return Violation{i, "column '" + col.name + "': expected a numeric value"};
      if (!std::isfinite(*d)) return Violation{i, "column '" + col.name + "': non-finite number"};
      if (std::get<NumericKind>(col.kind).integer && *d != std::nearbyint(*d))
        return Violation{i, "column '" + col.name + "': expected an integer"};
    } else {
      const auto* s = std::get_if<std::string>(&v);
      if (!s) return Violation{i, "column '" + col.name + "': expected a string value"};
      const auto& max = std::get<StringKind>(col.kind).max_length;
      if (max && s->size() > *max)
        return Violation{i, "column '" + col.name + "': string longer than " + std::to_string(*max)};
    }
  }
  return std::nullopt;
}

bool closeness_check(const Tuple& original, const Tuple& recovered, const Schema& schema) {
  if (original.size() != schema.size() || recovered.size() != schema.size()) return false;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const auto& col = schema.column(i);
    if (is_numeric(col.kind)) {
      const auto* a = std::get_if<double>(&original[i]);
      const auto* b = std::get_if<double>(&recovered[i]);
      if (!a || !b || !(std::fabs(*a - *b) <= col.tolerance)) return false;
    } else if (original[i] != recovered[i]) {
      return false;
    }
  }
  return true;
}

std::string to_string(const Value& v) {
  if (const auto* c = std::get_if<Cat>(&v)) return "Cat(" + std::to_string(c->index) + ")";
  if (const auto* d = std::get_if<double>(&v)) {
    std::ostringstream os;
    os.precision(17);
    os << "Num(" << *d << ")";
    return os.str();
  }
  return "Str(\"" + std::get<std::string>(v) + "\")";
}

}  // namespace squish
