#pragma once

// Relational data model: schema, attribute values, tuples and the
// closeness contract that defines a correct reconstruction.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "squish/error.hpp"

namespace squish {

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  double width() const noexcept { return hi - lo; }
  friend bool operator==(const Range&, const Range&) = default;
};

struct CategoricalKind {
  std::size_t domain_size = 1;
  // Optional dictionary; labels[i] is the text of category i.
  std::vector<std::string> labels;

  friend bool operator==(const CategoricalKind&, const CategoricalKind&) = default;
};

struct NumericKind {
  bool integer = false;
  std::optional<Range> range;

  friend bool operator==(const NumericKind&, const NumericKind&) = default;
};

struct StringKind {
  std::optional<std::size_t> max_length;

  friend bool operator==(const StringKind&, const StringKind&) = default;
};

using AttributeKind = std::variant<CategoricalKind, NumericKind, StringKind>;

inline bool is_numeric(const AttributeKind& k) noexcept {
  return std::holds_alternative<NumericKind>(k);
}

struct Column {
  std::string name;
  AttributeKind kind;
  double tolerance = 0.0;

  friend bool operator==(const Column&, const Column&) = default;
};

/// Ordered, validated list of columns. Immutable once built.
class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<Column> columns);

  std::size_t size() const noexcept { return columns_.size(); }
  const Column& column(std::size_t i) const { return columns_.at(i); }
  const std::vector<Column>& columns() const noexcept { return columns_; }
  std::optional<std::size_t> index_of(const std::string& name) const;

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::vector<Column> columns_;
};

/// Categorical value: 0-based index into the column's domain.
struct Cat {
  std::uint32_t index = 0;
  friend auto operator<=>(const Cat&, const Cat&) = default;
};

using Value = std::variant<Cat, double, std::string>;
using Tuple = std::vector<Value>;

struct Dataset {
  Schema schema;
  std::vector<Tuple> rows;

  std::size_t size() const noexcept { return rows.size(); }
  /// Validates `t` against the schema and appends it; throws ConfigError.
  void add(Tuple t);
};

struct Violation {
  std::size_t column;
  std::string message;
};

/// Arity, variant and categorical bounds check. Reports the first bad column.
std::optional<Violation> validate_tuple(const Schema& schema, const Tuple& t);

/// True iff every numeric column is within its tolerance (inclusive) and
/// every other column matches exactly.
bool closeness_check(const Tuple& original, const Tuple& recovered, const Schema& schema);

std::string to_string(const Value& v);

}  // namespace squish
