#pragma once

// CSV reading/writing and the key/value schema file that drives ingestion.

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "squish/core.hpp"

namespace squish {

struct CsvOptions {
  char delimiter = ',';
  char quote = '"';
};

/// RFC 4180 style reader: quoted fields may contain delimiters, doubled
/// quotes and line breaks; CRLF and LF both end a record.
class CsvReader {
 public:
  CsvReader(std::istream& in, CsvOptions opts = {}) : in_(in), opts_(opts) {}

  /// Reads the next record; false at end of input. Throws ParseError.
  bool next(std::vector<std::string>& fields);
  /// Line on which the last record started (1-based).
  std::size_t line() const noexcept { return record_line_; }
  /// True when the last record was an empty line.
  bool blank() const noexcept { return blank_; }

 private:
  std::istream& in_;
  CsvOptions opts_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
  bool blank_ = false;
};

void write_csv_row(std::ostream& out, std::span<const std::string> fields, CsvOptions opts = {});

struct ToleranceSpec {
  double value = 0.0;
  bool percent = false;  // percentage of the column's observed range

  /// "0.1" or "1%". Throws ConfigError.
  static ToleranceSpec parse(const std::string& text);
};

struct ColumnSpec {
  std::string name;
  AttributeKind kind;
  std::optional<ToleranceSpec> tolerance;
  /// Categorical labels are fixed when declared; otherwise the dictionary
  /// grows in order of first appearance.
  bool fixed_labels = false;
};

struct IngestionConfig {
  CsvOptions csv;
  bool header = true;
  std::vector<ColumnSpec> columns;
};

/// Parses the schema file. Lines are `key = value`; `#` starts a comment.
///   delimiter = ,            (also `tab`)
///   quote = "
///   header = true|false
///   column.<name> = categorical [label ...] | integer [lo hi] | real [lo hi] | string [max_length]
///   tolerance.<name> = <value>[%]
/// Columns keep the order in which they are declared.
IngestionConfig parse_ingestion_config(std::istream& in);
IngestionConfig load_ingestion_config(const std::string& path);

/// Reads a CSV into a dataset. With a header row, columns are matched by
/// name; otherwise by position. Percentage tolerances refer to the observed
/// range of the column. Throws ParseError (with line) or ConfigError.
Dataset ingest_csv(std::istream& in, const IngestionConfig& cfg);
Dataset ingest_csv_file(const std::string& path, const IngestionConfig& cfg);

/// Replaces column tolerances. Precedence: `per_column`, then the
/// dataset's existing non-zero tolerance, then `global`. Only numeric
/// columns take a non-zero tolerance.
Dataset with_tolerances(Dataset data, const std::optional<ToleranceSpec>& global,
                        const std::map<std::string, ToleranceSpec>& per_column);

/// Text of one value as written to CSV: category label (or index),
/// integer digits, or the shortest round-trip form of a real.
std::string format_value(const Column& column, const Value& v);

void write_csv(std::ostream& out, const Schema& schema, std::span<const Tuple> rows, bool header = true,
               CsvOptions opts = {});

}  // namespace squish
