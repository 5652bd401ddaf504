#pragma once

// Interpreters turn a parent column's value into a predictor value. Model
// contexts only accept categorical predictors, so numeric and string
// parents go through binning.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "squish/core.hpp"
#include "squish/serialize.hpp"

namespace squish {

class Interpreter {
 public:
  enum class Kind : std::uint8_t { Identity = 0, Binning = 1, StringLength = 2 };

  /// Passes categorical values through; `domain_size` is the predictor cardinality.
  static Interpreter identity(std::size_t domain_size);
  /// Bin i holds (cut[i-1], cut[i]]; the outer bins are unbounded.
  static Interpreter binning(std::vector<double> cuts);
  static Interpreter equal_width(const Range& range, std::size_t bins);
  /// String length as Num; with cuts, the length is binned instead.
  static Interpreter string_length(std::vector<double> cuts = {});

  Kind kind() const noexcept { return kind_; }
  const std::vector<double>& cuts() const noexcept { return cuts_; }
  Value interpret(const Value& v) const;
  /// Number of categories produced; 0 when the output is numeric.
  std::size_t cardinality() const noexcept;

  void write(ByteWriter& out) const;
  static Interpreter read(ByteReader& in);

  friend bool operator==(const Interpreter&, const Interpreter&) = default;

 private:
  Kind kind_ = Kind::Identity;
  std::size_t domain_size_ = 0;
  std::vector<double> cuts_;
};

}  // namespace squish
