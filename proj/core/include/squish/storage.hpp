#pragma once

// Archive format and the compression pipeline.
//
// Layout (all integers little-endian, varints are LEB128):
//   "SQSH" | u16 version | u8 flags (bit 0 delta, bit 1 index)
//   section schema | section structure | section models | section body [| section index]
// Each section is a varint byte length followed by its bytes.
//   body (row order): u8 precision | u8 min_width_log2 | varint n | varint bits | packed bits
//   body (delta):     u8 precision | u8 min_width_log2 | varint n | varint l | varint bits | packed bits
//   index:            varint n | varint offset deltas (bit positions within the code stream)

#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "squish/bayesnet.hpp"
#include "squish/bits.hpp"
#include "squish/codec.hpp"
#include "squish/core.hpp"
#include "squish/model.hpp"

namespace squish {

inline constexpr std::uint16_t kFormatVersion = 1;

/// Models indexed by column, coded in `order`.
struct TupleCoder {
  const Schema* schema = nullptr;
  std::span<const std::unique_ptr<SquidModel>> models;
  std::span<const std::size_t> order;
  ApproxConfig codec{};

  /// Pushes every branch of `t` into `enc` and returns the recovered tuple
  /// (what a decoder will produce). Throws ConfigError when a value does
  /// not fit its model.
  Tuple encode(const Tuple& t, Encoder& enc) const;
  /// With `bits`, the ideal code bits of each column (-log2 of the branch
  /// interval widths) are added to bits[column].
  Tuple decode(Decoder& dec, std::vector<double>* bits = nullptr) const;
};

struct CompressOptions {
  StructureSearchConfig search;
  /// Manual structure; skips learning when set.
  std::optional<BayesNetStructure> structure;
  bool delta = false;
  bool index = false;
  ApproxConfig codec{};
};

struct CompressStats {
  std::size_t rows = 0;
  std::size_t clamped = 0;  // values recovered further than their tolerance (outside declared ranges)
  SearchStats search;
  BayesNetStructure structure;
  std::uint64_t model_bits = 0;  // 32 per stored parameter
  std::uint64_t data_bits = 0;   // code bits in the body
  std::vector<BitString> codes;  // per-row codes in row order
};

/// Learns (or takes) a structure, fits models and writes an archive.
std::vector<std::uint8_t> compress(const Dataset& data, const CompressOptions& opts = {},
                                   CompressStats* stats = nullptr);

struct ArchiveReport;

/// Parsed archive. Holds its own copy of the bytes; decoding calls are const
/// and may run concurrently.
class Archive {
 public:
  /// Throws FormatError. With `lenient`, a truncated body section is
  /// accepted so the readable prefix can still be decoded.
  static Archive parse(std::vector<std::uint8_t> bytes, bool lenient = false);

  const Schema& schema() const noexcept { return schema_; }
  const BayesNetStructure& structure() const noexcept { return structure_; }
  const std::vector<std::unique_ptr<SquidModel>>& models() const noexcept { return models_; }
  std::size_t rows() const noexcept { return n_; }
  bool delta() const noexcept { return delta_; }
  bool indexed() const noexcept { return !offsets_.empty() || (index_ && n_ == 0); }
  const ApproxConfig& codec() const noexcept { return codec_; }
  const std::vector<std::size_t>& offsets() const noexcept { return offsets_; }
  std::size_t total_bytes() const noexcept { return bytes_.size(); }
  std::size_t body_bits() const noexcept { return body_bits_; }
  /// Size of the body section, its own header included.
  std::size_t body_section_bytes() const noexcept { return body_section_bytes_; }
  bool truncated() const noexcept { return truncated_; }
  std::span<const std::uint8_t> header_bytes() const noexcept { return {bytes_.data(), header_size_}; }

  /// Calls `sink` for each tuple in stored order. Throws FormatError with
  /// the number of tuples already delivered on corrupt or truncated data.
  void decode_all(const std::function<void(const Tuple&)>& sink) const;
  std::vector<Tuple> decode_all() const;
  /// Tuple i via the offset index. Throws ConfigError without an index and
  /// std::out_of_range for i >= rows().
  Tuple read_tuple_at(std::size_t i) const;

  std::uint64_t model_bits() const;
  std::uint64_t framing_bits() const { return total_bytes() * 8 - model_bits() - body_bits_; }

 private:
  TupleCoder coder() const;
  void decode_impl(const std::function<void(const Tuple&)>& sink, std::vector<double>* bits) const;
  friend ArchiveReport inspect(const Archive& archive);

  std::vector<std::uint8_t> bytes_;
  std::size_t header_size_ = 0;
  Schema schema_;
  BayesNetStructure structure_;
  std::vector<std::unique_ptr<SquidModel>> models_;
  std::size_t n_ = 0;
  bool delta_ = false;
  bool index_ = false;
  bool truncated_ = false;
  ApproxConfig codec_{};
  unsigned delta_l_ = 0;
  std::size_t body_offset_ = 0;  // byte offset of the packed bits
  std::size_t body_bits_ = 0;    // declared bit count
  std::size_t body_section_bytes_ = 0;
  std::size_t available_bits_ = 0;
  std::vector<std::size_t> offsets_;
};

struct ColumnReport {
  std::string name;
  std::string type;
  double tolerance = 0.0;
  std::vector<std::string> parents;
  std::string model;
  std::size_t parameters = 0;
  double model_bits = 0.0;
  double data_bits = 0.0;  // ideal bits, summed over decoded rows
};

struct ArchiveReport {
  std::uint16_t version = kFormatVersion;
  bool delta = false;
  bool index = false;
  std::size_t rows = 0;
  std::size_t total_bytes = 0;
  std::uint64_t model_bits = 0;
  std::uint64_t data_bits = 0;
  std::uint64_t framing_bits = 0;
  std::size_t edges = 0;
  std::vector<ColumnReport> columns;
};

ArchiveReport inspect(const Archive& archive);
std::string format_report(const ArchiveReport& report);

/// "child: parent, parent" per line, names as in the schema; `#` comments.
/// Columns not mentioned have no parents.
BayesNetStructure parse_structure(std::istream& in, const Schema& schema);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace squish
