#pragma once

// Per-column conditional models. A model is trained by streaming tuples
// through read_tuple, frozen with end_of_data, and afterwards mints one
// SquID per parent context. Parameters are rounded to float32 when the model
// is frozen so that a model read back from its bytes codes identically.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "squish/core.hpp"
#include "squish/distributions.hpp"
#include "squish/interpreter.hpp"
#include "squish/serialize.hpp"
#include "squish/squid.hpp"

namespace squish {

inline constexpr double kBitsPerParameter = 32.0;
inline constexpr std::size_t kDefaultContextCap = 4096;
inline constexpr std::size_t kDefaultBins = 8;

struct ModelCost {
  double model_bits = 0.0;
  double data_bits = 0.0;

  double total() const noexcept { return model_bits + data_bits; }
  bool feasible() const noexcept { return total() < std::numeric_limits<double>::infinity(); }
  static ModelCost infeasible() noexcept {
    return {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }
};

/// Coding domain of one column: root range of a numeric tree, or the
/// largest string length.
struct ColumnDomain {
  Range range{0.0, 1.0};
  std::size_t max_length = 0;

  friend bool operator==(const ColumnDomain&, const ColumnDomain&) = default;
};

/// Declared bounds when present, else the observed extremes widened by the
/// tolerance. Numeric ranges are rounded outward to float32.
std::vector<ColumnDomain> derive_domains(const Schema& schema, std::span<const Tuple> rows);

/// Tree over a numeric column's coding domain under `law`.
NumericTree column_tree(const Column& column, const ColumnDomain& domain, const NumericLaw& law = {});

/// Replaces numeric values by the representative of their leaf. This is
/// exactly what decompression yields.
Tuple quantize(const Schema& schema, std::span<const ColumnDomain> domains, const Tuple& t);

/// Identity for categorical parents, equal-width bins for numeric parents
/// and binned length for string parents.
Interpreter default_interpreter(const Column& column, const ColumnDomain& domain, std::size_t bins = kDefaultBins);

/// Interpreted parent values, in parent order.
using ParentContext = std::vector<Value>;

/// Maps parent values to a dense context index (mixed radix over the
/// interpreters' cardinalities).
class ContextMap {
 public:
  ContextMap() = default;
  ContextMap(std::vector<std::size_t> parents, std::vector<Interpreter> interpreters);

  const std::vector<std::size_t>& parents() const noexcept { return parents_; }
  const std::vector<Interpreter>& interpreters() const noexcept { return interpreters_; }
  /// Number of contexts, saturated at SIZE_MAX.
  std::size_t size() const noexcept { return size_; }

  ParentContext context(const Tuple& t) const;
  /// Throws std::invalid_argument on arity or range mismatch.
  std::size_t index(const ParentContext& ctx) const;
  std::size_t index_of(const Tuple& t) const { return index(context(t)); }

  void write(ByteWriter& out) const;
  static ContextMap read(ByteReader& in);

  friend bool operator==(const ContextMap&, const ContextMap&) = default;

 private:
  std::vector<std::size_t> parents_;
  std::vector<Interpreter> interpreters_;
  std::size_t size_ = 1;
};

enum class ModelKind : std::uint8_t { Categorical = 0, Numeric = 1, String = 2 };

class SquidModel {
 public:
  virtual ~SquidModel() = default;

  ModelKind kind() const noexcept { return kind_; }
  std::size_t target() const noexcept { return target_; }
  const ContextMap& context_map() const noexcept { return contexts_; }
  bool fitted() const noexcept { return fitted_; }
  std::size_t rows_read() const noexcept { return rows_; }

  /// Throws std::logic_error after end_of_data.
  void read_tuple(const Tuple& t);
  /// Fits and freezes. Throws ConfigError when no tuple was read.
  void end_of_data();

  ModelCost get_model_cost() const;
  std::size_t parameter_count() const;

  std::unique_ptr<Squid> get_prob_tree(const ParentContext& ctx) const;
  std::unique_ptr<Squid> tree_for(const Tuple& t) const { return tree(contexts_.index_of(t)); }

  std::vector<std::uint8_t> write_model() const;
  /// Throws FormatError for malformed or truncated bytes.
  static std::unique_ptr<SquidModel> read_model(std::span<const std::uint8_t> bytes);

  /// One-line summary for reports.
  virtual std::string describe() const = 0;

 protected:
  SquidModel(ModelKind kind, std::size_t target, ContextMap contexts)
      : kind_(kind), target_(target), contexts_(std::move(contexts)) {}

  void require_fitted() const;
  void mark_loaded() noexcept { fitted_ = true; }

  virtual void observe(std::size_t ctx, const Value& v) = 0;
  /// Fits parameters; sets data_bits_ and params_.
  virtual void fit() = 0;
  virtual std::unique_ptr<Squid> tree(std::size_t ctx) const = 0;
  virtual void write_body(ByteWriter& out) const = 0;

  double data_bits_ = 0.0;
  std::size_t params_ = 0;

 private:
  ModelKind kind_;
  std::size_t target_;
  ContextMap contexts_;
  std::size_t rows_ = 0;
  bool fitted_ = false;
};

class CategoricalModel final : public SquidModel {
 public:
  CategoricalModel(std::size_t target, std::size_t domain_size, ContextMap contexts, bool smoothing = true);

  std::size_t domain_size() const noexcept { return k_; }
  const std::vector<std::uint64_t>& counts(std::size_t ctx) const;
  /// Frozen law of a context (uniform when the context was never seen).
  std::shared_ptr<const std::vector<double>> law(std::size_t ctx) const;
  std::string describe() const override;

  static std::unique_ptr<CategoricalModel> read_body(std::size_t target, ContextMap contexts, ByteReader& in);

 protected:
  void observe(std::size_t ctx, const Value& v) override;
  void fit() override;
  std::unique_ptr<Squid> tree(std::size_t ctx) const override;
  void write_body(ByteWriter& out) const override;

 private:
  void install(std::size_t ctx, const std::vector<float>& head);

  std::size_t k_;
  bool smoothing_;
  std::vector<std::vector<std::uint64_t>> counts_;
  std::vector<std::vector<float>> stored_;  // first k-1 probabilities, empty when unseen
  std::vector<std::shared_ptr<const std::vector<double>>> laws_;
  std::shared_ptr<const std::vector<double>> uniform_;
};

/// Law fitted to `values` and rounded to float32; the scale is at least `scale_floor`.
NumericLaw fit_law(NumericFamily family, std::span<const double> values, double scale_floor);

/// Picks Uniform, Gaussian or Laplace by lowest 32 * parameters + code bits
/// (ties keep the earlier family). Returns the law and its code bits.
std::pair<NumericLaw, double> select_law(std::span<const double> values, double scale_floor,
                                         const std::function<double(const NumericLaw&)>& bits);

class NumericModel final : public SquidModel {
 public:
  NumericModel(std::size_t target, bool integer, double tolerance, Range root, ContextMap contexts);

  bool integer() const noexcept { return integer_; }
  double tolerance() const noexcept { return tolerance_; }
  const Range& root() const noexcept { return root_; }
  const std::vector<double>& values(std::size_t ctx) const;
  const NumericLaw& law(std::size_t ctx) const;
  /// Values outside the root range seen by read_tuple.
  std::size_t clamped() const noexcept { return clamped_; }
  std::string describe() const override;

  static std::unique_ptr<NumericModel> read_body(std::size_t target, ContextMap contexts, ByteReader& in);

 protected:
  void observe(std::size_t ctx, const Value& v) override;
  void fit() override;
  std::unique_ptr<Squid> tree(std::size_t ctx) const override;
  void write_body(ByteWriter& out) const override;

 private:
  double scale_floor() const noexcept;

  bool integer_;
  double tolerance_;
  Range root_;
  std::vector<std::vector<double>> values_;
  std::vector<NumericLaw> laws_;
  std::vector<bool> seen_;
  std::size_t clamped_ = 0;
};

class StringModel final : public SquidModel {
 public:
  StringModel(std::size_t target, std::size_t max_length, ContextMap contexts);

  std::size_t max_length() const noexcept { return max_length_; }
  const NumericLaw& length_law(std::size_t ctx) const;
  const BigramModel& chars() const noexcept { return *chars_; }
  std::string describe() const override;

  static std::unique_ptr<StringModel> read_body(std::size_t target, ContextMap contexts, ByteReader& in);

 protected:
  void observe(std::size_t ctx, const Value& v) override;
  void fit() override;
  std::unique_ptr<Squid> tree(std::size_t ctx) const override;
  void write_body(ByteWriter& out) const override;

 private:
  std::size_t max_length_;
  std::vector<std::vector<double>> lengths_;
  std::vector<NumericLaw> laws_;
  std::vector<bool> seen_;
  std::shared_ptr<BigramModel> chars_;
};

struct ModelOptions {
  std::size_t bins = kDefaultBins;
  bool smoothing = true;
  std::size_t context_cap = kDefaultContextCap;
};

/// Context map for `target` with the default interpreters of its parents.
ContextMap make_context_map(const Schema& schema, std::span<const ColumnDomain> domains,
                            std::span<const std::size_t> parents, const ModelOptions& opts = {});

/// Untrained model for `target`. Throws ConfigError when the parents'
/// context table exceeds opts.context_cap.
std::unique_ptr<SquidModel> make_model(const Schema& schema, std::span<const ColumnDomain> domains,
                                       std::size_t target, std::span<const std::size_t> parents,
                                       const ModelOptions& opts = {});

}  // namespace squish
