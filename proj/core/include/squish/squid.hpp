#pragma once

// Probability-weighted decision trees ("SquIDs"). A cursor starts at the
// root and is walked one branch at a time; leaves carry a representative
// value together with the worst-case distance to any value mapped there.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "squish/core.hpp"
#include "squish/distributions.hpp"

namespace squish {

/// Probabilities of the children of one tree node.
class BranchDistribution {
 public:
  /// Throws ConfigError unless every entry is >= 0, at least one is > 0 and
  /// the entries sum to 1 within 1e-9.
  explicit BranchDistribution(std::vector<double> probabilities);

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  std::span<const double> probabilities() const noexcept { return p_; }

 private:
  std::vector<double> p_;
};

struct LeafOutcome {
  Value representative;
  double worst_case_error = 0.0;
};

/// Traversal cursor over one tree. Single consumer; not thread safe.
class Squid {
 public:
  virtual ~Squid() = default;

  virtual bool is_end() const = 0;
  /// Throws std::logic_error at a leaf.
  virtual BranchDistribution generate_branch() const = 0;
  /// Index of the child whose rule covers `v`. Throws std::logic_error at a
  /// leaf and std::invalid_argument when `v` is outside the node.
  virtual std::size_t get_branch(const Value& v) const = 0;
  /// Throws std::out_of_range for an invalid index.
  virtual void choose_branch(std::size_t b) = 0;
  /// Throws std::logic_error unless is_end().
  virtual LeafOutcome get_result() const = 0;
};

/// One-level tree over a finite domain.
class CategoricalSquid final : public Squid {
 public:
  explicit CategoricalSquid(std::shared_ptr<const std::vector<double>> law);

  bool is_end() const override { return chosen_ >= 0; }
  BranchDistribution generate_branch() const override;
  std::size_t get_branch(const Value& v) const override;
  void choose_branch(std::size_t b) override;
  LeafOutcome get_result() const override;

 private:
  std::shared_ptr<const std::vector<double>> law_;
  long chosen_ = -1;
};

/// Bisection over real values in (lo, hi]; a node stops splitting once its
/// width is below 2 * tolerance. Values outside the root are clamped.
class RealBisectionSquid final : public Squid {
 public:
  RealBisectionSquid(NumericLaw law, Range root, double tolerance);

  bool is_end() const override;
  BranchDistribution generate_branch() const override;
  std::size_t get_branch(const Value& v) const override;
  void choose_branch(std::size_t b) override;
  LeafOutcome get_result() const override;

  double node_lo() const noexcept { return lo_; }
  double node_hi() const noexcept { return hi_; }

 private:
  double mid() const noexcept { return lo_ + (hi_ - lo_) * 0.5; }

  NumericLaw law_;
  Range root_;
  double tolerance_;
  double lo_;
  double hi_;
};

/// Bisection over the integers lo..hi (inclusive). A node [a, b] is a leaf
/// once its midpoint representative is within `tolerance` of both ends, so a
/// zero tolerance recovers integers exactly.
class IntegerBisectionSquid final : public Squid {
 public:
  IntegerBisectionSquid(NumericLaw law, std::int64_t lo, std::int64_t hi, double tolerance);

  bool is_end() const override;
  BranchDistribution generate_branch() const override;
  std::size_t get_branch(const Value& v) const override;
  void choose_branch(std::size_t b) override;
  LeafOutcome get_result() const override;

  std::int64_t node_lo() const noexcept { return a_; }
  std::int64_t node_hi() const noexcept { return b_; }

 private:
  std::int64_t split() const noexcept { return a_ + (b_ - a_) / 2; }

  NumericLaw law_;
  std::int64_t root_lo_;
  std::int64_t root_hi_;
  double tolerance_;
  std::int64_t a_;
  std::int64_t b_;
};

/// Order-1 byte model with add-one smoothing over the 256 byte values.
/// Context 256 is the start of a string.
class BigramModel {
 public:
  static constexpr std::size_t kAlphabet = 256;
  static constexpr std::size_t kStart = 256;

  void observe(const std::string& s);
  /// Builds the per-context distributions; no observe() afterwards.
  void freeze();

  bool frozen() const noexcept { return frozen_; }
  std::shared_ptr<const std::vector<double>> distribution(std::size_t context) const;
  double probability(std::size_t context, std::uint8_t next) const;
  /// Number of distinct (context, next) pairs with a non-zero count.
  std::size_t nonzero_entries() const noexcept;

  struct Entry {
    std::uint16_t context;
    std::uint8_t next;
    std::uint32_t count;
  };
  std::vector<Entry> entries() const;
  static BigramModel from_entries(std::span<const Entry> entries);

 private:
  std::array<std::vector<std::uint32_t>, kAlphabet + 1> counts_{};
  std::array<std::shared_ptr<const std::vector<double>>, kAlphabet + 1> laws_{};
  bool frozen_ = false;
};

/// Length first (integer bisection with exact recovery), then one
/// 256-way node per character.
class StringSquid final : public Squid {
 public:
  StringSquid(IntegerBisectionSquid length, std::shared_ptr<const BigramModel> chars);

  bool is_end() const override;
  BranchDistribution generate_branch() const override;
  std::size_t get_branch(const Value& v) const override;
  void choose_branch(std::size_t b) override;
  LeafOutcome get_result() const override;

 private:
  bool in_length_phase() const { return !length_.is_end(); }
  std::size_t target_length() const;

  IntegerBisectionSquid length_;
  std::shared_ptr<const BigramModel> chars_;
  std::string built_;
};

/// Infinite tree over positive reals: node k splits x <= k (leaf (k-1, k])
/// from x > k (next node), taking the first branch with probability `stop`.
class GeometricSquid final : public Squid {
 public:
  explicit GeometricSquid(double stop = 0.1);

  bool is_end() const override { return leaf_; }
  BranchDistribution generate_branch() const override;
  std::size_t get_branch(const Value& v) const override;
  void choose_branch(std::size_t b) override;
  LeafOutcome get_result() const override;

  std::uint64_t node() const noexcept { return k_; }

 private:
  double stop_;
  std::uint64_t k_ = 1;
  bool leaf_ = false;
};

/// Immutable description of a numeric bisection tree; mints cursors.
class NumericTree {
 public:
  NumericTree(NumericLaw law, Range root, double tolerance, bool integer);

  std::unique_ptr<Squid> cursor() const;
  /// -log2 of the (unsnapped) leaf probability reached by `v`.
  double code_bits(double v) const;
  /// Representative of the leaf reached by `v`. The leaf partition does not
  /// depend on the law, only on the root range and tolerance.
  double quantize(double v) const;

  const NumericLaw& law() const noexcept { return law_; }
  const Range& root() const noexcept { return root_; }
  double tolerance() const noexcept { return tolerance_; }
  bool integer() const noexcept { return integer_; }

 private:
  NumericLaw law_;
  Range root_;
  double tolerance_;
  bool integer_;
};

/// Throws ConfigError for lo >= hi, a zero tolerance on a real-valued
/// column, or a tolerance below what doubles can resolve over the range.
NumericTree build_numerical_tree(const NumericLaw& law, const Range& root, double tolerance,
                                 bool integer = false);

class StringTree {
 public:
  StringTree(NumericLaw length_law, std::size_t max_length, std::shared_ptr<const BigramModel> chars);

  std::unique_ptr<Squid> cursor() const;
  double code_bits(const std::string& s) const;

  std::size_t max_length() const noexcept { return max_length_; }

 private:
  NumericLaw length_law_;
  std::size_t max_length_;
  std::shared_ptr<const BigramModel> chars_;
};

StringTree build_string_tree(const NumericLaw& length_law, std::size_t max_length,
                             std::shared_ptr<const BigramModel> chars);

}  // namespace squish
