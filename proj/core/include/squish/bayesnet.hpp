#pragma once

// Greedy structure search over columns, minimizing the sum of per-column
// description lengths (model bits + data bits).

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "squish/core.hpp"
#include "squish/model.hpp"

namespace squish {

struct BayesNetStructure {
  std::vector<std::vector<std::size_t>> parents;
  /// Coding order; every column appears after all of its parents.
  std::vector<std::size_t> order;

  std::size_t size() const noexcept { return parents.size(); }
  /// Throws ConfigError unless `order` is a permutation consistent with
  /// the parent sets.
  void validate() const;
  /// Derives a topological order (smallest ready index first); throws
  /// ConfigError on cycles, self loops or bad indices.
  static BayesNetStructure from_parents(std::vector<std::vector<std::size_t>> parents);
  std::size_t edge_count() const noexcept;

  friend bool operator==(const BayesNetStructure&, const BayesNetStructure&) = default;
};

struct StructureSearchConfig {
  std::size_t sample_rows = 2000;
  std::size_t max_parents = 4;
  /// Draw a seeded uniform sample instead of the leading rows.
  bool random_sample = false;
  std::uint64_t seed = 0;
  /// Reuse scores of (target, parent set) pairs seen earlier in the search.
  bool memoize = true;
  ModelOptions model;
};

struct SearchStats {
  std::size_t evaluations = 0;  // models actually trained
  std::size_t lookups = 0;      // score requests, including cache hits
};

/// Trains a model for `target` given `parents` on `sample` and returns its
/// cost; infeasible when the context table exceeds the cap.
ModelCost compute_obj(const Schema& schema, std::span<const ColumnDomain> domains, std::span<const Tuple> sample,
                      std::size_t target, std::span<const std::size_t> parents, const ModelOptions& opts = {});

/// Row indices used for structure learning.
std::vector<std::size_t> sample_indices(std::size_t n, const StructureSearchConfig& cfg);

BayesNetStructure learn_structure(const Schema& schema, std::span<const ColumnDomain> domains,
                                  std::span<const Tuple> sample, const StructureSearchConfig& cfg = {},
                                  SearchStats* stats = nullptr);

/// One fitted model per column (indexed by column), trained on all rows.
std::vector<std::unique_ptr<SquidModel>> fit_full(const Schema& schema, std::span<const ColumnDomain> domains,
                                                  std::span<const Tuple> rows, const BayesNetStructure& structure,
                                                  const ModelOptions& opts = {});

}  // namespace squish
