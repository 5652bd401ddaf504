#pragma once

// Seeded dataset generators with known dependency structure.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "squish/core.hpp"

namespace squish::testing {

Schema binary_schema(std::size_t m, std::size_t first = 0);

/// m binary columns; the second half copies the first half (a_{i+m/2} = a_i).
Dataset pairwise_dataset(std::size_t n, std::size_t m, std::uint64_t seed);

/// m columns over 4 states; a_1 uniform, then stay with probability 2/3 or
/// move to each other state with probability 1/9.
Dataset markov_dataset(std::size_t n, std::size_t m, std::uint64_t seed);
/// Exact entropy per tuple of markov_dataset rows.
double markov_entropy(std::size_t m);

/// Cluster column c (fair coin) followed by m binary columns equal to c
/// flipped independently with probability `flip`.
Dataset clustered_dataset(std::size_t n, std::size_t m, double flip, std::uint64_t seed);
double clustered_entropy(std::size_t m, double flip);

/// Small categorical Bayesian network with random conditional tables.
struct RandomNetwork {
  std::vector<std::size_t> cardinality;
  std::vector<std::vector<std::size_t>> parents;  // parents[j] < j
  std::vector<std::vector<std::vector<double>>> tables;  // tables[j][context][value]

  static RandomNetwork generate(std::size_t m, std::size_t max_card, std::size_t max_parents, std::mt19937_64& rng);

  Schema schema() const;
  std::size_t context(std::size_t j, const std::vector<std::uint32_t>& row) const;
  Dataset sample(std::size_t n, std::mt19937_64& rng) const;
  /// Joint entropy in bits, by enumerating every configuration.
  double entropy() const;
};

/// Random schema mixing categorical, integer, real and string columns with
/// the given real tolerance (integers use zero or a whole-number tolerance).
Schema mixed_schema(std::mt19937_64& rng, double real_tolerance);
Dataset mixed_dataset(const Schema& schema, std::size_t n, std::mt19937_64& rng);

}  // namespace squish::testing
