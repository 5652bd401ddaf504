#include "squish/bayesnet.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

namespace squish {

void BayesNetStructure::validate() const {
  const std::size_t m = parents.size();
  if (order.size() != m) throw ConfigError("structure order must list every column once");
  std::vector<std::size_t> position(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    if (order[i] >= m || position[order[i]] != m) throw ConfigError("structure order is not a permutation");
    position[order[i]] = i;
  }
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t p : parents[c]) {
      if (p >= m || p == c) throw ConfigError("invalid parent index");
      if (position[p] >= position[c]) throw ConfigError("parent appears after its child in the order");
    }
}

BayesNetStructure BayesNetStructure::from_parents(std::vector<std::vector<std::size_t>> parents) {
  const std::size_t m = parents.size();
  std::vector<std::size_t> pending(m, 0);
  std::vector<std::vector<std::size_t>> children(m);
  for (std::size_t c = 0; c < m; ++c) {
    auto& ps = parents[c];
    for (std::size_t p : ps)
      if (p >= m || p == c) throw ConfigError("invalid parent index for column " + std::to_string(c));
    auto sorted = ps;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ConfigError("duplicate parent for column " + std::to_string(c));
    pending[c] = ps.size();
    for (std::size_t p : ps) children[p].push_back(c);
  }
  BayesNetStructure s;
  s.parents = std::move(parents);
  std::vector<bool> done(m, false);
  for (std::size_t step = 0; step < m; ++step) {
    std::size_t next = m;
    for (std::size_t c = 0; c < m && next == m; ++c)
      if (!done[c] && pending[c] == 0) next = c;
    if (next == m) throw ConfigError("parent relation contains a cycle");
    done[next] = true;
    s.order.push_back(next);
    for (std::size_t ch : children[next]) --pending[ch];
  }
  return s;
}

std::size_t BayesNetStructure::edge_count() const noexcept {
  std::size_t n = 0;
  for (const auto& p : parents) n += p.size();
  return n;
}

ModelCost compute_obj(const Schema& schema, std::span<const ColumnDomain> domains, std::span<const Tuple> sample,
                      std::size_t target, std::span<const std::size_t> parents, const ModelOptions& opts) {
  if (sample.empty()) throw ConfigError("structure learning needs at least one row");
  const ContextMap ctx = make_context_map(schema, domains, parents, opts);
  if (ctx.size() > opts.context_cap) return ModelCost::infeasible();
  auto model = make_model(schema, domains, target, parents, opts);
  for (const auto& t : sample) model->read_tuple(t);
  model->end_of_data();
  return model->get_model_cost();
}

std::vector<std::size_t> sample_indices(std::size_t n, const StructureSearchConfig& cfg) {
  if (cfg.sample_rows == 0) throw ConfigError("sample size must be at least 1");
  const std::size_t k = std::min(n, cfg.sample_rows);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (!cfg.random_sample || k == n) {
    idx.resize(k);
    return idx;
  }
  std::mt19937_64 rng(cfg.seed);
  // Partial Fisher-Yates keeps the draw independent of the standard library's shuffle.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

BayesNetStructure learn_structure(const Schema& schema, std::span<const ColumnDomain> domains,
                                  std::span<const Tuple> sample, const StructureSearchConfig& cfg,
                                  SearchStats* stats) {
  const std::size_t m = schema.size();
  SearchStats local;
  SearchStats& st = stats ? *stats : local;
  std::map<std::pair<std::size_t, std::vector<std::size_t>>, double> cache;

  const auto obj = [&](std::size_t target, std::vector<std::size_t> parents) {
    std::sort(parents.begin(), parents.end());
    ++st.lookups;
    if (cfg.memoize) {
      auto it = cache.find({target, parents});
      if (it != cache.end()) return it->second;
    }
    ++st.evaluations;
    const double score = compute_obj(schema, domains, sample, target, parents, cfg.model).total();
    if (cfg.memoize) cache.emplace(std::make_pair(target, parents), score);
    return score;
  };

  BayesNetStructure out;
  out.parents.assign(m, {});
  std::vector<bool> seeded(m, false);
  std::vector<std::size_t> seed;  // ascending column index

  for (std::size_t round = 0; round < m; ++round) {
    std::size_t best_j = m;
    double best_score = 0.0;
    std::vector<std::size_t> best_parents;
    for (std::size_t j = 0; j < m; ++j) {
      if (seeded[j]) continue;
      std::vector<std::size_t> parent;
      double score = obj(j, parent);
      while (parent.size() < cfg.max_parents) {
        double best_t = score;
        std::size_t best_k = m;
        for (std::size_t k : seed) {
          if (std::find(parent.begin(), parent.end(), k) != parent.end()) continue;
          auto candidate = parent;
          candidate.push_back(k);
          const double t = obj(j, candidate);
          if (t < best_t) {
            best_t = t;
            best_k = k;
          }
        }
        if (best_k == m) break;
        parent.push_back(best_k);
        score = best_t;
      }
      if (best_j == m || score < best_score) {
        best_j = j;
        best_score = score;
        best_parents = parent;
      }
    }
    std::sort(best_parents.begin(), best_parents.end());
    out.parents[best_j] = best_parents;
    out.order.push_back(best_j);
    seeded[best_j] = true;
    seed.insert(std::upper_bound(seed.begin(), seed.end(), best_j), best_j);
  }
  return out;
}

std::vector<std::unique_ptr<SquidModel>> fit_full(const Schema& schema, std::span<const ColumnDomain> domains,
                                                  std::span<const Tuple> rows, const BayesNetStructure& structure,
                                                  const ModelOptions& opts) {
  if (structure.size() != schema.size()) throw ConfigError("structure does not match the schema");
  structure.validate();
  std::vector<std::unique_ptr<SquidModel>> models(schema.size());
  for (std::size_t c = 0; c < schema.size(); ++c) {
    models[c] = make_model(schema, domains, c, structure.parents[c], opts);
    for (const auto& t : rows) models[c]->read_tuple(t);
    models[c]->end_of_data();
  }
  return models;
}

}  // namespace squish
