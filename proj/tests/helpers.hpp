#pragma once

#include <random>
#include <vector>

#include "arbor/closure.hpp"
#include "arbor/graph.hpp"
#include "arbor/reward.hpp"

namespace testutil {

// mt19937_64 is seed-stable everywhere; the distribution helpers below avoid
// <random>'s distribution classes, whose outputs vary across standard
// libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }
  // inclusive on both ends
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  int irange(int lo, int hi) { return static_cast<int>(range(lo, hi)); }
  bool chance(int num, int den) { return range(1, den) <= num; }

 private:
  std::mt19937_64 gen_;
};

inline arbor::DirectedGraph random_graph(Rng& rng, int n, int percent_edges, arbor::Cost max_cost) {
  std::vector<arbor::EdgeSpec> edges;
  for (arbor::Vertex u = 0; u < n; ++u)
    for (arbor::Vertex v = 0; v < n; ++v) {
      if (u == v || !rng.chance(percent_edges, 100)) continue;
      arbor::EdgeSpec e;
      e.u = u;
      e.v = v;
      e.cost = rng.range(1, max_cost);
      edges.push_back(e);
    }
  return arbor::DirectedGraph::make(n, edges);
}

inline arbor::DirectedGraph random_two_cost_graph(Rng& rng, int n, int percent_edges,
                                                  arbor::Cost max_cost, arbor::Length max_len) {
  std::vector<arbor::EdgeSpec> edges;
  for (arbor::Vertex u = 0; u < n; ++u)
    for (arbor::Vertex v = 0; v < n; ++v) {
      if (u == v || !rng.chance(percent_edges, 100)) continue;
      arbor::EdgeSpec e;
      e.u = u;
      e.v = v;
      e.cost = rng.range(1, max_cost);
      e.length = rng.range(0, max_len);
      edges.push_back(e);
    }
  return arbor::DirectedGraph::make(n, edges);
}

inline arbor::DirectedGraph random_priority_graph(Rng& rng, int n, int percent_edges,
                                                  arbor::Cost max_cost, int levels) {
  std::vector<arbor::EdgeSpec> edges;
  for (arbor::Vertex u = 0; u < n; ++u)
    for (arbor::Vertex v = 0; v < n; ++v) {
      if (u == v || !rng.chance(percent_edges, 100)) continue;
      arbor::EdgeSpec e;
      e.u = u;
      e.v = v;
      e.cost = rng.range(1, max_cost);
      e.priority = rng.irange(1, levels);
      edges.push_back(e);
    }
  return arbor::DirectedGraph::make(n, edges);
}

// A random reward oracle of any supported kind, with small weights so value
// loops stay short.
inline arbor::RewardOracle random_reward(Rng& rng, int n) {
  switch (rng.irange(0, 2)) {
    case 0: {
      std::vector<arbor::Value> w(static_cast<size_t>(n));
      for (auto& x : w) x = rng.range(0, 4);
      return arbor::RewardOracle::linear(w);
    }
    case 1: {
      const int items = rng.irange(1, 6);
      std::vector<std::uint64_t> covers(static_cast<size_t>(n), 0);
      std::vector<arbor::Value> weights(static_cast<size_t>(items));
      for (auto& c : covers)
        for (int j = 0; j < items; ++j)
          if (rng.chance(2, 5)) c |= std::uint64_t{1} << j;
      for (auto& x : weights) x = rng.range(1, 3);
      return arbor::RewardOracle::coverage(covers, weights);
    }
    default: {
      if (rng.chance(1, 2)) return arbor::RewardOracle::matroid_rank(arbor::Matroid::uniform(n, rng.irange(1, n)));
      std::vector<std::pair<arbor::VertexSet, int>> parts;
      arbor::VertexSet part;
      int psize = 0;
      for (arbor::Vertex v = 0; v < n; ++v) {
        part = part.with(v);
        ++psize;
        if (rng.chance(1, 2) || v == n - 1) {
          parts.emplace_back(part, rng.irange(1, psize));
          part = arbor::VertexSet();
          psize = 0;
        }
      }
      return arbor::RewardOracle::matroid_rank(arbor::Matroid::partition(n, parts));
    }
  }
}

}  // namespace testutil
