#pragma once

#include <vector>

#include "arbor/graph.hpp"
#include "arbor/types.hpp"

namespace arbor {

// Dense all-pairs cost matrix. Unreachable pairs hold kInfeasibleCost; the
// diagonal is zero. Built matrices satisfy the triangle inequality.
class CostMatrix {
 public:
  CostMatrix() = default;
  explicit CostMatrix(int n) : n_(n), cost_(static_cast<size_t>(n) * n, kInfeasibleCost) {
    for (int v = 0; v < n; ++v) at(v, v) = 0;
  }

  int n() const { return n_; }
  Cost operator()(Vertex u, Vertex v) const { return cost_[static_cast<size_t>(u) * n_ + v]; }
  Cost& at(Vertex u, Vertex v) { return cost_[static_cast<size_t>(u) * n_ + v]; }
  bool reachable(Vertex u, Vertex v) const { return (*this)(u, v) < kInfeasibleCost; }

 private:
  int n_ = 0;
  std::vector<Cost> cost_;
};

struct MetricInstance {
  int n = 0;
  Vertex root = 0;
  Cost budget = 0;
  CostMatrix cost;
};

// All-pairs shortest paths over the cheapest parallel edge per pair.
CostMatrix build_metric_closure(const DirectedGraph& g);

// One point on a pair's Pareto frontier: minimal cost among paths of length
// <= length, with the smallest true (pre-scaling) length among those paths.
struct TwoCostEntry {
  Cost cost = kInfeasibleCost;
  Length length = 0;
  Length true_length = 0;
};

// Per-pair Pareto frontiers over (cost, length), lengths capped at l_max.
// Frontier entries are sorted by ascending cost / descending length and are
// mutually non-dominating; at most l_max+1 of them exist since lengths are
// integral.
class TwoCostClosure {
 public:
  TwoCostClosure() = default;
  TwoCostClosure(int n, Length l_max) : n_(n), l_max_(l_max), frontier_(static_cast<size_t>(n) * n) {}

  int n() const { return n_; }
  Length l_max() const { return l_max_; }
  const std::vector<TwoCostEntry>& frontier(Vertex u, Vertex v) const {
    return frontier_[static_cast<size_t>(u) * n_ + v];
  }
  std::vector<TwoCostEntry>& frontier_mut(Vertex u, Vertex v) {
    return frontier_[static_cast<size_t>(u) * n_ + v];
  }

  // Cheapest cost ignoring length (kInfeasibleCost when unreachable).
  Cost min_cost(Vertex u, Vertex v) const {
    const auto& f = frontier(u, v);
    return f.empty() ? kInfeasibleCost : f.front().cost;
  }
  CostMatrix min_cost_matrix() const;

  // Distinct values d that can appear as a root->vertex path length (all
  // sums of edge lengths), as a bitset over [0, l_max]. Superset of the
  // exact achievable set; used to bound separator-distance guesses.
  const std::vector<std::uint64_t>& path_length_bits() const { return path_length_bits_; }
  // sum_bits(m): values expressible as a sum of at most m path lengths, for
  // m in [0, n]. Bounds charged-length-sum guesses.
  const std::vector<std::uint64_t>& sum_bits(int m) const { return sum_bits_[m]; }

  void finalize_domains(const std::vector<Length>& edge_lengths);

 private:
  int n_ = 0;
  Length l_max_ = 0;
  std::vector<std::vector<TwoCostEntry>> frontier_;
  std::vector<std::uint64_t> path_length_bits_;
  std::vector<std::vector<std::uint64_t>> sum_bits_;
};

// Builds frontiers via Dijkstra over the (vertex, length-used) product graph.
// Edges longer than l_max are dropped.
TwoCostClosure build_two_cost_closure(const DirectedGraph& g, Length l_max);

// Cost closures per priority floor: level q uses only edges of priority >= q.
class PriorityClosure {
 public:
  PriorityClosure() = default;
  PriorityClosure(int n, int levels) : levels_(levels), cost_(static_cast<size_t>(levels) + 1, CostMatrix(n)) {}

  int n() const { return levels_ ? cost_[1].n() : 0; }
  int levels() const { return levels_; }
  // q in [1, levels].
  const CostMatrix& at_level(int q) const { return cost_[static_cast<size_t>(q)]; }
  CostMatrix& at_level_mut(int q) { return cost_[static_cast<size_t>(q)]; }

 private:
  int levels_ = 0;
  std::vector<CostMatrix> cost_;
};

PriorityClosure build_priority_closure(const DirectedGraph& g, int levels);

}  // namespace arbor
