#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "arbor/arborescence.hpp"
#include "arbor/types.hpp"

namespace arbor {

inline constexpr int kMaxPriority = 1 << 20;

class Matroid {
 public:
  enum class Kind { kUniform, kPartition, kGraphic };

  static Matroid uniform(int n, int k);
  // Parts must be disjoint subsets of [0, n); elements outside every part are
  // loops (rank contribution zero).
  static Matroid partition(int n, std::vector<std::pair<VertexSet, int>> parts);
  // Element v maps to edge element_edges[v] of an auxiliary graph on
  // aux_vertices nodes; rank = size of a spanning forest of the mapped edges.
  static Matroid graphic(int n, int aux_vertices, std::vector<std::pair<int, int>> element_edges);

  int rank(VertexSet s) const;
  int full_rank() const { return rank(VertexSet::full(n_)); }
  int ground_size() const { return n_; }
  Kind kind() const { return kind_; }

 private:
  Matroid(Kind kind, int n) : kind_(kind), n_(n) {}
  Kind kind_;
  int n_;
  int k_ = 0;
  std::vector<std::pair<VertexSet, int>> parts_;
  int aux_vertices_ = 0;
  std::vector<std::pair<int, int>> element_edges_;
};

// Monotone submodular set function with an integer upper bound. Values are
// always integral.
class RewardOracle {
 public:
  enum class Kind { kLinear, kCoverage, kMatroidRank };

  Value eval(VertexSet s) const { return fn_(s); }
  Value upper_bound() const { return upper_; }
  Kind kind() const { return kind_; }

  static RewardOracle linear(std::vector<Value> rewards);
  // covers[v] = bitmask of items vertex v covers; item i has weight[i].
  static RewardOracle coverage(std::vector<std::uint64_t> covers, std::vector<Value> weights);
  static RewardOracle matroid_rank(Matroid m);
  // Residual rank after committing c (still a matroid rank function).
  static RewardOracle contracted_rank(Matroid m, VertexSet c);

 private:
  RewardOracle(Kind kind, Value upper, std::function<Value(VertexSet)> fn)
      : kind_(kind), upper_(upper), fn_(std::move(fn)) {}
  Kind kind_;
  Value upper_;
  std::function<Value(VertexSet)> fn_;
};

// f(x ∪ s) - f(x). Monotonicity makes this nonnegative.
inline Value marginal(const RewardOracle& f, VertexSet x, VertexSet s) {
  return f.eval(x | s) - f.eval(x);
}

// Residual oracle after committing c: s -> rank(s ∪ c) - rank(c).
inline RewardOracle contract(const Matroid& m, VertexSet c) {
  return RewardOracle::contracted_rank(m, c);
}

// Reward restricted to vertices that meet their deadline: the counted set is
// {v in T : offset + l_T(v) <= deadlines[v]}.
struct DeadlineGate {
  const std::vector<Length>* deadlines;
  Length offset = 0;
};

// Reward restricted to vertices whose path priority meets their requirement:
// {v in T : min(entry_priority, path min-priority) >= required[v]}.
struct PriorityGate {
  const std::vector<int>* required;
  int entry_priority = kMaxPriority;
};

VertexSet gated_set(const Arborescence& t, const DeadlineGate& g);
VertexSet gated_set(const Arborescence& t, const PriorityGate& g);

inline Value gated_value(const RewardOracle& f, const Arborescence& t, const DeadlineGate& g) {
  return f.eval(gated_set(t, g));
}
inline Value gated_value(const RewardOracle& f, const Arborescence& t, const PriorityGate& g) {
  return f.eval(gated_set(t, g));
}

}  // namespace arbor
