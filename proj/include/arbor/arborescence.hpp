#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "arbor/closure.hpp"
#include "arbor/types.hpp"

namespace arbor {

// In-edge attributes. Trees live in closure space, so an "edge" stands for a
// realizable path; cost/length/priority are the certified attributes of that
// path, not necessarily raw-graph edges.
struct TreeEdge {
  Vertex parent = -1;
  Cost cost = 0;
  Length length = 0;
  Length true_length = 0;
  int priority = 0;
  bool operator==(const TreeEdge&) const = default;
};

// Rooted arborescence over at most kMaxVertices vertices, stored as a child ->
// in-edge list sorted by child id (canonical, so equality compare is cheap).
class Arborescence {
 public:
  Arborescence() = default;
  explicit Arborescence(Vertex root) : root_(root), vertices_(VertexSet::single(root)) {}

  // Builds from an unordered edge list; throws std::invalid_argument unless
  // the edges form an arborescence rooted at `root`.
  static Arborescence from_edges(Vertex root, std::vector<std::pair<Vertex, TreeEdge>> edges);

  Vertex root() const { return root_; }
  VertexSet vertices() const { return vertices_; }
  bool contains(Vertex v) const { return vertices_.contains(v); }
  int size() const { return vertices_.size(); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  bool empty() const { return edges_.empty(); }

  const std::vector<std::pair<Vertex, TreeEdge>>& edges() const { return edges_; }
  const TreeEdge* in_edge(Vertex child) const;

  // Child must be new, parent already present.
  void add_edge(Vertex child, TreeEdge e);

  Cost total_cost() const;
  Length path_length(Vertex v) const;       // root -> v, by in-edge lengths
  Length path_true_length(Vertex v) const;  // same, pre-scaling lengths
  // min over in-edge priorities on the root -> v path; `entry` for v == root.
  int path_min_priority(Vertex v, int entry) const;

  bool operator==(const Arborescence& o) const {
    return root_ == o.root_ && edges_ == o.edges_;
  }

 private:
  Vertex root_ = 0;
  VertexSet vertices_ = VertexSet::single(0);
  std::vector<std::pair<Vertex, TreeEdge>> edges_;  // sorted by child
};

// Union keeping t1's in-edge for vertices present in both trees; children of a
// dropped t2 vertex stay attached through it. Requires root(t2) in t1.
Arborescence merge_and_prune(const Arborescence& t1, const Arborescence& t2);

struct SeparatorSplit {
  Vertex separator = -1;
  VertexSet side_a;  // contains the tree root (and the separator)
  VertexSet side_b;  // contains the separator
};

// Centroid-style balanced split: the separator minimizes the largest component
// of T - v (ties to the smallest id); components are then binned greedily
// (descending size, lighter bin first, ties to the root's bin). Requires at
// least 2 vertices.
SeparatorSplit find_balanced_separator(const Arborescence& t);

// Min-cost arborescence rooted at `root` spanning exactly the vertices of `w`
// (Chu-Liu/Edmonds on the closure). Ties broken toward the smallest parent id.
// nullopt when some vertex of w is unreachable within w.
std::optional<Arborescence> min_arborescence(const CostMatrix& m, Vertex root, VertexSet w);

// Cost of the optimum alone (kInfeasibleCost when disconnected). Cheaper than
// min_arborescence: no witness recovery.
Cost min_arborescence_cost(const CostMatrix& m, Vertex root, VertexSet w);

}  // namespace arbor
