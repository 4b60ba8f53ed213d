#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "arbor/types.hpp"

namespace arbor {

// A raw directed edge as read from an instance. Length and priority are only
// meaningful for the two-cost and priority problem flavors; plain instances
// leave them at their defaults.
struct EdgeSpec {
  Vertex u = 0;
  Vertex v = 0;
  Cost cost = 0;
  Length length = 0;
  int priority = 1;
  Length true_length = 0;  // pre-scaling length; equals `length` unless scaled
};

struct DirectedGraph {
  int n = 0;
  std::vector<EdgeSpec> edges;

  // Validates ids/ranges and drops self-loops. Parallel edges are kept; the
  // closure builders take the best of them.
  static DirectedGraph make(int n, std::vector<EdgeSpec> edges) {
    if (n < 1 || n > kMaxVertices)
      throw std::invalid_argument("graph: vertex count out of range: " + std::to_string(n));
    DirectedGraph g;
    g.n = n;
    for (auto& e : edges) {
      if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
        throw std::invalid_argument("graph: edge endpoint out of range");
      if (e.cost < 0 || e.length < 0)
        throw std::invalid_argument("graph: negative edge cost or length");
      if (e.priority < 1)
        throw std::invalid_argument("graph: edge priority must be >= 1");
      if (e.u == e.v) continue;
      if (e.true_length == 0 && e.length != 0) e.true_length = e.length;
      g.edges.push_back(e);
    }
    return g;
  }
};

}  // namespace arbor
