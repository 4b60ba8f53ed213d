#include "arbor/reward.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace arbor {

Matroid Matroid::uniform(int n, int k) {
  if (k < 0) throw std::invalid_argument("matroid: negative uniform rank");
  Matroid m(Kind::kUniform, n);
  m.k_ = k;
  return m;
}

Matroid Matroid::partition(int n, std::vector<std::pair<VertexSet, int>> parts) {
  VertexSet seen;
  for (const auto& [part, quota] : parts) {
    if (quota < 0) throw std::invalid_argument("matroid: negative quota");
    if (!part.subset_of(VertexSet::full(n)) || part.intersects(seen))
      throw std::invalid_argument("matroid: parts must be disjoint subsets of the ground set");
    seen = seen | part;
  }
  Matroid m(Kind::kPartition, n);
  m.parts_ = std::move(parts);
  return m;
}

Matroid Matroid::graphic(int n, int aux_vertices, std::vector<std::pair<int, int>> element_edges) {
  if (static_cast<int>(element_edges.size()) != n)
    throw std::invalid_argument("matroid: need one auxiliary edge per element");
  for (const auto& [a, b] : element_edges)
    if (a < 0 || b < 0 || a >= aux_vertices || b >= aux_vertices)
      throw std::invalid_argument("matroid: auxiliary edge endpoint out of range");
  Matroid m(Kind::kGraphic, n);
  m.aux_vertices_ = aux_vertices;
  m.element_edges_ = std::move(element_edges);
  return m;
}

int Matroid::rank(VertexSet s) const {
  switch (kind_) {
    case Kind::kUniform:
      return std::min(s.size(), k_);
    case Kind::kPartition: {
      int r = 0;
      for (const auto& [part, quota] : parts_)
        r += std::min((s & part).size(), quota);
      return r;
    }
    case Kind::kGraphic: {
      // union-find over the auxiliary graph
      std::vector<int> parent(aux_vertices_);
      std::iota(parent.begin(), parent.end(), 0);
      auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
      };
      int r = 0;
      for (Vertex v : s) {
        const auto [a, b] = element_edges_[v];
        const int ra = find(a), rb = find(b);
        if (ra != rb) {
          parent[ra] = rb;
          ++r;
        }
      }
      return r;
    }
  }
  return 0;
}

RewardOracle RewardOracle::linear(std::vector<Value> rewards) {
  for (Value r : rewards)
    if (r < 0) throw std::invalid_argument("reward: negative vertex reward");
  Value total = 0;
  for (Value r : rewards) total += r;
  return RewardOracle(Kind::kLinear, total, [rewards = std::move(rewards)](VertexSet s) {
    Value v = 0;
    for (Vertex x : s) v += rewards[x];
    return v;
  });
}

RewardOracle RewardOracle::coverage(std::vector<std::uint64_t> covers, std::vector<Value> weights) {
  for (Value w : weights)
    if (w < 0) throw std::invalid_argument("reward: negative item weight");
  std::uint64_t all = 0;
  for (std::uint64_t c : covers) all |= c;
  Value upper = 0;
  for (size_t i = 0; i < weights.size(); ++i)
    if ((all >> i) & 1) upper += weights[i];
  return RewardOracle(Kind::kCoverage, upper,
                      [covers = std::move(covers), weights = std::move(weights)](VertexSet s) {
                        std::uint64_t hit = 0;
                        for (Vertex v : s) hit |= covers[v];
                        Value total = 0;
                        while (hit) {
                          const int i = std::countr_zero(hit);
                          hit &= hit - 1;
                          total += weights[i];
                        }
                        return total;
                      });
}

RewardOracle RewardOracle::matroid_rank(Matroid m) {
  const Value upper = m.full_rank();
  return RewardOracle(Kind::kMatroidRank, upper,
                      [m = std::move(m)](VertexSet s) { return Value{m.rank(s)}; });
}

RewardOracle RewardOracle::contracted_rank(Matroid m, VertexSet c) {
  const Value base = m.rank(c);
  const Value upper = m.full_rank() - base;
  return RewardOracle(Kind::kMatroidRank, upper, [m = std::move(m), c, base](VertexSet s) {
    return Value{m.rank(s | c)} - base;
  });
}

VertexSet gated_set(const Arborescence& t, const DeadlineGate& g) {
  VertexSet s;
  for (Vertex v : t.vertices())
    if (g.offset + t.path_length(v) <= (*g.deadlines)[v]) s = s.with(v);
  return s;
}

VertexSet gated_set(const Arborescence& t, const PriorityGate& g) {
  VertexSet s;
  for (Vertex v : t.vertices())
    if (std::min(g.entry_priority, t.path_min_priority(v, g.entry_priority)) >= (*g.required)[v])
      s = s.with(v);
  return s;
}

}  // namespace arbor
