#include "arbor/arborescence.hpp"

#include <algorithm>
#include <stdexcept>

namespace arbor {

Arborescence Arborescence::from_edges(Vertex root, std::vector<std::pair<Vertex, TreeEdge>> edges) {
  std::sort(edges.begin(), edges.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  Arborescence t(root);
  for (size_t i = 1; i < edges.size(); ++i)
    if (edges[i].first == edges[i - 1].first)
      throw std::invalid_argument("arborescence: duplicate in-edge");
  VertexSet all = VertexSet::single(root);
  for (const auto& [child, e] : edges) {
    if (child == root) throw std::invalid_argument("arborescence: root has an in-edge");
    all = all.with(child);
  }
  // Attach in rounds; every vertex must eventually hang off the root.
  std::vector<std::pair<Vertex, TreeEdge>> pending = std::move(edges);
  while (!pending.empty()) {
    const size_t before = pending.size();
    std::vector<std::pair<Vertex, TreeEdge>> next;
    for (auto& [child, e] : pending) {
      if (!all.contains(e.parent))
        throw std::invalid_argument("arborescence: parent outside the vertex set");
      if (t.contains(e.parent))
        t.add_edge(child, e);
      else
        next.emplace_back(child, e);
    }
    if (next.size() == before)
      throw std::invalid_argument("arborescence: edges do not reach the root");
    pending = std::move(next);
  }
  return t;
}

const TreeEdge* Arborescence::in_edge(Vertex child) const {
  auto it = std::lower_bound(edges_.begin(), edges_.end(), child,
                             [](const auto& a, Vertex c) { return a.first < c; });
  if (it == edges_.end() || it->first != child) return nullptr;
  return &it->second;
}

void Arborescence::add_edge(Vertex child, TreeEdge e) {
  if (vertices_.contains(child)) throw std::invalid_argument("arborescence: child already present");
  if (!vertices_.contains(e.parent)) throw std::invalid_argument("arborescence: parent not present");
  auto it = std::lower_bound(edges_.begin(), edges_.end(), child,
                             [](const auto& a, Vertex c) { return a.first < c; });
  edges_.insert(it, {child, e});
  vertices_ = vertices_.with(child);
}

Cost Arborescence::total_cost() const {
  Cost c = 0;
  for (const auto& [child, e] : edges_) c += e.cost;
  return c;
}

Length Arborescence::path_length(Vertex v) const {
  Length l = 0;
  while (v != root_) {
    const TreeEdge* e = in_edge(v);
    l += e->length;
    v = e->parent;
  }
  return l;
}

Length Arborescence::path_true_length(Vertex v) const {
  Length l = 0;
  while (v != root_) {
    const TreeEdge* e = in_edge(v);
    l += e->true_length;
    v = e->parent;
  }
  return l;
}

int Arborescence::path_min_priority(Vertex v, int entry) const {
  int p = entry;
  while (v != root_) {
    const TreeEdge* e = in_edge(v);
    p = std::min(p, e->priority);
    v = e->parent;
  }
  return p;
}

Arborescence merge_and_prune(const Arborescence& t1, const Arborescence& t2) {
  if (!t1.contains(t2.root()))
    throw std::invalid_argument("merge_and_prune: t2's root is not in t1");
  std::vector<std::pair<Vertex, TreeEdge>> edges = t1.edges();
  for (const auto& [child, e] : t2.edges())
    if (!t1.contains(child)) edges.emplace_back(child, e);
  return Arborescence::from_edges(t1.root(), std::move(edges));
}

SeparatorSplit find_balanced_separator(const Arborescence& t) {
  const int n = t.size();
  if (n < 2) throw std::invalid_argument("find_balanced_separator: tree too small");

  // Undirected adjacency over tree edges.
  std::vector<std::vector<Vertex>> adj(kMaxVertices);
  for (const auto& [child, e] : t.edges()) {
    adj[child].push_back(e.parent);
    adj[e.parent].push_back(child);
  }

  auto components_without = [&](Vertex cut) {
    std::vector<VertexSet> comps;
    VertexSet seen = VertexSet::single(cut);
    for (Vertex v : t.vertices()) {
      if (seen.contains(v)) continue;
      VertexSet comp;
      std::vector<Vertex> stack{v};
      seen = seen.with(v);
      while (!stack.empty()) {
        Vertex x = stack.back();
        stack.pop_back();
        comp = comp.with(x);
        for (Vertex y : adj[x])
          if (!seen.contains(y)) {
            seen = seen.with(y);
            stack.push_back(y);
          }
      }
      comps.push_back(comp);
    }
    return comps;
  };

  Vertex best = -1;
  int best_max = n + 1;
  for (Vertex v : t.vertices()) {
    int largest = 0;
    for (const auto& comp : components_without(v))
      largest = std::max(largest, comp.size());
    if (largest < best_max) {
      best_max = largest;
      best = v;
    }
  }

  auto comps = components_without(best);
  std::sort(comps.begin(), comps.end(), [](VertexSet a, VertexSet b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.bits() < b.bits();
  });

  // Greedy binning, descending size, lighter bin first. Side A is the bin
  // that holds the root's component (bin 0 when the separator is the root).
  int weight[2] = {0, 0};
  VertexSet bin[2];
  int root_bin = 0;
  for (const auto& comp : comps) {
    const int target = weight[1] < weight[0] ? 1 : 0;
    bin[target] = bin[target] | comp;
    weight[target] += comp.size();
    if (comp.contains(t.root())) root_bin = target;
  }

  SeparatorSplit split;
  split.separator = best;
  split.side_a = bin[root_bin].with(best);
  split.side_b = bin[1 - root_bin].with(best);
  return split;
}

namespace {

// Iterative Chu-Liu/Edmonds, cost only. `c` is a dense matrix over node ids
// 0..k-1 (kInfeasibleCost = absent edge), root is node 0 by construction.
Cost edmonds_cost(std::vector<std::vector<Cost>> c) {
  Cost total = 0;
  int k = static_cast<int>(c.size());
  while (true) {
    std::vector<Cost> in_cost(k, kInfeasibleCost);
    std::vector<int> pre(k, -1);
    for (int v = 1; v < k; ++v) {
      for (int u = 0; u < k; ++u) {
        if (u == v) continue;
        if (c[u][v] < in_cost[v]) {
          in_cost[v] = c[u][v];
          pre[v] = u;
        }
      }
      if (pre[v] < 0) return kInfeasibleCost;
    }

    // Find a cycle in the parent pointers.
    std::vector<int> visit(k, -1);
    std::vector<int> cycle;
    for (int start = 1; start < k && cycle.empty(); ++start) {
      int v = start;
      while (v != 0 && visit[v] == -1) {
        visit[v] = start;
        v = pre[v];
      }
      if (v != 0 && visit[v] == start) {
        for (int x = pre[v]; x != v; x = pre[x]) cycle.push_back(x);
        cycle.push_back(v);
      }
    }
    if (cycle.empty()) {
      for (int v = 1; v < k; ++v) total += in_cost[v];
      return total;
    }
    // Buy the cycle's edges now; entering the cycle at v later refunds
    // in_cost[v] through the reduced costs below.
    for (int x : cycle) total += in_cost[x];

    // Contract the cycle into node id `k-|C|` of a fresh matrix.
    std::vector<bool> in_cycle(k, false);
    for (int x : cycle) in_cycle[x] = true;
    std::vector<int> label(k, -1);
    int next = 0;
    for (int v = 0; v < k; ++v)
      if (!in_cycle[v]) label[v] = next++;
    const int merged = next;
    const int nk = next + 1;

    std::vector<std::vector<Cost>> nc(nk, std::vector<Cost>(nk, kInfeasibleCost));
    for (int u = 0; u < k; ++u)
      for (int v = 0; v < k; ++v) {
        if (u == v || c[u][v] >= kInfeasibleCost) continue;
        const int lu = in_cycle[u] ? merged : label[u];
        const int lv = in_cycle[v] ? merged : label[v];
        if (lu == lv) continue;
        const Cost w = in_cycle[v] ? c[u][v] - in_cost[v] : c[u][v];
        nc[lu][lv] = std::min(nc[lu][lv], w);
      }
    c = std::move(nc);
    k = nk;
  }
}

}  // namespace

Cost min_arborescence_cost(const CostMatrix& m, Vertex root, VertexSet w) {
  if (!w.contains(root)) throw std::invalid_argument("min_arborescence_cost: root not in vertex set");
  if (w.size() == 1) return 0;

  std::vector<Vertex> verts;
  verts.push_back(root);
  for (Vertex v : w)
    if (v != root) verts.push_back(v);
  const int k = static_cast<int>(verts.size());

  std::vector<std::vector<Cost>> c(k, std::vector<Cost>(k, kInfeasibleCost));
  for (int i = 0; i < k; ++i)
    for (int j = 1; j < k; ++j)
      if (i != j) c[i][j] = m(verts[i], verts[j]);
  return edmonds_cost(std::move(c));
}

std::optional<Arborescence> min_arborescence(const CostMatrix& m, Vertex root, VertexSet w) {
  if (!w.contains(root)) throw std::invalid_argument("min_arborescence: root not in vertex set");
  if (w.size() == 1) return Arborescence(root);

  std::vector<Vertex> verts;
  verts.push_back(root);
  for (Vertex v : w)
    if (v != root) verts.push_back(v);
  const int k = static_cast<int>(verts.size());

  auto matrix_with = [&](const std::vector<Vertex>& locked_parent) {
    // locked_parent[node] >= 0 forces that node's in-edge.
    std::vector<std::vector<Cost>> c(k, std::vector<Cost>(k, kInfeasibleCost));
    for (int i = 0; i < k; ++i)
      for (int j = 1; j < k; ++j) {
        if (i == j) continue;
        if (locked_parent[j] >= 0 && locked_parent[j] != i) continue;
        c[i][j] = m(verts[i], verts[j]);
      }
    return c;
  };

  std::vector<Vertex> locked(k, -1);
  const Cost opt = edmonds_cost(matrix_with(locked));
  if (opt >= kInfeasibleCost) return std::nullopt;

  // Deterministic witness: lock each vertex's parent to the smallest id that
  // keeps the optimum unchanged. At most k^2 re-solves on tiny matrices.
  for (int j = 1; j < k; ++j) {
    std::vector<std::pair<Cost, Vertex>> candidates;
    for (int i = 0; i < k; ++i) {
      if (i == j || m(verts[i], verts[j]) >= kInfeasibleCost) continue;
      candidates.emplace_back(m(verts[i], verts[j]), verts[i]);
    }
    std::sort(candidates.begin(), candidates.end());
    for (const auto& [cost, parent] : candidates) {
      (void)cost;
      int pi = 0;
      while (verts[pi] != parent) ++pi;
      locked[j] = pi;
      if (edmonds_cost(matrix_with(locked)) == opt) break;
      locked[j] = -1;
    }
  }

  std::vector<std::pair<Vertex, TreeEdge>> edges;
  for (int j = 1; j < k; ++j) {
    TreeEdge e;
    e.parent = verts[locked[j]];
    e.cost = m(e.parent, verts[j]);
    edges.emplace_back(verts[j], e);
  }
  return Arborescence::from_edges(root, std::move(edges));
}

}  // namespace arbor
