#include "arbor/exact.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <optional>

namespace arbor {

OracleBudget OracleBudget::from_env() {
  OracleBudget ob;
  if (const char* s = std::getenv("ARBOR_TIME_CAP_MS")) {
    char* end = nullptr;
    const long v = std::strtol(s, &end, 10);
    if (end != s && v > 0) ob.time_cap_ms = v;
  }
  return ob;
}

namespace {

struct Guard {
  std::uint64_t nodes = 0;
  std::uint64_t cap;
  std::chrono::steady_clock::time_point deadline;
  bool hit = false;

  explicit Guard(const OracleBudget& ob)
      : cap(ob.node_cap),
        deadline(std::chrono::steady_clock::now() + std::chrono::milliseconds(ob.time_cap_ms)) {}

  bool tick() {
    if (hit) return true;
    ++nodes;
    if (nodes > cap || ((nodes & 0xFFF) == 0 && std::chrono::steady_clock::now() > deadline))
      hit = true;
    return hit;
  }
};

// Every arborescence shape on w rooted at root, as a parent function limited
// to has_edge pairs. cb sees the members in topological order (root first);
// returning false stops the enumeration for this w.
void for_each_shape(int n, VertexSet w, Vertex root, Guard& g,
                    const std::function<bool(Vertex, Vertex)>& has_edge,
                    const std::function<bool(const std::vector<Vertex>&, const std::vector<Vertex>&)>& cb) {
  std::vector<Vertex> verts;  // non-root members
  for (Vertex v : w)
    if (v != root) verts.push_back(v);
  const int k = static_cast<int>(verts.size());

  std::vector<std::vector<Vertex>> cand(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) {
    for (Vertex p : w)
      if (p != verts[static_cast<size_t>(i)] && has_edge(p, verts[static_cast<size_t>(i)]))
        cand[static_cast<size_t>(i)].push_back(p);
    if (cand[static_cast<size_t>(i)].empty()) return;
  }

  std::vector<int> choice(static_cast<size_t>(k), 0);
  std::vector<Vertex> parent(static_cast<size_t>(n), -1);
  std::vector<int> depth(static_cast<size_t>(n), 0);
  std::vector<Vertex> topo;
  while (true) {
    if (g.tick()) return;
    for (int i = 0; i < k; ++i)
      parent[static_cast<size_t>(verts[static_cast<size_t>(i)])] =
          cand[static_cast<size_t>(i)][static_cast<size_t>(choice[static_cast<size_t>(i)])];

    bool acyclic = true;
    for (int i = 0; i < k && acyclic; ++i) {
      Vertex v = verts[static_cast<size_t>(i)];
      int steps = 0;
      while (v != root && steps <= k) {
        v = parent[static_cast<size_t>(v)];
        ++steps;
      }
      if (v != root)
        acyclic = false;
      else
        depth[static_cast<size_t>(verts[static_cast<size_t>(i)])] = steps;
    }
    if (acyclic) {
      topo.clear();
      topo.push_back(root);
      depth[static_cast<size_t>(root)] = 0;
      for (Vertex v : w)
        if (v != root) topo.push_back(v);
      std::sort(topo.begin() + 1, topo.end(), [&](Vertex a, Vertex b) {
        return depth[static_cast<size_t>(a)] != depth[static_cast<size_t>(b)]
                   ? depth[static_cast<size_t>(a)] < depth[static_cast<size_t>(b)]
                   : a < b;
      });
      if (!cb(topo, parent)) return;
    }

    int i = 0;
    while (i < k && ++choice[static_cast<size_t>(i)] ==
                        static_cast<int>(cand[static_cast<size_t>(i)].size())) {
      choice[static_cast<size_t>(i)] = 0;
      ++i;
    }
    if (i == k) break;
  }
}

}  // namespace

OracleResult brute_force_sto(const CostMatrix& m, const RewardOracle& f, Vertex root,
                             Cost budget, const OracleBudget& ob) {
  OracleResult res;
  const int n = m.n();
  if (n > ob.max_vertices) {
    res.too_large = true;
    return res;
  }
  Guard g(ob);
  const Value f0 = f.eval(VertexSet());

  bool found = false;
  Value bv = 0;
  Cost bc = 0;
  std::uint64_t bw = 0;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    const VertexSet w(bits);
    if (!w.contains(root)) continue;
    if (g.tick()) {
      res.too_large = true;
      return res;
    }
    const Cost c = min_arborescence_cost(m, root, w);
    if (c > budget) continue;
    const Value val = f.eval(w) - f0;
    if (!found || val > bv || (val == bv && c < bc)) {
      found = true;
      bv = val;
      bc = c;
      bw = bits;
    }
  }
  res.feasible = found;
  if (found) {
    res.value = bv;
    res.cost = bc;
    res.tree = *min_arborescence(m, root, VertexSet(bw));
  }
  return res;
}

OracleResult brute_force_length_budget(const TwoCostClosure& tc, const RewardOracle& f,
                                       Vertex root, Cost budget, Length length_budget,
                                       const OracleBudget& ob) {
  OracleResult res;
  const int n = tc.n();
  if (n > ob.max_vertices) {
    res.too_large = true;
    return res;
  }
  Guard g(ob);
  const Value f0 = f.eval(VertexSet());
  const auto has_edge = [&](Vertex u, Vertex v) { return !tc.frontier(u, v).empty(); };

  bool found = false;
  Value bv = 0;
  Cost bc = 0;
  Arborescence btree;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    const VertexSet w(bits);
    if (!w.contains(root)) continue;
    const Value cap = f.eval(w) - f0;
    if (found && cap <= bv) continue;

    bool feasible_w = false;
    Arborescence witness;
    Cost witness_cost = 0;
    for_each_shape(n, w, root, g, has_edge, [&](const std::vector<Vertex>& topo,
                                                const std::vector<Vertex>& parent) {
      std::vector<Length> plen(static_cast<size_t>(n), 0);
      std::vector<const TwoCostEntry*> pick(static_cast<size_t>(n), nullptr);
      auto dfs = [&](auto&& self, size_t idx, Cost cost, Length charged) -> bool {
        if (g.tick()) return false;
        if (idx == topo.size()) {
          feasible_w = true;
          witness = Arborescence(root);
          for (size_t j = 1; j < topo.size(); ++j) {
            const Vertex v = topo[j];
            const TwoCostEntry* e = pick[static_cast<size_t>(v)];
            witness.add_edge(v, TreeEdge{parent[static_cast<size_t>(v)], e->cost, e->length,
                                         e->true_length, 0});
          }
          witness_cost = cost;
          return false;
        }
        const Vertex v = topo[idx];
        const Vertex p = parent[static_cast<size_t>(v)];
        for (const TwoCostEntry& e : tc.frontier(p, v)) {
          if (cost + e.cost > budget) break;  // frontier is cost-ascending
          const Length pl = plen[static_cast<size_t>(p)] + e.length;
          if (charged + pl > length_budget) continue;
          plen[static_cast<size_t>(v)] = pl;
          pick[static_cast<size_t>(v)] = &e;
          if (!self(self, idx + 1, cost + e.cost, charged + pl)) return false;
        }
        return true;
      };
      dfs(dfs, 1, 0, 0);
      return !feasible_w && !g.hit;
    });
    if (g.hit) {
      res.too_large = true;
      return res;
    }
    if (feasible_w && (!found || cap > bv)) {
      found = true;
      bv = cap;
      bc = witness_cost;
      btree = witness;
    }
  }
  res.feasible = found;
  if (found) {
    res.value = bv;
    res.cost = bc;
    res.tree = btree;
  }
  return res;
}

OracleResult brute_force_deadline(const TwoCostClosure& tc, const RewardOracle& f, Vertex root,
                                  Cost budget, const std::vector<Length>& deadlines,
                                  const OracleBudget& ob) {
  OracleResult res;
  const int n = tc.n();
  if (n > ob.max_vertices) {
    res.too_large = true;
    return res;
  }
  Guard g(ob);
  const Value f0 = f.eval(VertexSet());
  const auto has_edge = [&](Vertex u, Vertex v) { return !tc.frontier(u, v).empty(); };

  bool found = false;
  Value bv = -1;
  Cost bc = 0;
  Arborescence btree;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    const VertexSet w(bits);
    if (!w.contains(root)) continue;
    if (found && f.eval(w) - f0 <= bv) continue;

    for_each_shape(n, w, root, g, has_edge, [&](const std::vector<Vertex>& topo,
                                                const std::vector<Vertex>& parent) {
      std::vector<Length> plen(static_cast<size_t>(n), 0);
      std::vector<const TwoCostEntry*> pick(static_cast<size_t>(n), nullptr);
      auto dfs = [&](auto&& self, size_t idx, Cost cost) -> bool {
        if (g.tick()) return false;
        if (idx == topo.size()) {
          VertexSet gated;
          for (const Vertex v : topo)
            if (plen[static_cast<size_t>(v)] <= deadlines[static_cast<size_t>(v)])
              gated = gated.with(v);
          const Value val = f.eval(gated) - f0;
          if (!found || val > bv || (val == bv && cost < bc)) {
            found = true;
            bv = val;
            bc = cost;
            btree = Arborescence(root);
            for (size_t j = 1; j < topo.size(); ++j) {
              const Vertex v = topo[j];
              const TwoCostEntry* e = pick[static_cast<size_t>(v)];
              btree.add_edge(v, TreeEdge{parent[static_cast<size_t>(v)], e->cost, e->length,
                                         e->true_length, 0});
            }
          }
          return true;
        }
        const Vertex v = topo[idx];
        const Vertex p = parent[static_cast<size_t>(v)];
        for (const TwoCostEntry& e : tc.frontier(p, v)) {
          if (cost + e.cost > budget) break;
          plen[static_cast<size_t>(v)] = plen[static_cast<size_t>(p)] + e.length;
          pick[static_cast<size_t>(v)] = &e;
          if (!self(self, idx + 1, cost + e.cost)) return false;
        }
        return true;
      };
      dfs(dfs, 1, 0);
      return !g.hit;
    });
    if (g.hit) {
      res.too_large = true;
      return res;
    }
  }
  res.feasible = found;
  if (found) {
    res.value = bv;
    res.cost = bc;
    res.tree = btree;
  }
  return res;
}

OracleResult brute_force_priority(const PriorityClosure& pc, const RewardOracle& f, Vertex root,
                                  Cost budget, const std::vector<int>& required,
                                  const OracleBudget& ob) {
  OracleResult res;
  const int n = pc.n();
  if (n > ob.max_vertices) {
    res.too_large = true;
    return res;
  }
  Guard g(ob);
  const int levels = pc.levels();
  const Value f0 = f.eval(VertexSet());
  const auto has_edge = [&](Vertex u, Vertex v) { return pc.at_level(1).reachable(u, v); };

  bool found = false;
  Value bv = -1;
  Cost bc = 0;
  Arborescence btree;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    const VertexSet w(bits);
    if (!w.contains(root)) continue;
    if (found && f.eval(w) - f0 <= bv) continue;

    for_each_shape(n, w, root, g, has_edge, [&](const std::vector<Vertex>& topo,
                                                const std::vector<Vertex>& parent) {
      std::vector<int> minp(static_cast<size_t>(n), levels);
      std::vector<std::pair<int, Cost>> pick(static_cast<size_t>(n));  // (level, cost)
      auto dfs = [&](auto&& self, size_t idx, Cost cost) -> bool {
        if (g.tick()) return false;
        if (idx == topo.size()) {
          VertexSet gated;
          for (const Vertex v : topo)
            if (minp[static_cast<size_t>(v)] >= required[static_cast<size_t>(v)])
              gated = gated.with(v);
          const Value val = f.eval(gated) - f0;
          if (!found || val > bv || (val == bv && cost < bc)) {
            found = true;
            bv = val;
            bc = cost;
            btree = Arborescence(root);
            for (size_t j = 1; j < topo.size(); ++j) {
              const Vertex v = topo[j];
              btree.add_edge(v, TreeEdge{parent[static_cast<size_t>(v)],
                                         pick[static_cast<size_t>(v)].second, 0, 0,
                                         pick[static_cast<size_t>(v)].first});
            }
          }
          return true;
        }
        const Vertex v = topo[idx];
        const Vertex p = parent[static_cast<size_t>(v)];
        for (int q = 1; q <= levels; ++q) {
          const Cost ec = pc.at_level(q)(p, v);
          if (ec >= kInfeasibleCost) continue;
          if (cost + ec > budget) continue;
          minp[static_cast<size_t>(v)] = std::min(minp[static_cast<size_t>(p)], q);
          pick[static_cast<size_t>(v)] = {q, ec};
          if (!self(self, idx + 1, cost + ec)) return false;
        }
        return true;
      };
      dfs(dfs, 1, 0);
      return !g.hit;
    });
    if (g.hit) {
      res.too_large = true;
      return res;
    }
  }
  res.feasible = found;
  if (found) {
    res.value = bv;
    res.cost = bc;
    res.tree = btree;
  }
  return res;
}

OracleResult brute_force_min_cover(const CostMatrix& m, Vertex root,
                                   const std::function<bool(VertexSet)>& done,
                                   const OracleBudget& ob) {
  OracleResult res;
  const int n = m.n();
  if (n > ob.max_vertices) {
    res.too_large = true;
    return res;
  }
  Guard g(ob);

  bool found = false;
  Cost bc = 0;
  std::uint64_t bw = 0;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    const VertexSet w(bits);
    if (!w.contains(root) || !done(w)) continue;
    if (g.tick()) {
      res.too_large = true;
      return res;
    }
    const Cost c = min_arborescence_cost(m, root, w);
    if (c >= kInfeasibleCost) continue;
    if (!found || c < bc) {
      found = true;
      bc = c;
      bw = bits;
    }
  }
  res.feasible = found;
  if (found) {
    res.cost = bc;
    res.tree = *min_arborescence(m, root, VertexSet(bw));
  }
  return res;
}

OracleResult brute_force_min_priority_cover(const PriorityClosure& pc, Vertex root,
                                            const std::vector<int>& required,
                                            const OracleBudget& ob) {
  OracleResult res;
  const int n = pc.n();
  if (n > ob.max_vertices) {
    res.too_large = true;
    return res;
  }
  Guard g(ob);
  const int levels = pc.levels();
  const auto has_edge = [&](Vertex u, Vertex v) { return pc.at_level(1).reachable(u, v); };

  VertexSet need;
  for (Vertex v = 0; v < n; ++v)
    if (required[static_cast<size_t>(v)] > 0) need = need.with(v);

  bool found = false;
  Cost bc = 0;
  Arborescence btree;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    const VertexSet w(bits);
    if (!w.contains(root) || !need.subset_of(w)) continue;

    for_each_shape(n, w, root, g, has_edge, [&](const std::vector<Vertex>& topo,
                                                const std::vector<Vertex>& parent) {
      std::vector<int> minp(static_cast<size_t>(n), levels);
      std::vector<std::pair<int, Cost>> pick(static_cast<size_t>(n));
      auto dfs = [&](auto&& self, size_t idx, Cost cost) -> bool {
        if (g.tick()) return false;
        if (found && cost >= bc) return true;  // cost only grows below
        if (idx == topo.size()) {
          found = true;
          bc = cost;
          btree = Arborescence(root);
          for (size_t j = 1; j < topo.size(); ++j) {
            const Vertex v = topo[j];
            btree.add_edge(v, TreeEdge{parent[static_cast<size_t>(v)],
                                       pick[static_cast<size_t>(v)].second, 0, 0,
                                       pick[static_cast<size_t>(v)].first});
          }
          return true;
        }
        const Vertex v = topo[idx];
        const Vertex p = parent[static_cast<size_t>(v)];
        for (int q = 1; q <= levels; ++q) {
          const Cost ec = pc.at_level(q)(p, v);
          if (ec >= kInfeasibleCost) continue;
          const int np = std::min(minp[static_cast<size_t>(p)], q);
          if (np < required[static_cast<size_t>(v)]) continue;
          minp[static_cast<size_t>(v)] = np;
          pick[static_cast<size_t>(v)] = {q, ec};
          if (!self(self, idx + 1, cost + ec)) return false;
        }
        return true;
      };
      dfs(dfs, 1, 0);
      return !g.hit;
    });
    if (g.hit) {
      res.too_large = true;
      return res;
    }
  }
  res.feasible = found;
  if (found) {
    res.cost = bc;
    res.tree = btree;
  }
  return res;
}

OracleResult brute_force_buy_at_bulk(int n, const std::vector<EdgeSpec>& edges, Vertex root,
                                     VertexSet terminals, const OracleBudget& ob) {
  OracleResult res;
  if (n > ob.max_vertices) {
    res.too_large = true;
    return res;
  }
  Guard g(ob);

  // group parallel edges by endpoint pair
  std::vector<std::vector<std::vector<std::pair<Cost, Length>>>> grp(
      static_cast<size_t>(n), std::vector<std::vector<std::pair<Cost, Length>>>(static_cast<size_t>(n)));
  for (const EdgeSpec& e : edges)
    if (e.u != e.v) grp[static_cast<size_t>(e.u)][static_cast<size_t>(e.v)].emplace_back(e.cost, e.length);
  const auto has_edge = [&](Vertex u, Vertex v) {
    return !grp[static_cast<size_t>(u)][static_cast<size_t>(v)].empty();
  };

  bool found = false;
  Cost bc = 0;
  Arborescence btree;
  const VertexSet need = terminals.without(root);
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    const VertexSet w(bits);
    if (!w.contains(root) || !need.subset_of(w)) continue;

    for_each_shape(n, w, root, g, has_edge, [&](const std::vector<Vertex>& topo,
                                                const std::vector<Vertex>& parent) {
      // terminals in each subtree, then per-edge minimization (independent)
      std::vector<int> under(static_cast<size_t>(n), 0);
      for (size_t j = topo.size(); j-- > 1;) {
        const Vertex v = topo[j];
        under[static_cast<size_t>(v)] += need.contains(v) ? 1 : 0;
        under[static_cast<size_t>(parent[static_cast<size_t>(v)])] += under[static_cast<size_t>(v)];
      }
      Cost obj = 0;
      std::vector<std::pair<Cost, Length>> pick(static_cast<size_t>(n));
      for (size_t j = 1; j < topo.size(); ++j) {
        const Vertex v = topo[j];
        Cost best_e = kInfeasibleCost;
        for (const auto& [sigma, rho] : grp[static_cast<size_t>(parent[static_cast<size_t>(v)])]
                                           [static_cast<size_t>(v)]) {
          const Cost c = sigma + rho * under[static_cast<size_t>(v)];
          if (c < best_e) {
            best_e = c;
            pick[static_cast<size_t>(v)] = {sigma, rho};
          }
        }
        obj += best_e;
      }
      if (!found || obj < bc) {
        found = true;
        bc = obj;
        btree = Arborescence(root);
        for (size_t j = 1; j < topo.size(); ++j) {
          const Vertex v = topo[j];
          btree.add_edge(v, TreeEdge{parent[static_cast<size_t>(v)],
                                     pick[static_cast<size_t>(v)].first,
                                     pick[static_cast<size_t>(v)].second,
                                     pick[static_cast<size_t>(v)].second, 0});
        }
      }
      return !g.hit;
    });
    if (g.hit) {
      res.too_large = true;
      return res;
    }
  }
  res.feasible = found;
  if (found) {
    res.cost = bc;
    res.tree = btree;
  }
  return res;
}

}  // namespace arbor
