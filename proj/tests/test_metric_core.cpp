#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <vector>

#include "arbor/arborescence.hpp"
#include "arbor/closure.hpp"
#include "arbor/graph.hpp"
#include "arbor/types.hpp"
#include "helpers.hpp"

using namespace arbor;
using testutil::Rng;

namespace {

// Reference all-pairs shortest paths: n-1 rounds of edge relaxation.
std::vector<std::vector<Cost>> bellman_ford_all(const DirectedGraph& g) {
  const int n = g.n;
  std::vector<std::vector<Cost>> d(static_cast<size_t>(n),
                                   std::vector<Cost>(static_cast<size_t>(n), kInfeasibleCost));
  for (int s = 0; s < n; ++s) {
    d[s][s] = 0;
    for (int round = 0; round < n - 1; ++round)
      for (const EdgeSpec& e : g.edges)
        if (d[s][e.u] < kInfeasibleCost)
          d[s][e.v] = std::min(d[s][e.v], d[s][e.u] + e.cost);
  }
  return d;
}

struct PathPoint {
  Cost cost;
  Length len;
  Length tru;
};

// All simple u->v paths with length <= l_max, by DFS over raw edges.
void collect_paths(const DirectedGraph& g, Vertex u, Vertex v, Length l_max,
                   std::vector<PathPoint>& out) {
  std::vector<bool> used(static_cast<size_t>(g.n), false);
  auto dfs = [&](auto&& self, Vertex at, Cost c, Length l, Length t) -> void {
    if (at == v) {
      out.push_back({c, l, t});
      if (u != v) return;  // a u->u path other than the empty one never helps
    }
    used[static_cast<size_t>(at)] = true;
    for (const EdgeSpec& e : g.edges) {
      if (e.u != at || used[static_cast<size_t>(e.v)]) continue;
      if (l + e.length > l_max) continue;
      self(self, e.v, c + e.cost, l + e.length, t + e.true_length);
    }
    used[static_cast<size_t>(at)] = false;
  };
  dfs(dfs, u, 0, 0, 0);
}

// Reference Pareto frontier per the closure's documented meaning.
std::vector<TwoCostEntry> reference_frontier(const DirectedGraph& g, Vertex u, Vertex v,
                                             Length l_max) {
  std::vector<PathPoint> paths;
  collect_paths(g, u, v, l_max, paths);
  std::vector<TwoCostEntry> fr;
  Cost prev = kInfeasibleCost;
  for (Length l = 0; l <= l_max; ++l) {
    Cost best = kInfeasibleCost;
    Length tru = 0;
    for (const PathPoint& p : paths) {
      if (p.len > l) continue;
      if (p.cost < best || (p.cost == best && p.tru < tru)) {
        best = p.cost;
        tru = p.tru;
      }
    }
    if (best < prev) {
      fr.push_back({best, l, tru});
      prev = best;
    }
  }
  std::reverse(fr.begin(), fr.end());  // closure order: ascending cost
  return fr;
}

Arborescence tree_from_parents(const std::vector<Vertex>& parent) {
  std::vector<std::pair<Vertex, TreeEdge>> edges;
  for (size_t v = 1; v < parent.size(); ++v)
    edges.emplace_back(static_cast<Vertex>(v), TreeEdge{parent[v], 1, 0, 0, 0});
  return Arborescence::from_edges(0, std::move(edges));
}

// Reference min arborescence: all parent functions over w, acyclicity by
// chasing, minimum total closure cost.
Cost reference_min_arb_cost(const CostMatrix& m, Vertex root, VertexSet w) {
  std::vector<Vertex> verts;
  for (Vertex v : w)
    if (v != root) verts.push_back(v);
  const int k = static_cast<int>(verts.size());
  if (k == 0) return 0;

  std::vector<Vertex> members;
  for (Vertex v : w) members.push_back(v);
  std::vector<int> choice(static_cast<size_t>(k), 0);
  Cost best = kInfeasibleCost;
  while (true) {
    std::vector<Vertex> parent(64, -1);
    Cost total = 0;
    bool ok = true;
    for (int i = 0; i < k && ok; ++i) {
      const Vertex p = members[static_cast<size_t>(choice[static_cast<size_t>(i)])];
      if (p == verts[static_cast<size_t>(i)] || !m.reachable(p, verts[static_cast<size_t>(i)])) {
        ok = false;
        break;
      }
      parent[static_cast<size_t>(verts[static_cast<size_t>(i)])] = p;
      total += m(p, verts[static_cast<size_t>(i)]);
    }
    if (ok) {
      for (int i = 0; i < k && ok; ++i) {
        Vertex v = verts[static_cast<size_t>(i)];
        int steps = 0;
        while (v != root && steps <= k) {
          v = parent[static_cast<size_t>(v)];
          ++steps;
        }
        if (v != root) ok = false;
      }
      if (ok) best = std::min(best, total);
    }
    int i = 0;
    while (i < k && ++choice[static_cast<size_t>(i)] == static_cast<int>(members.size())) {
      choice[static_cast<size_t>(i)] = 0;
      ++i;
    }
    if (i == k) break;
  }
  return best;
}

}  // namespace

TEST_CASE("vertex sets and submask enumeration") {
  VertexSet s = VertexSet::single(2).with(5);
  CHECK(s.size() == 2);
  CHECK(s.contains(2));
  CHECK(!s.contains(3));
  CHECK((s - VertexSet::single(2)) == VertexSet::single(5));
  CHECK(s.subset_of(VertexSet::full(6)));
  CHECK(!VertexSet::full(6).subset_of(s));

  std::vector<Vertex> members;
  for (Vertex v : VertexSet(0b101001))
    members.push_back(v);
  CHECK(members == std::vector<Vertex>{0, 3, 5});

  std::vector<std::uint64_t> subs;
  for (VertexSet sub : Submasks(VertexSet(0b1010)))
    subs.push_back(sub.bits());
  CHECK(subs == std::vector<std::uint64_t>{0, 0b10, 0b1000, 0b1010});

  subs.clear();
  for (VertexSet sub : Submasks(VertexSet()))
    subs.push_back(sub.bits());
  CHECK(subs == std::vector<std::uint64_t>{0});
}

TEST_CASE("three-halves powers, exact floors") {
  const std::vector<std::int64_t> expect{1, 1, 2, 3, 5, 7, 11, 17, 25, 38, 57};
  for (size_t i = 0; i < expect.size(); ++i)
    CHECK(three_halves_pow(static_cast<int>(i)) == expect[i]);
  CHECK(three_halves_pow(40) == 11057332);  // 3^40 >> 40
  CHECK(three_halves_pow(61) == (std::int64_t{1} << 62));  // saturates
}

TEST_CASE("graph construction validates and defaults") {
  std::vector<EdgeSpec> edges;
  EdgeSpec e;
  e.u = 0;
  e.v = 1;
  e.cost = 3;
  e.length = 4;
  edges.push_back(e);
  e.u = 1;
  e.v = 1;  // self-loop, dropped
  edges.push_back(e);
  const DirectedGraph g = DirectedGraph::make(2, edges);
  CHECK(g.edges.size() == 1);
  CHECK(g.edges[0].true_length == 4);  // defaults to the scaled length

  e = EdgeSpec{};
  e.u = 0;
  e.v = 7;
  CHECK_THROWS_AS(DirectedGraph::make(3, {e}), std::invalid_argument);
  e = EdgeSpec{};
  e.u = 0;
  e.v = 1;
  e.cost = -1;
  CHECK_THROWS_AS(DirectedGraph::make(3, {e}), std::invalid_argument);
}

TEST_CASE("metric closure equals Bellman-Ford on random graphs") {
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    Rng rng(seed);
    const int n = rng.irange(2, 7);
    const DirectedGraph g = testutil::random_graph(rng, n, rng.irange(20, 90), 12);
    const CostMatrix m = build_metric_closure(g);
    const auto ref = bellman_ford_all(g);
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        CAPTURE(seed);
        CHECK(m(u, v) == ref[static_cast<size_t>(u)][static_cast<size_t>(v)]);
      }
  }
}

TEST_CASE("metric closure satisfies the triangle inequality") {
  Rng rng(77);
  for (int iter = 0; iter < 40; ++iter) {
    const int n = rng.irange(2, 8);
    const CostMatrix m = build_metric_closure(testutil::random_graph(rng, n, 50, 20));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          if (m.reachable(a, b) && m.reachable(b, c))
            CHECK(m(a, c) <= m(a, b) + m(b, c));
  }
}

TEST_CASE("two-cost frontier, hand example") {
  // two routes 0->2: direct (cost 10, len 1) and via 1 (cost 4, len 4)
  std::vector<EdgeSpec> edges(3);
  edges[0] = EdgeSpec{0, 2, 10, 1, 1, 0};
  edges[1] = EdgeSpec{0, 1, 2, 2, 1, 0};
  edges[2] = EdgeSpec{1, 2, 2, 2, 1, 0};
  const DirectedGraph g = DirectedGraph::make(3, edges);
  const TwoCostClosure tc = build_two_cost_closure(g, 6);
  const auto& fr = tc.frontier(0, 2);
  REQUIRE(fr.size() == 2);
  CHECK(fr[0].cost == 4);
  CHECK(fr[0].length == 4);
  CHECK(fr[0].true_length == 4);
  CHECK(fr[1].cost == 10);
  CHECK(fr[1].length == 1);
  CHECK(tc.min_cost(0, 2) == 4);
  CHECK(tc.min_cost_matrix()(0, 2) == 4);
  REQUIRE(tc.frontier(1, 1).size() == 1);
  CHECK(tc.frontier(1, 1)[0].cost == 0);
  CHECK(tc.frontier(1, 0).empty());
}

TEST_CASE("two-cost frontier matches exhaustive path enumeration") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Rng rng(seed * 31 + 5);
    const int n = rng.irange(2, 5);
    const Length l_max = rng.range(2, 10);
    const DirectedGraph g = testutil::random_two_cost_graph(rng, n, rng.irange(30, 90), 9, 4);
    const TwoCostClosure tc = build_two_cost_closure(g, l_max);
    for (Vertex u = 0; u < n; ++u)
      for (Vertex v = 0; v < n; ++v) {
        const auto expect = reference_frontier(g, u, v, l_max);
        const auto& got = tc.frontier(u, v);
        CAPTURE(seed);
        CAPTURE(u);
        CAPTURE(v);
        REQUIRE(got.size() == expect.size());
        for (size_t i = 0; i < expect.size(); ++i) {
          CHECK(got[i].cost == expect[i].cost);
          CHECK(got[i].length == expect[i].length);
          CHECK(got[i].true_length == expect[i].true_length);
        }
      }
  }
}

TEST_CASE("achievable-length bitsets cover every simple path") {
  Rng rng(4242);
  for (int iter = 0; iter < 30; ++iter) {
    const int n = rng.irange(2, 5);
    const Length l_max = rng.range(3, 12);
    const DirectedGraph g = testutil::random_two_cost_graph(rng, n, 60, 5, 4);
    TwoCostClosure tc = build_two_cost_closure(g, l_max);
    std::vector<Length> lens;
    for (const EdgeSpec& e : g.edges) lens.push_back(e.length);
    tc.finalize_domains(lens);

    const auto& bits = tc.path_length_bits();
    auto has = [&](const std::vector<std::uint64_t>& bs, Length l) {
      return l <= l_max && ((bs[static_cast<size_t>(l) / 64] >> (static_cast<size_t>(l) % 64)) & 1) != 0;
    };
    CHECK(has(bits, 0));
    std::vector<PathPoint> paths;
    for (Vertex u = 0; u < n; ++u)
      for (Vertex v = 0; v < n; ++v) {
        if (u == v) continue;
        paths.clear();
        collect_paths(g, u, v, l_max, paths);
        for (const PathPoint& p : paths) {
          CHECK(has(bits, p.len));
          // any single path length is a 1-term sum, all pairs are 2-term sums
          CHECK(has(tc.sum_bits(1), p.len));
          for (const PathPoint& q : paths)
            if (p.len + q.len <= l_max) CHECK(has(tc.sum_bits(2), p.len + q.len));
        }
      }
  }
}

TEST_CASE("priority closure per level") {
  std::vector<EdgeSpec> edges(3);
  edges[0] = EdgeSpec{0, 1, 5, 0, 1, 0};
  edges[1] = EdgeSpec{0, 1, 9, 0, 2, 0};
  edges[2] = EdgeSpec{1, 2, 1, 0, 2, 0};
  const DirectedGraph g = DirectedGraph::make(3, edges);
  const PriorityClosure pc = build_priority_closure(g, 2);
  CHECK(pc.at_level(1)(0, 1) == 5);
  CHECK(pc.at_level(2)(0, 1) == 9);
  CHECK(pc.at_level(1)(0, 2) == 6);
  CHECK(pc.at_level(2)(0, 2) == 10);
  CHECK(!pc.at_level(2).reachable(2, 0));
}

TEST_CASE("arborescence bookkeeping and rejection of malformed edge lists") {
  Arborescence t(3);
  t.add_edge(1, TreeEdge{3, 4, 2, 2, 1});
  t.add_edge(0, TreeEdge{1, 2, 1, 1, 2});
  CHECK(t.size() == 3);
  CHECK(t.total_cost() == 6);
  CHECK(t.path_length(0) == 3);
  CHECK(t.path_length(3) == 0);
  CHECK(t.path_min_priority(0, 5) == 1);
  CHECK(t.path_min_priority(3, 5) == 5);

  // duplicate child
  CHECK_THROWS_AS(Arborescence::from_edges(
                      0, {{1, TreeEdge{0, 1, 0, 0, 0}}, {1, TreeEdge{0, 2, 0, 0, 0}}}),
                  std::invalid_argument);
  // cycle, never attaches
  CHECK_THROWS_AS(Arborescence::from_edges(
                      0, {{1, TreeEdge{2, 1, 0, 0, 0}}, {2, TreeEdge{1, 1, 0, 0, 0}}}),
                  std::invalid_argument);
  // in-edge into the root
  CHECK_THROWS_AS(Arborescence::from_edges(0, {{0, TreeEdge{1, 1, 0, 0, 0}}}),
                  std::invalid_argument);
}

TEST_CASE("merge keeps the first tree's edges and reattaches the rest") {
  Arborescence t1(0);
  t1.add_edge(1, TreeEdge{0, 2, 0, 0, 0});
  t1.add_edge(2, TreeEdge{1, 2, 0, 0, 0});
  Arborescence t2(1);
  t2.add_edge(2, TreeEdge{1, 9, 0, 0, 0});  // duplicate vertex, t1 wins
  t2.add_edge(3, TreeEdge{2, 1, 0, 0, 0});  // new vertex under the duplicate

  const Arborescence m = merge_and_prune(t1, t2);
  CHECK(m.root() == 0);
  CHECK(m.size() == 4);
  CHECK(m.in_edge(2)->cost == 2);
  CHECK(m.in_edge(3)->parent == 2);
  CHECK(m.total_cost() == 5);

  Arborescence stray(5);
  CHECK_THROWS_AS(merge_and_prune(t1, stray), std::invalid_argument);
}

TEST_CASE("min arborescence matches parent-function enumeration") {
  for (std::uint64_t seed = 1; seed <= 80; ++seed) {
    Rng rng(seed * 7 + 1);
    const int n = rng.irange(2, 6);
    const CostMatrix m = build_metric_closure(testutil::random_graph(rng, n, rng.irange(25, 85), 9));
    for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << n); ++bits) {
      const VertexSet w(bits);
      const Vertex root = *w.begin();
      const Cost expect = reference_min_arb_cost(m, root, w);
      const Cost got = min_arborescence_cost(m, root, w);
      CAPTURE(seed);
      CAPTURE(bits);
      CHECK(got == expect);

      const auto tree = min_arborescence(m, root, w);
      if (expect >= kInfeasibleCost) {
        CHECK(!tree.has_value());
      } else {
        REQUIRE(tree.has_value());
        CHECK(tree->vertices() == w);
        CHECK(tree->total_cost() == expect);
      }
    }
  }
}

TEST_CASE("separator sides respect the three-halves accounting, exhaustively") {
  // all rooted trees with increasing labels cover every shape
  for (int n = 2; n <= 8; ++n) {
    std::vector<Vertex> parent(static_cast<size_t>(n), 0);
    auto rec = [&](auto&& self, int v) -> void {
      if (v == n) {
        const Arborescence t = tree_from_parents(parent);
        const SeparatorSplit sp = find_balanced_separator(t);
        CHECK(t.vertices().contains(sp.separator));
        CHECK((sp.side_a | sp.side_b) == t.vertices());
        CHECK((sp.side_a & sp.side_b) == VertexSet::single(sp.separator));
        CHECK(sp.side_a.contains(t.root()));

        const int m = n - 1;
        int i = 0;
        while (three_halves_pow(i) < m) ++i;
        const std::int64_t cap = three_halves_pow(i - 1);
        CAPTURE(n);
        CAPTURE(sp.separator);
        CHECK(sp.side_a.size() - 1 <= cap);
        CHECK(sp.side_b.size() - 1 <= cap);
        return;
      }
      for (int p = 0; p < v; ++p) {
        parent[static_cast<size_t>(v)] = p;
        self(self, v + 1);
      }
    };
    rec(rec, 1);
  }
}
