#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "arbor/arborescence.hpp"
#include "arbor/closure.hpp"
#include "arbor/constrained.hpp"
#include "arbor/engine.hpp"
#include "arbor/exact.hpp"
#include "arbor/reductions.hpp"
#include "arbor/validate.hpp"
#include "helpers.hpp"

using namespace arbor;
using testutil::Rng;

namespace {

EdgeSpec edge(Vertex u, Vertex v, Cost c, Length l = 0, int p = 1) {
  EdgeSpec e;
  e.u = u;
  e.v = v;
  e.cost = c;
  e.length = l;
  e.priority = p;
  return e;
}

// cost/objective <= 2 d (ln k + 1) OPT, the covering guarantee all drivers
// share. Checked with a small epsilon so the ln never flips a tight case.
bool within_cover_bound(Cost got, int depth, int k, Cost opt) {
  return static_cast<double>(got) <= 2.0 * depth * (std::log(static_cast<double>(k)) + 1.0) *
                                             static_cast<double>(opt) +
                                         1e-6;
}

int ceil_log2(Cost v) {
  int r = 0;
  Cost p = 1;
  while (p < v) {
    p *= 2;
    ++r;
  }
  return r;
}

VertexSet pick_terminals(Rng& rng, int n, int k) {
  VertexSet t;
  while (t.size() < k) t = t.with(rng.irange(1, n - 1));
  return t;
}

bool same_tree(const Arborescence& a, const Arborescence& b) { return a == b; }

}  // namespace

TEST_CASE("cover loop spans a star, one pass when the budget allows it") {
  std::vector<EdgeSpec> edges;
  for (Vertex t = 1; t <= 4; ++t) edges.push_back(edge(0, t, 1));
  const CostMatrix m = build_metric_closure(DirectedGraph::make(5, edges));
  const VertexSet terminals = VertexSet::full(5).without(0);

  CoverOutcome all = cover_loop(m, 0, terminals, 4);
  REQUIRE(all.ok);
  CHECK(all.iterations == 1);
  CHECK(all.forest.total_cost() == 4);
  CHECK(terminals.subset_of(all.forest.vertices()));
  CHECK(!check_metric(m, all.forest, 4, terminals).has_value());

  // Budget 1 only ever pays for one leaf, so coverage arrives a vertex at a
  // time; the merged forest still ends up being the full star.
  CoverOutcome slow = cover_loop(m, 0, terminals, 1);
  REQUIRE(slow.ok);
  CHECK(slow.iterations == 4);
  CHECK(slow.forest.total_cost() == 4);

  CoverOutcome broke = cover_loop(m, 0, terminals, 0);
  CHECK(!broke.ok);
  CHECK(broke.iterations == 1);

  CoverOutcome trivial = cover_loop(m, 0, {}, 0);
  CHECK(trivial.ok);
  CHECK(trivial.iterations == 0);
}

TEST_CASE("cover loop rejects malformed calls") {
  const CostMatrix m = build_metric_closure(DirectedGraph::make(3, {edge(0, 1, 1)}));
  CHECK_THROWS_AS(cover_loop(m, 3, {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(cover_loop(m, -1, {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(cover_loop(m, 0, VertexSet::single(5), 1), std::invalid_argument);
  CHECK_THROWS_AS(cover_loop(m, 0, VertexSet::single(1), -1), std::invalid_argument);
}

TEST_CASE("directed steiner takes the shortest path to a single terminal") {
  const DirectedGraph g =
      DirectedGraph::make(3, {edge(0, 1, 10), edge(1, 2, 1), edge(0, 2, 12)});
  const CostMatrix m = build_metric_closure(g);
  REQUIRE(m(0, 2) == 11);

  const DriveResult res = solve_directed_steiner(m, 0, VertexSet::single(2));
  REQUIRE(res.status == DriveStatus::kOk);
  CHECK(res.cost == 11);
  CHECK(res.objective == 11);
  CHECK(res.iterations == 1);
  CHECK(res.tree.contains(2));
  CHECK(res.served == VertexSet::single(2));
  CHECK(!check_metric(m, res.tree, res.cost, VertexSet::single(2)).has_value());
  CHECK(res.rounds <= ceil_log2(11) + 1);
}

TEST_CASE("directed steiner can share a prefix between terminals") {
  // Both terminals sit behind the same cost-10 gateway; direct routes cost 12
  // each. The optimum buys the gateway once.
  const DirectedGraph g = DirectedGraph::make(
      4, {edge(0, 1, 10), edge(1, 2, 1), edge(1, 3, 1), edge(0, 2, 12), edge(0, 3, 12)});
  const CostMatrix m = build_metric_closure(g);
  const VertexSet terminals = VertexSet::single(2) | VertexSet::single(3);

  const OracleResult opt = brute_force_min_cover(
      m, 0, [&](VertexSet s) { return terminals.subset_of(s); });
  REQUIRE(!opt.too_large);
  REQUIRE(opt.feasible);
  CHECK(opt.cost == 12);

  const DriveResult res = solve_directed_steiner(m, 0, terminals);
  REQUIRE(res.status == DriveStatus::kOk);
  CHECK(terminals.subset_of(res.tree.vertices()));
  CHECK(res.cost >= opt.cost);
  CHECK(within_cover_bound(res.cost, res.depth, 2, opt.cost));
  CHECK(!check_metric(m, res.tree, res.cost, terminals).has_value());
}

TEST_CASE("unreachable terminals are reported by name") {
  const CostMatrix m = build_metric_closure(DirectedGraph::make(3, {edge(0, 1, 1)}));
  const DriveResult res = solve_directed_steiner(m, 0, VertexSet::single(1).with(2));
  CHECK(res.status == DriveStatus::kUnreachableTerminal);
  CHECK(res.blocked == 2);

  const DirectedGraph g = DirectedGraph::make(3, {edge(0, 1, 1, 2)});
  const DriveResult bab = solve_buy_at_bulk(g, 0, VertexSet::single(2));
  CHECK(bab.status == DriveStatus::kUnreachableTerminal);
  CHECK(bab.blocked == 2);

  // Vertex 2 is reachable, but not at priority 2.
  const DirectedGraph pg = DirectedGraph::make(3, {edge(0, 1, 1, 0, 2), edge(1, 2, 1, 0, 1)});
  const std::vector<int> lambda{1, 1, 2};
  const DriveResult pr = solve_priority_steiner(pg, 2, 0, VertexSet::single(2), lambda);
  CHECK(pr.status == DriveStatus::kUnreachableTerminal);
  CHECK(pr.blocked == 2);
}

TEST_CASE("random steiner instances stay within the covering bound") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    CAPTURE(seed);
    Rng rng(seed * 977 + 11);
    const int n = rng.irange(3, 7);
    const DirectedGraph g = testutil::random_graph(rng, n, 60, 9);
    const CostMatrix m = build_metric_closure(g);
    const VertexSet terminals = pick_terminals(rng, n, rng.irange(1, std::min(3, n - 1)));
    const int k = terminals.size();

    const OracleResult opt = brute_force_min_cover(
        m, 0, [&](VertexSet s) { return terminals.subset_of(s); });
    REQUIRE(!opt.too_large);

    const DriveResult res = solve_directed_steiner(m, 0, terminals);
    if (!opt.feasible) {
      CHECK(res.status == DriveStatus::kUnreachableTerminal);
      continue;
    }
    ++checked;
    REQUIRE(res.status == DriveStatus::kOk);
    CHECK(terminals.subset_of(res.tree.vertices()));
    CHECK(res.served == terminals);
    CHECK(res.cost >= opt.cost);
    CHECK(within_cover_bound(res.cost, res.depth, k, opt.cost));
    CHECK(!check_metric(m, res.tree, res.cost, terminals).has_value());

    // Doubling rounds: the first power of two at or above OPT must succeed,
    // and the sum of raw edge costs bounds OPT from above.
    CHECK(res.rounds <= ceil_log2(std::max<Cost>(opt.cost, 1)) + 1);
    Cost total_cost = 0;
    for (const EdgeSpec& e : g.edges) total_cost += e.cost;
    CHECK(res.rounds <= ceil_log2(std::max<Cost>(total_cost, 1)) + 1);

    // A correct guess makes the greedy cover within the logarithmic bound.
    for (const Cost guess : {opt.cost, opt.cost + 3}) {
      CAPTURE(guess);
      const CoverOutcome cov = cover_loop(m, 0, terminals, guess);
      REQUIRE(cov.ok);
      CHECK(cov.iterations <=
            static_cast<int>(std::ceil(cov.depth * std::log(static_cast<double>(k)) + 1e-9)) + 1);
      CHECK(cov.forest.total_cost() <= static_cast<Cost>(cov.iterations) * guess);
      CHECK(!check_metric(m, cov.forest, static_cast<Cost>(cov.iterations) * guess, terminals)
                 .has_value());
    }
  }
  CHECK(checked >= 25);
}

TEST_CASE("polymatroid driver: rank one is free at the root, parts must be bought") {
  const DirectedGraph g = DirectedGraph::make(3, {edge(0, 1, 2), edge(1, 2, 3)});
  const CostMatrix m = build_metric_closure(g);

  // The root alone already carries uniform rank 1.
  const DriveResult free = solve_polymatroid(m, 0, Matroid::uniform(3, 1));
  REQUIRE(free.status == DriveStatus::kOk);
  CHECK(free.cost == 0);
  CHECK(free.iterations == 0);
  CHECK(free.tree.size() == 1);

  // A part excluding the root forces a real purchase: the closure distance.
  const DriveResult bought =
      solve_polymatroid(m, 0, Matroid::partition(3, {{VertexSet::single(2), 1}}));
  REQUIRE(bought.status == DriveStatus::kOk);
  CHECK(bought.cost == 5);
  CHECK(bought.tree.contains(2));

  const DriveResult stuck =
      solve_polymatroid(m, 2, Matroid::partition(3, {{VertexSet::single(1), 1}}));
  CHECK(stuck.status == DriveStatus::kRankUnreachable);

  CHECK_THROWS_AS(solve_polymatroid(m, 0, Matroid::uniform(4, 1)), std::invalid_argument);
}

TEST_CASE("per-terminal partition quotas reduce to directed steiner") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    CAPTURE(seed);
    Rng rng(seed * 131 + 7);
    const int n = rng.irange(3, 6);
    const CostMatrix m = build_metric_closure(testutil::random_graph(rng, n, 70, 9));
    const VertexSet terminals = pick_terminals(rng, n, rng.irange(1, std::min(3, n - 1)));
    const int k = terminals.size();

    const OracleResult opt = brute_force_min_cover(
        m, 0, [&](VertexSet s) { return terminals.subset_of(s); });
    REQUIRE(!opt.too_large);
    if (!opt.feasible) continue;

    std::vector<std::pair<VertexSet, int>> parts;
    for (Vertex t : terminals) parts.emplace_back(VertexSet::single(t), 1);
    const Matroid matroid = Matroid::partition(n, parts);

    const DriveResult via_rank = solve_polymatroid(m, 0, matroid);
    const DriveResult via_cover = solve_directed_steiner(m, 0, terminals);
    REQUIRE(via_rank.status == DriveStatus::kOk);
    REQUIRE(via_cover.status == DriveStatus::kOk);
    CHECK(terminals.subset_of(via_rank.tree.vertices()));
    CHECK(via_rank.cost >= opt.cost);
    CHECK(within_cover_bound(via_rank.cost, via_rank.depth, k, opt.cost));
    CHECK(within_cover_bound(via_cover.cost, via_cover.depth, k, opt.cost));
  }
}

TEST_CASE("graphic matroid on a cycle needs all but one element") {
  // Elements 1..4 map to the edges of a 4-cycle; any three span it.
  const DirectedGraph g = DirectedGraph::make(
      5, {edge(0, 1, 2), edge(0, 2, 3), edge(0, 3, 4), edge(0, 4, 5)});
  const CostMatrix m = build_metric_closure(g);
  const Matroid cycle =
      Matroid::graphic(5, 4, {{0, 0}, {0, 1}, {1, 2}, {2, 3}, {3, 0}});
  REQUIRE(cycle.full_rank() == 3);

  const OracleResult opt =
      brute_force_min_cover(m, 0, [&](VertexSet s) { return cycle.rank(s) == 3; });
  REQUIRE(opt.feasible);
  CHECK(opt.cost == 9);  // cheapest three spokes: 2 + 3 + 4

  const DriveResult res = solve_polymatroid(m, 0, cycle);
  REQUIRE(res.status == DriveStatus::kOk);
  CHECK(cycle.rank(res.tree.vertices()) == 3);
  CHECK(res.cost >= opt.cost);
  CHECK(within_cover_bound(res.cost, res.depth, 3, opt.cost));
  CHECK(!check_metric(m, res.tree, res.cost, {}).has_value());
}

TEST_CASE("random polymatroid instances stay within the covering bound") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    CAPTURE(seed);
    Rng rng(seed * 389 + 3);
    const int n = rng.irange(3, 6);
    const CostMatrix m = build_metric_closure(testutil::random_graph(rng, n, 70, 9));
    const Matroid matroid = Matroid::uniform(n, rng.irange(1, n - 1));
    const int k = matroid.full_rank();

    VertexSet reach;
    for (Vertex v = 0; v < n; ++v)
      if (m.reachable(0, v)) reach = reach.with(v);

    const DriveResult res = solve_polymatroid(m, 0, matroid);
    if (matroid.rank(reach) < k) {
      CHECK(res.status == DriveStatus::kRankUnreachable);
      continue;
    }
    ++checked;
    REQUIRE(res.status == DriveStatus::kOk);
    CHECK(matroid.rank(res.tree.vertices()) == k);

    const OracleResult opt =
        brute_force_min_cover(m, 0, [&](VertexSet s) { return matroid.rank(s) == k; });
    REQUIRE(!opt.too_large);
    REQUIRE(opt.feasible);
    CHECK(res.cost >= opt.cost);
    CHECK(within_cover_bound(res.cost, res.depth, k, opt.cost));
    CHECK(!check_metric(m, res.tree, res.cost, {}).has_value());
  }
  CHECK(checked >= 15);
}

TEST_CASE("length scaling arithmetic is exact") {
  std::vector<EdgeSpec> edges{edge(0, 1, 1, 0),     edge(1, 2, 1, 5),
                              edge(2, 3, 1, 7),     edge(3, 4, 1, 10000),
                              edge(4, 5, 1, 10001), edge(5, 6, 1, 20000)};
  const DirectedGraph g = DirectedGraph::make(10, edges);

  // Unit scale: n^4 equals the budget, so lengths pass through untouched.
  const ScaledGraph unit = scale_lengths(g, 10'000);
  CHECK(unit.scale_num == 10'000);
  CHECK(unit.scale_den == 10'000);
  CHECK(unit.length_budget == 10'000);
  REQUIRE(unit.graph.edges.size() == 4);  // 10001 and 20000 exceed the budget
  for (size_t j = 0; j < unit.graph.edges.size(); ++j) {
    CHECK(unit.graph.edges[j].length == edges[j].length);
    CHECK(unit.graph.edges[j].true_length == edges[j].length);
  }

  // Scale 2: lengths halve, rounding down.
  const ScaledGraph half = scale_lengths(g, 20'000);
  REQUIRE(half.graph.edges.size() == 6);
  CHECK(half.graph.edges[1].length == 2);  // 5 / 2
  CHECK(half.graph.edges[2].length == 3);  // 7 / 2
  CHECK(half.graph.edges[3].length == 5000);
  CHECK(half.graph.edges[5].length == 10000);
  CHECK(half.graph.edges[2].true_length == 7);

  const ScaledGraph tight = scale_lengths(g, 1);
  REQUIRE(tight.graph.edges.size() == 1);  // only the zero-length edge survives
  CHECK(tight.graph.edges[0].length == 0);

  CHECK_THROWS_AS(scale_lengths(g, 0), std::invalid_argument);
}

TEST_CASE("buy-at-bulk pays the fixed cost plus the rent") {
  const DirectedGraph one = DirectedGraph::make(2, {edge(0, 1, 3, 2)});
  const DriveResult single = solve_buy_at_bulk(one, 0, VertexSet::single(1));
  REQUIRE(single.status == DriveStatus::kOk);
  CHECK(single.objective == 5);
  CHECK(single.cost == 3);
  CHECK(single.iterations == 1);
  CHECK(single.served == VertexSet::single(1));

  // Free-but-long versus pricey-but-short: renting 10 units loses to 6+1.
  const DirectedGraph two = DirectedGraph::make(2, {edge(0, 1, 0, 10), edge(0, 1, 6, 1)});
  const OracleResult opt = brute_force_buy_at_bulk(2, two.edges, 0, VertexSet::single(1));
  REQUIRE(opt.feasible);
  CHECK(opt.cost == 7);
  const DriveResult both = solve_buy_at_bulk(two, 0, VertexSet::single(1));
  REQUIRE(both.status == DriveStatus::kOk);
  CHECK(both.objective == 7);
}

TEST_CASE("random buy-at-bulk instances stay within the covering bound") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    CAPTURE(seed);
    Rng rng(seed * 523 + 19);
    // n stays at 4: the scaled length budget n^4 drives the rg-dc frame count,
    // so this suite grows quartically with n.
    const int n = rng.irange(2, 4);
    const DirectedGraph g = testutil::random_two_cost_graph(rng, n, 70, 9, 5);
    const VertexSet terminals = pick_terminals(rng, n, rng.irange(1, std::min(2, n - 1)));
    const int k = terminals.size();

    const OracleResult opt = brute_force_buy_at_bulk(n, g.edges, 0, terminals);
    REQUIRE(!opt.too_large);

    const DriveResult res = solve_buy_at_bulk(g, 0, terminals);
    if (!opt.feasible) {
      CHECK(res.status == DriveStatus::kUnreachableTerminal);
      continue;
    }
    ++checked;
    REQUIRE(res.status == DriveStatus::kOk);
    CHECK(res.served == terminals);
    CHECK(res.objective >= opt.cost);
    // The guarantee takes the extra (1 + 1/n^2) from rounding the rents.
    const double slack = 1.0 + 1.0 / (static_cast<double>(n) * n);
    CHECK(static_cast<double>(res.objective) <=
          2.0 * res.depth * (std::log(static_cast<double>(k)) + 1.0) * slack *
                  static_cast<double>(opt.cost) +
              1e-6);

    // The winning guess's scaled instance certifies every accepted tree:
    // de-scaled rents stay within B(1 + 1/n^2).
    const ScaledGraph scaled = scale_lengths(g, res.budget);
    const TwoCostClosure tc = build_two_cost_closure(scaled.graph, scaled.length_budget);
    CHECK(!check_two_cost(tc, res.tree, res.cost, terminals, 0, -1).has_value());
    SolverConfig cfg;
    cfg.engine = Engine::kRgDc;
    cfg.k_cap = 2 * k;
    std::vector<Value> w(static_cast<size_t>(n), 0);
    for (Vertex t : terminals) w[static_cast<size_t>(t)] = 1;
    const RewardOracle f = RewardOracle::linear(w);
    ConstrainedEngine eng(tc, f, cfg);
    ConstrainedSubproblem sub;
    sub.budget = res.budget;
    sub.length_budget = scaled.length_budget;
    sub.charged = terminals;
    sub.depth = eng.depth();
    const Solution shot = eng.solve(sub);
    if (shot.feasible) {
      Length rent = 0;
      for (Vertex t : terminals & shot.tree.vertices()) rent += shot.tree.path_true_length(t);
      const Length nsq = static_cast<Length>(n) * n;
      CHECK(rent * nsq <= res.budget * (nsq + 1));
    }
  }
  CHECK(checked >= 15);
}

TEST_CASE("buy-at-bulk shares a trunk when rents are cheap behind it") {
  // Two terminals, each reachable directly (free but rent 5) or through a
  // shared trunk (buy 6, then rent 1 each): 6 + 1 + 1 beats 5 + 5.
  const DirectedGraph g = DirectedGraph::make(
      5, {edge(0, 1, 6, 0), edge(1, 3, 0, 1), edge(1, 4, 0, 1), edge(0, 3, 0, 5),
          edge(0, 4, 0, 5)});
  const VertexSet terminals = VertexSet::single(3).with(4);

  const OracleResult opt = brute_force_buy_at_bulk(5, g.edges, 0, terminals);
  REQUIRE(opt.feasible);
  CHECK(opt.cost == 8);

  const DriveResult res = solve_buy_at_bulk(g, 0, terminals);
  REQUIRE(res.status == DriveStatus::kOk);
  CHECK(res.served == terminals);
  CHECK(res.objective >= 8);
  const double slack = 1.0 + 1.0 / 25.0;
  CHECK(static_cast<double>(res.objective) <=
        2.0 * res.depth * (std::log(2.0) + 1.0) * slack * 8.0 + 1e-6);
}

TEST_CASE("priority steiner buys the level the terminal demands") {
  const DirectedGraph only_high = DirectedGraph::make(2, {edge(0, 1, 4, 0, 2)});
  const std::vector<int> wants_two{1, 2};
  const DriveResult high = solve_priority_steiner(only_high, 2, 0, VertexSet::single(1), wants_two);
  REQUIRE(high.status == DriveStatus::kOk);
  CHECK(high.cost == 4);
  CHECK(high.served == VertexSet::single(1));

  // A level-1 terminal should take the cheap route even when a high-priority
  // one exists.
  const DirectedGraph pick = DirectedGraph::make(2, {edge(0, 1, 1, 0, 1), edge(0, 1, 9, 0, 2)});
  const std::vector<int> wants_one{1, 1};
  const DriveResult cheap = solve_priority_steiner(pick, 2, 0, VertexSet::single(1), wants_one);
  REQUIRE(cheap.status == DriveStatus::kOk);
  CHECK(cheap.cost == 1);
}

TEST_CASE("random priority steiner instances stay within the covering bound") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    CAPTURE(seed);
    Rng rng(seed * 241 + 5);
    const int n = rng.irange(3, 6);
    const int levels = 2;
    const DirectedGraph g = testutil::random_priority_graph(rng, n, 70, 9, levels);
    const PriorityClosure pc = build_priority_closure(g, levels);
    const VertexSet terminals = pick_terminals(rng, n, rng.irange(1, std::min(3, n - 1)));
    const int k = terminals.size();

    std::vector<int> lambda(static_cast<size_t>(n), 1);
    std::vector<int> needed(static_cast<size_t>(n), 0);
    for (Vertex t : terminals) {
      lambda[static_cast<size_t>(t)] = rng.irange(1, levels);
      needed[static_cast<size_t>(t)] = lambda[static_cast<size_t>(t)];
    }

    const OracleResult opt = brute_force_min_priority_cover(pc, 0, needed);
    REQUIRE(!opt.too_large);

    const DriveResult res = solve_priority_steiner(g, levels, 0, terminals, lambda);
    if (!opt.feasible) {
      CHECK(res.status == DriveStatus::kUnreachableTerminal);
      continue;
    }
    ++checked;
    REQUIRE(res.status == DriveStatus::kOk);
    CHECK(res.served == terminals);
    CHECK(within_cover_bound(res.cost, res.depth, k, opt.cost));
    CHECK(res.tree.total_cost() <= res.cost);  // merged witness never costs more
    CHECK(!check_priority(pc, res.tree, res.cost, {}).has_value());
    CHECK(res.rounds <= ceil_log2(std::max<Cost>(opt.cost, 1)) + 1);
  }
  CHECK(checked >= 20);
}

TEST_CASE("concave cost curves decompose into their segment lines") {
  // g(x) = 3x: one line through the origin.
  const std::vector<CostLine> linear = concave_to_two_cost({{0, 0}, {1, 3}, {2, 6}});
  REQUIRE(linear.size() == 1);
  CHECK(linear[0] == CostLine{0, 3});

  // g(x) = min(3x, x + 4), sampled across its breakpoint at x = 2.
  const std::vector<CostLine> kink = concave_to_two_cost({{0, 0}, {2, 6}, {4, 8}, {6, 10}});
  REQUIRE(kink.size() == 2);
  CHECK(kink[0] == CostLine{0, 3});
  CHECK(kink[1] == CostLine{4, 1});

  CHECK_THROWS_AS(concave_to_two_cost({{0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(concave_to_two_cost({{0, 0}, {1, 1}, {2, 4}}), std::invalid_argument);
  CHECK_THROWS_AS(concave_to_two_cost({{0, 3}, {1, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(concave_to_two_cost({{0, 0}, {2, 3}}), std::invalid_argument);
  CHECK_THROWS_AS(concave_to_two_cost({{1, 1}, {1, 2}}), std::invalid_argument);
}

TEST_CASE("emitted lines reproduce the sampled envelope pointwise") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CAPTURE(seed);
    Rng rng(seed * 61 + 13);
    // Build a concave nondecreasing piecewise-linear g segment by segment.
    std::vector<SamplePoint> samples{{0, rng.range(0, 3)}};
    Length slope = rng.range(3, 6);
    const int segments = rng.irange(1, 4);
    for (int j = 0; j < segments; ++j) {
      const Length dx = rng.range(1, 3);
      samples.push_back({samples.back().x + dx, samples.back().y + slope * dx});
      slope = rng.range(0, slope);
    }

    const std::vector<CostLine> lines = concave_to_two_cost(samples);
    REQUIRE(!lines.empty());
    for (const SamplePoint& p : samples) {
      Cost best = lines[0].sigma + static_cast<Cost>(lines[0].rho) * p.x;
      for (const CostLine& ln : lines)
        best = std::min(best, ln.sigma + static_cast<Cost>(ln.rho) * p.x);
      CHECK(best == p.y);
    }
  }
}

TEST_CASE("concave lines feed buy-at-bulk as parallel edges") {
  // One capacity curve g(x) = min(3x, x + 4) on the only arc; a single
  // terminal draws one unit, so the best line at x = 1 wins: 3.
  std::vector<EdgeSpec> edges;
  for (const CostLine& ln : concave_to_two_cost({{0, 0}, {2, 6}, {4, 8}, {6, 10}}))
    edges.push_back(edge(0, 1, ln.sigma, ln.rho));
  const DirectedGraph g = DirectedGraph::make(2, edges);
  const DriveResult res = solve_buy_at_bulk(g, 0, VertexSet::single(1));
  REQUIRE(res.status == DriveStatus::kOk);
  CHECK(res.objective == 3);
}

TEST_CASE("drivers reject malformed input") {
  const DirectedGraph g = DirectedGraph::make(3, {edge(0, 1, 1), edge(1, 2, 1)});
  const CostMatrix m = build_metric_closure(g);
  CHECK_THROWS_AS(solve_directed_steiner(m, 7, {}), std::invalid_argument);
  CHECK_THROWS_AS(solve_buy_at_bulk(g, 0, VertexSet::single(4)), std::invalid_argument);
  const std::vector<int> short_lambda{1, 1};
  CHECK_THROWS_AS(solve_priority_steiner(g, 2, 0, VertexSet::single(2), short_lambda),
                  std::invalid_argument);
  const std::vector<int> high_lambda{1, 1, 5};
  CHECK_THROWS_AS(solve_priority_steiner(g, 2, 0, VertexSet::single(2), high_lambda),
                  std::invalid_argument);
  const std::vector<int> fine_lambda{1, 1, 1};
  CHECK_THROWS_AS(solve_priority_steiner(g, 0, 0, VertexSet::single(2), fine_lambda),
                  std::invalid_argument);
}

TEST_CASE("drivers are deterministic, workers included") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    CAPTURE(seed);
    Rng rng(seed * 71 + 29);
    const int n = rng.irange(3, 6);
    const CostMatrix m = build_metric_closure(testutil::random_graph(rng, n, 70, 9));
    const VertexSet terminals = pick_terminals(rng, n, 2);

    const DriveResult a = solve_directed_steiner(m, 0, terminals);
    const DriveResult b = solve_directed_steiner(m, 0, terminals);
    SolverConfig wide;
    wide.engine = Engine::kRgQp;
    wide.workers = 3;
    const DriveResult c = solve_directed_steiner(m, 0, terminals, wide);
    CHECK(a.status == b.status);
    CHECK(a.status == c.status);
    if (a.status != DriveStatus::kOk) continue;
    CHECK(a.cost == b.cost);
    CHECK(a.cost == c.cost);
    CHECK(a.iterations == c.iterations);
    CHECK(a.rounds == c.rounds);
    CHECK(same_tree(a.tree, b.tree));
    CHECK(same_tree(a.tree, c.tree));
  }
}
