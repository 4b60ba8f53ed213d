#include "arbor/reductions.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

#include "arbor/constrained.hpp"

namespace arbor {

namespace {

// The constrained kinds make no sense for a plain covering step.
SolverConfig plain_config(SolverConfig cfg, int target_count) {
  switch (cfg.engine) {
    case Engine::kRg:
    case Engine::kRgQp:
    case Engine::kRgFast:
      break;
    default:
      cfg.engine = Engine::kRgQp;
  }
  if (cfg.k_cap == 0) cfg.k_cap = 2 * target_count;
  return cfg;
}

RewardOracle unit_rewards(int n, VertexSet targets) {
  std::vector<Value> w(static_cast<size_t>(n), 0);
  for (Vertex v : targets) w[static_cast<size_t>(v)] = 1;
  return RewardOracle::linear(std::move(w));
}

void check_targets(int n, Vertex root, VertexSet targets, const char* what) {
  if (root < 0 || root >= n) throw std::invalid_argument(std::string(what) + ": root out of range");
  if ((targets & VertexSet::full(n)) != targets)
    throw std::invalid_argument(std::string(what) + ": terminal out of range");
}

// Doubles the guess until attempt() succeeds. Guesses at or above the optimal
// cost always succeed, so this terminates for any coverable instance.
template <typename Attempt>
void double_budget(DriveResult& res, Attempt&& attempt) {
  for (Cost b = 1;; b *= 2) {
    ++res.rounds;
    if (attempt(b)) {
      res.budget = b;
      return;
    }
    if (b > kMaxBudget / 2) throw std::logic_error("covering search exceeded the budget ceiling");
  }
}

}  // namespace

CoverOutcome cover_loop(const CostMatrix& m, Vertex root, VertexSet terminals, Cost budget,
                        SolverConfig cfg) {
  check_targets(m.n(), root, terminals, "cover_loop");
  if (budget < 0) throw std::invalid_argument("cover_loop: negative budget");
  const VertexSet want = terminals.without(root);
  cfg = plain_config(cfg, std::max(1, want.size()));

  CoverOutcome out;
  out.forest = Arborescence(root);
  const RewardOracle f = unit_rewards(m.n(), want);
  StoEngine eng(m, f, cfg);
  out.depth = eng.depth();
  if (want.empty()) {
    out.ok = true;
    return out;
  }

  VertexSet covered = want & out.forest.vertices();
  while (covered != want) {
    Subproblem sub;
    sub.root = root;
    sub.budget = budget;
    sub.augment = out.forest.vertices();
    sub.depth = eng.depth();
    const Solution s = eng.solve(sub);
    ++out.iterations;
    if (!s.feasible || s.value <= 0) {
      out.stats = eng.stats();
      return out;  // stalled: this budget cannot cover the rest
    }
    out.forest = merge_and_prune(out.forest, s.tree);
    covered = want & out.forest.vertices();
  }
  out.ok = true;
  out.stats = eng.stats();
  return out;
}

DriveResult solve_directed_steiner(const CostMatrix& m, Vertex root, VertexSet terminals,
                                   SolverConfig cfg) {
  check_targets(m.n(), root, terminals, "directed_steiner");
  DriveResult res;
  res.tree = Arborescence(root);
  const VertexSet want = terminals.without(root);
  for (Vertex t : want) {
    if (!m.reachable(root, t)) {
      res.status = DriveStatus::kUnreachableTerminal;
      res.blocked = t;
      return res;
    }
  }
  res.served = terminals & res.tree.vertices();
  cfg = plain_config(cfg, std::max(1, want.size()));
  if (want.empty()) {
    res.depth = cover_loop(m, root, want, 0, cfg).depth;
    return res;
  }

  double_budget(res, [&](Cost b) {
    CoverOutcome c = cover_loop(m, root, want, b, cfg);
    res.stats.absorb(c.stats);
    res.depth = c.depth;
    if (!c.ok) return false;
    res.tree = std::move(c.forest);
    res.iterations = c.iterations;
    res.cost = res.tree.total_cost();
    res.objective = res.cost;
    res.served = terminals & res.tree.vertices();
    return true;
  });
  return res;
}

DriveResult solve_polymatroid(const CostMatrix& m, Vertex root, const Matroid& matroid,
                              SolverConfig cfg) {
  const int n = m.n();
  check_targets(n, root, {}, "polymatroid");
  if (matroid.ground_size() != n)
    throw std::invalid_argument("polymatroid: matroid ground set mismatch");

  DriveResult res;
  res.tree = Arborescence(root);
  VertexSet reach;
  for (Vertex v = 0; v < n; ++v)
    if (m.reachable(root, v)) reach = reach.with(v);
  const int target = matroid.full_rank();
  if (matroid.rank(reach) < target) {
    res.status = DriveStatus::kRankUnreachable;
    return res;
  }

  cfg = plain_config(cfg, std::max(1, target));
  const RewardOracle f = RewardOracle::matroid_rank(matroid);
  StoEngine eng(m, f, cfg);
  res.depth = eng.depth();
  res.served = res.tree.vertices();
  if (matroid.rank(res.tree.vertices()) == target) return res;

  double_budget(res, [&](Cost b) {
    Arborescence forest(root);
    int iters = 0;
    int have = matroid.rank(forest.vertices());
    while (have < target) {
      Subproblem sub;
      sub.root = root;
      sub.budget = b;
      sub.augment = forest.vertices();
      sub.depth = eng.depth();
      const Solution s = eng.solve(sub);
      ++iters;
      if (!s.feasible || s.value <= 0) return false;
      forest = merge_and_prune(forest, s.tree);
      have = matroid.rank(forest.vertices());
    }
    res.tree = std::move(forest);
    res.iterations = iters;
    res.cost = res.tree.total_cost();
    res.objective = res.cost;
    res.served = res.tree.vertices();
    return true;
  });
  res.stats = eng.stats();
  return res;
}

ScaledGraph scale_lengths(const DirectedGraph& g, Cost budget) {
  if (budget <= 0) throw std::invalid_argument("scale_lengths: budget must be positive");
  Length n4 = 1;
  for (int j = 0; j < 4; ++j) n4 *= g.n;

  ScaledGraph out;
  out.length_budget = n4;
  out.scale_num = budget;
  out.scale_den = n4;
  std::vector<EdgeSpec> edges;
  edges.reserve(g.edges.size());
  for (EdgeSpec e : g.edges) {
    if (e.length > budget) continue;
    e.true_length = e.length;
    e.length = static_cast<Length>(static_cast<__int128>(e.length) * n4 / budget);
    edges.push_back(e);
  }
  out.graph = DirectedGraph::make(g.n, std::move(edges));
  return out;
}

DriveResult solve_buy_at_bulk(const DirectedGraph& g, Vertex root, VertexSet terminals,
                              SolverConfig cfg) {
  check_targets(g.n, root, terminals, "buy_at_bulk");
  DriveResult res;
  res.tree = Arborescence(root);
  const CostMatrix plain = build_metric_closure(g);
  const VertexSet want = terminals.without(root);
  for (Vertex t : want) {
    if (!plain.reachable(root, t)) {
      res.status = DriveStatus::kUnreachableTerminal;
      res.blocked = t;
      return res;
    }
  }
  res.served = terminals & res.tree.vertices();
  cfg.engine = Engine::kRgDc;
  cfg.budget_values = true;  // unit rewards leave a tiny value grid to probe
  if (cfg.k_cap == 0) cfg.k_cap = 2 * std::max(1, want.size());
  const RewardOracle f = unit_rewards(g.n, want);
  if (want.empty()) {
    res.depth = cfg.depth > 0
                    ? cfg.depth
                    : StoEngine::default_depth(g.n, std::min(cfg.k_cap, std::max(1, g.n - 1)));
    return res;
  }

  double_budget(res, [&](Cost b) {
    const ScaledGraph scaled = scale_lengths(g, b);
    const TwoCostClosure tc = build_two_cost_closure(scaled.graph, scaled.length_budget);
    ConstrainedEngine eng(tc, f, cfg);
    res.depth = eng.depth();

    Arborescence forest(root);
    VertexSet covered = want & forest.vertices();
    int iters = 0;
    Cost bought = 0;  // sum of iteration tree costs
    Cost rent = 0;    // true path rents of each terminal's covering iteration
    while (covered != want) {
      ConstrainedSubproblem sub;
      sub.root = root;
      sub.budget = b;
      sub.length_budget = scaled.length_budget;
      sub.charged = terminals;
      sub.augment = forest.vertices();
      sub.depth = eng.depth();
      const Solution s = eng.solve(sub);
      ++iters;
      if (!s.feasible || s.value <= 0) {
        res.stats.absorb(eng.stats());
        return false;
      }
      bought += s.tree.total_cost();
      for (Vertex t : (want & s.tree.vertices()) - covered) rent += s.tree.path_true_length(t);
      forest = merge_and_prune(forest, s.tree);
      covered = want & forest.vertices();
    }
    res.tree = std::move(forest);
    res.iterations = iters;
    res.cost = res.tree.total_cost();
    res.objective = bought + rent;
    res.served = terminals & res.tree.vertices();
    res.stats.absorb(eng.stats());
    return true;
  });
  return res;
}

DriveResult solve_priority_steiner(const DirectedGraph& g, int levels, Vertex root,
                                   VertexSet terminals, const std::vector<int>& lambda,
                                   SolverConfig cfg) {
  check_targets(g.n, root, terminals, "priority_steiner");
  if (levels < 1) throw std::invalid_argument("priority_steiner: levels must be positive");
  if (lambda.size() != static_cast<size_t>(g.n))
    throw std::invalid_argument("priority_steiner: lambda must have one entry per vertex");

  DriveResult res;
  res.tree = Arborescence(root);
  const VertexSet want = terminals.without(root);
  std::vector<int> required(static_cast<size_t>(g.n), 1);
  for (Vertex t : want) {
    if (lambda[static_cast<size_t>(t)] < 1 || lambda[static_cast<size_t>(t)] > levels)
      throw std::invalid_argument("priority_steiner: lambda out of range");
    required[static_cast<size_t>(t)] = lambda[static_cast<size_t>(t)];
  }

  const PriorityClosure pc = build_priority_closure(g, levels);
  for (Vertex t : want) {
    if (!pc.at_level(required[static_cast<size_t>(t)]).reachable(root, t)) {
      res.status = DriveStatus::kUnreachableTerminal;
      res.blocked = t;
      return res;
    }
  }
  res.served = terminals & res.tree.vertices();
  cfg.engine = Engine::kRgPr;
  if (cfg.k_cap == 0) cfg.k_cap = 2 * std::max(1, want.size());
  const RewardOracle f = unit_rewards(g.n, want);
  ConstrainedEngine eng(pc, f, required, cfg);
  res.depth = eng.depth();
  if (want.empty()) return res;

  const PriorityGate gate{&required, kMaxPriority};
  double_budget(res, [&](Cost b) {
    Arborescence forest(root);
    VertexSet served;  // certified by their iteration's tree, not the merge
    int iters = 0;
    Cost bought = 0;
    while (served != want) {
      ConstrainedSubproblem sub;
      sub.root = root;
      sub.budget = b;
      sub.augment = served;
      sub.depth = eng.depth();
      const Solution s = eng.solve(sub);
      ++iters;
      if (!s.feasible || s.value <= 0) return false;
      served = served | (want & gated_set(s.tree, gate));
      bought += s.tree.total_cost();
      forest = merge_and_prune(forest, s.tree);
    }
    res.tree = std::move(forest);
    res.iterations = iters;
    // Merging can reroute a certified path through an older, lower-priority
    // prefix, so service is priced by the union of the iteration trees (which
    // realizes every certified path), not by the merged witness.
    res.cost = bought;
    res.objective = bought;
    res.served = served | (terminals & VertexSet::single(root));
    return true;
  });
  res.stats = eng.stats();
  return res;
}

std::vector<CostLine> concave_to_two_cost(const std::vector<SamplePoint>& samples) {
  if (samples.size() < 2)
    throw std::invalid_argument("concave_to_two_cost: need at least two samples");
  if (samples.front().x < 0 || samples.front().y < 0)
    throw std::invalid_argument("concave_to_two_cost: negative sample");

  std::vector<CostLine> lines;
  Length prev_rho = 0;
  for (size_t j = 0; j + 1 < samples.size(); ++j) {
    const Length dx = samples[j + 1].x - samples[j].x;
    const Cost dy = samples[j + 1].y - samples[j].y;
    if (dx <= 0) throw std::invalid_argument("concave_to_two_cost: x must strictly increase");
    if (dy < 0) throw std::invalid_argument("concave_to_two_cost: samples must be nondecreasing");
    if (dy % dx != 0)
      throw std::invalid_argument("concave_to_two_cost: segment slope is not integral");
    const Length rho = static_cast<Length>(dy / dx);
    if (j > 0 && rho > prev_rho)
      throw std::invalid_argument("concave_to_two_cost: samples are not concave");
    const Cost sigma = samples[j].y - static_cast<Cost>(rho) * samples[j].x;
    if (sigma < 0) throw std::invalid_argument("concave_to_two_cost: negative fixed cost");
    if (lines.empty() || lines.back().rho != rho) lines.push_back({sigma, rho});
    prev_rho = rho;
  }
  return lines;
}

}  // namespace arbor
