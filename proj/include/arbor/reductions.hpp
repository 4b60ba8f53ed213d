#pragma once

#include <vector>

#include "arbor/arborescence.hpp"
#include "arbor/closure.hpp"
#include "arbor/engine.hpp"
#include "arbor/graph.hpp"
#include "arbor/reward.hpp"
#include "arbor/types.hpp"

namespace arbor {

// One covering pass at a fixed budget: solve with unit rewards on the
// terminals still outside the forest, merge the tree in, repeat until every
// terminal is covered. ok turns false when an iteration stops gaining
// coverage, i.e. the budget is too small for the greedy step to progress.
struct CoverOutcome {
  bool ok = false;
  Arborescence forest;
  int iterations = 0;
  int depth = 0;
  SolveStats stats;
};

CoverOutcome cover_loop(const CostMatrix& m, Vertex root, VertexSet terminals, Cost budget,
                        SolverConfig cfg = {.engine = Engine::kRgQp});

enum class DriveStatus { kOk, kUnreachableTerminal, kRankUnreachable };

// Result of a covering driver. `tree` is the deduplicated union of the
// iteration trees of the winning budget guess. objective equals cost except
// for buy-at-bulk, where it adds the rent charges (see solve_buy_at_bulk).
struct DriveResult {
  DriveStatus status = DriveStatus::kOk;
  Vertex blocked = -1;  // the offending terminal for kUnreachableTerminal
  Arborescence tree;
  VertexSet served;  // covered targets (priority: terminals served at level)
  Cost cost = 0;
  Cost objective = 0;
  Cost budget = 0;    // winning guess
  int iterations = 0; // cover iterations at the winning guess
  int rounds = 0;     // budget guesses tried
  int depth = 0;
  SolveStats stats;
};

// Min-cost coverage drivers: double the budget guess from 1 until cover_loop
// (or its constrained analog) completes. Any guess at or above the optimal
// cost completes, so the winning guess stays under twice the optimum and the
// forest costs at most iterations * guess. cfg.engine picks the inner
// recursion where the problem allows a choice (plain kinds only; anything
// else falls back to rg-qp); the constrained drivers pin their own kind.
// cfg.k_cap defaults to twice the target count, which is all the closure
// optimum can need.
DriveResult solve_directed_steiner(const CostMatrix& m, Vertex root, VertexSet terminals,
                                   SolverConfig cfg = {.engine = Engine::kRgQp});

// Covers until the forest reaches full matroid rank instead of a terminal
// list. kRankUnreachable when even the reachable vertex set falls short.
DriveResult solve_polymatroid(const CostMatrix& m, Vertex root, const Matroid& matroid,
                              SolverConfig cfg = {.engine = Engine::kRgQp});

// Single-sink-per-terminal buy-at-bulk on a two-cost graph: pay cost once per
// bought edge plus, for each terminal, its path's per-unit rents. Each budget
// guess B scales rents by n^4/B and runs the length-budget recursion with the
// terminals as the charged set. The reported objective charges every bought
// iteration tree and certifies each terminal along its covering iteration's
// path, so it is realizable by the union subgraph even where the merge
// rewired a path.
DriveResult solve_buy_at_bulk(const DirectedGraph& g, Vertex root, VertexSet terminals,
                              SolverConfig cfg = {});

// Priority Steiner: terminal t wants a path of min edge priority >=
// lambda[t]; lambda entries outside `terminals` are ignored. Service is
// certified per iteration tree, and cost charges every iteration tree — the
// union subgraph realizing those paths — while the merged tree is reported
// for structure only (merging may reroute a certified path).
DriveResult solve_priority_steiner(const DirectedGraph& g, int levels, Vertex root,
                                   VertexSet terminals, const std::vector<int>& lambda,
                                   SolverConfig cfg = {});

// Rent scaling for buy-at-bulk: with the exact rational scale B/n^4, edge
// lengths map to floor(l * n^4 / B) and the scaled length budget is n^4.
// Edges with l > B are dropped (no tree within objective B uses one);
// true_length keeps the input rent for de-scaling.
struct ScaledGraph {
  DirectedGraph graph;
  Length length_budget = 0;  // n^4
  Cost scale_num = 0;        // the scale is scale_num / scale_den, exactly
  Length scale_den = 0;
};

ScaledGraph scale_lengths(const DirectedGraph& g, Cost budget);

// Piecewise-linear concave edge costs g(x) (x = flow units), sampled at their
// breakpoints, decompose into the lower envelope of lines y = sigma + rho*x:
// one parallel (cost sigma, length rho) edge each. Throws
// std::invalid_argument unless the samples are nondecreasing and concave with
// nonnegative integral line parameters.
struct SamplePoint {
  Length x = 0;
  Cost y = 0;
};

struct CostLine {
  Cost sigma = 0;
  Length rho = 0;
  bool operator==(const CostLine&) const = default;
};

std::vector<CostLine> concave_to_two_cost(const std::vector<SamplePoint>& samples);

}  // namespace arbor
