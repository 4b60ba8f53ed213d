#pragma once

#include <functional>
#include <vector>

#include "arbor/arborescence.hpp"
#include "arbor/closure.hpp"
#include "arbor/graph.hpp"
#include "arbor/reward.hpp"
#include "arbor/types.hpp"

namespace arbor {

// Enumeration limits for the reference solvers. These oracles exist to check
// the recursion on small instances; they refuse anything bigger instead of
// burning hours.
struct OracleBudget {
  int max_vertices = 8;
  std::uint64_t node_cap = 80'000'000;
  long time_cap_ms = 60'000;  // ARBOR_TIME_CAP_MS overrides when set

  static OracleBudget from_env();
};

struct OracleResult {
  bool too_large = false;  // hit a limit before finishing; other fields invalid
  bool feasible = false;
  Value value = -1;  // max-problems: optimal f value relative to f(empty)
  Cost cost = 0;     // min-problems: optimal objective; max-problems: witness cost
  Arborescence tree;
};

// Exhaustive optimum of the budgeted tree problem: every vertex subset
// containing the root is tested against its min-cost arborescence.
OracleResult brute_force_sto(const CostMatrix& m, const RewardOracle& f, Vertex root,
                             Cost budget, const OracleBudget& ob = {});

// Exhaustive optimum with a bound on the sum of root->vertex path lengths over
// non-root tree vertices. Enumerates tree shapes (parent functions) and, per
// edge, every Pareto point of the two-cost closure.
OracleResult brute_force_length_budget(const TwoCostClosure& tc, const RewardOracle& f,
                                       Vertex root, Cost budget, Length length_budget,
                                       const OracleBudget& ob = {});

// Exhaustive optimum of f(on-time vertices): v counts when its path length is
// at most deadlines[v].
OracleResult brute_force_deadline(const TwoCostClosure& tc, const RewardOracle& f, Vertex root,
                                  Cost budget, const std::vector<Length>& deadlines,
                                  const OracleBudget& ob = {});

// Exhaustive optimum of f(served vertices): v counts when every edge on its
// path has priority >= required[v]. Edges are picked per level from the
// priority closure.
OracleResult brute_force_priority(const PriorityClosure& pc, const RewardOracle& f, Vertex root,
                                  Cost budget, const std::vector<int>& required,
                                  const OracleBudget& ob = {});

// Cheapest arborescence whose vertex set satisfies `done` (e.g. contains all
// terminals, or reaches full matroid rank). feasible=false when no subset does.
OracleResult brute_force_min_cover(const CostMatrix& m, Vertex root,
                                   const std::function<bool(VertexSet)>& done,
                                   const OracleBudget& ob = {});

// Cheapest tree serving every vertex with required[v] >= 1 at its priority.
OracleResult brute_force_min_priority_cover(const PriorityClosure& pc, Vertex root,
                                            const std::vector<int>& required,
                                            const OracleBudget& ob = {});

// Minimum buy-at-bulk objective: sum of buy costs (EdgeSpec::cost) plus, for
// each terminal, the sum of per-unit rents (EdgeSpec::length) on its path.
// Works on the raw multigraph; Steiner vertices are allowed.
OracleResult brute_force_buy_at_bulk(int n, const std::vector<EdgeSpec>& edges, Vertex root,
                                     VertexSet terminals, const OracleBudget& ob = {});

}  // namespace arbor
