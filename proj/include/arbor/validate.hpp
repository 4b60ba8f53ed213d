#pragma once

#include <optional>
#include <string>
#include <vector>

#include "arbor/arborescence.hpp"
#include "arbor/closure.hpp"
#include "arbor/types.hpp"

namespace arbor {

// Post-hoc checks for solver output. Each returns a description of the first
// violation found, or nullopt. These deliberately re-derive everything from
// the edge list instead of trusting Arborescence bookkeeping.

std::optional<std::string> check_structure(const Arborescence& t);

// Structure + edge realizability against the metric (an edge may not claim a
// cost below the closure entry) + budget + required visits.
std::optional<std::string> check_metric(const CostMatrix& m, const Arborescence& t, Cost budget,
                                        VertexSet must_visit);

// Structure + realizability against two-cost frontiers (each edge needs a
// Pareto point with cost <= claimed cost and length <= claimed length) +
// budget + required visits. Optional extras:
//  - caps: entry + path_length(v) <= caps[v] for every tree vertex
//  - length_budget >= 0: sum over non-root vertices of entry + path_length(v)
//    stays within it
std::optional<std::string> check_two_cost(const TwoCostClosure& tc, const Arborescence& t,
                                          Cost budget, VertexSet must_visit, Length entry,
                                          Length length_budget,
                                          const std::vector<Length>* caps = nullptr);

// Structure + per-level realizability (edge of priority q may not undercut the
// level-q closure) + budget + required visits.
std::optional<std::string> check_priority(const PriorityClosure& pc, const Arborescence& t,
                                          Cost budget, VertexSet must_visit);

}  // namespace arbor
