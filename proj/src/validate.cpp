#include "arbor/validate.hpp"

#include <stdexcept>
#include <unordered_map>

namespace arbor {

namespace {

std::string vdesc(Vertex v) { return std::to_string(v); }

// Recomputed root->v attribute sums, independent of the member functions.
struct Paths {
  std::unordered_map<Vertex, Length> len;
  std::optional<std::string> error;
};

Paths walk_paths(const Arborescence& t) {
  Paths p;
  p.len[t.root()] = 0;
  // repeated passes; a missing parent or cycle never resolves
  size_t settled = 1;
  bool progress = true;
  while (progress && settled < t.edges().size() + 1) {
    progress = false;
    for (const auto& [child, e] : t.edges()) {
      if (p.len.count(child)) continue;
      auto it = p.len.find(e.parent);
      if (it == p.len.end()) continue;
      p.len[child] = it->second + e.length;
      ++settled;
      progress = true;
    }
  }
  if (settled != t.edges().size() + 1) p.error = "edges do not form a tree rooted at " + vdesc(t.root());
  return p;
}

}  // namespace

std::optional<std::string> check_structure(const Arborescence& t) {
  try {
    const Arborescence rebuilt = Arborescence::from_edges(t.root(), t.edges());
    if (!(rebuilt == t)) return "edge list does not round-trip";
  } catch (const std::invalid_argument& e) {
    return std::string(e.what());
  }
  VertexSet seen = VertexSet::single(t.root());
  for (const auto& [child, e] : t.edges()) {
    (void)e;
    seen = seen.with(child);
  }
  if (!(seen == t.vertices())) return "vertex set out of sync with edges";
  const auto paths = walk_paths(t);
  return paths.error;
}

std::optional<std::string> check_metric(const CostMatrix& m, const Arborescence& t, Cost budget,
                                        VertexSet must_visit) {
  if (auto err = check_structure(t)) return err;
  Cost total = 0;
  for (const auto& [child, e] : t.edges()) {
    if (child < 0 || child >= m.n() || e.parent < 0 || e.parent >= m.n())
      return "edge endpoint out of range";
    if (!m.reachable(e.parent, child) || m(e.parent, child) > e.cost)
      return "edge " + vdesc(e.parent) + "->" + vdesc(child) + " claims cost below the metric";
    total += e.cost;
  }
  if (total > budget)
    return "cost " + std::to_string(total) + " exceeds budget " + std::to_string(budget);
  if (!must_visit.subset_of(t.vertices())) return "required vertex missing from the tree";
  return std::nullopt;
}

std::optional<std::string> check_two_cost(const TwoCostClosure& tc, const Arborescence& t,
                                          Cost budget, VertexSet must_visit, Length entry,
                                          Length length_budget, const std::vector<Length>* caps) {
  if (auto err = check_structure(t)) return err;
  Cost total = 0;
  for (const auto& [child, e] : t.edges()) {
    if (child < 0 || child >= tc.n() || e.parent < 0 || e.parent >= tc.n())
      return "edge endpoint out of range";
    bool realizable = false;
    for (const TwoCostEntry& fe : tc.frontier(e.parent, child)) {
      if (fe.cost <= e.cost && fe.length <= e.length) {
        realizable = true;
        break;
      }
    }
    if (!realizable)
      return "edge " + vdesc(e.parent) + "->" + vdesc(child) +
             " is not dominated by any Pareto point";
    total += e.cost;
  }
  if (total > budget)
    return "cost " + std::to_string(total) + " exceeds budget " + std::to_string(budget);
  if (!must_visit.subset_of(t.vertices())) return "required vertex missing from the tree";

  const auto paths = walk_paths(t);
  if (paths.error) return paths.error;
  Length charged = 0;
  for (const auto& [v, l] : paths.len) {
    if (caps && entry + l > (*caps)[static_cast<size_t>(v)])
      return "vertex " + vdesc(v) + " arrives at " + std::to_string(entry + l) +
             " past its cap " + std::to_string((*caps)[static_cast<size_t>(v)]);
    if (v != t.root()) charged += entry + l;
  }
  if (length_budget >= 0 && charged > length_budget)
    return "charged length sum " + std::to_string(charged) + " exceeds " +
           std::to_string(length_budget);
  return std::nullopt;
}

std::optional<std::string> check_priority(const PriorityClosure& pc, const Arborescence& t,
                                          Cost budget, VertexSet must_visit) {
  if (auto err = check_structure(t)) return err;
  Cost total = 0;
  for (const auto& [child, e] : t.edges()) {
    if (child < 0 || child >= pc.n() || e.parent < 0 || e.parent >= pc.n())
      return "edge endpoint out of range";
    if (e.priority < 1 || e.priority > pc.levels())
      return "edge " + vdesc(e.parent) + "->" + vdesc(child) + " has priority " +
             std::to_string(e.priority) + " outside [1, " + std::to_string(pc.levels()) + "]";
    const Cost c = pc.at_level(e.priority)(e.parent, child);
    if (c >= kInfeasibleCost || c > e.cost)
      return "edge " + vdesc(e.parent) + "->" + vdesc(child) +
             " claims cost below the level-" + std::to_string(e.priority) + " closure";
    total += e.cost;
  }
  if (total > budget)
    return "cost " + std::to_string(total) + " exceeds budget " + std::to_string(budget);
  if (!must_visit.subset_of(t.vertices())) return "required vertex missing from the tree";
  return std::nullopt;
}

}  // namespace arbor
