#pragma once

#include <array>
#include <unordered_map>
#include <vector>

#include "arbor/arborescence.hpp"
#include "arbor/closure.hpp"
#include "arbor/engine.hpp"
#include "arbor/reward.hpp"
#include "arbor/types.hpp"

namespace arbor {

// Subproblem for the constrained recursions. `bound` is the table D: a
// root->w length cap (rg-dc, rg-dl) or a path priority floor (rg-pr) for each
// must_visit member; other entries are ignored. entry_length is the length
// already accrued on the way to `root`, entry_priority the minimum priority
// already seen; they shift the length charges / gates of everything below.
struct ConstrainedSubproblem {
  Vertex root = 0;
  Length entry_length = 0;
  int entry_priority = kMaxPriority;
  VertexSet must_visit;          // never contains the root
  std::vector<Length> bound;     // size n whenever must_visit is nonempty
  Cost budget = 0;
  Length length_budget = 0;      // rg-dc: remaining total-length budget
  VertexSet charged = VertexSet::full(kMaxVertices);  // rg-dc: vertices whose
                                                      // arrival length counts
  VertexSet augment;
  int depth = 1;
};

// The constrained recursions: rg-dc bounds the sum of charged arrival
// lengths, rg-dl gates rewards behind per-vertex deadlines, rg-pr gates them
// behind per-vertex priority requirements. One engine instance serves one
// variant; the constructor pins cfg.engine accordingly. Reward oracle,
// closures, deadlines and requirements must outlive the engine (frames are
// memoized against them).
class ConstrainedEngine {
 public:
  // rg-dc over two-cost frontiers.
  ConstrainedEngine(const TwoCostClosure& tc, const RewardOracle& f, SolverConfig cfg);
  // rg-dl: deadline-gated objective; deadlines[v] uses kNoDeadline for "none".
  ConstrainedEngine(const TwoCostClosure& tc, const RewardOracle& f,
                    std::vector<Length> deadlines, SolverConfig cfg);
  // rg-pr: priority-gated objective; required[v] in [1, pc.levels()].
  ConstrainedEngine(const PriorityClosure& pc, const RewardOracle& f,
                    std::vector<int> required, SolverConfig cfg);

  Solution solve(const ConstrainedSubproblem& sub);

  const SolveStats& stats() const { return stats_; }
  int depth() const { return cfg_.depth; }

 private:
  using CapTable = std::array<Length, kMaxVertices>;
  using GuessKey = std::array<std::int64_t, 5>;

  struct CKey {
    std::uint64_t y = 0, x = 0;
    Cost b = 0;
    Length l = 0, kr = 0;  // kr holds p_r for rg-pr
    std::int32_t r = 0, i = 0;
    std::vector<Length> dv;  // D over y, members ascending
    bool operator==(const CKey&) const = default;
  };
  struct CKeyHash {
    size_t operator()(const CKey& k) const;
  };

  void init_shared();
  ConstrainedEngine clone_for_worker(const SolverConfig& cfg) const;
  Solution run_top(const ConstrainedSubproblem& sub, int v_mod, int v_stride, GuessKey* key_out);

  Solution frame_dc(Vertex r, VertexSet y, const CapTable& d, Cost b, Length l, Length kr,
                    VertexSet x, int i, int v_mod, int v_stride, GuessKey* key_out);
  Solution frame_dl(Vertex r, VertexSet y, const CapTable& d, Cost b, Length kr,
                    VertexSet x, int i, int v_mod, int v_stride, GuessKey* key_out);
  Solution frame_pr(Vertex r, VertexSet y, const CapTable& d, Cost b, int pr,
                    VertexSet x, int i, int v_mod, int v_stride, GuessKey* key_out);
  Solution base_dc(Vertex r, VertexSet y, const CapTable& d, Cost b, Length l, Length kr,
                   VertexSet x);
  Solution base_dl(Vertex r, VertexSet y, const CapTable& d, Cost b, Length kr, VertexSet x);
  Solution base_pr(Vertex r, VertexSet y, const CapTable& d, Cost b, int pr, VertexSet x);

  // Merged candidates can stretch paths past what the halves promised when
  // the halves overlap; each frame re-checks its own contract and drops
  // violators.
  bool fits_dc(const Arborescence& t, VertexSet y, const CapTable& d, Length l, Length kr) const;
  bool fits_caps(const Arborescence& t, VertexSet y, const CapTable& d) const;
  bool fits_floors(const Arborescence& t, VertexSet y, const CapTable& d) const;

  Cost lower_bound(Vertex r, VertexSet y);
  Cost min_feasible_dc(Vertex r, VertexSet y, const CapTable& d, Length l, Length kr,
                       VertexSet x, int i, Cost lo, Cost hi);
  Cost min_reaching_dc(Vertex r, VertexSet y, const CapTable& d, Length l, Length kr,
                       VertexSet x, int i, Value u, Cost lo, Cost hi);

  std::int64_t size_cap(int i) const;
  void note_entry(VertexSet y, int i);

  const TwoCostClosure* tc_ = nullptr;
  const PriorityClosure* pc_ = nullptr;
  const RewardOracle& f_;
  SolverConfig cfg_;
  int n_;
  std::vector<Length> deadlines_;  // rg-dl
  std::vector<int> required_;      // rg-pr
  CostMatrix lbm_;                 // cheapest closure, for bounds and reachability
  std::vector<Length> lengths_;    // achievable path lengths, ascending (d1 guesses)
  std::vector<Length> lsums_;      // achievable charged sums, ascending (L1 guesses)
  Cost spend_cap_ = 0;
  Length l_cap_ = 0;
  int top_depth_ = 0;
  VertexSet charged_;
  SolveStats stats_;
  std::unordered_map<CKey, Solution, CKeyHash> memo_;
  std::vector<std::unordered_map<std::uint64_t, Cost>> lb_cache_;
};

}  // namespace arbor
