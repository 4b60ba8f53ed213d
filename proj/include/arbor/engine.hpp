#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "arbor/arborescence.hpp"
#include "arbor/closure.hpp"
#include "arbor/reward.hpp"
#include "arbor/types.hpp"

namespace arbor {

inline constexpr Cost kNoBudget = -1;

enum class Engine { kRg, kRgQp, kRgFast, kRgDc, kRgDl, kRgPr };

struct SolverConfig {
  Engine engine = Engine::kRg;
  int depth = 0;       // 0: ceil(log_{3/2} max(2, k_cap))
  int block = 0;       // 0: max(1, floor(epsilon * log2 log2 k_cap)), rg-fast only
  double epsilon = 1.0;
  int k_cap = 0;       // cap on solution size used for the depth default; 0: n-1
  int workers = 1;
  bool budget_values = false;  // rg-dc: binary-search left budgets by value target
  bool debug_checks = false;   // assert the |Y| + i <= d invariant instead of counting
};

struct SolveStats {
  std::uint64_t entries = 0;       // frame entries, memo hits included
  std::uint64_t frames = 0;        // frames actually evaluated
  std::uint64_t memo_hits = 0;
  std::uint64_t invariant_violations = 0;  // |Y| + i > d occurrences

  void absorb(const SolveStats& o) {
    entries += o.entries;
    frames += o.frames;
    memo_hits += o.memo_hits;
    invariant_violations += o.invariant_violations;
  }
};

struct Subproblem {
  Vertex root = 0;
  VertexSet must_visit;  // never contains the root
  Cost budget = 0;
  VertexSet augment;     // rewards already claimed upstream
  int depth = 1;
};

struct Solution {
  bool feasible = false;
  Value value = -1;  // marginal value over the subproblem's augment set
  Cost cost = 0;
  int ungated = 0;   // deadline engine only: vertices past their deadline
  Arborescence tree;

  static Solution none() { return {}; }
};

// Recursion engines over a metric closure. The reward oracle must stay fixed
// for the lifetime of the instance (results are memoized per frame).
class StoEngine {
 public:
  StoEngine(const CostMatrix& metric, const RewardOracle& f, SolverConfig cfg);

  // Dispatches on cfg.engine (kRg, kRgQp or kRgFast).
  Solution solve(const Subproblem& sub);

  // Smallest b in [0, b_max] whose solve value reaches u; kNoBudget if none.
  // Exact because solve values are monotone in the budget.
  Cost min_budget_for_value(Vertex root, VertexSet must_visit, VertexSet augment, int depth,
                            Value u, Cost b_max);

  const SolveStats& stats() const { return stats_; }
  int depth() const { return cfg_.depth; }
  int block() const { return block_; }
  static int default_depth(int n, int k_cap);
  static int default_block(double epsilon, int k_cap);

 private:
  struct FrameKey {
    std::uint64_t y = 0, x = 0;
    Cost b = 0;
    std::int32_t r = 0, i = 0;
    bool operator==(const FrameKey&) const = default;
  };
  struct FrameKeyHash {
    size_t operator()(const FrameKey& k) const {
      std::uint64_t h = k.y * 0x9e3779b97f4a7c15ULL;
      h ^= k.x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h ^= static_cast<std::uint64_t>(k.b) + (h << 6) + (h >> 2);
      h ^= (static_cast<std::uint64_t>(k.r) << 32 | static_cast<std::uint32_t>(k.i)) + (h << 6) + (h >> 2);
      return static_cast<size_t>(h);
    }
  };
  using GuessKey = std::array<std::int64_t, 3>;  // (v, S bits, B1)

  Solution run_top(const Subproblem& sub, int v_mod, int v_stride, GuessKey* key_out);
  Solution frame(Vertex r, VertexSet y, Cost b, VertexSet x, int i);
  Solution frame_plain(Vertex r, VertexSet y, Cost b, VertexSet x, int i,
                       int v_mod, int v_stride, GuessKey* key_out);
  Solution frame_value_search(Vertex r, VertexSet y, Cost b, VertexSet x, int i,
                              int v_mod, int v_stride, GuessKey* key_out);
  Solution frame_blocked(Vertex r, VertexSet y, Cost b, VertexSet x, int i,
                         int v_mod, int v_stride, GuessKey* key_out);
  Solution base_case(Vertex r, VertexSet y, Cost b, VertexSet x);

  // Lower bound: cost of the min arborescence spanning {r} ∪ y (memoized).
  Cost lower_bound(Vertex r, VertexSet y);

  // Binary searches over left-call budgets; all probes hit the memo.
  Cost min_feasible_budget(Vertex r, VertexSet y, VertexSet x, int i, Cost lo, Cost hi);
  Cost min_budget_reaching(Vertex r, VertexSet y, VertexSet x, int i, Value u, Cost lo, Cost hi);

  struct SymNode {
    Vertex r;
    VertexSet y;
    Cost b;
    int levels;
  };
  struct BlockBest;
  void expand_block(const std::vector<SymNode>& pending, size_t idx, VertexSet x,
                    const Arborescence* acc, int i, VertexSet frame_x, Value fx,
                    BlockBest& best, int v_mod, int v_stride, const GuessKey& prefix);

  int plain_depth(int block_i, int levels) const {
    return (block_i == 1 ? 1 : (block_i - 1) * block_) + levels;
  }
  std::int64_t size_cap(int plain_i) const;

  const CostMatrix& m_;
  const RewardOracle& f_;
  SolverConfig cfg_;
  int n_;
  int block_ = 1;        // rg-fast block size
  int top_depth_ = 0;    // d of the current top-level solve, for the invariant
  Cost spend_cap_ = 0;   // (n-1) * max finite closure entry; budgets clamp here
  SolveStats stats_;
  std::unordered_map<FrameKey, Solution, FrameKeyHash> memo_;
  std::vector<std::unordered_map<std::uint64_t, Cost>> lb_cache_;  // per root
};

struct SolveOutcome {
  Solution solution;
  int depth = 0;
  int block = 0;
  SolveStats stats;
  double wall_ms = 0;
};

// Whole-instance convenience wrapper: top-level subproblem (root, empty Y,
// instance budget, empty augment, configured depth).
SolveOutcome solve_sto(const MetricInstance& inst, const RewardOracle& f, SolverConfig cfg);

}  // namespace arbor
