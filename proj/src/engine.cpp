#include "arbor/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace arbor {

int StoEngine::default_depth(int n, int k_cap) {
  (void)n;
  const std::int64_t k = std::max<std::int64_t>(2, k_cap);
  // smallest d with (3/2)^d >= k, compared exactly as 3^d >= k * 2^d
  unsigned __int128 p3 = 1, p2 = 1;
  int d = 0;
  while (p3 < static_cast<unsigned __int128>(k) * p2) {
    p3 *= 3;
    p2 *= 2;
    ++d;
  }
  return d;
}

int StoEngine::default_block(double epsilon, int k_cap) {
  const double k = std::max(2, k_cap);
  return std::max(1, static_cast<int>(std::floor(epsilon * std::log2(std::log2(k)))));
}

StoEngine::StoEngine(const CostMatrix& metric, const RewardOracle& f, SolverConfig cfg)
    : m_(metric), f_(f), cfg_(cfg), n_(metric.n()) {
  if (n_ < 1 || n_ > kMaxVertices) throw std::invalid_argument("StoEngine: bad vertex count");
  const int k_cap = cfg_.k_cap > 0 ? std::min(cfg_.k_cap, std::max(1, n_ - 1)) : std::max(1, n_ - 1);
  if (cfg_.depth <= 0) cfg_.depth = default_depth(n_, k_cap);
  block_ = 1;
  if (cfg_.engine == Engine::kRgFast)
    block_ = cfg_.block > 0 ? cfg_.block : default_block(cfg_.epsilon, k_cap);

  Cost maxc = 0;
  for (int u = 0; u < n_; ++u)
    for (int v = 0; v < n_; ++v)
      if (u != v && m_.reachable(u, v)) maxc = std::max(maxc, m_(u, v));
  const unsigned __int128 cap = static_cast<unsigned __int128>(n_ - 1) * static_cast<unsigned __int128>(maxc);
  spend_cap_ = cap > static_cast<unsigned __int128>(kMaxBudget) ? kMaxBudget : static_cast<Cost>(cap);
  lb_cache_.resize(static_cast<size_t>(n_));
}

std::int64_t StoEngine::size_cap(int plain_i) const {
  return std::min<std::int64_t>(three_halves_pow(plain_i), n_);
}

Cost StoEngine::lower_bound(Vertex r, VertexSet y) {
  const VertexSet w = y.with(r);
  auto& cache = lb_cache_[static_cast<size_t>(r)];
  if (auto it = cache.find(w.bits()); it != cache.end()) return it->second;
  const Cost c = min_arborescence_cost(m_, r, w);
  cache.emplace(w.bits(), c);
  return c;
}

Solution StoEngine::solve(const Subproblem& sub) {
  if (sub.root < 0 || sub.root >= n_) throw std::invalid_argument("solve: root out of range");
  if (sub.budget < 0 || sub.budget > kMaxBudget) throw std::invalid_argument("solve: bad budget");
  if (sub.depth < 1) throw std::invalid_argument("solve: depth must be positive");
  if (sub.must_visit.contains(sub.root))
    throw std::invalid_argument("solve: must_visit contains the root");
  if (!sub.must_visit.subset_of(VertexSet::full(n_)) || !sub.augment.subset_of(VertexSet::full(n_)))
    throw std::invalid_argument("solve: vertex set out of range");

  const int blocks = (sub.depth + block_ - 1) / block_;
  // |Y| + i never grows down the recursion, so its value at the top frame is
  // the bound to check against (the plain d when must_visit is empty).
  top_depth_ = (cfg_.engine == Engine::kRgFast ? blocks * block_ : sub.depth) +
               sub.must_visit.size();

  const int w = std::min(cfg_.workers, n_);
  if (w <= 1) return run_top(sub, 0, 1, nullptr);

  std::vector<Solution> sols(static_cast<size_t>(w));
  std::vector<GuessKey> keys(static_cast<size_t>(w));
  std::vector<SolveStats> parts(static_cast<size_t>(w));
  SolverConfig wcfg = cfg_;
  wcfg.workers = 1;
  std::vector<std::thread> threads;
  threads.reserve(static_cast<size_t>(w));
  for (int t = 0; t < w; ++t) {
    threads.emplace_back([&, t] {
      StoEngine worker(m_, f_, wcfg);
      worker.top_depth_ = top_depth_;
      sols[static_cast<size_t>(t)] = worker.run_top(sub, t, w, &keys[static_cast<size_t>(t)]);
      parts[static_cast<size_t>(t)] = worker.stats_;
    });
  }
  for (auto& th : threads) th.join();
  for (const auto& p : parts) stats_.absorb(p);

  // Deterministic reduce: the winner matches what a single worker would pick.
  int best = 0;
  for (int t = 1; t < w; ++t) {
    const Solution& a = sols[static_cast<size_t>(best)];
    const Solution& c = sols[static_cast<size_t>(t)];
    if (!c.feasible) continue;
    if (!a.feasible || c.value > a.value || (c.value == a.value && c.cost < a.cost) ||
        (c.value == a.value && c.cost == a.cost && keys[static_cast<size_t>(t)] < keys[static_cast<size_t>(best)]))
      best = t;
  }
  return sols[static_cast<size_t>(best)];
}

Solution StoEngine::run_top(const Subproblem& sub, int v_mod, int v_stride, GuessKey* key_out) {
  switch (cfg_.engine) {
    case Engine::kRg:
      return frame_plain(sub.root, sub.must_visit, sub.budget, sub.augment, sub.depth, v_mod,
                         v_stride, key_out);
    case Engine::kRgQp:
      return frame_value_search(sub.root, sub.must_visit, sub.budget, sub.augment, sub.depth,
                                v_mod, v_stride, key_out);
    case Engine::kRgFast: {
      const int blocks = (sub.depth + block_ - 1) / block_;
      return frame_blocked(sub.root, sub.must_visit, sub.budget, sub.augment, blocks, v_mod,
                           v_stride, key_out);
    }
    default:
      throw std::logic_error("StoEngine: length/priority engines live elsewhere");
  }
}

Solution StoEngine::frame(Vertex r, VertexSet y, Cost b, VertexSet x, int i) {
  switch (cfg_.engine) {
    case Engine::kRg:
      return frame_plain(r, y, b, x, i, 0, 1, nullptr);
    case Engine::kRgQp:
      return frame_value_search(r, y, b, x, i, 0, 1, nullptr);
    default:
      return frame_blocked(r, y, b, x, i, 0, 1, nullptr);
  }
}

Solution StoEngine::base_case(Vertex r, VertexSet y, Cost b, VertexSet x) {
  ++stats_.entries;
  ++stats_.frames;
  if (y.size() + 1 > top_depth_) {
    ++stats_.invariant_violations;
    if (cfg_.debug_checks) throw std::logic_error("recursion invariant violated: |Y| + i > d");
  }
  if (y.size() > 1) return Solution::none();

  if (!y.empty()) {
    const Vertex t = *y.begin();
    const Cost c = m_(r, t);
    if (c > b) return Solution::none();
    Solution sol;
    sol.feasible = true;
    sol.tree = Arborescence(r);
    sol.tree.add_edge(t, TreeEdge{r, c, 0, 0, 0});
    sol.cost = c;
    sol.value = marginal(f_, x, sol.tree.vertices());
    return sol;
  }

  Solution best;
  best.feasible = true;
  best.value = marginal(f_, x, VertexSet::single(r));
  best.cost = 0;
  best.tree = Arborescence(r);
  for (Vertex v = 0; v < n_; ++v) {
    if (v == r) continue;
    const Cost c = m_(r, v);
    if (c > b) continue;
    const Value val = marginal(f_, x, VertexSet::single(r).with(v));
    if (val > best.value || (val == best.value && c < best.cost)) {
      best.value = val;
      best.cost = c;
      best.tree = Arborescence(r);
      best.tree.add_edge(v, TreeEdge{r, c, 0, 0, 0});
    }
  }
  return best;
}

Solution StoEngine::frame_plain(Vertex r, VertexSet y, Cost b, VertexSet x, int i,
                                int v_mod, int v_stride, GuessKey* key_out) {
  if (i <= 1) return base_case(r, y, std::min(b, spend_cap_), x);
  ++stats_.entries;
  if (y.size() + i > top_depth_) {
    ++stats_.invariant_violations;
    if (cfg_.debug_checks) throw std::logic_error("recursion invariant violated: |Y| + i > d");
  }
  if (y.size() > size_cap(i)) return Solution::none();

  const Cost be = std::min(b, spend_cap_);
  const FrameKey key{y.bits(), x.bits(), be, r, i};
  if (!key_out) {
    if (auto it = memo_.find(key); it != memo_.end()) {
      ++stats_.memo_hits;
      return it->second;
    }
  }
  ++stats_.frames;

  const Value fx = f_.eval(x);
  Solution best;
  GuessKey bkey{std::numeric_limits<std::int64_t>::max(), 0, 0};
  auto consider = [&](Solution&& cand, const GuessKey& k) {
    if (!best.feasible || cand.value > best.value ||
        (cand.value == best.value && cand.cost < best.cost)) {
      best = std::move(cand);
      bkey = k;
    }
  };
  if (y.empty()) {
    Solution empty;
    empty.feasible = true;
    empty.value = marginal(f_, x, VertexSet::single(r));
    empty.cost = 0;
    empty.tree = Arborescence(r);
    consider(std::move(empty), {-1, -1, -1});
  }

  for (Vertex v = 0; v < n_; ++v) {
    if (v_stride > 1 && v % v_stride != v_mod) continue;
    if (v != r && !m_.reachable(r, v)) continue;
    for (VertexSet s : Submasks(y)) {
      const VertexSet yl = (s | VertexSet::single(v)).without(r);
      const VertexSet yr = (y - s).without(v);
      const Cost lb_l = lower_bound(r, yl);
      if (lb_l > be) continue;
      const Cost lb_r = lower_bound(v, yr);
      if (lb_l + lb_r > be) continue;

      Solution prev_left;
      for (Cost b1 = lb_l; b1 <= be - lb_r; ++b1) {
        Solution t1 = frame(r, yl, b1, x, i - 1);
        if (!t1.feasible) continue;
        // A left solution identical to the previous budget's cannot produce a
        // better candidate (the right call only lost budget); skip it.
        if (prev_left.feasible && t1.tree == prev_left.tree) continue;
        Solution t2 = frame(v, yr, be - b1, x | t1.tree.vertices(), i - 1);
        prev_left = t1;
        if (!t2.feasible) continue;
        Solution cand;
        cand.feasible = true;
        cand.tree = merge_and_prune(t1.tree, t2.tree);
        cand.cost = cand.tree.total_cost();
        cand.value = f_.eval(x | cand.tree.vertices()) - fx;
        consider(std::move(cand), {v, static_cast<std::int64_t>(s.bits()), b1});
      }
    }
  }

  if (key_out)
    *key_out = bkey;
  else
    memo_.emplace(key, best);
  return best;
}

Cost StoEngine::min_feasible_budget(Vertex r, VertexSet y, VertexSet x, int i, Cost lo, Cost hi) {
  if (lo > hi || !frame(r, y, hi, x, i).feasible) return kNoBudget;
  while (lo < hi) {
    const Cost mid = lo + (hi - lo) / 2;
    if (frame(r, y, mid, x, i).feasible)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

Cost StoEngine::min_budget_reaching(Vertex r, VertexSet y, VertexSet x, int i, Value u,
                                    Cost lo, Cost hi) {
  auto reaches = [&](Cost b) {
    const Solution s = frame(r, y, b, x, i);
    return s.feasible && s.value >= u;
  };
  if (lo > hi || !reaches(hi)) return kNoBudget;
  while (lo < hi) {
    const Cost mid = lo + (hi - lo) / 2;
    if (reaches(mid))
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

Solution StoEngine::frame_value_search(Vertex r, VertexSet y, Cost b, VertexSet x, int i,
                                       int v_mod, int v_stride, GuessKey* key_out) {
  if (i <= 1) return base_case(r, y, std::min(b, spend_cap_), x);
  ++stats_.entries;
  if (y.size() + i > top_depth_) {
    ++stats_.invariant_violations;
    if (cfg_.debug_checks) throw std::logic_error("recursion invariant violated: |Y| + i > d");
  }
  if (y.size() > size_cap(i)) return Solution::none();

  const Cost be = std::min(b, spend_cap_);
  const FrameKey key{y.bits(), x.bits(), be, r, i};
  if (!key_out) {
    if (auto it = memo_.find(key); it != memo_.end()) {
      ++stats_.memo_hits;
      return it->second;
    }
  }
  ++stats_.frames;

  const Value fx = f_.eval(x);
  Solution best;
  GuessKey bkey{std::numeric_limits<std::int64_t>::max(), 0, 0};
  auto consider = [&](Solution&& cand, const GuessKey& k) {
    if (!best.feasible || cand.value > best.value ||
        (cand.value == best.value && cand.cost < best.cost)) {
      best = std::move(cand);
      bkey = k;
    }
  };
  if (y.empty()) {
    Solution empty;
    empty.feasible = true;
    empty.value = marginal(f_, x, VertexSet::single(r));
    empty.cost = 0;
    empty.tree = Arborescence(r);
    consider(std::move(empty), {-1, -1, -1});
  }

  for (Vertex v = 0; v < n_; ++v) {
    if (v_stride > 1 && v % v_stride != v_mod) continue;
    if (v != r && !m_.reachable(r, v)) continue;
    for (VertexSet s : Submasks(y)) {
      const VertexSet yl = (s | VertexSet::single(v)).without(r);
      const VertexSet yr = (y - s).without(v);
      const Cost lb_l = lower_bound(r, yl);
      if (lb_l > be) continue;
      const Cost lb_r = lower_bound(v, yr);
      if (lb_l + lb_r > be) continue;
      const Cost hi = be - lb_r;

      const Solution at_hi = frame(r, yl, hi, x, i - 1);
      if (!at_hi.feasible) continue;
      const Value u_max = at_hi.value;

      // Instead of sweeping left budgets, sweep target values u and binary
      // search the smallest budget whose left value reaches u. u = 0 asks for
      // the cheapest feasible left tree, which keeps zero-marginal guesses
      // (e.g. v == r with an empty split) in play.
      Cost prev_b1 = kNoBudget;
      for (Value u = 0; u <= u_max; ++u) {
        const Cost b1 = u == 0
                            ? min_feasible_budget(r, yl, x, i - 1, lb_l, hi)
                            : min_budget_reaching(r, yl, x, i - 1, u, std::max(lb_l, prev_b1), hi);
        if (b1 == kNoBudget) break;
        if (b1 == prev_b1) continue;
        prev_b1 = b1;
        Solution t1 = frame(r, yl, b1, x, i - 1);
        Solution t2 = frame(v, yr, be - b1, x | t1.tree.vertices(), i - 1);
        if (u < t1.value) u = t1.value;  // larger targets re-find this b1
        if (!t2.feasible) continue;
        Solution cand;
        cand.feasible = true;
        cand.tree = merge_and_prune(t1.tree, t2.tree);
        cand.cost = cand.tree.total_cost();
        cand.value = f_.eval(x | cand.tree.vertices()) - fx;
        consider(std::move(cand), {v, static_cast<std::int64_t>(s.bits()), b1});
      }
    }
  }

  if (key_out)
    *key_out = bkey;
  else
    memo_.emplace(key, best);
  return best;
}

struct StoEngine::BlockBest {
  Solution sol;
  GuessKey key{std::numeric_limits<std::int64_t>::max(), 0, 0};
};

void StoEngine::expand_block(const std::vector<SymNode>& pending, size_t idx, VertexSet x,
                             const Arborescence* acc, int i, VertexSet frame_x, Value fx,
                             BlockBest& best, int v_mod, int v_stride, const GuessKey& prefix) {
  if (idx == pending.size()) {
    Solution cand;
    cand.feasible = true;
    cand.tree = *acc;
    cand.cost = cand.tree.total_cost();
    cand.value = f_.eval(frame_x | cand.tree.vertices()) - fx;
    if (!best.sol.feasible || cand.value > best.sol.value ||
        (cand.value == best.sol.value && cand.cost < best.sol.cost)) {
      best.sol = std::move(cand);
      best.key = prefix;
    }
    return;
  }

  const SymNode nd = pending[idx];
  if (nd.y.size() > size_cap(plain_depth(i, nd.levels))) return;

  if (nd.levels == 0) {
    const Solution leaf = i == 1 ? base_case(nd.r, nd.y, nd.b, x)
                                 : frame_blocked(nd.r, nd.y, nd.b, x, i - 1, 0, 1, nullptr);
    if (!leaf.feasible) return;
    const Arborescence merged = acc ? merge_and_prune(*acc, leaf.tree) : leaf.tree;
    expand_block(pending, idx + 1, x | leaf.tree.vertices(), &merged, i, frame_x, fx, best,
                 v_mod, v_stride, prefix);
    return;
  }

  const bool first_guess = prefix[0] == std::numeric_limits<std::int64_t>::max();
  for (Vertex v = 0; v < n_; ++v) {
    if (first_guess && v_stride > 1 && v % v_stride != v_mod) continue;
    if (v != nd.r && !m_.reachable(nd.r, v)) continue;
    for (VertexSet s : Submasks(nd.y)) {
      const VertexSet yl = (s | VertexSet::single(v)).without(nd.r);
      const VertexSet yr = (nd.y - s).without(v);
      const Cost lb_l = lower_bound(nd.r, yl);
      if (lb_l > nd.b) continue;
      const Cost lb_r = lower_bound(v, yr);
      if (lb_l + lb_r > nd.b) continue;

      for (Cost b1 = lb_l; b1 <= nd.b - lb_r; ++b1) {
        std::vector<SymNode> child;
        child.reserve(pending.size() - idx + 1);
        child.push_back({nd.r, yl, b1, nd.levels - 1});
        child.push_back({v, yr, nd.b - b1, nd.levels - 1});
        child.insert(child.end(), pending.begin() + static_cast<std::ptrdiff_t>(idx) + 1,
                     pending.end());
        const GuessKey next =
            first_guess ? GuessKey{v, static_cast<std::int64_t>(s.bits()), b1} : prefix;
        expand_block(child, 0, x, acc, i, frame_x, fx, best, v_mod, v_stride, next);
      }
    }
  }
}

Solution StoEngine::frame_blocked(Vertex r, VertexSet y, Cost b, VertexSet x, int i,
                                  int v_mod, int v_stride, GuessKey* key_out) {
  const int levels = i == 1 ? block_ - 1 : block_;
  if (levels == 0) {
    // block size 1 at the last block: plain base case
    const Solution sol = base_case(r, y, std::min(b, spend_cap_), x);
    if (key_out) *key_out = {-1, -1, -1};
    return sol;
  }

  ++stats_.entries;
  if (y.size() + static_cast<std::int64_t>(i) * block_ > top_depth_) {
    ++stats_.invariant_violations;
    if (cfg_.debug_checks) throw std::logic_error("recursion invariant violated: |Y| + i > d");
  }
  if (y.size() > size_cap(i * block_)) return Solution::none();

  const Cost be = std::min(b, spend_cap_);
  const FrameKey key{y.bits(), x.bits(), be, r, i};
  if (!key_out) {
    if (auto it = memo_.find(key); it != memo_.end()) {
      ++stats_.memo_hits;
      return it->second;
    }
  }
  ++stats_.frames;

  BlockBest best;
  if (y.empty()) {
    best.sol.feasible = true;
    best.sol.value = marginal(f_, x, VertexSet::single(r));
    best.sol.cost = 0;
    best.sol.tree = Arborescence(r);
    best.key = {-1, -1, -1};
  }

  const Value fx = f_.eval(x);
  const std::vector<SymNode> pending{SymNode{r, y, be, levels}};
  expand_block(pending, 0, x, nullptr, i, x, fx, best, v_mod, v_stride,
               {std::numeric_limits<std::int64_t>::max(), 0, 0});

  if (key_out)
    *key_out = best.key;
  else
    memo_.emplace(key, best.sol);
  return best.sol;
}

Cost StoEngine::min_budget_for_value(Vertex root, VertexSet must_visit, VertexSet augment,
                                     int depth, Value u, Cost b_max) {
  if (b_max < 0) return kNoBudget;
  b_max = std::min(b_max, kMaxBudget);
  const int blocks = (depth + block_ - 1) / block_;
  top_depth_ = (cfg_.engine == Engine::kRgFast ? blocks * block_ : depth) + must_visit.size();
  const int i = cfg_.engine == Engine::kRgFast ? blocks : depth;
  if (u <= 0) return min_feasible_budget(root, must_visit, augment, i, 0, b_max);
  return min_budget_reaching(root, must_visit, augment, i, u, 0, b_max);
}

SolveOutcome solve_sto(const MetricInstance& inst, const RewardOracle& f, SolverConfig cfg) {
  StoEngine engine(inst.cost, f, cfg);
  Subproblem top;
  top.root = inst.root;
  top.budget = inst.budget;
  top.depth = engine.depth();
  const auto t0 = std::chrono::steady_clock::now();
  SolveOutcome out;
  out.solution = engine.solve(top);
  const auto t1 = std::chrono::steady_clock::now();
  out.depth = engine.depth();
  out.block = engine.block();
  out.stats = engine.stats();
  out.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return out;
}

}  // namespace arbor
