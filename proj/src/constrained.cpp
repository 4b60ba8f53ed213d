#include "arbor/constrained.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <thread>
#include <utility>

namespace arbor {

namespace {

constexpr std::array<std::int64_t, 5> kNoGuess{std::numeric_limits<std::int64_t>::max(), 0, 0, 0,
                                               0};

std::vector<Length> pack_caps(VertexSet y, const std::array<Length, kMaxVertices>& d) {
  std::vector<Length> out;
  out.reserve(static_cast<size_t>(y.size()));
  for (Vertex w : y) out.push_back(d[w]);
  return out;
}

std::array<Length, kMaxVertices> no_caps() {
  std::array<Length, kMaxVertices> d;
  d.fill(kNoDeadline);
  return d;
}

}  // namespace

size_t ConstrainedEngine::CKeyHash::operator()(const CKey& k) const {
  auto mix = [](std::uint64_t h, std::uint64_t v) {
    return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  };
  std::uint64_t h = k.y * 0x9e3779b97f4a7c15ULL;
  h = mix(h, k.x);
  h = mix(h, static_cast<std::uint64_t>(k.b));
  h = mix(h, static_cast<std::uint64_t>(k.l));
  h = mix(h, static_cast<std::uint64_t>(k.kr));
  h = mix(h, static_cast<std::uint64_t>(k.r) << 32 | static_cast<std::uint32_t>(k.i));
  for (Length dv : k.dv) h = mix(h, static_cast<std::uint64_t>(dv));
  return static_cast<size_t>(h);
}

ConstrainedEngine::ConstrainedEngine(const TwoCostClosure& tc, const RewardOracle& f,
                                     SolverConfig cfg)
    : tc_(&tc), f_(f), cfg_(cfg), n_(tc.n()) {
  cfg_.engine = Engine::kRgDc;
  init_shared();
}

ConstrainedEngine::ConstrainedEngine(const TwoCostClosure& tc, const RewardOracle& f,
                                     std::vector<Length> deadlines, SolverConfig cfg)
    : tc_(&tc), f_(f), cfg_(cfg), n_(tc.n()), deadlines_(std::move(deadlines)) {
  cfg_.engine = Engine::kRgDl;
  if (deadlines_.size() != static_cast<size_t>(n_))
    throw std::invalid_argument("ConstrainedEngine: deadline table must cover all vertices");
  for (Length dl : deadlines_)
    if (dl < 0) throw std::invalid_argument("ConstrainedEngine: negative deadline");
  init_shared();
}

ConstrainedEngine::ConstrainedEngine(const PriorityClosure& pc, const RewardOracle& f,
                                     std::vector<int> required, SolverConfig cfg)
    : pc_(&pc), f_(f), cfg_(cfg), n_(pc.n()), required_(std::move(required)) {
  cfg_.engine = Engine::kRgPr;
  if (pc.levels() < 1) throw std::invalid_argument("ConstrainedEngine: no priority levels");
  if (required_.size() != static_cast<size_t>(n_))
    throw std::invalid_argument("ConstrainedEngine: requirement table must cover all vertices");
  for (int q : required_)
    if (q < 1 || q > pc.levels())
      throw std::invalid_argument("ConstrainedEngine: requirement outside the priority range");
  init_shared();
}

void ConstrainedEngine::init_shared() {
  if (n_ < 1 || n_ > kMaxVertices)
    throw std::invalid_argument("ConstrainedEngine: bad vertex count");
  const int k_cap =
      cfg_.k_cap > 0 ? std::min(cfg_.k_cap, std::max(1, n_ - 1)) : std::max(1, n_ - 1);
  if (cfg_.depth <= 0) cfg_.depth = StoEngine::default_depth(n_, k_cap);

  Cost maxc = 0;
  if (tc_) {
    lbm_ = tc_->min_cost_matrix();
    l_cap_ = tc_->l_max();
    for (int u = 0; u < n_; ++u)
      for (int v = 0; v < n_; ++v) {
        if (u == v) continue;
        for (const TwoCostEntry& e : tc_->frontier(u, v)) maxc = std::max(maxc, e.cost);
      }
    auto list = [&](const std::vector<std::uint64_t>& bits) {
      std::vector<Length> out;
      for (Length d = 0; d <= l_cap_; ++d)
        if (bits[static_cast<size_t>(d / 64)] >> (d % 64) & 1) out.push_back(d);
      return out;
    };
    lengths_ = list(tc_->path_length_bits());
    lsums_ = list(tc_->sum_bits(n_));
  } else {
    lbm_ = pc_->at_level(1);
    for (int q = 1; q <= pc_->levels(); ++q)
      for (int u = 0; u < n_; ++u)
        for (int v = 0; v < n_; ++v)
          if (u != v && pc_->at_level(q).reachable(u, v))
            maxc = std::max(maxc, pc_->at_level(q)(u, v));
  }
  const unsigned __int128 cap =
      static_cast<unsigned __int128>(n_ - 1) * static_cast<unsigned __int128>(maxc);
  spend_cap_ = cap > static_cast<unsigned __int128>(kMaxBudget) ? kMaxBudget : static_cast<Cost>(cap);
  lb_cache_.resize(static_cast<size_t>(n_));
}

ConstrainedEngine ConstrainedEngine::clone_for_worker(const SolverConfig& cfg) const {
  switch (cfg_.engine) {
    case Engine::kRgDc:
      return ConstrainedEngine(*tc_, f_, cfg);
    case Engine::kRgDl:
      return ConstrainedEngine(*tc_, f_, deadlines_, cfg);
    default:
      return ConstrainedEngine(*pc_, f_, required_, cfg);
  }
}

std::int64_t ConstrainedEngine::size_cap(int i) const {
  return std::min<std::int64_t>(three_halves_pow(i), n_);
}

void ConstrainedEngine::note_entry(VertexSet y, int i) {
  ++stats_.entries;
  if (y.size() + i > top_depth_) {
    ++stats_.invariant_violations;
    if (cfg_.debug_checks) throw std::logic_error("recursion invariant violated: |Y| + i > d");
  }
}

Cost ConstrainedEngine::lower_bound(Vertex r, VertexSet y) {
  const VertexSet w = y.with(r);
  auto& cache = lb_cache_[static_cast<size_t>(r)];
  if (auto it = cache.find(w.bits()); it != cache.end()) return it->second;
  const Cost c = min_arborescence_cost(lbm_, r, w);
  cache.emplace(w.bits(), c);
  return c;
}

Solution ConstrainedEngine::solve(const ConstrainedSubproblem& sub) {
  if (sub.root < 0 || sub.root >= n_) throw std::invalid_argument("solve: root out of range");
  if (sub.budget < 0 || sub.budget > kMaxBudget) throw std::invalid_argument("solve: bad budget");
  if (sub.depth < 1) throw std::invalid_argument("solve: depth must be positive");
  if (sub.must_visit.contains(sub.root))
    throw std::invalid_argument("solve: must_visit contains the root");
  if (!sub.must_visit.subset_of(VertexSet::full(n_)) ||
      !sub.augment.subset_of(VertexSet::full(n_)))
    throw std::invalid_argument("solve: vertex set out of range");
  if (!sub.must_visit.empty() && sub.bound.size() != static_cast<size_t>(n_))
    throw std::invalid_argument("solve: bound table must cover all vertices");
  for (Vertex w : sub.must_visit) {
    const Length dw = sub.bound[static_cast<size_t>(w)];
    const bool bad =
        cfg_.engine == Engine::kRgPr ? (dw < 1 || dw > pc_->levels()) : dw < 0;
    if (bad) throw std::invalid_argument("solve: bad bound entry");
  }
  switch (cfg_.engine) {
    case Engine::kRgDc:
      // Guess domains live in [0, l_max]; a budget beyond that has no
      // achievable sums to spend it on, so we treat it as a caller error.
      if (sub.length_budget < 0 || sub.length_budget > l_cap_)
        throw std::invalid_argument("solve: length budget outside the closure's range");
      if (sub.entry_length < 0 || sub.entry_length > sub.length_budget)
        throw std::invalid_argument("solve: entry length exceeds the length budget");
      break;
    case Engine::kRgDl:
      if (sub.entry_length < 0) throw std::invalid_argument("solve: negative entry length");
      break;
    default:
      if (sub.entry_priority < 1)
        throw std::invalid_argument("solve: entry priority must be >= 1");
      break;
  }

  top_depth_ = sub.depth + sub.must_visit.size();
  const VertexSet charged = sub.charged & VertexSet::full(n_);
  if (charged != charged_) memo_.clear();  // memo keys don't carry the charged set
  charged_ = charged;

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
      ConstrainedEngine worker = clone_for_worker(wcfg);
      worker.top_depth_ = top_depth_;
      worker.charged_ = charged_;
      sols[static_cast<size_t>(t)] = worker.run_top(sub, t, w, &keys[static_cast<size_t>(t)]);
      parts[static_cast<size_t>(t)] = worker.stats_;
    });
  }
  for (auto& th : threads) th.join();
  for (const auto& p : parts) stats_.absorb(p);

  int best = 0;
  for (int t = 1; t < w; ++t) {
    const Solution& a = sols[static_cast<size_t>(best)];
    const Solution& c = sols[static_cast<size_t>(t)];
    if (!c.feasible) continue;
    if (!a.feasible || c.value > a.value || (c.value == a.value && c.cost < a.cost) ||
        (c.value == a.value && c.cost == a.cost &&
         keys[static_cast<size_t>(t)] < keys[static_cast<size_t>(best)]))
      best = t;
  }
  return sols[static_cast<size_t>(best)];
}

Solution ConstrainedEngine::run_top(const ConstrainedSubproblem& sub, int v_mod, int v_stride,
                                    GuessKey* key_out) {
  CapTable d = no_caps();
  for (Vertex w : sub.must_visit) d[w] = sub.bound[static_cast<size_t>(w)];
  switch (cfg_.engine) {
    case Engine::kRgDc:
      return frame_dc(sub.root, sub.must_visit, d, sub.budget, sub.length_budget,
                      sub.entry_length, sub.augment, sub.depth, v_mod, v_stride, key_out);
    case Engine::kRgDl:
      return frame_dl(sub.root, sub.must_visit, d, sub.budget, sub.entry_length, sub.augment,
                      sub.depth, v_mod, v_stride, key_out);
    default:
      // Entry priorities above the top level act like the top level: every
      // comparison that matters is against requirements in [1, levels].
      return frame_pr(sub.root, sub.must_visit, d, sub.budget,
                      std::min(sub.entry_priority, pc_->levels()), sub.augment, sub.depth,
                      v_mod, v_stride, key_out);
  }
}

bool ConstrainedEngine::fits_caps(const Arborescence& t, VertexSet y, const CapTable& d) const {
  for (Vertex w : y)
    if (t.path_length(w) > d[w]) return false;
  return true;
}

bool ConstrainedEngine::fits_dc(const Arborescence& t, VertexSet y, const CapTable& d, Length l,
                                Length kr) const {
  if (!fits_caps(t, y, d)) return false;
  Length sum = 0;
  for (Vertex u : t.vertices()) {
    if (u == t.root() || !charged_.contains(u)) continue;
    sum += kr + t.path_length(u);
    if (sum > l) return false;
  }
  return true;
}

bool ConstrainedEngine::fits_floors(const Arborescence& t, VertexSet y, const CapTable& d) const {
  for (Vertex w : y)
    if (t.path_min_priority(w, kMaxPriority) < d[w]) return false;
  return true;
}

Solution ConstrainedEngine::base_dc(Vertex r, VertexSet y, const CapTable& d, Cost b, Length l,
                                    Length kr, VertexSet x) {
  note_entry(y, 1);
  ++stats_.frames;
  if (y.size() > 1) return Solution::none();

  if (!y.empty()) {
    const Vertex t = *y.begin();
    for (const TwoCostEntry& e : tc_->frontier(r, t)) {
      if (e.cost > b) break;  // ascending cost: nothing later fits either
      if (e.length > d[t]) continue;
      if (charged_.contains(t) && kr + e.length > l) continue;
      Solution sol;
      sol.feasible = true;
      sol.tree = Arborescence(r);
      sol.tree.add_edge(t, TreeEdge{r, e.cost, e.length, e.true_length, 0});
      sol.cost = e.cost;
      sol.value = marginal(f_, x, sol.tree.vertices());
      return sol;  // cheapest feasible frontier entry
    }
    return Solution::none();
  }

  Solution best;
  best.feasible = true;
  best.value = marginal(f_, x, VertexSet::single(r));
  best.cost = 0;
  best.tree = Arborescence(r);
  for (Vertex v = 0; v < n_; ++v) {
    if (v == r) continue;
    for (const TwoCostEntry& e : tc_->frontier(r, v)) {
      if (e.cost > b) break;
      if (charged_.contains(v) && kr + e.length > l) continue;
      const Value val = marginal(f_, x, VertexSet::single(r).with(v));
      if (val > best.value || (val == best.value && e.cost < best.cost)) {
        best.value = val;
        best.cost = e.cost;
        best.tree = Arborescence(r);
        best.tree.add_edge(v, TreeEdge{r, e.cost, e.length, e.true_length, 0});
      }
      break;  // value ignores lengths here, so the cheapest feasible entry wins
    }
  }
  return best;
}

Solution ConstrainedEngine::frame_dc(Vertex r, VertexSet y, const CapTable& d, Cost b, Length l,
                                     Length kr, VertexSet x, int i, int v_mod, int v_stride,
                                     GuessKey* key_out) {
  if (i <= 1) return base_dc(r, y, d, std::min(b, spend_cap_), l, kr, x);
  note_entry(y, i);
  if (y.size() > size_cap(i)) return Solution::none();

  const Cost be = std::min(b, spend_cap_);
  const CKey key{y.bits(), x.bits(), be, l, kr, r, i, pack_caps(y, d)};
  if (!key_out) {
    if (auto it = memo_.find(key); it != memo_.end()) {
      ++stats_.memo_hits;
      return it->second;
    }
  }
  ++stats_.frames;

  const Value fx = f_.eval(x);
  Solution best;
  GuessKey bkey = kNoGuess;
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
    consider(std::move(empty), {-1, -1, -1, -1, -1});
  }

  for (Vertex v = 0; v < n_; ++v) {
    if (v_stride > 1 && v % v_stride != v_mod) continue;
    if (v != r && !lbm_.reachable(r, v)) continue;
    const bool v_in_y = y.contains(v);
    for (VertexSet s : Submasks(y)) {
      if (v_in_y && !s.contains(v)) continue;  // v's own cap rides the left call
      const VertexSet yl = (s | VertexSet::single(v)).without(r);
      const VertexSet yr = (y - s).without(v);
      const Cost lb_l = lower_bound(r, yl);
      if (lb_l > be) continue;
      const Cost lb_r = lower_bound(v, yr);
      if (lb_l + lb_r > be) continue;

      // d1 may not exceed the separator's own cap nor any right-side cap
      // (those entries must stay nonnegative after the d1 discount). A
      // charged separator is further pinned by its own length charge; an
      // uncharged one can sit anywhere the closure reaches.
      const Length v_room = charged_.contains(v) ? l - kr : l_cap_;
      Length d1_hi = v == r ? 0 : std::min<Length>(v_room, v_in_y ? d[v] : kNoDeadline);
      for (Vertex w : yr) d1_hi = std::min(d1_hi, d[w]);

      for (Length l1 : lsums_) {
        if (l1 > l) break;
        for (Length d1 : lengths_) {
          if (d1 > d1_hi) break;
          CapTable d1t = no_caps();
          for (Vertex w : s) d1t[w] = d[w];
          if (v != r) d1t[v] = std::min(d1, d1t[v]);
          CapTable d2t = no_caps();
          for (Vertex w : yr) d2t[w] = d[w] - d1;

          auto attempt = [&](Cost b1, const Solution& t1) {
            const Length kv = kr + t1.tree.path_length(v);
            Solution t2 = frame_dc(v, yr, d2t, be - b1, l - l1, kv, x | t1.tree.vertices(),
                                   i - 1, 0, 1, nullptr);
            if (!t2.feasible) return;
            Solution cand;
            cand.feasible = true;
            cand.tree = merge_and_prune(t1.tree, t2.tree);
            if (!fits_dc(cand.tree, y, d, l, kr)) return;
            cand.cost = cand.tree.total_cost();
            cand.value = f_.eval(x | cand.tree.vertices()) - fx;
            consider(std::move(cand), {v, static_cast<std::int64_t>(s.bits()), l1, d1, b1});
          };

          if (!cfg_.budget_values) {
            Solution prev_left;
            for (Cost b1 = lb_l; b1 <= be - lb_r; ++b1) {
              Solution t1 = frame_dc(r, yl, d1t, b1, l1, kr, x, i - 1, 0, 1, nullptr);
              if (!t1.feasible) continue;
              if (prev_left.feasible && t1.tree == prev_left.tree) continue;
              attempt(b1, t1);
              prev_left = std::move(t1);
            }
          } else {
            const Cost hi = be - lb_r;
            const Solution at_hi = frame_dc(r, yl, d1t, hi, l1, kr, x, i - 1, 0, 1, nullptr);
            if (!at_hi.feasible) continue;
            Cost prev_b1 = kNoBudget;
            for (Value u = 0; u <= at_hi.value; ++u) {
              const Cost b1 =
                  u == 0 ? min_feasible_dc(r, yl, d1t, l1, kr, x, i - 1, lb_l, hi)
                         : min_reaching_dc(r, yl, d1t, l1, kr, x, i - 1, u,
                                           std::max(lb_l, prev_b1), hi);
              if (b1 == kNoBudget) break;
              if (b1 == prev_b1) continue;
              prev_b1 = b1;
              Solution t1 = frame_dc(r, yl, d1t, b1, l1, kr, x, i - 1, 0, 1, nullptr);
              if (u < t1.value) u = t1.value;  // larger targets re-find this b1
              attempt(b1, t1);
            }
          }
        }
      }
    }
  }

  if (key_out)
    *key_out = bkey;
  else
    memo_.emplace(key, best);
  return best;
}

Cost ConstrainedEngine::min_feasible_dc(Vertex r, VertexSet y, const CapTable& d, Length l,
                                        Length kr, VertexSet x, int i, Cost lo, Cost hi) {
  if (lo > hi || !frame_dc(r, y, d, hi, l, kr, x, i, 0, 1, nullptr).feasible) return kNoBudget;
  while (lo < hi) {
    const Cost mid = lo + (hi - lo) / 2;
    if (frame_dc(r, y, d, mid, l, kr, x, i, 0, 1, nullptr).feasible)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

Cost ConstrainedEngine::min_reaching_dc(Vertex r, VertexSet y, const CapTable& d, Length l,
                                        Length kr, VertexSet x, int i, Value u, Cost lo,
                                        Cost hi) {
  auto reaches = [&](Cost b) {
    const Solution s = frame_dc(r, y, d, b, l, kr, x, i, 0, 1, nullptr);
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

Solution ConstrainedEngine::base_dl(Vertex r, VertexSet y, const CapTable& d, Cost b, Length kr,
                                    VertexSet x) {
  note_entry(y, 1);
  ++stats_.frames;
  if (y.size() > 1) return Solution::none();

  const DeadlineGate gate{&deadlines_, kr};
  const Value fx = f_.eval(x);
  auto fill = [&](Solution& sol) {
    const VertexSet g = gated_set(sol.tree, gate);
    sol.value = f_.eval(x | g) - fx;
    sol.ungated = sol.tree.size() - g.size();
  };
  Solution best;
  auto consider = [&](Solution&& cand) {
    if (!best.feasible || cand.value > best.value ||
        (cand.value == best.value && cand.cost < best.cost) ||
        (cand.value == best.value && cand.cost == best.cost && cand.ungated < best.ungated))
      best = std::move(cand);
  };

  if (!y.empty()) {
    // The gate makes longer-but-cheaper entries genuinely different options,
    // so every frontier entry within the cap competes on (value, cost).
    const Vertex t = *y.begin();
    for (const TwoCostEntry& e : tc_->frontier(r, t)) {
      if (e.cost > b) break;
      if (e.length > d[t]) continue;
      Solution sol;
      sol.feasible = true;
      sol.tree = Arborescence(r);
      sol.tree.add_edge(t, TreeEdge{r, e.cost, e.length, e.true_length, 0});
      sol.cost = e.cost;
      fill(sol);
      consider(std::move(sol));
    }
    return best;
  }

  Solution empty;
  empty.feasible = true;
  empty.cost = 0;
  empty.tree = Arborescence(r);
  fill(empty);
  consider(std::move(empty));
  for (Vertex v = 0; v < n_; ++v) {
    if (v == r) continue;
    for (const TwoCostEntry& e : tc_->frontier(r, v)) {
      if (e.cost > b) break;
      Solution sol;
      sol.feasible = true;
      sol.tree = Arborescence(r);
      sol.tree.add_edge(v, TreeEdge{r, e.cost, e.length, e.true_length, 0});
      sol.cost = e.cost;
      fill(sol);
      consider(std::move(sol));
    }
  }
  return best;
}

Solution ConstrainedEngine::frame_dl(Vertex r, VertexSet y, const CapTable& d, Cost b, Length kr,
                                     VertexSet x, int i, int v_mod, int v_stride,
                                     GuessKey* key_out) {
  if (i <= 1) return base_dl(r, y, d, std::min(b, spend_cap_), kr, x);
  note_entry(y, i);
  if (y.size() > size_cap(i)) return Solution::none();

  const Cost be = std::min(b, spend_cap_);
  const CKey key{y.bits(), x.bits(), be, 0, kr, r, i, pack_caps(y, d)};
  if (!key_out) {
    if (auto it = memo_.find(key); it != memo_.end()) {
      ++stats_.memo_hits;
      return it->second;
    }
  }
  ++stats_.frames;

  const DeadlineGate gate{&deadlines_, kr};
  const Value fx = f_.eval(x);
  Solution best;
  GuessKey bkey = kNoGuess;
  auto consider = [&](Solution&& cand, const GuessKey& k) {
    if (!best.feasible || cand.value > best.value ||
        (cand.value == best.value && cand.cost < best.cost) ||
        (cand.value == best.value && cand.cost == best.cost && cand.ungated < best.ungated)) {
      best = std::move(cand);
      bkey = k;
    }
  };
  if (y.empty()) {
    Solution empty;
    empty.feasible = true;
    empty.cost = 0;
    empty.tree = Arborescence(r);
    const VertexSet g = gated_set(empty.tree, gate);
    empty.value = f_.eval(x | g) - fx;
    empty.ungated = 1 - g.size();
    consider(std::move(empty), {-1, -1, -1, -1, -1});
  }

  for (Vertex v = 0; v < n_; ++v) {
    if (v_stride > 1 && v % v_stride != v_mod) continue;
    if (v != r && !lbm_.reachable(r, v)) continue;
    const bool v_in_y = y.contains(v);
    for (VertexSet s : Submasks(y)) {
      if (v_in_y && !s.contains(v)) continue;
      const VertexSet yl = (s | VertexSet::single(v)).without(r);
      const VertexSet yr = (y - s).without(v);
      const Cost lb_l = lower_bound(r, yl);
      if (lb_l > be) continue;
      const Cost lb_r = lower_bound(v, yr);
      if (lb_l + lb_r > be) continue;

      Length d1_hi = v == r ? 0 : std::min<Length>(l_cap_, v_in_y ? d[v] : kNoDeadline);
      for (Vertex w : yr) d1_hi = std::min(d1_hi, d[w]);

      for (Length d1 : lengths_) {
        if (d1 > d1_hi) break;
        CapTable d1t = no_caps();
        for (Vertex w : s) d1t[w] = d[w];
        if (v != r) d1t[v] = std::min(d1, d1t[v]);
        CapTable d2t = no_caps();
        for (Vertex w : yr) d2t[w] = d[w] - d1;

        Solution prev_left;
        for (Cost b1 = lb_l; b1 <= be - lb_r; ++b1) {
          Solution t1 = frame_dl(r, yl, d1t, b1, kr, x, i - 1, 0, 1, nullptr);
          if (!t1.feasible) continue;
          if (prev_left.feasible && t1.tree == prev_left.tree) continue;
          const Length kv = kr + t1.tree.path_length(v);
          // Only what the left tree claims on time is off the table for the
          // right call; late vertices stay claimable through faster routes.
          Solution t2 = frame_dl(v, yr, d2t, be - b1, kv, x | gated_set(t1.tree, gate), i - 1,
                                 0, 1, nullptr);
          prev_left = std::move(t1);
          if (!t2.feasible) continue;
          Solution cand;
          cand.feasible = true;
          cand.tree = merge_and_prune(prev_left.tree, t2.tree);
          if (!fits_caps(cand.tree, y, d)) continue;
          const VertexSet g = gated_set(cand.tree, gate);
          cand.cost = cand.tree.total_cost();
          cand.value = f_.eval(x | g) - fx;
          cand.ungated = cand.tree.size() - g.size();
          consider(std::move(cand), {v, static_cast<std::int64_t>(s.bits()), d1, b1, 0});
        }
      }
    }
  }

  if (key_out)
    *key_out = bkey;
  else
    memo_.emplace(key, best);
  return best;
}

Solution ConstrainedEngine::base_pr(Vertex r, VertexSet y, const CapTable& d, Cost b, int pr,
                                    VertexSet x) {
  note_entry(y, 1);
  ++stats_.frames;
  if (y.size() > 1) return Solution::none();

  const PriorityGate gate{&required_, pr};
  const Value fx = f_.eval(x);
  auto fill = [&](Solution& sol) {
    const VertexSet g = gated_set(sol.tree, gate);
    sol.value = f_.eval(x | g) - fx;
    sol.ungated = sol.tree.size() - g.size();
  };
  Solution best;
  auto consider = [&](Solution&& cand) {
    if (!best.feasible || cand.value > best.value ||
        (cand.value == best.value && cand.cost < best.cost))
      best = std::move(cand);
  };

  if (!y.empty()) {
    const Vertex t = *y.begin();
    const int q0 = static_cast<int>(d[t]);
    if (pc_->at_level(q0)(r, t) > b) return Solution::none();
    // Levels above the floor cost at least as much but may flip t's gate.
    for (int q = q0; q <= pc_->levels(); ++q) {
      const Cost c = pc_->at_level(q)(r, t);
      if (c > b) break;
      Solution sol;
      sol.feasible = true;
      sol.tree = Arborescence(r);
      sol.tree.add_edge(t, TreeEdge{r, c, 0, 0, q});
      sol.cost = c;
      fill(sol);
      consider(std::move(sol));
    }
    return best;
  }

  Solution empty;
  empty.feasible = true;
  empty.cost = 0;
  empty.tree = Arborescence(r);
  fill(empty);
  consider(std::move(empty));
  for (Vertex v = 0; v < n_; ++v) {
    if (v == r) continue;
    for (int q = 1; q <= pc_->levels(); ++q) {
      const Cost c = pc_->at_level(q)(r, v);
      if (c > b) break;
      Solution sol;
      sol.feasible = true;
      sol.tree = Arborescence(r);
      sol.tree.add_edge(v, TreeEdge{r, c, 0, 0, q});
      sol.cost = c;
      fill(sol);
      consider(std::move(sol));
    }
  }
  return best;
}

Solution ConstrainedEngine::frame_pr(Vertex r, VertexSet y, const CapTable& d, Cost b, int pr,
                                     VertexSet x, int i, int v_mod, int v_stride,
                                     GuessKey* key_out) {
  if (i <= 1) return base_pr(r, y, d, std::min(b, spend_cap_), pr, x);
  note_entry(y, i);
  if (y.size() > size_cap(i)) return Solution::none();

  const Cost be = std::min(b, spend_cap_);
  const CKey key{y.bits(), x.bits(), be, 0, pr, r, i, pack_caps(y, d)};
  if (!key_out) {
    if (auto it = memo_.find(key); it != memo_.end()) {
      ++stats_.memo_hits;
      return it->second;
    }
  }
  ++stats_.frames;

  const PriorityGate gate{&required_, pr};
  const Value fx = f_.eval(x);
  Solution best;
  GuessKey bkey = kNoGuess;
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
    empty.cost = 0;
    empty.tree = Arborescence(r);
    const VertexSet g = gated_set(empty.tree, gate);
    empty.value = f_.eval(x | g) - fx;
    empty.ungated = 1 - g.size();
    consider(std::move(empty), {-1, -1, -1, -1, -1});
  }

  for (Vertex v = 0; v < n_; ++v) {
    if (v_stride > 1 && v % v_stride != v_mod) continue;
    if (v != r && !lbm_.reachable(r, v)) continue;
    const bool v_in_y = y.contains(v);
    for (VertexSet s : Submasks(y)) {
      if (v_in_y && !s.contains(v)) continue;
      const VertexSet yl = (s | VertexSet::single(v)).without(r);
      const VertexSet yr = (y - s).without(v);
      const Cost lb_l = lower_bound(r, yl);
      if (lb_l > be) continue;
      const Cost lb_r = lower_bound(v, yr);
      if (lb_l + lb_r > be) continue;

      // A root separator adds no edge, so its priority guess is moot.
      const int q_lo = v == r ? pc_->levels() : 1;
      for (int q = q_lo; q <= pc_->levels(); ++q) {
        CapTable d1t = no_caps();
        for (Vertex w : s) d1t[w] = d[w];
        if (v != r) d1t[v] = std::max<Length>(q, v_in_y ? d[v] : 1);
        CapTable d2t = no_caps();
        for (Vertex w : yr) d2t[w] = d[w];
        // The right subtree hangs below v; its gate can't beat the bottleneck
        // into v, which the guess promises is q.
        const int pv = std::min(pr, q);

        Solution prev_left;
        for (Cost b1 = lb_l; b1 <= be - lb_r; ++b1) {
          Solution t1 = frame_pr(r, yl, d1t, b1, pr, x, i - 1, 0, 1, nullptr);
          if (!t1.feasible) continue;
          if (prev_left.feasible && t1.tree == prev_left.tree) continue;
          Solution t2 = frame_pr(v, yr, d2t, be - b1, pv, x | gated_set(t1.tree, gate), i - 1,
                                 0, 1, nullptr);
          prev_left = std::move(t1);
          if (!t2.feasible) continue;
          Solution cand;
          cand.feasible = true;
          cand.tree = merge_and_prune(prev_left.tree, t2.tree);
          if (!fits_floors(cand.tree, y, d)) continue;
          const VertexSet g = gated_set(cand.tree, gate);
          cand.cost = cand.tree.total_cost();
          cand.value = f_.eval(x | g) - fx;
          cand.ungated = cand.tree.size() - g.size();
          consider(std::move(cand), {v, static_cast<std::int64_t>(s.bits()), q, b1, 0});
        }
      }
    }
  }

  if (key_out)
    *key_out = bkey;
  else
    memo_.emplace(key, best);
  return best;
}

}  // namespace arbor
