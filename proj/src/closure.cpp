#include "arbor/closure.hpp"

#include <algorithm>
#include <queue>
#include <tuple>

namespace arbor {

CostMatrix build_metric_closure(const DirectedGraph& g) {
  CostMatrix m(g.n);
  for (const auto& e : g.edges)
    m.at(e.u, e.v) = std::min(m.at(e.u, e.v), e.cost);
  for (int k = 0; k < g.n; ++k)
    for (int i = 0; i < g.n; ++i) {
      if (!m.reachable(i, k)) continue;
      for (int j = 0; j < g.n; ++j) {
        if (!m.reachable(k, j)) continue;
        const Cost through = m(i, k) + m(k, j);
        if (through < m(i, j)) m.at(i, j) = through;
      }
    }
  return m;
}

CostMatrix TwoCostClosure::min_cost_matrix() const {
  CostMatrix m(n_);
  for (Vertex u = 0; u < n_; ++u)
    for (Vertex v = 0; v < n_; ++v)
      if (u != v) m.at(u, v) = min_cost(u, v);
  return m;
}

namespace {

void set_bit(std::vector<std::uint64_t>& bits, Length i) {
  bits[static_cast<size_t>(i) >> 6] |= std::uint64_t{1} << (i & 63);
}

bool test_bit(const std::vector<std::uint64_t>& bits, Length i) {
  return (bits[static_cast<size_t>(i) >> 6] >> (i & 63)) & 1;
}

// out |= b << shift (word-level, truncated at the bitset size)
void or_shifted(std::vector<std::uint64_t>& out, const std::vector<std::uint64_t>& b, Length shift) {
  const size_t word = static_cast<size_t>(shift) >> 6;
  const int bit = static_cast<int>(shift & 63);
  for (size_t w = 0; w + word < out.size(); ++w) {
    std::uint64_t val = b[w] << bit;
    if (bit && w > 0) val |= b[w - 1] >> (64 - bit);
    out[w + word] |= val;
  }
}

// {a+b : a in A, b in B}, capped at l_max.
std::vector<std::uint64_t> sum_sets(const std::vector<std::uint64_t>& a,
                                    const std::vector<std::uint64_t>& b, Length l_max) {
  std::vector<std::uint64_t> out(a.size(), 0);
  for (Length x = 0; x <= l_max; ++x)
    if (test_bit(a, x)) or_shifted(out, b, x);
  return out;
}

}  // namespace

void TwoCostClosure::finalize_domains(const std::vector<Length>& edge_lengths) {
  const size_t words = static_cast<size_t>(l_max_ / 64) + 1;
  // Path lengths: every sum of edge lengths up to l_max, iterated to the
  // additive fixpoint. Tree paths over the closure can concatenate far more
  // than n-1 original edges, so a round cap would under-cover; the fixpoint
  // is a superset of everything the guess loops must see.
  std::vector<std::uint64_t> reach(words, 0);
  set_bit(reach, 0);
  for (;;) {
    std::vector<std::uint64_t> next = reach;
    for (Length l : edge_lengths)
      or_shifted(next, reach, l);
    for (size_t w = 0; w < words; ++w) next[w] |= reach[w];
    if (static_cast<Length>(words * 64) > l_max_ + 1) {
      // mask stray high bits so comparisons stay exact
      const int used = static_cast<int>((l_max_ + 1) & 63);
      if (used) next[words - 1] &= (std::uint64_t{1} << used) - 1;
    }
    if (next == reach) break;
    reach = std::move(next);
  }
  path_length_bits_ = reach;

  sum_bits_.assign(static_cast<size_t>(n_) + 1, std::vector<std::uint64_t>(words, 0));
  set_bit(sum_bits_[0], 0);
  for (int m = 1; m <= n_; ++m)
    sum_bits_[m] = sum_sets(sum_bits_[m - 1], path_length_bits_, l_max_);
}

TwoCostClosure build_two_cost_closure(const DirectedGraph& g, Length l_max) {
  TwoCostClosure closure(g.n, l_max);

  std::vector<std::vector<EdgeSpec>> out(g.n);
  std::vector<Length> lengths;
  for (const auto& e : g.edges) {
    if (e.length > l_max) continue;
    out[e.u].push_back(e);
    lengths.push_back(e.length);
  }
  std::sort(lengths.begin(), lengths.end());
  lengths.erase(std::unique(lengths.begin(), lengths.end()), lengths.end());

  const size_t layers = static_cast<size_t>(l_max) + 1;
  // Per source: Dijkstra over states (v, length used), ordered by
  // (cost, true_length) so each state ends with the smallest true length
  // among its min-cost paths.
  for (Vertex s = 0; s < g.n; ++s) {
    std::vector<Cost> dist(static_cast<size_t>(g.n) * layers, kInfeasibleCost);
    std::vector<Length> true_len(static_cast<size_t>(g.n) * layers, 0);
    auto idx = [&](Vertex v, Length l) { return static_cast<size_t>(v) * layers + static_cast<size_t>(l); };

    using State = std::tuple<Cost, Length, Length, Vertex>;  // cost, true, length, v
    std::priority_queue<State, std::vector<State>, std::greater<State>> pq;
    dist[idx(s, 0)] = 0;
    pq.emplace(0, 0, 0, s);
    while (!pq.empty()) {
      auto [c, t, l, v] = pq.top();
      pq.pop();
      if (c != dist[idx(v, l)] || t != true_len[idx(v, l)]) continue;
      for (const auto& e : out[v]) {
        const Length nl = l + e.length;
        if (nl > l_max) continue;
        const Cost nc = c + e.cost;
        const Length nt = t + e.true_length;
        auto& dc = dist[idx(e.v, nl)];
        auto& dt = true_len[idx(e.v, nl)];
        if (nc < dc || (nc == dc && nt < dt)) {
          dc = nc;
          dt = nt;
          pq.emplace(nc, nt, nl, e.v);
        }
      }
    }

    closure.frontier_mut(s, s).assign(1, TwoCostEntry{0, 0, 0});  // the empty path
    for (Vertex v = 0; v < g.n; ++v) {
      if (v == s) continue;
      // Ascending length with a running cost minimum: strict improvements are
      // exactly the Pareto points. They come out in descending-cost order.
      std::vector<TwoCostEntry> drops;
      Cost best = kInfeasibleCost;
      for (Length l = 0; l <= l_max; ++l) {
        const Cost c = dist[idx(v, l)];
        if (c < best) {
          drops.push_back({c, l, true_len[idx(v, l)]});
          best = c;
        }
      }
      closure.frontier_mut(s, v).assign(drops.rbegin(), drops.rend());
    }
  }

  closure.finalize_domains(lengths);
  return closure;
}

PriorityClosure build_priority_closure(const DirectedGraph& g, int levels) {
  PriorityClosure closure(g.n, levels);
  for (int q = 1; q <= levels; ++q) {
    DirectedGraph sub;
    sub.n = g.n;
    for (const auto& e : g.edges)
      if (e.priority >= q) sub.edges.push_back(e);
    closure.at_level_mut(q) = build_metric_closure(sub);
  }
  return closure;
}

}  // namespace arbor
