#include "arbor/instance.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <random>
#include <sstream>

namespace arbor {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream ss(line.substr(0, line.find('#')));
  std::vector<std::string> toks;
  std::string t;
  while (ss >> t) toks.push_back(std::move(t));
  return toks;
}

std::int64_t parse_int(const std::string& tok, int line_no, const char* what, std::int64_t lo,
                       std::int64_t hi) {
  std::int64_t x = 0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    throw ParseError(line_no, std::string(what) + ": not an integer: " + tok);
  if (x < lo || x > hi)
    throw ParseError(line_no, std::string(what) + " out of range [" + std::to_string(lo) + ", " +
                                  std::to_string(hi) + "]: " + tok);
  return x;
}

void want_args(const std::vector<std::string>& t, int line_no, size_t lo, size_t hi) {
  if (t.size() - 1 < lo || t.size() - 1 > hi)
    throw ParseError(line_no, t[0] + ": wrong argument count");
}

// One `ids:k` token of a partition line.
std::pair<VertexSet, int> parse_part(const std::string& tok, int line_no, int n) {
  const auto colon = tok.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size())
    throw ParseError(line_no, "matroid partition part must look like 0,2:1: " + tok);
  VertexSet ids;
  std::istringstream ss(tok.substr(0, colon));
  std::string id;
  while (std::getline(ss, id, ',')) {
    const Vertex v = static_cast<Vertex>(parse_int(id, line_no, "partition vertex", 0, n - 1));
    if (ids.contains(v)) throw ParseError(line_no, "partition part repeats vertex " + id);
    ids = ids.with(v);
  }
  if (ids.empty()) throw ParseError(line_no, "empty partition part: " + tok);
  const int k =
      static_cast<int>(parse_int(tok.substr(colon + 1), line_no, "partition cap", 0, kMaxVertices));
  return {ids, k};
}

}  // namespace

Instance parse_instance(std::istream& in) {
  Instance inst;
  bool have_header = false, have_n = false, have_root = false, have_budget = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = tokenize(line);
    if (t.empty()) continue;
    if (!have_header) {
      if (t.size() != 2 || t[1] != "v1")
        throw ParseError(line_no, "expected a header like `sto v1`");
      if (t[0] == "sto") inst.format = Format::kSto;
      else if (t[0] == "stolc") inst.format = Format::kStoLc;
      else if (t[0] == "prio") inst.format = Format::kPrio;
      else if (t[0] == "bab") inst.format = Format::kBab;
      else throw ParseError(line_no, "unknown format: " + t[0]);
      have_header = true;
      continue;
    }
    if (t[0] == "n") {
      want_args(t, line_no, 1, 1);
      if (have_n) throw ParseError(line_no, "duplicate n");
      inst.n = static_cast<int>(parse_int(t[1], line_no, "n", 1, kMaxVertices));
      inst.rewards.assign(static_cast<size_t>(inst.n), 0);
      inst.terminal_priority.assign(static_cast<size_t>(inst.n), 0);
      inst.deadlines.assign(static_cast<size_t>(inst.n), kNoDeadline);
      have_n = true;
      continue;
    }
    if (!have_n) throw ParseError(line_no, "n must come before " + t[0]);
    const auto vertex_arg = [&](const std::string& tok) {
      return static_cast<Vertex>(parse_int(tok, line_no, "vertex", 0, inst.n - 1));
    };
    if (t[0] == "root") {
      want_args(t, line_no, 1, 1);
      if (have_root) throw ParseError(line_no, "more than one root");
      inst.root = vertex_arg(t[1]);
      have_root = true;
    } else if (t[0] == "budget") {
      want_args(t, line_no, 1, 1);
      if (have_budget) throw ParseError(line_no, "duplicate budget");
      inst.budget = parse_int(t[1], line_no, "budget", 0, kMaxBudget);
      have_budget = true;
    } else if (t[0] == "lbudget") {
      want_args(t, line_no, 1, 1);
      if (inst.format != Format::kStoLc)
        throw ParseError(line_no, "lbudget is only valid in stolc files");
      if (inst.lbudget >= 0) throw ParseError(line_no, "duplicate lbudget");
      inst.lbudget = parse_int(t[1], line_no, "lbudget", 0, kMaxBudget);
    } else if (t[0] == "edge") {
      want_args(t, line_no, 3, 5);
      EdgeSpec e;
      e.u = vertex_arg(t[1]);
      e.v = vertex_arg(t[2]);
      e.cost = parse_int(t[3], line_no, "edge cost", 0, kMaxBudget);
      if (t.size() > 4) e.length = parse_int(t[4], line_no, "edge length", 0, kMaxBudget);
      if (t.size() > 5)
        e.priority = static_cast<int>(parse_int(t[5], line_no, "edge priority", 1, kMaxPriority));
      if (e.u == e.v) throw ParseError(line_no, "self-loop edge");
      inst.edges.push_back(e);
    } else if (t[0] == "reward") {
      want_args(t, line_no, 2, 2);
      const Vertex v = vertex_arg(t[1]);
      if (inst.rewards[v] != 0) throw ParseError(line_no, "duplicate reward for vertex " + t[1]);
      inst.rewards[v] = parse_int(t[2], line_no, "reward", 0, kMaxBudget);
    } else if (t[0] == "terminal") {
      want_args(t, line_no, 1, 2);
      const Vertex v = vertex_arg(t[1]);
      if (inst.terminals.contains(v)) throw ParseError(line_no, "duplicate terminal " + t[1]);
      if (t.size() > 2 && inst.format != Format::kPrio)
        throw ParseError(line_no, "terminal priority is only valid in prio files");
      inst.terminals = inst.terminals.with(v);
      inst.terminal_priority[v] =
          t.size() > 2 ? static_cast<int>(parse_int(t[2], line_no, "terminal priority", 1, kMaxPriority))
                       : 1;
    } else if (t[0] == "deadline") {
      want_args(t, line_no, 2, 2);
      if (inst.format != Format::kStoLc)
        throw ParseError(line_no, "deadline is only valid in stolc files");
      const Vertex v = vertex_arg(t[1]);
      if (inst.deadlines[v] != kNoDeadline)
        throw ParseError(line_no, "duplicate deadline for vertex " + t[1]);
      inst.deadlines[v] = parse_int(t[2], line_no, "deadline", 0, kMaxBudget);
    } else if (t[0] == "matroid") {
      want_args(t, line_no, 2, 1 + static_cast<size_t>(kMaxVertices));
      if (inst.format != Format::kSto)
        throw ParseError(line_no, "matroid is only valid in sto files");
      if (inst.matroid != MatroidSpec::kNone) throw ParseError(line_no, "duplicate matroid");
      if (t[1] == "uniform") {
        want_args(t, line_no, 2, 2);
        inst.matroid = MatroidSpec::kUniform;
        inst.uniform_k = static_cast<int>(parse_int(t[2], line_no, "uniform cap", 0, kMaxVertices));
      } else if (t[1] == "partition") {
        if (t.size() < 3) throw ParseError(line_no, "matroid partition needs at least one part");
        inst.matroid = MatroidSpec::kPartition;
        VertexSet used;
        for (size_t j = 2; j < t.size(); ++j) {
          const auto part = parse_part(t[j], line_no, inst.n);
          if (used.intersects(part.first))
            throw ParseError(line_no, "partition parts overlap at " + t[j]);
          used = used | part.first;
          inst.parts.push_back(part);
        }
      } else {
        throw ParseError(line_no, "unknown matroid kind: " + t[1]);
      }
    } else {
      throw ParseError(line_no, "unknown directive: " + t[0]);
    }
  }
  if (!have_header) throw ParseError(line_no, "empty file: missing header");
  if (!have_n) throw ParseError(line_no, "missing n");
  if (!have_root) throw ParseError(line_no, "missing root");
  if (!have_budget) throw ParseError(line_no, "missing budget");
  return inst;
}

Instance parse_instance(const std::string& text) {
  std::istringstream ss(text);
  return parse_instance(ss);
}

const char* format_name(Format f) {
  switch (f) {
    case Format::kSto: return "sto";
    case Format::kStoLc: return "stolc";
    case Format::kPrio: return "prio";
    case Format::kBab: return "bab";
  }
  return "?";
}

std::string emit_instance(const Instance& inst) {
  std::ostringstream out;
  out << format_name(inst.format) << " v1\n";
  out << "n " << inst.n << '\n';
  out << "root " << inst.root << '\n';
  out << "budget " << inst.budget << '\n';
  if (inst.lbudget >= 0) out << "lbudget " << inst.lbudget << '\n';
  for (const auto& e : inst.edges) {
    out << "edge " << e.u << ' ' << e.v << ' ' << e.cost;
    if (e.priority != 1) out << ' ' << e.length << ' ' << e.priority;
    else if (e.length != 0) out << ' ' << e.length;
    out << '\n';
  }
  for (Vertex v = 0; v < inst.n; ++v)
    if (inst.rewards[v] != 0) out << "reward " << v << ' ' << inst.rewards[v] << '\n';
  for (Vertex v : inst.terminals) {
    out << "terminal " << v;
    if (inst.terminal_priority[v] > 1) out << ' ' << inst.terminal_priority[v];
    out << '\n';
  }
  if (inst.matroid == MatroidSpec::kUniform) {
    out << "matroid uniform " << inst.uniform_k << '\n';
  } else if (inst.matroid == MatroidSpec::kPartition) {
    out << "matroid partition";
    for (const auto& [ids, k] : inst.parts) {
      out << ' ';
      bool first = true;
      for (Vertex v : ids) {
        if (!first) out << ',';
        out << v;
        first = false;
      }
      out << ':' << k;
    }
    out << '\n';
  }
  for (Vertex v = 0; v < inst.n; ++v)
    if (inst.deadlines[v] != kNoDeadline) out << "deadline " << v << ' ' << inst.deadlines[v] << '\n';
  return out.str();
}

bool Instance::operator==(const Instance& o) const {
  if (format != o.format || n != o.n || root != o.root || budget != o.budget ||
      lbudget != o.lbudget || edges.size() != o.edges.size())
    return false;
  for (size_t i = 0; i < edges.size(); ++i) {
    const auto &a = edges[i], &b = o.edges[i];
    if (a.u != b.u || a.v != b.v || a.cost != b.cost || a.length != b.length ||
        a.priority != b.priority)
      return false;
  }
  return rewards == o.rewards && terminals == o.terminals &&
         terminal_priority == o.terminal_priority && deadlines == o.deadlines &&
         matroid == o.matroid && uniform_k == o.uniform_k && parts == o.parts;
}

DirectedGraph instance_graph(const Instance& inst) { return DirectedGraph::make(inst.n, inst.edges); }

RewardOracle instance_reward(const Instance& inst) { return RewardOracle::linear(inst.rewards); }

Matroid instance_matroid(const Instance& inst) {
  switch (inst.matroid) {
    case MatroidSpec::kUniform: return Matroid::uniform(inst.n, inst.uniform_k);
    case MatroidSpec::kPartition: return Matroid::partition(inst.n, inst.parts);
    case MatroidSpec::kNone: break;
  }
  throw std::logic_error("instance has no matroid line");
}

int instance_levels(const Instance& inst) {
  int levels = 1;
  for (const auto& e : inst.edges) levels = std::max(levels, e.priority);
  for (Vertex v : inst.terminals) levels = std::max(levels, inst.terminal_priority[v]);
  return levels;
}

std::vector<int> instance_required(const Instance& inst) {
  std::vector<int> required(static_cast<size_t>(inst.n), 1);
  for (Vertex v : inst.terminals) required[v] = inst.terminal_priority[v];
  return required;
}

namespace {

// Same discipline as the test helpers: mt19937_64 raw draws, no <random>
// distributions, so identical seeds give identical files on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(g_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  int irange(int lo, int hi) { return static_cast<int>(range(lo, hi)); }
  bool chance(int num, int den) { return range(1, den) <= num; }

 private:
  std::mt19937_64 g_;
};

Instance blank(Format format, int n) {
  Instance inst;
  inst.format = format;
  inst.n = n;
  inst.rewards.assign(static_cast<size_t>(n), 0);
  inst.terminal_priority.assign(static_cast<size_t>(n), 0);
  inst.deadlines.assign(static_cast<size_t>(n), kNoDeadline);
  return inst;
}

void add_edge(Instance& inst, Vertex u, Vertex v, Cost c, Length l = 0, int p = 1) {
  EdgeSpec e;
  e.u = u;
  e.v = v;
  e.cost = c;
  e.length = l;
  e.priority = p;
  inst.edges.push_back(e);
}

VertexSet pick_terminals(Rng& rng, int n, int count) {
  VertexSet s;
  while (s.size() < count) s = s.with(static_cast<Vertex>(rng.range(1, n - 1)));
  return s;
}

void random_rewards(Instance& inst, Rng& rng) {
  bool any = false;
  for (Vertex v = 0; v < inst.n; ++v) {
    if (v == inst.root) continue;
    inst.rewards[v] = rng.range(0, 4);
    any = any || inst.rewards[v] > 0;
  }
  if (!any) inst.rewards[inst.n - 1] = 1;  // keep the instance non-vacuous
}

// Strongly connected base ring; the closure is complete whatever else lands
// on top.
void add_ring(Instance& inst, Rng& rng, Cost lo, Cost hi, Length max_len, int priority) {
  for (Vertex v = 0; v < inst.n; ++v)
    add_edge(inst, v, (v + 1) % inst.n, rng.range(lo, hi),
             max_len > 0 ? rng.range(0, max_len) : 0, priority);
}

Instance gen_random_metric(const GenConfig& gc) {
  Rng rng(gc.seed);
  Instance inst = blank(Format::kSto, gc.n);
  add_ring(inst, rng, 1, gc.max_cost, 0, 1);
  for (Vertex u = 0; u < gc.n; ++u)
    for (Vertex v = 0; v < gc.n; ++v)
      if (u != v && rng.chance(35, 100)) add_edge(inst, u, v, rng.range(1, gc.max_cost));
  random_rewards(inst, rng);
  inst.terminals = pick_terminals(rng, gc.n, gc.n > 3 ? rng.irange(2, 3) : 1);
  inst.budget = rng.range(gc.max_cost, gc.max_cost * std::max<Cost>(2, gc.n / 2));
  return inst;
}

Instance gen_layered(const GenConfig& gc) {
  Rng rng(gc.seed);
  Instance inst = blank(Format::kSto, gc.n);
  // root alone up front, the rest split into three bands (two when small)
  const int bands = gc.n >= 7 ? 3 : 2;
  std::vector<std::pair<Vertex, Vertex>> layer(static_cast<size_t>(bands) + 1);
  layer[0] = {0, 0};
  Vertex next = 1;
  for (int b = 1; b <= bands; ++b) {
    const int left = gc.n - next;
    const int width = b == bands ? left : std::max(1, left / (bands - b + 1));
    layer[b] = {next, next + width - 1};
    next += width;
  }
  for (int b = 0; b < bands; ++b)
    for (Vertex u = layer[b].first; u <= layer[b].second; ++u)
      for (Vertex v = layer[b + 1].first; v <= layer[b + 1].second; ++v)
        if (rng.chance(7, 10)) add_edge(inst, u, v, rng.range(1, gc.max_cost));
  // everyone gets an in-edge even when the 70% coin said no all row long
  for (int b = 1; b <= bands; ++b)
    for (Vertex v = layer[b].first; v <= layer[b].second; ++v)
      add_edge(inst, static_cast<Vertex>(rng.range(layer[b - 1].first, layer[b - 1].second)), v,
               rng.range(1, gc.max_cost));
  for (Vertex v = layer[bands].first; v <= layer[bands].second; ++v) {
    inst.rewards[v] = rng.range(2, 5);
    inst.terminals = inst.terminals.with(v);
  }
  for (Vertex v = layer[1].first; v < layer[bands].first; ++v) inst.rewards[v] = rng.range(0, 1);
  inst.budget = rng.range(2 * gc.max_cost, 3 * gc.max_cost + gc.n);
  return inst;
}

// Mid-priced direct spokes bait the greedy; the expensive hub amortizes over
// its nearly free fan-out.
Instance gen_star_trap(const GenConfig& gc) {
  if (gc.n < 4) throw std::invalid_argument("star-trap needs n >= 4");
  if (gc.max_cost < 4) throw std::invalid_argument("star-trap needs max-cost >= 4");
  Rng rng(gc.seed);
  Instance inst = blank(Format::kSto, gc.n);
  const Vertex hub = 1;
  add_edge(inst, 0, hub, gc.max_cost);
  for (Vertex leaf = 2; leaf < gc.n; ++leaf) {
    add_edge(inst, hub, leaf, rng.range(0, 1));
    add_edge(inst, 0, leaf, rng.range(std::max<Cost>(2, gc.max_cost / 2), gc.max_cost - 1));
    inst.rewards[leaf] = 1;
    inst.terminals = inst.terminals.with(leaf);
  }
  inst.budget = gc.max_cost + (gc.n - 2) + rng.range(0, 2);
  return inst;
}

Instance gen_two_cost(const GenConfig& gc) {
  Rng rng(gc.seed);
  Instance inst = blank(Format::kStoLc, gc.n);
  add_ring(inst, rng, 1, gc.max_cost, gc.max_length, 1);
  for (Vertex u = 0; u < gc.n; ++u)
    for (Vertex v = 0; v < gc.n; ++v)
      if (u != v && rng.chance(35, 100))
        add_edge(inst, u, v, rng.range(1, gc.max_cost), rng.range(0, gc.max_length));
  random_rewards(inst, rng);
  inst.terminals = pick_terminals(rng, gc.n, gc.n > 3 ? 2 : 1);
  inst.budget = rng.range(gc.max_cost, gc.max_cost * std::max<Cost>(2, gc.n / 2));
  inst.lbudget = rng.range(gc.max_length, gc.n * gc.max_length);
  return inst;
}

// Pricey ring that works at every level, cheap shortcuts that may not.
Instance gen_priority(const GenConfig& gc) {
  Rng rng(gc.seed);
  Instance inst = blank(Format::kPrio, gc.n);
  add_ring(inst, rng, std::max<Cost>(1, gc.max_cost / 2), gc.max_cost, 0, gc.levels);
  for (Vertex u = 0; u < gc.n; ++u)
    for (Vertex v = 0; v < gc.n; ++v)
      if (u != v && rng.chance(35, 100))
        add_edge(inst, u, v, rng.range(1, gc.max_cost), 0, rng.irange(1, gc.levels));
  inst.terminals = pick_terminals(rng, gc.n, gc.n > 3 ? rng.irange(2, 3) : 1);
  for (Vertex t : inst.terminals) {
    inst.terminal_priority[t] = rng.irange(1, gc.levels);
    inst.rewards[t] = 1;
  }
  inst.budget = rng.range(gc.max_cost, 3 * gc.max_cost);
  return inst;
}

}  // namespace

Instance generate_instance(const std::string& family, const GenConfig& gc) {
  if (gc.n < 2 || gc.n > kMaxVertices) throw std::invalid_argument("generator: n out of range");
  if (gc.max_cost < 2 || gc.max_length < 1 || gc.levels < 1 || gc.levels > 9)
    throw std::invalid_argument("generator: bad cost/length/level bounds");
  // budgets derived below stay within what the parser accepts
  if (gc.max_cost > (kMaxBudget >> 6) || gc.max_length > (kMaxBudget >> 6))
    throw std::invalid_argument("generator: cost/length bound too large");
  Instance inst;
  if (family == "random-metric") inst = gen_random_metric(gc);
  else if (family == "layered") {
    if (gc.n < 3) throw std::invalid_argument("layered needs n >= 3");
    inst = gen_layered(gc);
  } else if (family == "star-trap") inst = gen_star_trap(gc);
  else if (family == "two-cost") inst = gen_two_cost(gc);
  else if (family == "priority") inst = gen_priority(gc);
  else throw std::invalid_argument("unknown generator family: " + family);
  // plain terminals read back with requirement 1; match that up front
  for (Vertex t : inst.terminals)
    if (inst.terminal_priority[t] == 0) inst.terminal_priority[t] = 1;
  return inst;
}

}  // namespace arbor
