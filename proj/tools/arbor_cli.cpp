// Command-line harness: solve / oracle / compare / bench / gen over the
// line-oriented instance files in instance.hpp.
//
// Exit codes: 0 success, 1 malformed or unusable input, 2 infeasible
// (unreachable terminal or rank), 3 oracle refused (too large), 64 usage.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "arbor/closure.hpp"
#include "arbor/constrained.hpp"
#include "arbor/engine.hpp"
#include "arbor/exact.hpp"
#include "arbor/graph.hpp"
#include "arbor/instance.hpp"
#include "arbor/reductions.hpp"
#include "arbor/report.hpp"
#include "arbor/reward.hpp"
#include "arbor/types.hpp"

using namespace arbor;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMalformed = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitTooLarge = 3;
constexpr int kExitUsage = 64;

// Length-indexed structures size with the length cap, so refuse caps that
// only make sense for the theory write-up.
constexpr Length kMaxProductLength = Length{1} << 16;
constexpr int kMaxLevels = 64;
constexpr int kMaxBabVertices = 10;  // scaled length budget is n^4

struct BadInput : std::runtime_error {  // exit 1
  using std::runtime_error::runtime_error;
};
struct BadUsage : std::runtime_error {  // exit 64
  using std::runtime_error::runtime_error;
};

enum class Problem { kSto, kDst, kPolymatroid, kBab, kPriority };

const char* problem_name(Problem p) {
  switch (p) {
    case Problem::kSto: return "sto";
    case Problem::kDst: return "dst";
    case Problem::kPolymatroid: return "polymatroid";
    case Problem::kBab: return "bab";
    case Problem::kPriority: return "priority";
  }
  return "?";
}

Problem lookup_problem(const std::string& s) {
  for (Problem p : {Problem::kSto, Problem::kDst, Problem::kPolymatroid, Problem::kBab,
                    Problem::kPriority})
    if (s == problem_name(p)) return p;
  throw BadUsage("unknown problem: " + s);
}

Problem default_problem(Format f) {
  switch (f) {
    case Format::kSto:
    case Format::kStoLc: return Problem::kSto;
    case Format::kPrio: return Problem::kPriority;
    case Format::kBab: return Problem::kBab;
  }
  return Problem::kSto;
}

bool has_deadline(const Instance& inst) {
  for (Length d : inst.deadlines)
    if (d != kNoDeadline) return true;
  return false;
}

Engine default_engine(const Instance& inst, Problem p) {
  switch (p) {
    case Problem::kSto:
      if (inst.format == Format::kStoLc) return has_deadline(inst) ? Engine::kRgDl : Engine::kRgDc;
      if (inst.format == Format::kPrio) return Engine::kRgPr;
      return Engine::kRg;
    case Problem::kDst:
    case Problem::kPolymatroid: return Engine::kRgQp;
    case Problem::kBab: return Engine::kRgDc;
    case Problem::kPriority: return Engine::kRgPr;
  }
  return Engine::kRg;
}

bool plain_engine(Engine e) {
  return e == Engine::kRg || e == Engine::kRgQp || e == Engine::kRgFast;
}

struct RunOpts {
  int depth = 0;
  double epsilon = 1.0;
  int block = 0;
  int workers = 1;
  std::uint64_t seed = 0;
  bool oracle = false;
  bool timing = false;
  bool record = false;
  std::string out;
};

SolverConfig make_config(Engine e, const RunOpts& o) {
  SolverConfig cfg;
  cfg.engine = e;
  cfg.depth = o.depth;
  cfg.block = o.block;
  cfg.epsilon = o.epsilon;
  cfg.workers = o.workers;
  return cfg;
}

struct Row {
  bool ok = false;
  std::string fail;  // infeasibility, when !ok
  bool maximize = true;
  std::int64_t result = 0;  // value, cost, or buy-at-bulk objective
  Cost cost = 0;            // minimization: tree cost (= result except bab)
  std::optional<std::int64_t> opt;
  bool oracle_too_large = false;
  int depth = 0;
  int block = 1;
  std::uint64_t subproblems = 0;
  int iterations = -1;  // covering drivers only
  int rounds = -1;
  Cost guess = -1;
  double wall_ms = 0;
  Arborescence tree;
  VertexSet keep;  // vertices --out must not shortcut
};

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadInput("cannot open " + path);
  return parse_instance(in);
}

Length deadline_cap(const Instance& inst) {
  Length cap = 0;
  for (Length d : inst.deadlines)
    if (d != kNoDeadline) cap = std::max(cap, d);
  return cap;
}

void check_levels(const Instance& inst) {
  if (instance_levels(inst) > kMaxLevels)
    throw BadInput("more than " + std::to_string(kMaxLevels) + " priority levels");
}

Row run_sto(const Instance& inst, Engine eng, const RunOpts& o) {
  Row row;
  const DirectedGraph g = instance_graph(inst);
  const RewardOracle f = instance_reward(inst);
  const SolverConfig cfg = make_config(eng, o);
  if (plain_engine(eng)) {
    const SolveOutcome out =
        solve_sto({inst.n, inst.root, inst.budget, build_metric_closure(g)}, f, cfg);
    row.result = out.solution.value;
    row.tree = out.solution.tree;
    row.depth = out.depth;
    row.block = out.block;
    row.subproblems = out.stats.frames;
  } else if (eng == Engine::kRgDc) {
    if (inst.lbudget < 0) throw BadInput("rg-dc needs an lbudget line");
    if (inst.lbudget > kMaxProductLength) throw BadInput("lbudget too large for the length closure");
    const TwoCostClosure tc = build_two_cost_closure(g, inst.lbudget);
    ConstrainedEngine engine(tc, f, cfg);
    ConstrainedSubproblem sub;
    sub.root = inst.root;
    sub.budget = inst.budget;
    sub.length_budget = inst.lbudget;
    sub.depth = engine.depth();
    const Solution sol = engine.solve(sub);
    row.result = sol.value;
    row.tree = sol.tree;
    row.depth = engine.depth();
    row.subproblems = engine.stats().frames;
  } else if (eng == Engine::kRgDl) {
    if (!has_deadline(inst)) throw BadInput("rg-dl needs deadline lines");
    const Length cap = deadline_cap(inst);
    if (cap > kMaxProductLength) throw BadInput("deadline too large for the length closure");
    const TwoCostClosure tc = build_two_cost_closure(g, cap);
    ConstrainedEngine engine(tc, f, inst.deadlines, cfg);
    ConstrainedSubproblem sub;
    sub.root = inst.root;
    sub.budget = inst.budget;
    sub.depth = engine.depth();
    const Solution sol = engine.solve(sub);
    row.result = sol.value;
    row.tree = sol.tree;
    row.depth = engine.depth();
    row.subproblems = engine.stats().frames;
  } else {  // kRgPr
    check_levels(inst);
    const PriorityClosure pc = build_priority_closure(g, instance_levels(inst));
    ConstrainedEngine engine(pc, f, instance_required(inst), cfg);
    ConstrainedSubproblem sub;
    sub.root = inst.root;
    sub.budget = inst.budget;
    sub.depth = engine.depth();
    const Solution sol = engine.solve(sub);
    row.result = sol.value;
    row.tree = sol.tree;
    row.depth = engine.depth();
    row.subproblems = engine.stats().frames;
  }
  row.keep = row.tree.vertices();
  row.ok = true;
  return row;
}

VertexSet want_terminals(const Instance& inst, const char* what) {
  const VertexSet want = inst.terminals.without(inst.root);
  if (want.empty()) throw BadInput(std::string(what) + " needs terminal lines beyond the root");
  return want;
}

void fill_driver(Row& row, const DriveResult& res, VertexSet keep) {
  row.maximize = false;
  row.result = res.objective;
  row.cost = res.cost;
  row.tree = res.tree;
  row.depth = res.depth;
  row.subproblems = res.stats.frames;
  row.iterations = res.iterations;
  row.rounds = res.rounds;
  row.guess = res.budget;
  row.keep = keep;
  row.ok = true;
}

Row run_dst(const Instance& inst, Engine eng, const RunOpts& o) {
  if (!plain_engine(eng)) throw BadUsage("dst runs on rg, rg-qp or rg-fast");
  Row row;
  const VertexSet want = want_terminals(inst, "dst");
  const CostMatrix m = build_metric_closure(instance_graph(inst));
  const DriveResult res = solve_directed_steiner(m, inst.root, want, make_config(eng, o));
  if (res.status == DriveStatus::kUnreachableTerminal) {
    row.fail = "terminal " + std::to_string(res.blocked) + " is unreachable from root " +
               std::to_string(inst.root);
    return row;
  }
  fill_driver(row, res, want.with(inst.root));
  return row;
}

Row run_polymatroid(const Instance& inst, Engine eng, const RunOpts& o) {
  if (!plain_engine(eng)) throw BadUsage("polymatroid runs on rg, rg-qp or rg-fast");
  if (inst.matroid == MatroidSpec::kNone) throw BadInput("polymatroid needs a matroid line");
  Row row;
  const CostMatrix m = build_metric_closure(instance_graph(inst));
  const Matroid mat = instance_matroid(inst);
  const DriveResult res = solve_polymatroid(m, inst.root, mat, make_config(eng, o));
  if (res.status == DriveStatus::kRankUnreachable) {
    row.fail = "matroid rank " + std::to_string(mat.full_rank()) +
               " is unreachable from root " + std::to_string(inst.root);
    return row;
  }
  fill_driver(row, res, res.tree.vertices());  // every vertex may carry rank
  return row;
}

Row run_bab(const Instance& inst, Engine eng, const RunOpts& o) {
  if (inst.format != Format::kBab) throw BadUsage("bab needs a bab instance file");
  if (eng != Engine::kRgDc) throw BadUsage("bab pins the rg-dc recursion");
  if (inst.n > kMaxBabVertices)
    throw BadInput("bab driver is sized for n <= " + std::to_string(kMaxBabVertices));
  Row row;
  const VertexSet want = want_terminals(inst, "bab");
  const DriveResult res =
      solve_buy_at_bulk(instance_graph(inst), inst.root, want, make_config(eng, o));
  if (res.status == DriveStatus::kUnreachableTerminal) {
    row.fail = "terminal " + std::to_string(res.blocked) + " is unreachable from root " +
               std::to_string(inst.root);
    return row;
  }
  fill_driver(row, res, want.with(inst.root));
  return row;
}

Row run_priority(const Instance& inst, Engine eng, const RunOpts& o) {
  if (inst.format != Format::kPrio) throw BadUsage("priority needs a prio instance file");
  if (eng != Engine::kRgPr) throw BadUsage("priority pins the rg-pr recursion");
  check_levels(inst);
  Row row;
  const VertexSet want = want_terminals(inst, "priority");
  const DriveResult res =
      solve_priority_steiner(instance_graph(inst), instance_levels(inst), inst.root, want,
                             inst.terminal_priority, make_config(eng, o));
  if (res.status == DriveStatus::kUnreachableTerminal) {
    row.fail = "terminal " + std::to_string(res.blocked) + " is unreachable at priority " +
               std::to_string(inst.terminal_priority[res.blocked]);
    return row;
  }
  fill_driver(row, res, want.with(inst.root));
  return row;
}

Row run_row(const Instance& inst, Problem p, Engine eng, const RunOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  Row row;
  switch (p) {
    case Problem::kSto: row = run_sto(inst, eng, o); break;
    case Problem::kDst: row = run_dst(inst, eng, o); break;
    case Problem::kPolymatroid: row = run_polymatroid(inst, eng, o); break;
    case Problem::kBab: row = run_bab(inst, eng, o); break;
    case Problem::kPriority: row = run_priority(inst, eng, o); break;
  }
  row.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

struct OracleRun {
  bool ran = false;  // finished within the enumeration budget
  bool too_large = false;
  bool feasible = false;
  std::int64_t opt = 0;
};

OracleRun oracle_for(const Instance& inst, Problem p, Engine eng) {
  const OracleBudget ob = OracleBudget::from_env();
  const DirectedGraph g = instance_graph(inst);
  OracleResult res;
  bool maximize = false;
  switch (p) {
    case Problem::kSto: {
      maximize = true;
      const RewardOracle f = instance_reward(inst);
      if (eng == Engine::kRgDc) {
        const TwoCostClosure tc = build_two_cost_closure(g, inst.lbudget);
        res = brute_force_length_budget(tc, f, inst.root, inst.budget, inst.lbudget, ob);
      } else if (eng == Engine::kRgDl) {
        const TwoCostClosure tc = build_two_cost_closure(g, deadline_cap(inst));
        res = brute_force_deadline(tc, f, inst.root, inst.budget, inst.deadlines, ob);
      } else if (eng == Engine::kRgPr) {
        const PriorityClosure pc = build_priority_closure(g, instance_levels(inst));
        res = brute_force_priority(pc, f, inst.root, inst.budget, instance_required(inst), ob);
      } else {
        res = brute_force_sto(build_metric_closure(g), f, inst.root, inst.budget, ob);
      }
      break;
    }
    case Problem::kDst: {
      const VertexSet want = inst.terminals.without(inst.root);
      res = brute_force_min_cover(
          build_metric_closure(g), inst.root, [&](VertexSet w) { return want.subset_of(w); }, ob);
      break;
    }
    case Problem::kPolymatroid: {
      const Matroid mat = instance_matroid(inst);
      const int full = mat.full_rank();
      res = brute_force_min_cover(
          build_metric_closure(g), inst.root, [&](VertexSet w) { return mat.rank(w) == full; }, ob);
      break;
    }
    case Problem::kBab:
      res = brute_force_buy_at_bulk(inst.n, g.edges, inst.root, inst.terminals.without(inst.root),
                                    ob);
      break;
    case Problem::kPriority: {
      const PriorityClosure pc = build_priority_closure(g, instance_levels(inst));
      std::vector<int> required(static_cast<size_t>(inst.n), 0);
      for (Vertex t : inst.terminals.without(inst.root)) required[t] = inst.terminal_priority[t];
      res = brute_force_min_priority_cover(pc, inst.root, required, ob);
      break;
    }
  }
  OracleRun run;
  if (res.too_large) {
    run.too_large = true;
    return run;
  }
  run.ran = true;
  run.feasible = res.feasible;
  run.opt = maximize ? res.value : res.cost;
  return run;
}

void attach_oracle(Row& row, const Instance& inst, Problem p, Engine eng) {
  const OracleRun orc = oracle_for(inst, p, eng);
  if (orc.too_large) row.oracle_too_large = true;
  else if (orc.ran && orc.feasible) row.opt = orc.opt;
}

RunReport build_report(const Instance& inst, Problem p, Engine eng, const Row& row,
                       const RunOpts& o) {
  RunReport rep;
  rep.add("problem", problem_name(p));
  rep.add("engine", engine_name(eng));
  rep.add("n", inst.n);
  rep.add("depth", row.depth);
  rep.add("block", row.block);
  rep.add("workers", o.workers);
  rep.add("seed", static_cast<std::int64_t>(o.seed));
  if (row.maximize) {
    rep.add("value", row.result);
  } else {
    rep.add("cost", row.cost);
    if (p == Problem::kBab) rep.add("objective", row.result);
  }
  if (row.guess >= 0) rep.add("guess", row.guess);
  if (row.iterations >= 0) rep.add("iterations", row.iterations);
  if (row.rounds >= 0) rep.add("rounds", row.rounds);
  rep.add("subproblems", static_cast<std::int64_t>(row.subproblems));
  if (row.opt) {
    rep.add("opt", *row.opt);
    rep.add_fixed("ratio", guarantee_ratio(row.maximize, row.result, *row.opt), 6);
  } else if (row.oracle_too_large) {
    rep.add("oracle", "too-large");
  }
  if (o.timing) rep.add_fixed("wall_ms", row.wall_ms, 2);
  return rep;
}

// ---- subcommands ----

int cmd_solve(const std::string& path, const std::string& problem_s, const std::string& engine_s,
              const RunOpts& o) {
  Instance inst;
  try {
    inst = load_instance(path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << path << ": " << e.what() << '\n';
    return kExitMalformed;
  }
  Row row;
  Problem p = default_problem(inst.format);
  Engine eng{};
  try {
    if (!problem_s.empty()) p = lookup_problem(problem_s);
    eng = engine_s.empty() ? default_engine(inst, p) : *parse_engine(engine_s);
    row = run_row(inst, p, eng, o);
  } catch (const BadUsage& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << path << ": " << e.what() << '\n';
    return kExitMalformed;
  }
  if (!row.ok) {
    std::cerr << "infeasible: " << row.fail << '\n';
    return kExitInfeasible;
  }
  if (o.oracle) attach_oracle(row, inst, p, eng);
  const RunReport rep = build_report(inst, p, eng, row, o);
  std::cout << (o.record ? rep.record() : rep.lines());
  if (!o.out.empty()) {
    std::ofstream out(o.out);
    if (!out) {
      std::cerr << "error: cannot write " << o.out << '\n';
      return kExitMalformed;
    }
    out << emit_tree(row.tree, row.keep);
  }
  return kExitOk;
}

int cmd_oracle(const std::string& path, const std::string& problem_s,
               const std::string& engine_s) {
  Instance inst;
  OracleRun orc;
  Problem p;
  try {
    inst = load_instance(path);
    p = problem_s.empty() ? default_problem(inst.format) : lookup_problem(problem_s);
    const Engine eng = engine_s.empty() ? default_engine(inst, p) : *parse_engine(engine_s);
    orc = oracle_for(inst, p, eng);
  } catch (const BadUsage& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << path << ": " << e.what() << '\n';
    return kExitMalformed;
  }
  if (orc.too_large) {
    std::cerr << "oracle: instance exceeds the enumeration budget\n";
    return kExitTooLarge;
  }
  if (!orc.feasible) {
    std::cerr << "infeasible: no tree satisfies the requirements\n";
    return kExitInfeasible;
  }
  RunReport rep;
  rep.add("problem", problem_name(p));
  rep.add("n", inst.n);
  rep.add("opt", orc.opt);
  std::cout << rep.lines();
  return kExitOk;
}

// problem/engine pairs bench runs for a file; every pair carries the
// per-depth value guarantee, so minimization drivers stay out (bab files get
// their driver since that is all they are for)
std::vector<std::pair<Problem, Engine>> row_plan(const Instance& inst) {
  switch (inst.format) {
    case Format::kSto:
      return {{Problem::kSto, Engine::kRg},
              {Problem::kSto, Engine::kRgQp},
              {Problem::kSto, Engine::kRgFast}};
    case Format::kStoLc: {
      std::vector<std::pair<Problem, Engine>> plan;
      if (inst.lbudget >= 0) plan.emplace_back(Problem::kSto, Engine::kRgDc);
      if (has_deadline(inst)) plan.emplace_back(Problem::kSto, Engine::kRgDl);
      return plan;
    }
    case Format::kPrio: return {{Problem::kSto, Engine::kRgPr}};
    case Format::kBab: return {{Problem::kBab, Engine::kRgDc}};
  }
  return {};
}

void print_table_header() {
  std::printf("%-26s %-11s %-8s %3s %9s %9s %10s %10s %9s\n", "instance", "problem", "engine", "d",
              "result", "opt", "ratio", "frames", "ms");
}

void print_row(const std::string& name, Problem p, Engine eng, const Row& row) {
  const std::string opt = row.opt ? std::to_string(*row.opt) : "-";
  const std::string ratio =
      row.opt ? format_fixed(guarantee_ratio(row.maximize, row.result, *row.opt), 6) : "-";
  std::printf("%-26s %-11s %-8s %3d %9lld %9s %10s %10llu %9.2f\n", name.c_str(), problem_name(p),
              engine_name(eng), row.depth, static_cast<long long>(row.result), opt.c_str(),
              ratio.c_str(), static_cast<unsigned long long>(row.subproblems), row.wall_ms);
}

void print_fail_row(const std::string& name, const char* problem, const char* engine,
                    const std::string& msg) {
  std::printf("%-26s %-11s %-8s error: %s\n", name.c_str(), problem, engine, msg.c_str());
}

struct Agg {
  double log_ratio_sum = 0;
  int ratio_rows = 0;
  double frames_sum = 0;
  double ms_sum = 0;
  int rows = 0;
};

void tally(std::map<std::string, Agg>& agg, Engine eng, const Row& row) {
  Agg& a = agg[engine_name(eng)];
  ++a.rows;
  a.frames_sum += static_cast<double>(row.subproblems);
  a.ms_sum += row.wall_ms;
  if (row.opt && row.result != 0 && *row.opt != 0) {
    a.log_ratio_sum += std::log(guarantee_ratio(row.maximize, row.result, *row.opt));
    ++a.ratio_rows;
  } else if (row.opt) {
    ++a.ratio_rows;  // met 0/0 optimum contributes log 1
  }
}

void print_footer(const std::map<std::string, Agg>& agg) {
  double logs = 0;
  int rows = 0;
  for (const auto& [name, a] : agg) {
    std::printf("# %s: rows=%d", name.c_str(), a.rows);
    if (a.ratio_rows > 0)
      std::printf(" gm-ratio=%s", format_fixed(std::exp(a.log_ratio_sum / a.ratio_rows), 4).c_str());
    std::printf(" mean-frames=%s total-ms=%s\n", format_fixed(a.frames_sum / a.rows, 1).c_str(),
                format_fixed(a.ms_sum, 2).c_str());
    logs += a.log_ratio_sum;
    rows += a.ratio_rows;
  }
  if (rows > 0)
    std::printf("# overall gm-ratio=%s\n", format_fixed(std::exp(logs / rows), 4).c_str());
}

int bench_file(const std::filesystem::path& file, const RunOpts& o, bool no_oracle,
               std::map<std::string, Agg>& agg) {
  const std::string name = file.filename().string();
  Instance inst;
  try {
    inst = load_instance(file.string());
  } catch (const std::exception& e) {
    print_fail_row(name, "-", "-", e.what());
    return 0;
  }
  for (const auto& [p, eng] : row_plan(inst)) {
    Row row;
    try {
      row = run_row(inst, p, eng, o);
    } catch (const std::exception& e) {
      print_fail_row(name, problem_name(p), engine_name(eng), e.what());
      continue;
    }
    if (!row.ok) {
      print_fail_row(name, problem_name(p), engine_name(eng), row.fail);
      continue;
    }
    if (!no_oracle) attach_oracle(row, inst, p, eng);
    print_row(name, p, eng, row);
    tally(agg, eng, row);
  }
  return 0;
}

int cmd_bench(const std::string& dir, const RunOpts& o, bool no_oracle) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    std::cerr << "error: not a directory: " << dir << '\n';
    return kExitMalformed;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext == ".sto" || ext == ".stolc" || ext == ".prio" || ext == ".bab")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  print_table_header();
  std::map<std::string, Agg> agg;
  for (const auto& file : files) bench_file(file, o, no_oracle, agg);
  print_footer(agg);
  return kExitOk;
}

int cmd_compare(const std::string& path, const std::string& problem_s,
                std::vector<std::string> engines, const RunOpts& o, bool no_oracle) {
  Instance inst;
  try {
    inst = load_instance(path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << path << ": " << e.what() << '\n';
    return kExitMalformed;
  }
  std::vector<std::pair<Problem, Engine>> plan;
  try {
    if (engines.empty() && problem_s.empty()) {
      plan = row_plan(inst);
    } else {
      const Problem p = problem_s.empty() ? default_problem(inst.format) : lookup_problem(problem_s);
      if (engines.empty()) {
        plan.emplace_back(p, default_engine(inst, p));
      } else {
        for (const auto& name : engines) plan.emplace_back(p, *parse_engine(name));
      }
    }
  } catch (const BadUsage& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  const std::string name = std::filesystem::path(path).filename().string();
  print_table_header();
  std::map<std::string, Agg> agg;
  for (const auto& [p, eng] : plan) {
    Row row;
    try {
      row = run_row(inst, p, eng, o);
    } catch (const BadUsage& e) {
      std::cerr << "usage error: " << e.what() << '\n';
      return kExitUsage;
    } catch (const std::exception& e) {
      std::cerr << "error: " << path << ": " << e.what() << '\n';
      return kExitMalformed;
    }
    if (!row.ok) {
      std::cerr << "infeasible: " << row.fail << '\n';
      return kExitInfeasible;
    }
    if (!no_oracle) attach_oracle(row, inst, p, eng);
    print_row(name, p, eng, row);
    tally(agg, eng, row);
  }
  print_footer(agg);
  return kExitOk;
}

int cmd_gen(const std::string& family, const GenConfig& gc, const std::string& out_path) {
  std::string text;
  try {
    text = emit_instance(generate_instance(family, gc));
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (out_path.empty()) {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "error: cannot write " << out_path << '\n';
    return kExitMalformed;
  }
  out << text;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"recursive-greedy tree orienteering toolkit"};
  app.require_subcommand(1);

  const std::vector<std::string> engine_names = {"rg", "rg-qp", "rg-fast", "rg-dc", "rg-dl",
                                                 "rg-pr"};
  const std::vector<std::string> problem_names = {"sto", "dst", "polymatroid", "bab", "priority"};
  const std::vector<std::string> family_names = {"random-metric", "layered", "star-trap",
                                                 "two-cost", "priority"};

  RunOpts opts;
  std::string file, problem_s, engine_s;

  auto add_run_flags = [&](CLI::App* cmd, bool with_output) {
    cmd->add_option("--depth", opts.depth, "recursion depth d (0: from the instance size)")
        ->check(CLI::Range(0, 64));
    cmd->add_option("--epsilon", opts.epsilon, "rg-fast block-size control")
        ->check(CLI::Range(0.0, 8.0));
    cmd->add_option("--block", opts.block, "rg-fast joint levels s (0: from epsilon)")
        ->check(CLI::Range(0, 64));
    cmd->add_option("--workers", opts.workers, "top-level guess workers")->check(CLI::Range(1, 64));
    cmd->add_option("--seed", opts.seed, "echoed into the report");
    if (with_output) {
      cmd->add_flag("--oracle", opts.oracle, "also run the exact oracle and report opt/ratio");
      cmd->add_flag("--timing", opts.timing, "report wall_ms (output stops being byte-stable)");
      cmd->add_flag("--record", opts.record, "one machine-readable line instead of key=value lines");
      cmd->add_option("--out", opts.out, "write the tree as `edge u v` lines");
    }
  };

  CLI::App* solve = app.add_subcommand("solve", "run an engine or covering driver on an instance");
  solve->add_option("file", file, "instance file")->required();
  solve->add_option("--problem", problem_s, "sto | dst | polymatroid | bab | priority")
      ->check(CLI::IsMember(problem_names));
  solve->add_option("--engine", engine_s, "rg | rg-qp | rg-fast | rg-dc | rg-dl | rg-pr")
      ->check(CLI::IsMember(engine_names));
  add_run_flags(solve, true);

  CLI::App* oracle = app.add_subcommand("oracle", "exact optimum by exhaustive enumeration");
  oracle->add_option("file", file, "instance file")->required();
  oracle->add_option("--problem", problem_s)->check(CLI::IsMember(problem_names));
  oracle->add_option("--engine", engine_s, "picks the sto flavor (rg-dc / rg-dl / rg-pr)")
      ->check(CLI::IsMember(engine_names));

  bool no_oracle = false;
  std::vector<std::string> engines;
  CLI::App* compare = app.add_subcommand("compare", "run several engines on one instance");
  compare->add_option("file", file, "instance file")->required();
  compare->add_option("--problem", problem_s)->check(CLI::IsMember(problem_names));
  compare->add_option("--engines", engines, "comma-separated engine list")
      ->delimiter(',')
      ->check(CLI::IsMember(engine_names));
  compare->add_flag("--no-oracle", no_oracle, "skip opt/ratio columns");
  add_run_flags(compare, false);

  CLI::App* bench = app.add_subcommand("bench", "run a directory of instances, one table row per "
                                                "engine");
  bench->add_option("dir", file, "directory of .sto/.stolc/.prio/.bab files")->required();
  bench->add_flag("--no-oracle", no_oracle, "skip opt/ratio columns");
  add_run_flags(bench, false);

  GenConfig gc;
  std::string family, gen_out;
  CLI::App* gen = app.add_subcommand("gen", "emit a seeded random instance");
  gen->add_option("--family", family, "random-metric | layered | star-trap | two-cost | priority")
      ->required()
      ->check(CLI::IsMember(family_names));
  gen->add_option("--n", gc.n, "vertex count")->check(CLI::Range(2, kMaxVertices));
  gen->add_option("--seed", gc.seed, "generator seed");
  gen->add_option("--max-cost", gc.max_cost, "edge cost upper bound")
      ->check(CLI::Range(Cost{2}, kMaxBudget >> 6));
  gen->add_option("--max-length", gc.max_length, "edge length upper bound")
      ->check(CLI::Range(Length{1}, kMaxBudget >> 6));
  gen->add_option("--levels", gc.levels, "priority levels")->check(CLI::Range(1, 9));
  gen->add_option("--out", gen_out, "write here instead of standard output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return kExitUsage;
  }

  if (solve->parsed()) return cmd_solve(file, problem_s, engine_s, opts);
  if (oracle->parsed()) return cmd_oracle(file, problem_s, engine_s);
  if (compare->parsed()) return cmd_compare(file, problem_s, engines, opts, no_oracle);
  if (bench->parsed()) return cmd_bench(file, opts, no_oracle);
  if (gen->parsed()) return cmd_gen(family, gc, gen_out);
  return kExitUsage;
}
