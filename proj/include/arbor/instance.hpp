#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "arbor/closure.hpp"
#include "arbor/graph.hpp"
#include "arbor/reward.hpp"
#include "arbor/types.hpp"

namespace arbor {

// Line-oriented instance files. Header picks the flavor:
//   sto v1    costs only; rewards, terminals and matroid lines allowed
//   stolc v1  costs + lengths, optional lbudget and per-vertex deadlines
//   prio v1   costs + edge priorities, terminals carry required priorities
//   bab v1    parallel (cost, length) edges, plain terminals
// Directives after the header (n first, ids < n, one of each scalar):
//   n <int>                              vertex count
//   root <id>                            exactly once
//   budget <int>                         nonnegative (bab solvers ignore it)
//   lbudget <int>                        stolc only
//   edge <u> <v> <cost> [<len>] [<prio>] any number, parallels kept
//   reward <v> <int>                     at most once per vertex
//   terminal <v> [<prio>]                priority argument in prio files only
//   deadline <v> <int>                   stolc only
//   matroid uniform <k>                  sto only, at most one matroid line
//   matroid partition <ids:k> [<ids:k>…] ids comma-separated, e.g. 0,2:1 1,3:2
// `#` starts a comment; blank lines are skipped.
enum class Format { kSto, kStoLc, kPrio, kBab };

enum class MatroidSpec { kNone, kUniform, kPartition };

struct Instance {
  Format format = Format::kSto;
  int n = 0;
  Vertex root = 0;
  Cost budget = 0;
  Length lbudget = -1;  // -1: no lbudget line
  std::vector<EdgeSpec> edges;
  std::vector<Value> rewards;        // size n, zero unless a reward line set it
  VertexSet terminals;
  std::vector<int> terminal_priority;  // size n; 0 outside terminals, >= 1 inside
  std::vector<Length> deadlines;       // size n, kNoDeadline unless set
  MatroidSpec matroid = MatroidSpec::kNone;
  int uniform_k = 0;
  std::vector<std::pair<VertexSet, int>> parts;

  bool operator==(const Instance&) const;
};

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_no, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

Instance parse_instance(std::istream& in);
Instance parse_instance(const std::string& text);

// Canonical form: header, scalars, edges in stored order, then rewards /
// terminals / matroid / deadlines. parse(emit(x)) == x for every parsed or
// generated x; defaulted attributes are omitted, comments are not kept.
std::string emit_instance(const Instance& inst);

const char* format_name(Format f);

// Semantic views shared by the CLI and the tests.
DirectedGraph instance_graph(const Instance& inst);
RewardOracle instance_reward(const Instance& inst);  // linear in the reward lines
Matroid instance_matroid(const Instance& inst);      // requires a matroid line
// Priority levels spanned by the instance: max over edge and terminal
// priorities, at least 1.
int instance_levels(const Instance& inst);
// required[v] for the priority-gated engine: the terminal requirement, else 1.
std::vector<int> instance_required(const Instance& inst);

// Seeded generator families. `family` is one of random-metric | layered |
// star-trap | two-cost | priority; unknown names throw std::invalid_argument.
// Same config in, same instance out; every output survives the emit/parse
// round trip and keeps all ids in range.
struct GenConfig {
  int n = 6;
  std::uint64_t seed = 1;
  Cost max_cost = 20;
  Length max_length = 4;
  int levels = 3;  // priority family
};

Instance generate_instance(const std::string& family, const GenConfig& gc);

}  // namespace arbor
