#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "arbor/arborescence.hpp"
#include "arbor/engine.hpp"
#include "arbor/types.hpp"

namespace arbor {

// Ordered key=value pairs; insertion order is the output order, so reports
// for a fixed configuration are reproducible byte for byte.
class RunReport {
 public:
  void add(std::string key, std::string value);
  void add(std::string key, std::int64_t value);
  void add_fixed(std::string key, double value, int digits);

  std::string lines() const;   // one key=value per line
  std::string record() const;  // all pairs on a single space-separated line
  const std::string* find(const std::string& key) const;

 private:
  std::vector<std::pair<std::string, std::string>> kv_;
};

// OPT/result for maximization, result/OPT for minimization; a 0/0 is a met
// optimum and reads 1.
double guarantee_ratio(bool maximize, std::int64_t result, std::int64_t opt);

std::string format_fixed(double x, int digits);

const char* engine_name(Engine e);
std::optional<Engine> parse_engine(const std::string& name);

// Tree edges for human output. Vertices outside `keep` (root always kept)
// with exactly one child are shortcut: their chains collapse into single
// edges. Presentation only — solver state and validation always use the full
// tree.
std::vector<std::pair<Vertex, Vertex>> report_edges(const Arborescence& t, VertexSet keep);
// The same edges as `edge u v` lines.
std::string emit_tree(const Arborescence& t, VertexSet keep);

}  // namespace arbor
