#include "arbor/report.hpp"

#include <cstdio>
#include <limits>

namespace arbor {

void RunReport::add(std::string key, std::string value) {
  kv_.emplace_back(std::move(key), std::move(value));
}

void RunReport::add(std::string key, std::int64_t value) {
  kv_.emplace_back(std::move(key), std::to_string(value));
}

void RunReport::add_fixed(std::string key, double value, int digits) {
  kv_.emplace_back(std::move(key), format_fixed(value, digits));
}

std::string RunReport::lines() const {
  std::string out;
  for (const auto& [k, v] : kv_) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

std::string RunReport::record() const {
  std::string out;
  for (const auto& [k, v] : kv_) {
    if (!out.empty()) out += ' ';
    out += k;
    out += '=';
    out += v;
  }
  out += '\n';
  return out;
}

const std::string* RunReport::find(const std::string& key) const {
  for (const auto& [k, v] : kv_)
    if (k == key) return &v;
  return nullptr;
}

double guarantee_ratio(bool maximize, std::int64_t result, std::int64_t opt) {
  const double num = maximize ? static_cast<double>(opt) : static_cast<double>(result);
  const double den = maximize ? static_cast<double>(result) : static_cast<double>(opt);
  if (den == 0) return num == 0 ? 1.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

std::string format_fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

const char* engine_name(Engine e) {
  switch (e) {
    case Engine::kRg: return "rg";
    case Engine::kRgQp: return "rg-qp";
    case Engine::kRgFast: return "rg-fast";
    case Engine::kRgDc: return "rg-dc";
    case Engine::kRgDl: return "rg-dl";
    case Engine::kRgPr: return "rg-pr";
  }
  return "?";
}

std::optional<Engine> parse_engine(const std::string& name) {
  for (Engine e : {Engine::kRg, Engine::kRgQp, Engine::kRgFast, Engine::kRgDc, Engine::kRgDl,
                   Engine::kRgPr})
    if (name == engine_name(e)) return e;
  return std::nullopt;
}

std::vector<std::pair<Vertex, Vertex>> report_edges(const Arborescence& t, VertexSet keep) {
  int children[kMaxVertices] = {};
  for (const auto& [child, e] : t.edges()) ++children[e.parent];
  const auto shortcut = [&](Vertex v) {
    return v != t.root() && !keep.contains(v) && children[v] == 1;
  };
  std::vector<std::pair<Vertex, Vertex>> out;
  for (const auto& [child, e] : t.edges()) {
    if (shortcut(child)) continue;
    Vertex p = e.parent;
    while (shortcut(p)) p = t.in_edge(p)->parent;
    out.emplace_back(p, child);
  }
  return out;
}

std::string emit_tree(const Arborescence& t, VertexSet keep) {
  std::string out;
  for (const auto& [u, v] : report_edges(t, keep))
    out += "edge " + std::to_string(u) + ' ' + std::to_string(v) + '\n';
  return out;
}

}  // namespace arbor
