// Copyright 2026 The bpm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "bpm/alignment.hpp"
#include "bpm/discovery.hpp"

namespace bpm {

enum class RelationKind { kFollows, kInterFollows, kSpans, kInterSpans };

inline constexpr RelationKind kAllRelationKinds[] = {
    RelationKind::kFollows, RelationKind::kInterFollows, RelationKind::kSpans,
    RelationKind::kInterSpans};

constexpr std::string_view kind_name(RelationKind k) {
  switch (k) {
    case RelationKind::kFollows: return "Follows";
    case RelationKind::kInterFollows: return "InterFollows";
    case RelationKind::kSpans: return "Spans";
    case RelationKind::kInterSpans: return "InterSpans";
  }
  return "?";
}

struct RelationConfig {
  double tau_f = 0.7;
  double tau_s = 0.7;
  bool emit_both = false;  // inter edges even when the global edge exists
  bool reduce = true;
};

namespace detail {

// Counts shared traces and those where pred(boundary1, boundary2) holds.
template <typename Pred>
std::pair<std::size_t, std::size_t> count_shared(const PatternRecord& p1, const PatternRecord& p2,
                                                 Pred pred) {
  std::size_t shared = 0, hits = 0, i = 0, j = 0;
  while (i < p1.traces.size() && j < p2.traces.size()) {
    if (p1.traces[i] < p2.traces[j]) {
      ++i;
    } else if (p2.traces[j] < p1.traces[i]) {
      ++j;
    } else {
      ++shared;
      if (i < p1.occurrences.size() && j < p2.occurrences.size() &&
          !p1.occurrences[i].empty() && !p2.occurrences[j].empty() &&
          pred(boundary(p1.occurrences[i]), boundary(p2.occurrences[j])))
        ++hits;
      ++i;
      ++j;
    }
  }
  return {shared, hits};
}

inline double relation_ratio(std::pair<std::size_t, std::size_t> c, std::size_t log_size,
                             bool inter) {
  return ratio(c.second, inter ? c.first : log_size);
}

}  // namespace detail

/// Share of traces where p2's occurrence starts after p1's ends.
inline double follows_support(const PatternRecord& p1, const PatternRecord& p2,
                              std::size_t log_size, bool inter) {
  auto c = detail::count_shared(
      p1, p2, [](const Boundary& b1, const Boundary& b2) { return b2.low > b1.high; });
  return detail::relation_ratio(c, log_size, inter);
}

/// Share of traces where p1's boundary lies inside p2's, strictly on one side.
inline double spans_support(const PatternRecord& p1, const PatternRecord& p2,
                            std::size_t log_size, bool inter) {
  auto c = detail::count_shared(p1, p2, [](const Boundary& b1, const Boundary& b2) {
    return b2.low <= b1.low && b1.high <= b2.high && (b2.low < b1.low || b1.high < b2.high);
  });
  return detail::relation_ratio(c, log_size, inter);
}

/// Follows: `to` follows `from`. Spans: `from` spans `to`.
struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  RelationKind kind = RelationKind::kFollows;
  double weight = 0.0;
};

struct RelationshipGraph {
  std::vector<PatternRecord> nodes;
  std::vector<Edge> edges;
  std::size_t log_size = 0;
};

/// Whether `to` is reachable from `from` over edges of one kind, skipping one edge.
inline bool reachable(const std::vector<Edge>& edges, RelationKind kind, std::size_t from,
                      std::size_t to, std::size_t skip = static_cast<std::size_t>(-1)) {
  std::vector<std::size_t> stack{from};
  std::vector<std::size_t> seen{from};
  while (!stack.empty()) {
    std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (e == skip || edges[e].kind != kind || edges[e].from != u) continue;
      std::size_t v = edges[e].to;
      if (v == to) return true;
      if (std::find(seen.begin(), seen.end(), v) == seen.end()) {
        seen.push_back(v);
        stack.push_back(v);
      }
    }
  }
  return false;
}

/// Drops edges of one kind that another path of that kind already implies.
inline void transitive_reduction(std::vector<Edge>& edges, RelationKind kind) {
  for (std::size_t e = 0; e < edges.size();) {
    if (edges[e].kind == kind && reachable(edges, kind, edges[e].from, edges[e].to, e))
      edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(e));
    else
      ++e;
  }
}

inline RelationshipGraph build_graph(const std::vector<PatternRecord>& kept, std::size_t log_size,
                                     const RelationConfig& cfg = {}) {
  RelationshipGraph g;
  g.nodes = kept;
  g.log_size = log_size;
  const std::size_t n = kept.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      double f = follows_support(kept[a], kept[b], log_size, false);
      bool global_f = f + 1e-9 >= cfg.tau_f;
      if (global_f) g.edges.push_back({a, b, RelationKind::kFollows, f});
      if (!global_f || cfg.emit_both) {
        double fi = follows_support(kept[a], kept[b], log_size, true);
        if (fi + 1e-9 >= cfg.tau_f) g.edges.push_back({a, b, RelationKind::kInterFollows, fi});
      }
      // b spans a: edge from the container b.
      double s = spans_support(kept[a], kept[b], log_size, false);
      bool global_s = s + 1e-9 >= cfg.tau_s;
      if (global_s) g.edges.push_back({b, a, RelationKind::kSpans, s});
      if (!global_s || cfg.emit_both) {
        double si = spans_support(kept[a], kept[b], log_size, true);
        if (si + 1e-9 >= cfg.tau_s) g.edges.push_back({b, a, RelationKind::kInterSpans, si});
      }
    }
  if (cfg.reduce) {
    transitive_reduction(g.edges, RelationKind::kFollows);
    transitive_reduction(g.edges, RelationKind::kSpans);
  }
  return g;
}

inline nlohmann::json graph_json(const RelationshipGraph& g) {
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    j["nodes"].push_back(
        {{"id", i}, {"tree", to_string(g.nodes[i].tree)}, {"support", g.nodes[i].support}});
  j["edges"] = nlohmann::json::array();
  for (const Edge& e : g.edges)
    j["edges"].push_back({{"from", e.from},
                          {"to", e.to},
                          {"kind", std::string(kind_name(e.kind))},
                          {"weight", e.weight}});
  return j;
}

namespace detail {
inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

constexpr std::string_view edge_style(RelationKind k) {
  switch (k) {
    case RelationKind::kFollows: return "solid";
    case RelationKind::kInterFollows: return "dashed";
    case RelationKind::kSpans: return "bold";
    case RelationKind::kInterSpans: return "dotted";
  }
  return "solid";
}

inline std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}
}  // namespace detail

/// Graphviz document; node width grows with support, edges carry weights.
inline std::string graph_dot(const RelationshipGraph& g) {
  std::string out = "digraph patterns {\n  node [shape=box];\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    out += "  n" + std::to_string(i) + " [label=" + detail::dot_quote(to_string(g.nodes[i].tree)) +
           ", width=" + detail::fixed2(0.5 + 2.0 * g.nodes[i].support) + "];\n";
  }
  for (const Edge& e : g.edges) {
    out += "  n" + std::to_string(e.from) + " -> n" + std::to_string(e.to) +
           " [style=" + std::string(detail::edge_style(e.kind)) + ", label=\"" +
           detail::fixed2(e.weight) + "\", tooltip=" + std::string(kind_name(e.kind)) + "];\n";
  }
  return out + "}\n";
}

}  // namespace bpm
