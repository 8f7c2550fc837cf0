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
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bpm/discovery.hpp"
#include "bpm/errors.hpp"
#include "bpm/log_model.hpp"
#include "bpm/postprocess.hpp"
#include "bpm/relations.hpp"
#include "bpm/synthetic.hpp"

namespace bpm {

struct RunConfig {
  std::string log_path;
  LogFormat format = LogFormat::kXes;
  CsvColumns csv;
  std::string gen_path;  // synthetic spec used instead of a log when set
  MiningConfig mining;
  PostprocessConfig post;
  RelationConfig relations;
  std::string out_dir = "bpm-out";
  bool write_occurrences = false;
};

struct RunReport {
  std::size_t traces = 0;
  std::size_t before = 0;  // trees returned without post-processing
  std::size_t after = 0;   // trees kept by post-processing
  double ratio = 1.0;
  double mining_seconds = 0.0;
  double post_seconds = 0.0;
  double graph_seconds = 0.0;
  std::size_t graph_nodes = 0;
  std::size_t graph_edges = 0;
  MiningStats stats;
};

struct PipelineResult {
  MiningResult mined;
  MinimalSetReport minimal;
  RelationshipGraph graph;
  RunReport report;
};

inline EventLog load_input(const RunConfig& cfg) {
  if (!cfg.gen_path.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(cfg.gen_path));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("synthetic spec: ") + e.what(), 0, 0);
    }
    return gen_synthetic(parse_synthetic_spec(j));
  }
  if (cfg.log_path.empty()) throw ConfigError("no input: pass --log or --gen");
  return read_log(cfg.log_path, cfg.format, cfg.csv);
}

/// Mining, post-processing and relations on an already parsed log.
inline PipelineResult run_pipeline(const EventLog& log, const RunConfig& cfg) {
  if (log.empty()) throw EmptyLogError("log holds no traces");
  for (double t : {cfg.relations.tau_f, cfg.relations.tau_s})
    if (t <= 0 || t > 1) throw ConfigError("relationship thresholds must be in (0,1]");
  using Clock = std::chrono::steady_clock;
  PipelineResult r;
  auto t0 = Clock::now();
  r.mined = mine(log, cfg.mining);
  auto t1 = Clock::now();
  r.minimal = minimize(r.mined.patterns, cfg.post);
  auto t2 = Clock::now();
  r.graph = build_graph(r.minimal.kept, log.size(), cfg.relations);
  auto t3 = Clock::now();
  auto secs = [](auto a, auto b) { return std::chrono::duration<double>(b - a).count(); };
  r.report.traces = log.size();
  r.report.before = r.mined.patterns.size();
  r.report.after = r.minimal.kept.size();
  r.report.ratio = r.minimal.ratio();
  r.report.mining_seconds = secs(t0, t1);
  r.report.post_seconds = secs(t1, t2);
  r.report.graph_seconds = secs(t2, t3);
  r.report.graph_nodes = r.graph.nodes.size();
  r.report.graph_edges = r.graph.edges.size();
  r.report.stats = r.mined.stats;
  return r;
}

inline nlohmann::json pattern_json(const PatternRecord& p, const EventLog& log,
                                   bool occurrences) {
  nlohmann::json j{{"tree", to_string(p.tree)}, {"support", p.support}, {"count", p.count}};
  j["traces"] = nlohmann::json::array();
  for (std::size_t t : p.traces) j["traces"].push_back(log[t].id);
  if (occurrences && !p.occurrences.empty()) {
    j["occurrences"] = nlohmann::json::array();
    for (const auto& m : p.occurrences) j["occurrences"].push_back(m.trace_idx);
  }
  return j;
}

inline nlohmann::json patterns_json(const std::vector<PatternRecord>& ps, const EventLog& log,
                                    bool occurrences = false) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& p : ps) j.push_back(pattern_json(p, log, occurrences));
  return j;
}

inline nlohmann::json minimal_report_json(const MinimalSetReport& rep) {
  nlohmann::json j;
  j["before"] = rep.input_size;
  j["after"] = rep.kept.size();
  j["ratio"] = rep.ratio();
  j["equivalence_loop_bound"] = rep.equivalence_loop_max;
  j["kept"] = nlohmann::json::array();
  for (const auto& p : rep.kept) j["kept"].push_back(to_string(p.tree));
  j["removed"] = nlohmann::json::array();
  for (const auto& r : rep.removed)
    j["removed"].push_back({{"tree", to_string(r.record.tree)},
                            {"reason", std::string(reason_name(r.reason))},
                            {"reference", to_string(r.reference)}});
  return j;
}

inline std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * v);
  return buf;
}

inline std::string seconds(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f s", v);
  return buf;
}

/// Counts in the O / W / Ratio layout plus timings.
inline std::string report_text(const RunReport& r) {
  std::string out;
  out += "traces            " + std::to_string(r.traces) + "\n";
  out += "returned trees\n";
  out += "  O               " + std::to_string(r.before) + "\n";
  out += "  W               " + std::to_string(r.after) + "\n";
  out += "  Ratio           " + percent(r.ratio) + "\n";
  out += "mining            " + seconds(r.mining_seconds) + "\n";
  out += "post-processing   " + seconds(r.post_seconds) + "\n";
  out += "graph             " + seconds(r.graph_seconds) + "\n";
  out += "graph nodes       " + std::to_string(r.graph_nodes) + "\n";
  out += "graph edges       " + std::to_string(r.graph_edges) + "\n";
  out += "alignments        " + std::to_string(r.stats.alignments) + "\n";
  const GrowthStats& g = r.stats.growth;
  out += "grown alignments  " + std::to_string(g.calls) + " (reused " + std::to_string(g.reused) +
         ", realigned " + std::to_string(g.realigned) + ", repairs " +
         std::to_string(g.repairs) + ", normalized " + std::to_string(g.normalized) + ")\n";
  return out;
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + p.string());
  f << s;
}

inline void write_outputs(const PipelineResult& r, const EventLog& log, const RunConfig& cfg) {
  std::filesystem::path dir(cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create " + dir.string() + ": " + ec.message());
  write_text(dir / "patterns.json",
             patterns_json(r.mined.patterns, log, cfg.write_occurrences).dump(2) + "\n");
  write_text(dir / "minimal_report.json", minimal_report_json(r.minimal).dump(2) + "\n");
  write_text(dir / "graph.json", graph_json(r.graph).dump(2) + "\n");
  write_text(dir / "graph.dot", graph_dot(r.graph));
  write_text(dir / "report.txt", report_text(r.report));
}

// ---------------------------------------------------------------------------
// Benchmark

struct BenchReport {
  int repetitions = 0;
  std::size_t patterns = 0;
  std::vector<double> grown_seconds;
  std::vector<double> classical_seconds;
  double grown_median = 0.0;
  double classical_median = 0.0;
  double decrease = 0.0;  // 1 - grown / classical
  MiningStats grown_stats;
};

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Canonical texts and counts, one line per pattern.
inline std::vector<std::string> pattern_lines(const std::vector<PatternRecord>& ps) {
  std::vector<std::string> out;
  for (const auto& p : ps) out.push_back(to_string(p.tree) + " " + std::to_string(p.count));
  std::sort(out.begin(), out.end());
  return out;
}

/// Thrown when the engines disagree; what() carries the differing patterns.
struct EngineMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string mismatch_dump(const std::vector<std::string>& a,
                                 const std::vector<std::string>& b) {
  std::vector<std::string> only_a, only_b;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(only_a));
  std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(only_b));
  std::string out = "engine outputs differ\n";
  for (const auto& s : only_a) out += "  grown only: " + s + "\n";
  for (const auto& s : only_b) out += "  classical only: " + s + "\n";
  return out;
}

/// Checks that both engines agree, then times mining with each. The checked
/// runs count as the first repetition.
inline BenchReport bench(const EventLog& log, MiningConfig cfg, int repetitions) {
  if (repetitions < 1) throw ConfigError("bench needs at least one repetition");
  BenchReport b;
  b.repetitions = repetitions;
  cfg.engine = Engine::kGrown;
  MiningResult g = mine(log, cfg);
  cfg.engine = Engine::kClassical;
  MiningResult c = mine(log, cfg);
  auto lg = pattern_lines(g.patterns);
  auto lc = pattern_lines(c.patterns);
  if (lg != lc) throw EngineMismatch(mismatch_dump(lg, lc));
  b.patterns = g.patterns.size();
  b.grown_stats = g.stats;
  b.grown_seconds.push_back(g.stats.seconds);
  b.classical_seconds.push_back(c.stats.seconds);
  for (int i = 1; i < repetitions; ++i) {
    cfg.engine = Engine::kGrown;
    b.grown_seconds.push_back(mine(log, cfg).stats.seconds);
    cfg.engine = Engine::kClassical;
    b.classical_seconds.push_back(mine(log, cfg).stats.seconds);
  }
  b.grown_median = median(b.grown_seconds);
  b.classical_median = median(b.classical_seconds);
  b.decrease = b.classical_median > 0 ? 1.0 - b.grown_median / b.classical_median : 0.0;
  return b;
}

inline std::string bench_text(const BenchReport& b) {
  std::string out;
  out += "patterns           " + std::to_string(b.patterns) + " (engines agree)\n";
  out += "repetitions        " + std::to_string(b.repetitions) + "\n";
  out += "classical median   " + seconds(b.classical_median) + "\n";
  out += "grown median       " + seconds(b.grown_median) + "\n";
  out += "Runtime decrease   " + percent(b.decrease) + "\n";
  return out;
}

}  // namespace bpm
