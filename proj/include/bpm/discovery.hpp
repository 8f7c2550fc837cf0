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
#include <array>
#include <chrono>
#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "bpm/alignment.hpp"
#include "bpm/errors.hpp"
#include "bpm/log_model.hpp"
#include "bpm/parallel.hpp"
#include "bpm/process_tree.hpp"

namespace bpm {

enum class Engine { kGrown, kClassical };

/// How and-nodes prove that their children occur in more than one order.
enum class AndWitness {
  kOccurrences,  // ordering classes of the stored occurrences
  kContainment,  // seq-refined variants of the pattern on the supporting traces
};

struct MiningConfig {
  double tau_support = 0.7;
  int max_depth = 2;
  Engine engine = Engine::kGrown;
  AlignOptions align;
  AndWitness and_witness = AndWitness::kContainment;
  /// When > 0, each counted ordering class needs this share of the occurrences.
  double and_min_class_fraction = 0.0;
  unsigned jobs = 0;
};

/// A pattern with its support and one occurrence per supporting trace.
struct PatternRecord {
  ProcessTree tree;  // canonical
  std::size_t count = 0;
  double support = 0.0;
  std::vector<std::size_t> traces;     // sorted 0-based log positions
  std::vector<ShadowMap> occurrences;  // parallel to traces; may be empty

  const ShadowMap* occurrence_in(std::size_t trace) const {
    auto it = std::lower_bound(traces.begin(), traces.end(), trace);
    if (it == traces.end() || *it != trace || occurrences.empty()) return nullptr;
    return &occurrences[static_cast<std::size_t>(it - traces.begin())];
  }
};

/// Position lists for every trace of a log.
class LogIndex {
 public:
  explicit LogIndex(const EventLog& log) : log_(&log) {
    idx_.reserve(log.size());
    for (const Trace& t : log.traces()) idx_.emplace_back(t);
  }
  const EventLog& log() const { return *log_; }
  std::size_t size() const { return idx_.size(); }
  const TraceIndex& operator[](std::size_t i) const { return idx_[i]; }

 private:
  const EventLog* log_;
  std::vector<TraceIndex> idx_;
};

inline bool meets(std::size_t count, std::size_t log_size, double tau) {
  return static_cast<double>(count) + 1e-9 >= tau * static_cast<double>(log_size);
}

inline double ratio(std::size_t count, std::size_t log_size) {
  return log_size == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(log_size);
}

inline std::vector<std::size_t> intersect_sorted(const std::vector<std::size_t>& a,
                                                 const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline std::vector<std::size_t> all_traces(std::size_t n) {
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = i;
  return out;
}

/// x(a1,a2) for every operator and distinct activities, canonical, sorted by key.
inline std::vector<ProcessTree> initial_seeds(const EventLog& log) {
  std::vector<Activity> acts(log.alphabet().begin(), log.alphabet().end());
  std::sort(acts.begin(), acts.end(), name_less);
  std::vector<ProcessTree> out;
  for (std::size_t i = 0; i < acts.size(); ++i)
    for (std::size_t j = 0; j < acts.size(); ++j) {
      if (i == j) continue;
      ProcessTree a = ProcessTree::leaf(acts[i]);
      ProcessTree b = ProcessTree::leaf(acts[j]);
      out.push_back(seq(a, b));
      out.push_back(loop(a, b));
      if (i < j) {
        out.push_back(canonical(and_(a, b)));
        out.push_back(canonical(xor_(a, b)));
      }
    }
  std::sort(out.begin(), out.end(),
            [](const ProcessTree& x, const ProcessTree& y) { return x.key() < y.key(); });
  return out;
}

/// Classical support of p over the candidate traces; counted against the whole log.
inline PatternRecord evaluate_classical(const ProcessTree& p, const LogIndex& ix,
                                        const std::vector<std::size_t>& candidates,
                                        const AlignOptions& opt) {
  PatternRecord r;
  r.tree = canonical(p);
  ClassicalAligner aligner(p, opt);
  for (std::size_t t : candidates) {
    if (auto m = aligner.align(ix[t])) {
      r.traces.push_back(t);
      r.occurrences.push_back(std::move(*m));
    }
  }
  r.count = r.traces.size();
  r.support = ratio(r.count, ix.size());
  return r;
}

/// Grown support of a combination over the traces supporting both seeds.
inline PatternRecord evaluate_grown(const ProcessTree& p, const GrowthPlan& plan,
                                    const PatternRecord& s1, const PatternRecord& s2,
                                    const LogIndex& ix, const AlignOptions& opt,
                                    GrowthStats* stats) {
  PatternRecord r;
  r.tree = canonical(p);
  std::size_t i = 0, j = 0;
  while (i < s1.traces.size() && j < s2.traces.size()) {
    if (s1.traces[i] < s2.traces[j]) {
      ++i;
    } else if (s2.traces[j] < s1.traces[i]) {
      ++j;
    } else {
      std::size_t t = s1.traces[i];
      if (auto m = grow_align(plan, ix[t], s1.occurrences[i], s2.occurrences[j], opt, stats)) {
        r.traces.push_back(t);
        r.occurrences.push_back(std::move(*m));
      }
      ++i;
      ++j;
    }
  }
  r.count = r.traces.size();
  r.support = ratio(r.count, ix.size());
  return r;
}

/// Support of p over candidate traces; per-trace growth contexts are used
/// when given and p is xor-free.
inline PatternRecord evaluate_support(const ProcessTree& p, const EventLog& log,
                                      const std::vector<std::size_t>& candidates,
                                      const std::vector<std::optional<GrowthContext>>* ctx = nullptr,
                                      const AlignOptions& opt = {},
                                      GrowthStats* stats = nullptr) {
  LogIndex ix(log);
  PatternRecord r;
  r.tree = canonical(p);
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    std::size_t t = candidates[k];
    std::optional<ShadowMap> m;
    if (ctx && k < ctx->size() && (*ctx)[k] && !p.has_xor()) {
      const GrowthContext& c = *(*ctx)[k];
      GrowthPlan plan = make_growth_plan(p, c.p1, c.p2, c.p_loop);
      m = grow_align(plan, ix[t], c.map1, c.map2, opt, stats);
    } else {
      m = classical_align(p, ix[t], opt);
    }
    if (m) {
      r.traces.push_back(t);
      r.occurrences.push_back(std::move(*m));
    }
  }
  std::vector<std::size_t> order(r.traces.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return r.traces[a] < r.traces[b]; });
  PatternRecord sorted{r.tree, r.traces.size(), ratio(r.traces.size(), log.size()), {}, {}};
  for (std::size_t k : order) {
    sorted.traces.push_back(r.traces[k]);
    sorted.occurrences.push_back(std::move(r.occurrences[k]));
  }
  return sorted;
}

/// xor(p1, p2) combination with support inferred as the union of the seeds'.
inline PatternRecord xor_support(const PatternRecord& r1, const PatternRecord& r2,
                                 std::size_t log_size, const ProcessTree* combined = nullptr) {
  std::optional<ProcessTree> t;
  if (combined) t = *combined;
  else t = combine(r1.tree, r2.tree, Op::kXor);
  if (!t) throw ContractViolation("xor_support: combination repeats an activity");
  PatternRecord r;
  r.tree = canonical(*t);
  std::set_union(r1.traces.begin(), r1.traces.end(), r2.traces.begin(), r2.traces.end(),
                 std::back_inserter(r.traces));
  r.count = r.traces.size();
  r.support = ratio(r.count, log_size);
  return r;
}

// ---------------------------------------------------------------------------
// Compactness

enum class OrderClass { kBefore, kAfter, kInterleaved };

/// Relative order of q1 and q2 inside one occurrence.
inline std::optional<OrderClass> order_class(const ShadowMap& m, const ProcessTree& q1,
                                             const ProcessTree& q2) {
  std::size_t lo1 = SIZE_MAX, hi1 = 0, lo2 = SIZE_MAX, hi2 = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::size_t p = m.trace_idx[i];
    if (q1.contains_activity(m.word[i])) {
      lo1 = std::min(lo1, p);
      hi1 = std::max(hi1, p);
    } else if (q2.contains_activity(m.word[i])) {
      lo2 = std::min(lo2, p);
      hi2 = std::max(hi2, p);
    }
  }
  if (hi1 == 0 || hi2 == 0) return std::nullopt;
  if (hi1 < lo2) return OrderClass::kBefore;
  if (hi2 < lo1) return OrderClass::kAfter;
  return OrderClass::kInterleaved;
}

struct CompactnessOptions {
  double tau = 0.7;
  AndWitness and_witness = AndWitness::kContainment;
  double and_min_class_fraction = 0.0;
  int loop_min = 2;
};

/// Standalone full-log support of a subtree.
using SupportLookup = std::function<double(const ProcessTree&)>;

namespace detail {

inline void operator_paths(const ProcessTree& t, std::vector<bool>& path,
                           std::vector<std::vector<bool>>& out) {
  if (t.is_leaf()) return;
  out.push_back(path);
  path.push_back(false);
  operator_paths(t.left(), path, out);
  path.back() = true;
  operator_paths(t.right(), path, out);
  path.pop_back();
}

inline bool classes_suffice(const std::array<std::size_t, 3>& counts, std::size_t total,
                            double min_fraction) {
  int classes = 0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    if (min_fraction > 0 && static_cast<double>(c) < min_fraction * static_cast<double>(total))
      continue;
    ++classes;
  }
  return classes >= 2;
}

}  // namespace detail

/// Structural and log-relative sanity of a frequent pattern. The index is only
/// needed for the containment witness.
inline bool is_compact(const PatternRecord& rec, const SupportLookup& support_of,
                       const CompactnessOptions& opt, const LogIndex* ix = nullptr) {
  const ProcessTree& t = rec.tree;
  if (!t.is_leaf() && t.op() == Op::kXor) return false;
  std::vector<std::vector<bool>> paths;
  std::vector<bool> scratch;
  detail::operator_paths(t, scratch, paths);
  for (const auto& path : paths) {
    const ProcessTree& n = subtree_at(t, path);
    switch (n.op()) {
      case Op::kXor:
        if (support_of(n.left()) + 1e-9 < opt.tau || support_of(n.right()) + 1e-9 < opt.tau)
          return false;
        break;
      case Op::kLoop: {
        if (opt.loop_min >= 2 || rec.occurrences.empty()) break;
        bool repeated = false;
        for (const auto& m : rec.occurrences)
          for (Activity a : m.word)
            if (n.right().contains_activity(a)) repeated = true;
        if (!repeated) return false;
        break;
      }
      case Op::kAnd: {
        std::array<std::size_t, 3> counts{0, 0, 0};
        std::size_t total = 0;
        if (opt.and_witness == AndWitness::kOccurrences) {
          for (const auto& m : rec.occurrences)
            if (auto c = order_class(m, n.left(), n.right())) {
              ++counts[static_cast<std::size_t>(*c)];
              ++total;
            }
        } else {
          if (!ix) throw ContractViolation("is_compact: containment witness needs the log index");
          ProcessTree before = replace_at(t, path, seq(n.left(), n.right()));
          ProcessTree after = replace_at(t, path, seq(n.right(), n.left()));
          for (std::size_t tr : rec.traces) {
            bool b = earliest_end(before, (*ix)[tr], 1, opt.loop_min) != kNoPos;
            bool a = earliest_end(after, (*ix)[tr], 1, opt.loop_min) != kNoPos;
            if (b) ++counts[0];
            if (a) ++counts[1];
            if (!a && !b) ++counts[2];
            ++total;
          }
        }
        if (!detail::classes_suffice(counts, total, opt.and_min_class_fraction)) return false;
        break;
      }
      case Op::kSeq:
        break;
    }
  }
  return true;
}

/// True when some xor node has a child below tau on its own. Such a tree and
/// every combination built from it fail compactness.
inline bool has_dead_xor_branch(const ProcessTree& t, const SupportLookup& support_of,
                                double tau) {
  if (t.is_leaf() || !t.has_xor()) return false;
  if (t.op() == Op::kXor &&
      (support_of(t.left()) + 1e-9 < tau || support_of(t.right()) + 1e-9 < tau))
    return true;
  return has_dead_xor_branch(t.left(), support_of, tau) ||
         has_dead_xor_branch(t.right(), support_of, tau);
}

// ---------------------------------------------------------------------------
// Mining

struct LevelStats {
  int leaves = 0;
  std::size_t candidates = 0;
  std::size_t xor_candidates = 0;
  std::size_t dead_xor = 0;  // xor candidates dropped before evaluation
  std::size_t frequent = 0;
  std::size_t compact = 0;
  std::size_t alignments = 0;
};

struct MiningStats {
  std::vector<LevelStats> levels;
  GrowthStats growth;
  std::size_t alignments = 0;
  double seconds = 0.0;
};

struct MiningResult {
  std::vector<PatternRecord> patterns;  // descending support, then canonical text
  MiningStats stats;
};

inline void sort_patterns(std::vector<PatternRecord>& v) {
  std::vector<std::pair<std::string, std::size_t>> keys;
  for (std::size_t i = 0; i < v.size(); ++i) keys.emplace_back(to_string(v[i].tree), i);
  std::vector<std::size_t> order(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (v[a].count != v[b].count) return v[a].count > v[b].count;
    return keys[a].first < keys[b].first;
  });
  std::vector<PatternRecord> out;
  out.reserve(v.size());
  for (std::size_t i : order) out.push_back(std::move(v[i]));
  v = std::move(out);
}

namespace detail {

// Tree text with a hole at one leaf: identical texts mean combinable shapes.
inline void hole_text(const ProcessTree& t, const std::vector<bool>& hole, std::size_t depth,
                      bool on_path, std::string& out) {
  if (t.is_leaf()) {
    if (on_path && depth == hole.size()) {
      out += "\x03";
      return;
    }
    out += t.key();
    return;
  }
  out += "\x01";
  out.push_back(static_cast<char>('0' + static_cast<int>(t.op())));
  bool l = on_path && depth < hole.size() && !hole[depth];
  bool r = on_path && depth < hole.size() && hole[depth];
  out += "(";
  hole_text(t.left(), hole, depth + 1, l, out);
  out += ",";
  hole_text(t.right(), hole, depth + 1, r, out);
  out += ")";
}

struct Candidate {
  ProcessTree raw;   // as generated
  std::size_t s1 = 0, s2 = 0;  // generating records
  bool is_xor = false;
};

}  // namespace detail

/// Leveled generate-and-test. Returns frequent compact patterns with their
/// seeds removed.
inline MiningResult mine(const EventLog& log, const MiningConfig& cfg) {
  if (cfg.tau_support <= 0 || cfg.tau_support > 1) throw ConfigError("support threshold must be in (0,1]");
  if (cfg.max_depth < 1) throw ConfigError("max depth must be at least 1");
  if (log.alphabet().empty()) throw ConfigError("log has an empty alphabet");
  auto start = std::chrono::steady_clock::now();

  LogIndex ix(log);
  const std::size_t m = log.size();
  unsigned workers = resolve_jobs(cfg.jobs);
  std::vector<GrowthStats> gstats(workers);

  MiningResult result;
  std::deque<PatternRecord> records;
  std::unordered_map<std::string, std::size_t> by_key;
  std::vector<bool> in_output;
  std::map<std::string, double> standalone;

  SupportLookup support_of = [&](const ProcessTree& q) -> double {
    auto it = by_key.find(q.key());
    if (it != by_key.end()) return records[it->second].support;
    auto s = standalone.find(q.key());
    if (s != standalone.end()) return s->second;
    std::size_t c = 0;
    for (std::size_t t = 0; t < m; ++t)
      if (earliest_end(q, ix[t], 1, cfg.align.loop_min) != kNoPos) ++c;
    return standalone[q.key()] = ratio(c, m);
  };
  CompactnessOptions copt{cfg.tau_support, cfg.and_witness, cfg.and_min_class_fraction,
                          cfg.align.loop_min};

  // Level of two-leaf seeds, aligned classically on the whole log.
  std::vector<ProcessTree> seeds = initial_seeds(log);
  std::vector<PatternRecord> evaluated(seeds.size());
  std::vector<std::size_t> everything = all_traces(m);
  parallel_for(seeds.size(), workers, [&](std::size_t i, unsigned) {
    evaluated[i] = evaluate_classical(seeds[i], ix, everything, cfg.align);
  });

  auto release = [&](std::size_t id, bool keep_traces) {
    std::vector<ShadowMap>().swap(records[id].occurrences);
    if (!keep_traces) std::vector<std::size_t>().swap(records[id].traces);
  };

  std::vector<std::size_t> frontier, infrequent;
  LevelStats first;
  first.leaves = 2;
  first.candidates = seeds.size();
  first.alignments = seeds.size() * m;
  result.stats.alignments += first.alignments;
  for (auto& r : evaluated) {
    std::size_t id = records.size();
    bool frequent = meets(r.count, m, cfg.tau_support);
    if (!frequent) r.occurrences.clear();
    records.push_back(std::move(r));
    in_output.push_back(false);
    by_key.emplace(records[id].tree.key(), id);
    // Combination keeps the root operator, so xor roots never lead anywhere.
    const ProcessTree& t = records[id].tree;
    bool dead = (!t.is_leaf() && t.op() == Op::kXor) ||
                has_dead_xor_branch(t, support_of, cfg.tau_support);
    if (frequent) {
      ++first.frequent;
      if (dead) {
        release(id, false);
        continue;
      }
      frontier.push_back(id);
      if (is_compact(records[id], support_of, copt, &ix)) {
        in_output[id] = true;
        ++first.compact;
      }
    } else if (dead) {
      release(id, false);
    } else {
      infrequent.push_back(id);
    }
  }
  result.stats.levels.push_back(first);

  int leaves = 2;
  while (!frontier.empty()) {
    ++leaves;
    LevelStats level;
    level.leaves = leaves;

    // Group by shape-with-hole at every combination leaf.
    struct Group {
      LeafPosition pos;
      std::vector<std::size_t> ids;
    };
    auto group = [&](const std::vector<std::size_t>& ids) {
      std::vector<Group> g;
      std::unordered_map<std::string, std::size_t> slot;
      std::string k;
      for (std::size_t id : ids)
        for (const auto& pos : combination_leaves(records[id].tree)) {
          if (static_cast<int>(pos.depth()) + 1 > cfg.max_depth) continue;
          k.clear();
          detail::hole_text(records[id].tree, pos.path, 0, true, k);
          auto [it, fresh] = slot.emplace(k, g.size());
          if (fresh) g.push_back({pos, {}});
          g[it->second].ids.push_back(id);
        }
      return g;
    };

    std::vector<detail::Candidate> cands;
    std::unordered_map<std::string, std::size_t> cand_key;
    std::unordered_set<std::string> dead;
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> cand_gens;
    auto offer = [&](std::optional<ProcessTree> t, std::size_t a, std::size_t b, bool is_xor) {
      if (!t || t->depth() > cfg.max_depth) return;
      std::string k = t->key();
      auto it = cand_key.find(k);
      if (it != cand_key.end()) {
        cand_gens[it->second].emplace_back(a, b);
        return;
      }
      if (by_key.count(k) || dead.count(k)) return;
      if (has_dead_xor_branch(*t, support_of, cfg.tau_support)) {
        dead.insert(std::move(k));
        ++level.dead_xor;
        return;
      }
      cand_key.emplace(k, cands.size());
      cands.push_back({*t, a, b, is_xor});
      cand_gens.push_back({{a, b}});
    };

    for (const Group& grp : group(frontier)) {
      const auto& ids = grp.ids;
      for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = i + 1; j < ids.size(); ++j) {
          const ProcessTree& a = records[ids[i]].tree;
          const ProcessTree& b = records[ids[j]].tree;
          offer(combine_at(a, b, grp.pos, Op::kSeq), ids[i], ids[j], false);
          offer(combine_at(b, a, grp.pos, Op::kSeq), ids[j], ids[i], false);
          offer(combine_at(a, b, grp.pos, Op::kLoop), ids[i], ids[j], false);
          offer(combine_at(b, a, grp.pos, Op::kLoop), ids[j], ids[i], false);
          offer(combine_at(a, b, grp.pos, Op::kAnd), ids[i], ids[j], false);
        }
    }
    for (const Group& grp : group(infrequent)) {
      // The new xor node's children are the hole subtrees; both must be
      // frequent alone.
      std::vector<std::size_t> ids;
      for (std::size_t id : grp.ids)
        if (support_of(subtree_at(records[id].tree, grp.pos.path)) + 1e-9 >= cfg.tau_support)
          ids.push_back(id);
      auto pairs = [](std::size_t n) { return n * (n - 1) / 2; };
      level.dead_xor += pairs(grp.ids.size()) - pairs(ids.size());
      for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = i + 1; j < ids.size(); ++j)
          offer(combine_at(records[ids[i]].tree, records[ids[j]].tree, grp.pos, Op::kXor), ids[i],
                ids[j], true);
    }
    if (cands.empty()) break;

    std::vector<PatternRecord> out(cands.size());
    std::vector<std::size_t> aligned(cands.size(), 0);
    parallel_for(cands.size(), workers, [&](std::size_t i, unsigned w) {
      const detail::Candidate& c = cands[i];
      const PatternRecord& s1 = records[c.s1];
      const PatternRecord& s2 = records[c.s2];
      if (c.is_xor) {
        PatternRecord r = xor_support(s1, s2, m, &c.raw);
        if (meets(r.count, m, cfg.tau_support)) {
          PatternRecord occ = evaluate_classical(c.raw, ix, r.traces, cfg.align);
          aligned[i] = r.traces.size();
          r.occurrences.clear();
          for (std::size_t t : r.traces) {
            const ShadowMap* s = occ.occurrence_in(t);
            r.occurrences.push_back(s ? *s : ShadowMap{});
          }
        }
        out[i] = std::move(r);
        return;
      }
      if (cfg.engine == Engine::kGrown && !c.raw.has_xor()) {
        GrowthPlan plan = make_growth_plan(c.raw, s1.tree, s2.tree);
        out[i] = evaluate_grown(c.raw, plan, s1, s2, ix, cfg.align, &gstats[w]);
      } else {
        out[i] = evaluate_classical(c.raw, ix, intersect_sorted(s1.traces, s2.traces), cfg.align);
      }
      aligned[i] = intersect_sorted(s1.traces, s2.traces).size();
    });

    std::vector<std::size_t> next_frontier, next_infrequent;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      level.alignments += aligned[i];
      if (cands[i].is_xor) ++level.xor_candidates;
      PatternRecord& r = out[i];
      std::size_t id = records.size();
      bool frequent = meets(r.count, m, cfg.tau_support);
      if (!frequent) r.occurrences.clear();
      records.push_back(std::move(r));
      in_output.push_back(false);
      by_key.emplace(records[id].tree.key(), id);
      if (!frequent) {
        next_infrequent.push_back(id);
        continue;
      }
      ++level.frequent;
      next_frontier.push_back(id);
      if (!is_compact(records[id], support_of, copt, &ix)) continue;
      ++level.compact;
      in_output[id] = true;
      SeedPair rs = regular_seeds(records[id].tree);
      for (const ProcessTree* s : {&rs.first, &rs.second}) {
        auto it = by_key.find(canonical(*s).key());
        if (it != by_key.end()) in_output[it->second] = false;
      }
      for (auto [a, b] : cand_gens[i]) {
        in_output[a] = false;
        in_output[b] = false;
      }
    }
    level.candidates = cands.size();
    result.stats.alignments += level.alignments;
    result.stats.levels.push_back(level);

    // Seeds of this level are spent; output records keep their traces and
    // get classical occurrences back at the end, whatever the engine.
    for (std::size_t id : frontier) release(id, in_output[id]);
    for (std::size_t id : infrequent) release(id, false);
    frontier = std::move(next_frontier);
    infrequent = std::move(next_infrequent);
  }

  for (std::size_t id = 0; id < records.size(); ++id)
    if (in_output[id]) result.patterns.push_back(records[id]);
  parallel_for(result.patterns.size(), workers, [&](std::size_t i, unsigned) {
    PatternRecord& p = result.patterns[i];
    if (p.occurrences.empty())
      p.occurrences = evaluate_classical(p.tree, ix, p.traces, cfg.align).occurrences;
  });
  sort_patterns(result.patterns);
  for (const auto& g : gstats) result.stats.growth += g;
  result.stats.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace bpm
