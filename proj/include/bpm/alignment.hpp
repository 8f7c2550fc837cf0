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
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bpm/errors.hpp"
#include "bpm/log_model.hpp"
#include "bpm/process_tree.hpp"

namespace bpm {

/// Trace positions are 1-based; 0 means "no position".
inline constexpr std::size_t kNoPos = 0;

struct Hit {
  Activity act;
  std::size_t pos = kNoPos;
};

struct ShadowEntry {
  std::size_t word_pos;
  std::size_t trace_idx;
};

/// Embedding of a word into a trace: word[i] sits at trace_idx[i].
struct ShadowMap {
  Word word;
  std::vector<std::size_t> trace_idx;

  std::size_t size() const { return word.size(); }
  bool empty() const { return word.empty(); }
  std::vector<ShadowEntry> entries() const {
    std::vector<ShadowEntry> out;
    for (std::size_t i = 0; i < word.size(); ++i) out.push_back({i + 1, trace_idx[i]});
    return out;
  }
  std::vector<Hit> hits() const {
    std::vector<Hit> out;
    out.reserve(word.size());
    for (std::size_t i = 0; i < word.size(); ++i) out.push_back({word[i], trace_idx[i]});
    return out;
  }
  friend bool operator==(const ShadowMap& a, const ShadowMap& b) {
    return a.word == b.word && a.trace_idx == b.trace_idx;
  }
};

struct Boundary {
  std::size_t low = 0;
  std::size_t high = 0;
  friend bool operator==(const Boundary& a, const Boundary& b) {
    return a.low == b.low && a.high == b.high;
  }
};

inline Boundary boundary(const ShadowMap& m) {
  if (m.empty()) throw ContractViolation("boundary of an empty shadow map");
  return {m.trace_idx.front(), m.trace_idx.back()};
}

/// Sizes agree, indices strictly increase and every entry matches the trace.
inline bool shadow_map_valid(const ShadowMap& m, const Trace& t) {
  if (m.word.size() != m.trace_idx.size()) return false;
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::size_t j = m.trace_idx[i];
    if (j < 1 || j > t.size()) return false;
    if (i > 0 && j <= m.trace_idx[i - 1]) return false;
    if (t.at(j) != m.word[i]) return false;
  }
  return true;
}

/// Leftmost-occurrence-first: no skipped earlier match for any word position.
inline bool lof_holds(const ShadowMap& m, const Trace& t) {
  std::size_t prev = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t k = prev + 1; k < m.trace_idx[i]; ++k)
      if (t.at(k) == m.word[i]) return false;
    prev = m.trace_idx[i];
  }
  return true;
}

/// Trace with matched events bracketed, e.g. "a e [b] c".
inline std::string render_alignment(const ShadowMap& m, const Trace& t) {
  std::string out;
  std::size_t next = 0;
  for (std::size_t k = 1; k <= t.size(); ++k) {
    if (k > 1) out.push_back(' ');
    bool hit = next < m.size() && m.trace_idx[next] == k;
    if (hit) {
      out += "[" + t.at(k).name() + "]";
      ++next;
    } else {
      out += t.at(k).name();
    }
  }
  return out;
}

/// Per-activity sorted position lists of one trace.
class TraceIndex {
 public:
  TraceIndex() = default;
  explicit TraceIndex(const Trace& t) : trace_(&t) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> tmp;
    tmp.reserve(t.size());
    for (std::size_t k = 1; k <= t.size(); ++k)
      tmp.emplace_back(t.at(k).id(), static_cast<std::uint32_t>(k));
    std::sort(tmp.begin(), tmp.end());
    for (std::size_t i = 0; i < tmp.size(); ++i) {
      if (i == 0 || tmp[i].first != tmp[i - 1].first) {
        ids_.push_back(tmp[i].first);
        offsets_.push_back(static_cast<std::uint32_t>(i));
      }
      pos_.push_back(tmp[i].second);
    }
    offsets_.push_back(static_cast<std::uint32_t>(pos_.size()));
  }

  const Trace& trace() const { return *trace_; }
  std::size_t size() const { return pos_.size(); }

  /// First position >= lo holding a, or kNoPos.
  std::size_t first_at_or_after(Activity a, std::size_t lo) const {
    auto [b, e] = range(a);
    auto it = std::lower_bound(b, e, static_cast<std::uint32_t>(std::min<std::size_t>(
                                         lo, std::numeric_limits<std::uint32_t>::max())));
    return it == e ? kNoPos : *it;
  }

  /// Occurrences of a at positions >= lo.
  std::size_t count_from(Activity a, std::size_t lo) const {
    auto [b, e] = range(a);
    auto it = std::lower_bound(b, e, static_cast<std::uint32_t>(std::min<std::size_t>(
                                         lo, std::numeric_limits<std::uint32_t>::max())));
    return static_cast<std::size_t>(e - it);
  }

  bool has(Activity a) const { return std::binary_search(ids_.begin(), ids_.end(), a.id()); }

 private:
  using It = std::vector<std::uint32_t>::const_iterator;
  std::pair<It, It> range(Activity a) const {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), a.id());
    if (it == ids_.end() || *it != a.id()) return {pos_.end(), pos_.end()};
    std::size_t k = static_cast<std::size_t>(it - ids_.begin());
    return {pos_.begin() + offsets_[k], pos_.begin() + offsets_[k + 1]};
  }

  const Trace* trace_ = nullptr;
  std::vector<std::uint32_t> ids_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> pos_;
};

struct AlignOptions {
  int loop_min = 2;
};

/// Activities present in every word of the tree.
inline const std::vector<Activity>& mandatory_activities(const ProcessTree& t, int loop_min) {
  return t.mandatory(loop_min >= 2);
}

namespace detail {

inline std::vector<Hit> sorted_hits(std::vector<Hit> h) {
  std::sort(h.begin(), h.end(), [](const Hit& a, const Hit& b) { return a.pos < b.pos; });
  return h;
}

inline ShadowMap to_map(const std::vector<Hit>& hits) {
  ShadowMap m;
  for (const Hit& h : sorted_hits(hits)) {
    m.word.push_back(h.act);
    m.trace_idx.push_back(h.pos);
  }
  return m;
}

/// Greedy leftmost embedding of w from lo; empty when w does not embed.
inline std::vector<std::size_t> greedy_embed(const Word& w, const TraceIndex& ix, std::size_t lo) {
  std::vector<std::size_t> out;
  out.reserve(w.size());
  std::size_t cur = lo;
  for (Activity a : w) {
    std::size_t p = ix.first_at_or_after(a, cur);
    if (p == kNoPos) return {};
    out.push_back(p);
    cur = p + 1;
  }
  return out;
}

}  // namespace detail

/// Smallest end position of any embedding of a word of q within positions >= lo,
/// or kNoPos. Appends that embedding to out when given.
inline std::size_t earliest_end(const ProcessTree& q, const TraceIndex& ix, std::size_t lo,
                                int loop_min, std::vector<Hit>* out = nullptr) {
  if (q.is_leaf()) {
    std::size_t p = ix.first_at_or_after(q.activity(), lo);
    if (p != kNoPos && out) out->push_back({q.activity(), p});
    return p;
  }
  switch (q.op()) {
    case Op::kSeq: {
      std::size_t e = earliest_end(q.left(), ix, lo, loop_min, out);
      return e == kNoPos ? kNoPos : earliest_end(q.right(), ix, e + 1, loop_min, out);
    }
    case Op::kAnd: {
      std::size_t a = earliest_end(q.left(), ix, lo, loop_min, out);
      if (a == kNoPos) return kNoPos;
      std::size_t b = earliest_end(q.right(), ix, lo, loop_min, out);
      return b == kNoPos ? kNoPos : std::max(a, b);
    }
    case Op::kXor: {
      std::size_t a = earliest_end(q.left(), ix, lo, loop_min);
      std::size_t b = earliest_end(q.right(), ix, lo, loop_min);
      if (a == kNoPos && b == kNoPos) return kNoPos;
      bool left = b == kNoPos || (a != kNoPos && a <= b);
      return earliest_end(left ? q.left() : q.right(), ix, lo, loop_min, out);
    }
    case Op::kLoop: {
      std::size_t e = earliest_end(q.left(), ix, lo, loop_min, out);
      for (int n = 1; n < loop_min && e != kNoPos; ++n) {
        e = earliest_end(q.right(), ix, e + 1, loop_min, out);
        if (e != kNoPos) e = earliest_end(q.left(), ix, e + 1, loop_min, out);
      }
      return e;
    }
  }
  return kNoPos;
}

namespace detail {

// Leaves are distinct, so reading an activity moves a tree to exactly one
// successor state. Each node keeps a stage and, for loops, the number of
// completed body iterations.
class TreeMatcher {
 public:
  TreeMatcher(const ProcessTree& p, int loop_min) : loop_min_(loop_min) { flatten(p); }

  std::optional<ShadowMap> align(const TraceIndex& ix, std::size_t lo) {
    ix_ = &ix;
    const std::size_t n = nodes_.size();
    if (earliest_end(*nodes_[0].tree, ix, lo, loop_min_) == kNoPos) return std::nullopt;
    std::vector<std::uint8_t>& st = st_;
    std::vector<std::uint8_t>& next = next_;
    std::vector<std::uint8_t>& best = best_;
    st.assign(2 * n, 0);
    next.resize(2 * n);
    best.resize(2 * n);
    ShadowMap out;
    std::size_t pos = lo - 1;
    while (st[0] == 0 || !nullable(0, st)) {
      std::size_t best_q = kNoPos;
      Activity best_a;
      for (const auto& [a, node] : leaves_) {
        std::size_t q = ix.first_at_or_after(a, pos + 1);
        if (q == kNoPos || (best_q != kNoPos && q >= best_q)) continue;
        next = st;
        if (!step(0, node, next) || end(0, q + 1, next) == kFail) continue;
        best_q = q;
        best_a = a;
        best.swap(next);
      }
      if (best_q == kNoPos) throw ContractViolation("alignment: feasible state without successor");
      st.swap(best);
      out.word.push_back(best_a);
      out.trace_idx.push_back(best_q);
      pos = best_q;
    }
    return out;
  }

 private:
  static constexpr std::size_t kFail = std::numeric_limits<std::size_t>::max();

  struct Flat {
    const ProcessTree* tree;
    std::uint32_t left = 0, right = 0, end = 0;  // children and subtree end in preorder
  };

  std::uint32_t flatten(const ProcessTree& t) {
    auto i = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({&t});
    if (t.is_leaf()) {
      leaves_.emplace_back(t.activity(), i);
    } else {
      std::uint32_t l = flatten(t.left());
      std::uint32_t r = flatten(t.right());
      nodes_[i].left = l;
      nodes_[i].right = r;
    }
    nodes_[i].end = static_cast<std::uint32_t>(nodes_.size());
    return i;
  }

  bool inside(std::uint32_t node, std::uint32_t leaf) const {
    return leaf >= node && leaf < nodes_[node].end;
  }
  std::uint8_t& stage(std::uint32_t i, std::vector<std::uint8_t>& st) const { return st[2 * i]; }
  std::uint8_t& count(std::uint32_t i, std::vector<std::uint8_t>& st) const {
    return st[2 * i + 1];
  }
  void reset(std::uint32_t i, std::vector<std::uint8_t>& st) const {
    std::fill(st.begin() + 2 * i, st.begin() + 2 * nodes_[i].end, 0);
  }

  bool nullable(std::uint32_t i, std::vector<std::uint8_t>& st) const {
    const Flat& f = nodes_[i];
    std::uint8_t s = stage(i, st);
    if (s == 0) return false;
    if (f.tree->is_leaf()) return true;
    switch (f.tree->op()) {
      case Op::kSeq:
        return s == 2 && nullable(f.right, st);
      case Op::kAnd:
        return nullable(f.left, st) && nullable(f.right, st);
      case Op::kXor:
        return nullable(s == 1 ? f.left : f.right, st);
      case Op::kLoop:
        return s == 1 && count(i, st) + 1 >= loop_min_ && nullable(f.left, st);
    }
    return false;
  }

  // Consumes the activity of `leaf`; false when the state cannot read it.
  bool step(std::uint32_t i, std::uint32_t leaf, std::vector<std::uint8_t>& st) const {
    const Flat& f = nodes_[i];
    std::uint8_t& s = stage(i, st);
    if (f.tree->is_leaf()) {
      if (s != 0) return false;
      s = 1;
      return true;
    }
    bool in_left = inside(f.left, leaf);
    switch (f.tree->op()) {
      case Op::kSeq:
        if (in_left) {
          if (s == 2) return false;
          s = 1;
          return step(f.left, leaf, st);
        }
        if (s == 1) {
          if (!nullable(f.left, st)) return false;
          s = 2;
        }
        return s == 2 && step(f.right, leaf, st);
      case Op::kAnd:
        s = 1;
        return step(in_left ? f.left : f.right, leaf, st);
      case Op::kXor: {
        std::uint8_t side = in_left ? 1 : 2;
        if (s != 0 && s != side) return false;
        s = side;
        return step(in_left ? f.left : f.right, leaf, st);
      }
      case Op::kLoop:
        if (in_left) {
          if (s == 2) {
            if (!nullable(f.right, st)) return false;
            reset(f.left, st);
          }
          s = 1;
          return step(f.left, leaf, st);
        }
        if (s == 0) return false;
        if (s == 1) {
          if (!nullable(f.left, st)) return false;
          reset(f.right, st);
          s = 2;
          count(i, st) = static_cast<std::uint8_t>(std::min(count(i, st) + 1, loop_min_));
        }
        return step(f.right, leaf, st);
    }
    return false;
  }

  std::size_t fresh(std::uint32_t i, std::size_t lo) const {
    std::size_t e = earliest_end(*nodes_[i].tree, *ix_, lo, loop_min_);
    return e == kNoPos ? kFail : e;
  }

  // Earliest position by which the state can be completed using events >= lo;
  // lo - 1 when nothing is left to read.
  std::size_t end(std::uint32_t i, std::size_t lo, std::vector<std::uint8_t>& st) const {
    const Flat& f = nodes_[i];
    std::uint8_t s = stage(i, st);
    if (s == 0) return fresh(i, lo);
    if (f.tree->is_leaf()) return lo - 1;
    switch (f.tree->op()) {
      case Op::kSeq: {
        if (s == 2) return end(f.right, lo, st);
        std::size_t e = end(f.left, lo, st);
        return e == kFail ? kFail : fresh(f.right, e + 1);
      }
      case Op::kAnd: {
        std::size_t a = end(f.left, lo, st);
        if (a == kFail) return kFail;
        std::size_t b = end(f.right, lo, st);
        return b == kFail ? kFail : std::max(a, b);
      }
      case Op::kXor:
        return end(s == 1 ? f.left : f.right, lo, st);
      case Op::kLoop: {
        std::size_t e = s == 1 ? end(f.left, lo, st) : end(f.right, lo, st);
        if (s == 2 && e != kFail) e = fresh(f.left, e + 1);
        for (int n = count(i, st) + 1; n < loop_min_ && e != kFail; ++n) {
          e = fresh(f.right, e + 1);
          if (e != kFail) e = fresh(f.left, e + 1);
        }
        return e;
      }
    }
    return kFail;
  }

  const TraceIndex* ix_ = nullptr;
  int loop_min_;
  std::vector<Flat> nodes_;
  std::vector<std::pair<Activity, std::uint32_t>> leaves_;
  std::vector<std::uint8_t> st_, next_, best_;
};

}  // namespace detail

/// Classical alignment of one pattern, prepared once and reused across traces.
class ClassicalAligner {
 public:
  explicit ClassicalAligner(ProcessTree p, const AlignOptions& opt = {})
      : tree_(std::move(p)), loop_min_(opt.loop_min), matcher_(check(tree_, opt), opt.loop_min) {}
  ClassicalAligner(const ClassicalAligner&) = delete;
  ClassicalAligner& operator=(const ClassicalAligner&) = delete;

  /// Lexicographically smallest occurrence within positions >= lo.
  std::optional<ShadowMap> align(const TraceIndex& ix, std::size_t lo = 1) {
    for (Activity a : mandatory_activities(tree_, loop_min_))
      if (ix.first_at_or_after(a, lo) == kNoPos) return std::nullopt;
    return matcher_.align(ix, lo);
  }

 private:
  static const ProcessTree& check(const ProcessTree& p, const AlignOptions& opt) {
    if (opt.loop_min < 1) throw ContractViolation("loop_min must be positive");
    return p;
  }

  ProcessTree tree_;
  int loop_min_;
  detail::TreeMatcher matcher_;
};

/// Lexicographically smallest occurrence of p within positions >= lo: each
/// index is the smallest that still admits a completion, and the occurrence
/// ends as soon as the read word belongs to the language.
inline std::optional<ShadowMap> classical_align_from(const ProcessTree& p, const TraceIndex& ix,
                                                     std::size_t lo, const AlignOptions& opt = {}) {
  return ClassicalAligner(p, opt).align(ix, lo);
}

inline std::optional<ShadowMap> classical_align(const ProcessTree& p, const TraceIndex& ix,
                                                const AlignOptions& opt = {}) {
  return classical_align_from(p, ix, 1, opt);
}

inline std::optional<ShadowMap> classical_align(const ProcessTree& p, const Trace& t,
                                                const AlignOptions& opt = {}) {
  TraceIndex ix(t);
  return classical_align(p, ix, opt);
}

inline bool contains(const ProcessTree& p, const Trace& t, const AlignOptions& opt = {}) {
  TraceIndex ix(t);
  return earliest_end(p, ix, 1, opt.loop_min) != kNoPos;
}

// ---------------------------------------------------------------------------
// Growth

struct GrowthContext {
  ProcessTree p1;
  ProcessTree p2;
  ShadowMap map1;
  ShadowMap map2;
  ProcessTree p_loop;
};

/// Counters describing how grown alignments were obtained.
struct GrowthStats {
  std::size_t calls = 0;
  std::size_t classical = 0;      // whole candidate aligned classically
  std::size_t reused = 0;         // seed fragments adopted as context
  std::size_t realigned = 0;      // sub-alignments computed classically
  std::size_t repairs = 0;        // verdict recovered via earliest-end realignment
  std::size_t normalized = 0;     // final word re-embedded to restore LOF
  GrowthStats& operator+=(const GrowthStats& o) {
    calls += o.calls;
    classical += o.classical;
    reused += o.reused;
    realigned += o.realigned;
    repairs += o.repairs;
    normalized += o.normalized;
    return *this;
  }
};

/// Per-candidate data shared by all traces.
struct GrowthPlan {
  ProcessTree tree;          // p1 with its differing leaf replaced by the new node
  std::vector<bool> path;    // root to the new operator node
  std::size_t loop_depth = 0;  // loop block root depth on path; > path.size() if none
  bool classical_only = false;
};

/// Resolves how candidate p decomposes into its seeds p1 and p2. p may be in
/// canonical form; its raw shape is rebuilt from p1.
inline GrowthPlan make_growth_plan(const ProcessTree& p, const ProcessTree& p1,
                                   const ProcessTree& p2,
                                   const ProcessTree& p_loop = ProcessTree()) {
  GrowthPlan plan;
  if (p.has_xor()) {
    plan.tree = p;
    plan.classical_only = true;
    return plan;
  }
  auto pos = combinable(p1, p2);
  if (!pos) throw ContractViolation("growth: seeds are not combinable");
  const ProcessTree& x = subtree_at(p1, pos->path);
  const ProcessTree& y = subtree_at(p2, pos->path);
  for (Op op : kConstrainingOps) {
    for (int flip = 0; flip < 2 && plan.tree.empty(); ++flip) {
      ProcessTree cand = replace_at(p1, pos->path, flip ? ProcessTree::node(op, y, x)
                                                         : ProcessTree::node(op, x, y));
      if (cand.key() == p.key()) plan.tree = cand;
    }
  }
  if (plan.tree.empty()) throw ContractViolation("growth: seeds do not decompose the candidate");
  plan.path = pos->path;
  std::vector<bool> leaf_path = pos->path;
  leaf_path.push_back(false);
  plan.loop_depth = loop_block_depth(LeafPosition{leaf_path}, plan.tree);
  if (!p_loop.empty()) {
    const ProcessTree& block = subtree_at(plan.tree, leaf_path, plan.loop_depth);
    bool leaf_block = plan.loop_depth == leaf_path.size() && p_loop.is_leaf() &&
                      (p_loop.activity() == x.activity() || p_loop.activity() == y.activity());
    if (!leaf_block && block.key() != p_loop.key())
      throw ContractViolation("growth: loop block does not match the candidate");
  }
  return plan;
}

namespace detail {

class Grower {
 public:
  Grower(const GrowthPlan& plan, const TraceIndex& ix, const AlignOptions& opt,
         GrowthStats& stats)
      : plan_(plan), ix_(ix), opt_(opt), stats_(stats) {}

  std::optional<std::vector<Hit>> run(const std::vector<Hit>& f1, const std::vector<Hit>& f2) {
    f1_ = &f1;
    f2_ = &f2;
    return grow(plan_.tree, 0, 1);
  }

 private:
  using Hits = std::vector<Hit>;

  std::optional<Hits> classical(const ProcessTree& q, std::size_t lo) {
    ++stats_.realigned;
    auto m = classical_align_from(q, ix_, lo, opt_);
    if (!m) return std::nullopt;
    return m->hits();
  }

  // Seed hits on q's alphabet, when they form a full occurrence within >= lo.
  std::optional<Hits> fragment(const Hits& f, const ProcessTree& q, std::size_t lo) const {
    Hits out;
    for (const Hit& h : f)
      if (q.contains_activity(h.act)) {
        if (h.pos < lo) return std::nullopt;
        out.push_back(h);
      }
    for (Activity a : q.activities())
      if (std::none_of(out.begin(), out.end(), [a](const Hit& h) { return h.act == a; }))
        return std::nullopt;
    return out;
  }

  std::optional<Hits> context(const ProcessTree& q, std::size_t lo) {
    if (auto h = fragment(*f1_, q, lo)) {
      ++stats_.reused;
      return h;
    }
    if (auto h = fragment(*f2_, q, lo)) {
      ++stats_.reused;
      return h;
    }
    return classical(q, lo);
  }

  std::size_t seed_pos(Activity a) const {
    for (const Hits* f : {f1_, f2_})
      for (const Hit& h : *f)
        if (h.act == a) return h.pos;
    return kNoPos;
  }

  static std::size_t max_pos(const Hits& h) {
    std::size_t m = 0;
    for (const Hit& x : h) m = std::max(m, x.pos);
    return m;
  }
  static std::size_t min_pos(const Hits& h) {
    std::size_t m = std::numeric_limits<std::size_t>::max();
    for (const Hit& x : h) m = std::min(m, x.pos);
    return m;
  }
  static Hits join(Hits a, const Hits& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  }

  // Q2 after an occurrence of Q1 ending at end failed: retry after Q1's
  // earliest possible end.
  std::optional<Hits> repair(const ProcessTree& q1, const ProcessTree& q2, std::size_t lo,
                             std::size_t end) {
    Hits h1;
    std::size_t e = earliest_end(q1, ix_, lo, opt_.loop_min, &h1);
    if (e == kNoPos || e >= end) return std::nullopt;
    auto h2 = classical(q2, e + 1);
    if (!h2) return std::nullopt;
    ++stats_.repairs;
    return join(std::move(h1), *h2);
  }

  std::optional<Hits> grow(const ProcessTree& q, std::size_t d, std::size_t lo) {
    if (d == plan_.loop_depth) return classical(q, lo);
    if (d == plan_.path.size()) return combination_node(q, lo);
    bool right = plan_.path[d];
    switch (q.op()) {
      case Op::kSeq:
        return right ? seq_right(q, d, lo) : seq_left(q, d, lo);
      case Op::kAnd: {
        const ProcessTree& other = q.child(!right);
        auto ho = context(other, lo);
        if (!ho) return std::nullopt;
        auto hp = grow(q.child(right), d + 1, lo);
        if (!hp) return std::nullopt;
        return join(std::move(*hp), *ho);
      }
      default:
        throw ContractViolation("growth: unexpected operator on the combination path");
    }
  }

  std::optional<Hits> seq_right(const ProcessTree& q, std::size_t d, std::size_t lo) {
    auto h1 = context(q.left(), lo);
    if (!h1) return std::nullopt;
    std::size_t t = max_pos(*h1);
    if (auto h2 = grow(q.right(), d + 1, t + 1)) return join(std::move(*h1), *h2);
    return repair(q.left(), q.right(), lo, t);
  }

  std::optional<Hits> seq_left(const ProcessTree& q, std::size_t d, std::size_t lo) {
    auto h1 = grow(q.left(), d + 1, lo);
    if (!h1) return std::nullopt;
    std::size_t h = max_pos(*h1);
    std::optional<Hits> best;
    for (const Hits* f : {f1_, f2_}) {
      auto c = fragment(*f, q.right(), h + 1);
      if (c && (!best || min_pos(*c) < min_pos(*best))) best = std::move(c);
    }
    if (best) {
      ++stats_.reused;
      return join(std::move(*h1), *best);
    }
    if (auto h2 = classical(q.right(), h + 1)) return join(std::move(*h1), *h2);
    return repair(q.left(), q.right(), lo, h);
  }

  std::optional<Hits> combination_node(const ProcessTree& q, std::size_t lo) {
    Activity x = q.left().activity();
    Activity y = q.right().activity();
    std::size_t sx = seed_pos(x);
    std::size_t sy = seed_pos(y);
    if (sx != kNoPos && sx < lo) sx = kNoPos;
    if (sy != kNoPos && sy < lo) sy = kNoPos;
    if (q.op() == Op::kAnd) {
      if (sx == kNoPos) sx = ix_.first_at_or_after(x, lo);
      if (sy == kNoPos) sy = ix_.first_at_or_after(y, lo);
      if (sx == kNoPos || sy == kNoPos) return std::nullopt;
      return Hits{{x, sx}, {y, sy}};
    }
    if (q.op() != Op::kSeq) throw ContractViolation("growth: loop node outside its loop block");
    if (sx != kNoPos && sy != kNoPos && sx < sy) {
      ++stats_.reused;
      return Hits{{x, sx}, {y, sy}};
    }
    ++stats_.realigned;
    std::size_t first = ix_.first_at_or_after(x, lo);
    if (first == kNoPos) return std::nullopt;
    std::size_t a = sx == kNoPos ? first : sx;
    std::size_t b = ix_.first_at_or_after(y, a + 1);
    if (b == kNoPos && a != first) {
      a = first;
      b = ix_.first_at_or_after(y, a + 1);
    }
    if (b == kNoPos) return std::nullopt;
    return Hits{{x, a}, {y, b}};
  }

  const GrowthPlan& plan_;
  const TraceIndex& ix_;
  const AlignOptions& opt_;
  GrowthStats& stats_;
  const Hits* f1_ = nullptr;
  const Hits* f2_ = nullptr;
};

}  // namespace detail

/// Occurrence of the planned candidate reusing the seeds' occurrences map1 and
/// map2 on the same trace. Same verdict as classical_align.
inline std::optional<ShadowMap> grow_align(const GrowthPlan& plan, const TraceIndex& ix,
                                           const ShadowMap& map1, const ShadowMap& map2,
                                           const AlignOptions& opt, GrowthStats* stats = nullptr) {
  GrowthStats local;
  GrowthStats& st = stats ? *stats : local;
  ++st.calls;
  if (plan.classical_only) {
    ++st.classical;
    return classical_align(plan.tree, ix, opt);
  }
  auto f1 = map1.hits();
  auto f2 = map2.hits();
  auto hits = detail::Grower(plan, ix, opt, st).run(f1, f2);
  if (!hits) return std::nullopt;
  ShadowMap found = detail::to_map(*hits);
  std::vector<std::size_t> lof = detail::greedy_embed(found.word, ix, 1);
  if (lof.size() != found.word.size()) throw ContractViolation("growth: occurrence lost");
  if (lof != found.trace_idx) {
    ++st.normalized;
    found.trace_idx = std::move(lof);
  }
  return found;
}

inline std::optional<ShadowMap> grow_align(const ProcessTree& p, const Trace& t,
                                           const GrowthContext& ctx, const AlignOptions& opt = {},
                                           GrowthStats* stats = nullptr) {
  GrowthPlan plan = make_growth_plan(p, ctx.p1, ctx.p2, ctx.p_loop);
  TraceIndex ix(t);
  return grow_align(plan, ix, ctx.map1, ctx.map2, opt, stats);
}

}  // namespace bpm
