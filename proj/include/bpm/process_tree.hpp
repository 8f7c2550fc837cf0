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
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "bpm/errors.hpp"
#include "bpm/log_model.hpp"

namespace bpm {

enum class Op : std::uint8_t { kSeq, kAnd, kXor, kLoop };

inline constexpr Op kAllOps[] = {Op::kSeq, Op::kAnd, Op::kXor, Op::kLoop};
inline constexpr Op kConstrainingOps[] = {Op::kSeq, Op::kAnd, Op::kLoop};

constexpr std::string_view op_name(Op op) {
  switch (op) {
    case Op::kSeq: return "seq";
    case Op::kAnd: return "and";
    case Op::kXor: return "xor";
    case Op::kLoop: return "loop";
  }
  return "?";
}

inline std::optional<Op> op_from_name(std::string_view s) {
  for (Op op : kAllOps)
    if (op_name(op) == s) return op;
  return std::nullopt;
}

constexpr bool is_constraining(Op op) { return op != Op::kXor; }
constexpr bool is_symmetric(Op op) { return op == Op::kAnd || op == Op::kXor; }

/// One symbol of a representative word: an operator or an activity.
struct Token {
  bool is_op = false;
  Op op = Op::kSeq;
  Activity act;

  friend bool operator==(const Token& a, const Token& b) {
    return a.is_op == b.is_op && (a.is_op ? a.op == b.op : a.act == b.act);
  }
};

using RepresentativeWord = std::vector<Token>;

/// Immutable binary process tree with activity leaves.
class ProcessTree {
 public:
  ProcessTree() = default;

  static ProcessTree leaf(Activity a);
  static ProcessTree leaf(std::string_view name) { return leaf(Activity::intern(name)); }
  static ProcessTree node(Op op, ProcessTree l, ProcessTree r);

  bool empty() const { return !n_; }
  bool is_leaf() const;
  Activity activity() const;
  Op op() const;
  const ProcessTree& left() const;
  const ProcessTree& right() const;
  const ProcessTree& child(bool right_side) const { return right_side ? right() : left(); }
  int depth() const;
  int leaf_count() const;
  bool has_xor() const;
  bool has_loop() const;
  bool distinct_leaves() const;
  /// Leaf activities sorted by id (with repeats if leaves are not distinct).
  const std::vector<Activity>& activities() const;
  bool contains_activity(Activity a) const {
    return std::binary_search(activities().begin(), activities().end(), a);
  }
  /// Byte encoding of the representative word; equal iff syntactically equivalent.
  const std::string& key() const;
  /// Activities present in every word of the language.
  const std::vector<Activity>& mandatory(bool loops_repeat) const;

  friend bool operator==(const ProcessTree& a, const ProcessTree& b) {
    if (a.n_ == b.n_) return true;
    if (a.empty() || b.empty() || a.is_leaf() != b.is_leaf()) return false;
    if (a.is_leaf()) return a.activity() == b.activity();
    return a.op() == b.op() && a.left() == b.left() && a.right() == b.right();
  }
  friend bool operator!=(const ProcessTree& a, const ProcessTree& b) { return !(a == b); }

 private:
  struct Node;
  explicit ProcessTree(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  std::shared_ptr<const Node> n_;
};

struct ProcessTree::Node {
  bool is_leaf = false;
  Activity act;
  Op op = Op::kSeq;
  ProcessTree left, right;
  int depth = 0;
  int leaves = 0;
  bool has_xor = false;
  bool has_loop = false;
  bool distinct = true;
  std::vector<Activity> acts;
  std::vector<Activity> must;       // in every word, loops taken at least twice
  std::vector<Activity> must_once;  // in every word, loops taken once
  std::string key;
};

inline bool ProcessTree::is_leaf() const { return n_->is_leaf; }
inline Activity ProcessTree::activity() const { return n_->act; }
inline Op ProcessTree::op() const { return n_->op; }
inline const ProcessTree& ProcessTree::left() const { return n_->left; }
inline const ProcessTree& ProcessTree::right() const { return n_->right; }
inline int ProcessTree::depth() const { return n_->depth; }
inline int ProcessTree::leaf_count() const { return n_->leaves; }
inline bool ProcessTree::has_xor() const { return n_->has_xor; }
inline bool ProcessTree::has_loop() const { return n_->has_loop; }
inline bool ProcessTree::distinct_leaves() const { return n_->distinct; }
inline const std::vector<Activity>& ProcessTree::activities() const { return n_->acts; }
inline const std::string& ProcessTree::key() const { return n_->key; }
inline const std::vector<Activity>& ProcessTree::mandatory(bool loops_repeat) const {
  return loops_repeat ? n_->must : n_->must_once;
}

inline ProcessTree ProcessTree::leaf(Activity a) {
  auto n = std::make_shared<Node>();
  n->act = a;
  n->is_leaf = true;
  n->leaves = 1;
  n->acts = {a};
  n->must = n->must_once = n->acts;
  n->key = "\x02" + a.name() + std::string(1, '\0');
  return ProcessTree(std::move(n));
}

inline ProcessTree ProcessTree::node(Op op, ProcessTree l, ProcessTree r) {
  if (l.empty() || r.empty()) throw ContractViolation("operator node needs two children");
  auto n = std::make_shared<Node>();
  n->op = op;
  n->depth = 1 + std::max(l.depth(), r.depth());
  n->leaves = l.leaf_count() + r.leaf_count();
  n->has_xor = op == Op::kXor || l.has_xor() || r.has_xor();
  n->has_loop = op == Op::kLoop || l.has_loop() || r.has_loop();
  n->acts.reserve(l.activities().size() + r.activities().size());
  std::merge(l.activities().begin(), l.activities().end(), r.activities().begin(),
             r.activities().end(), std::back_inserter(n->acts));
  n->distinct = l.distinct_leaves() && r.distinct_leaves() &&
                std::adjacent_find(n->acts.begin(), n->acts.end()) == n->acts.end();
  for (bool rep : {true, false}) {
    const auto& lm = l.mandatory(rep);
    const auto& rm = r.mandatory(rep);
    auto& out = rep ? n->must : n->must_once;
    out.reserve(lm.size() + rm.size());
    if (op == Op::kXor)
      std::set_intersection(lm.begin(), lm.end(), rm.begin(), rm.end(), std::back_inserter(out));
    else if (op == Op::kLoop && !rep)
      out = lm;
    else
      std::set_union(lm.begin(), lm.end(), rm.begin(), rm.end(), std::back_inserter(out));
  }
  const std::string* a = &l.key();
  const std::string* b = &r.key();
  if (is_symmetric(op) && *b < *a) std::swap(a, b);
  n->key = std::string("\x01") + static_cast<char>('0' + static_cast<int>(op)) + *a + *b;
  n->left = std::move(l);
  n->right = std::move(r);
  return ProcessTree(std::move(n));
}

struct TreeKeyHash {
  std::size_t operator()(const ProcessTree& t) const { return std::hash<std::string>{}(t.key()); }
};
struct TreeKeyEq {
  bool operator()(const ProcessTree& a, const ProcessTree& b) const { return a.key() == b.key(); }
};
using TreeSet = std::unordered_set<ProcessTree, TreeKeyHash, TreeKeyEq>;

inline bool syntactically_equal(const ProcessTree& a, const ProcessTree& b) {
  return a.key() == b.key();
}

inline int depth(const ProcessTree& t) { return t.depth(); }

inline ActivitySet alphabet(const ProcessTree& t) {
  return ActivitySet(t.activities().begin(), t.activities().end());
}

inline ProcessTree leaf(std::string_view name) { return ProcessTree::leaf(name); }
inline ProcessTree seq(ProcessTree a, ProcessTree b) {
  return ProcessTree::node(Op::kSeq, std::move(a), std::move(b));
}
inline ProcessTree and_(ProcessTree a, ProcessTree b) {
  return ProcessTree::node(Op::kAnd, std::move(a), std::move(b));
}
inline ProcessTree xor_(ProcessTree a, ProcessTree b) {
  return ProcessTree::node(Op::kXor, std::move(a), std::move(b));
}
inline ProcessTree loop(ProcessTree a, ProcessTree b) {
  return ProcessTree::node(Op::kLoop, std::move(a), std::move(b));
}

/// Same tree with the children of every and/xor node in canonical order.
inline bool is_canonical(const ProcessTree& t);

inline ProcessTree canonical(const ProcessTree& t) {
  if (is_canonical(t)) return t;
  ProcessTree l = canonical(t.left());
  ProcessTree r = canonical(t.right());
  if (is_symmetric(t.op()) && r.key() < l.key()) std::swap(l, r);
  return ProcessTree::node(t.op(), std::move(l), std::move(r));
}

inline bool is_canonical(const ProcessTree& t) {
  if (t.is_leaf()) return true;
  if (is_symmetric(t.op()) && t.right().key() < t.left().key()) return false;
  return is_canonical(t.left()) && is_canonical(t.right());
}

namespace detail {
inline void word_tokens(const ProcessTree& t, RepresentativeWord& out) {
  if (t.is_leaf()) {
    out.push_back(Token{false, Op::kSeq, t.activity()});
    return;
  }
  out.push_back(Token{true, t.op(), Activity()});
  const ProcessTree* a = &t.left();
  const ProcessTree* b = &t.right();
  if (is_symmetric(t.op()) && b->key() < a->key()) std::swap(a, b);
  word_tokens(*a, out);
  word_tokens(*b, out);
}

inline bool needs_quotes(const std::string& s) {
  if (s.empty()) return true;
  for (char c : s)
    if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ',' ||
        c == '"' || c == '\\')
      return true;
  return false;
}

inline void print(const ProcessTree& t, std::string& out) {
  if (t.is_leaf()) {
    const std::string& n = t.activity().name();
    if (!needs_quotes(n)) {
      out += n;
      return;
    }
    out.push_back('"');
    for (char c : n) {
      if (c == '"' || c == '\\') out.push_back('\\');
      out.push_back(c);
    }
    out.push_back('"');
    return;
  }
  out += op_name(t.op());
  out.push_back('(');
  print(t.left(), out);
  out.push_back(',');
  print(t.right(), out);
  out.push_back(')');
}

class TreeParser {
 public:
  explicit TreeParser(std::string_view s) : s_(s) {}

  ProcessTree parse() {
    ProcessTree t = tree();
    skip_ws();
    if (i_ != s_.size()) fail("trailing characters");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("tree notation: " + what, 1, i_ + 1);
  }
  void skip_ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  void expect(char c) {
    skip_ws();
    if (i_ >= s_.size() || s_[i_] != c) fail(std::string("expected '") + c + "'");
    ++i_;
  }
  std::string label(bool& quoted) {
    skip_ws();
    std::string out;
    quoted = i_ < s_.size() && s_[i_] == '"';
    if (quoted) {
      ++i_;
      while (true) {
        if (i_ >= s_.size()) fail("unterminated quoted label");
        char c = s_[i_++];
        if (c == '"') break;
        if (c == '\\') {
          if (i_ >= s_.size()) fail("dangling escape");
          c = s_[i_++];
        }
        out.push_back(c);
      }
      return out;
    }
    while (i_ < s_.size()) {
      char c = s_[i_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ',' ||
          c == '"')
        break;
      out.push_back(c);
      ++i_;
    }
    if (out.empty()) fail("expected a label or operator");
    return out;
  }
  ProcessTree tree() {
    bool quoted = false;
    std::string name = label(quoted);
    skip_ws();
    if (!quoted && i_ < s_.size() && s_[i_] == '(') {
      auto op = op_from_name(name);
      if (!op) fail("unknown operator '" + name + "'");
      ++i_;
      ProcessTree l = tree();
      expect(',');
      ProcessTree r = tree();
      expect(')');
      return ProcessTree::node(*op, std::move(l), std::move(r));
    }
    return ProcessTree::leaf(name);
  }

  std::string_view s_;
  std::size_t i_ = 0;
};
}  // namespace detail

/// Pre-order tokens with and/xor children ordered by their canonical words.
inline RepresentativeWord representative_word(const ProcessTree& t) {
  RepresentativeWord w;
  detail::word_tokens(t, w);
  return w;
}

/// Text notation, printed as the tree is shaped.
inline std::string to_string(const ProcessTree& t) {
  std::string out;
  detail::print(t, out);
  return out;
}

inline std::string canonical_string(const ProcessTree& t) { return to_string(canonical(t)); }

inline ProcessTree parse_tree(std::string_view text) { return detail::TreeParser(text).parse(); }

// ---------------------------------------------------------------------------
// Language

inline constexpr std::size_t kDefaultLanguageCap = 200000;

namespace detail {

inline std::size_t sat_add(std::size_t a, std::size_t b, std::size_t cap) {
  return a > cap || b > cap || a + b > cap ? cap + 1 : a + b;
}
inline std::size_t sat_mul(std::size_t a, std::size_t b, std::size_t cap) {
  if (a == 0 || b == 0) return 0;
  return a > cap / b ? cap + 1 : a * b;
}
inline std::size_t binom_capped(std::size_t n, std::size_t k, std::size_t cap) {
  k = std::min(k, n - k);
  double r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    if (r > static_cast<double>(cap)) return cap + 1;
  }
  return static_cast<std::size_t>(r + 0.5);
}

inline void interleave(const Word& a, const Word& b, std::size_t i, std::size_t j, Word& cur,
                       std::vector<Word>& out) {
  if (i == a.size() && j == b.size()) {
    out.push_back(cur);
    return;
  }
  if (i < a.size()) {
    cur.push_back(a[i]);
    interleave(a, b, i + 1, j, cur, out);
    cur.pop_back();
  }
  if (j < b.size()) {
    cur.push_back(b[j]);
    interleave(a, b, i, j + 1, cur, out);
    cur.pop_back();
  }
}

inline void sort_unique(std::vector<Word>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

[[noreturn]] inline void over_cap(const ProcessTree& t, std::size_t cap) {
  throw CapacityError("language of " + to_string(t) + " exceeds the cap of " +
                      std::to_string(cap) + " words");
}

}  // namespace detail

/// Per-node repetition bound for loops; receives the loop node.
using LoopBound = std::function<int(const ProcessTree&)>;

/// Bounded language with a loop bound chosen per loop node.
inline std::vector<Word> language_bounded(const ProcessTree& t, int loop_min,
                                          const LoopBound& loop_max, std::size_t cap) {
  if (t.is_leaf()) return {Word{t.activity()}};
  std::vector<Word> l = language_bounded(t.left(), loop_min, loop_max, cap);
  std::vector<Word> r = language_bounded(t.right(), loop_min, loop_max, cap);
  std::vector<Word> out;
  switch (t.op()) {
    case Op::kSeq: {
      if (detail::sat_mul(l.size(), r.size(), cap) > cap) detail::over_cap(t, cap);
      out.reserve(l.size() * r.size());
      for (const auto& a : l)
        for (const auto& b : r) {
          Word w = a;
          w.insert(w.end(), b.begin(), b.end());
          out.push_back(std::move(w));
        }
      break;
    }
    case Op::kAnd: {
      std::size_t total = 0;
      for (const auto& a : l)
        for (const auto& b : r)
          total = detail::sat_add(total, detail::binom_capped(a.size() + b.size(), a.size(), cap),
                                  cap);
      if (total > cap) detail::over_cap(t, cap);
      out.reserve(total);
      Word cur;
      for (const auto& a : l)
        for (const auto& b : r) detail::interleave(a, b, 0, 0, cur, out);
      break;
    }
    case Op::kXor:
      if (l.size() + r.size() > cap) detail::over_cap(t, cap);
      out = std::move(l);
      out.insert(out.end(), r.begin(), r.end());
      break;
    case Op::kLoop: {
      int hi = loop_max(t);
      std::size_t total = 0;
      std::size_t pl = 1, pr = 1;
      for (int n = 1; n <= hi; ++n) {
        pl = detail::sat_mul(pl, l.size(), cap);
        if (n >= 2) pr = detail::sat_mul(pr, r.size(), cap);
        if (n >= loop_min) total = detail::sat_add(total, detail::sat_mul(pl, pr, cap), cap);
      }
      if (total > cap) detail::over_cap(t, cap);
      // Words w1 w1' w2 ... wn built one repetition at a time.
      std::vector<Word> frontier = l;
      for (int n = 1; n <= hi; ++n) {
        if (n >= loop_min) out.insert(out.end(), frontier.begin(), frontier.end());
        if (n == hi) break;
        std::vector<Word> next;
        next.reserve(frontier.size() * r.size() * l.size());
        for (const auto& f : frontier)
          for (const auto& b : r)
            for (const auto& a : l) {
              Word w = f;
              w.insert(w.end(), b.begin(), b.end());
              w.insert(w.end(), a.begin(), a.end());
              next.push_back(std::move(w));
            }
        frontier = std::move(next);
      }
      break;
    }
  }
  detail::sort_unique(out);
  return out;
}

/// Words of the tree with loop_min <= repetitions <= loop_max, sorted.
inline std::vector<Word> language(const ProcessTree& t, int loop_min, int loop_max,
                                  std::size_t cap = kDefaultLanguageCap) {
  if (loop_min < 1 || loop_max < loop_min) throw ContractViolation("bad loop bounds");
  return language_bounded(t, loop_min, [loop_max](const ProcessTree&) { return loop_max; }, cap);
}

// ---------------------------------------------------------------------------
// Positions, combination

/// Root-to-node path; false steps left, true steps right.
struct LeafPosition {
  std::vector<bool> path;
  std::size_t depth() const { return path.size(); }
  friend bool operator==(const LeafPosition& a, const LeafPosition& b) { return a.path == b.path; }
  friend bool operator<(const LeafPosition& a, const LeafPosition& b) { return a.path < b.path; }
};

inline const ProcessTree& subtree_at(const ProcessTree& t, const std::vector<bool>& path,
                                     std::size_t upto = static_cast<std::size_t>(-1)) {
  const ProcessTree* cur = &t;
  std::size_t n = std::min(upto, path.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (cur->is_leaf()) throw ContractViolation("path does not resolve in tree");
    cur = &cur->child(path[i]);
  }
  return *cur;
}

inline ProcessTree replace_at(const ProcessTree& t, const std::vector<bool>& path,
                              const ProcessTree& sub, std::size_t i = 0) {
  if (i == path.size()) return sub;
  if (t.is_leaf()) throw ContractViolation("path does not resolve in tree");
  if (path[i]) return ProcessTree::node(t.op(), t.left(), replace_at(t.right(), path, sub, i + 1));
  return ProcessTree::node(t.op(), replace_at(t.left(), path, sub, i + 1), t.right());
}

namespace detail {
inline void collect_leaves(const ProcessTree& n, std::vector<bool>& path,
                           std::vector<std::pair<LeafPosition, Activity>>& out) {
  if (n.is_leaf()) {
    out.push_back({LeafPosition{path}, n.activity()});
    return;
  }
  path.push_back(false);
  collect_leaves(n.left(), path, out);
  path.back() = true;
  collect_leaves(n.right(), path, out);
  path.pop_back();
}
}  // namespace detail

/// Leaves in document order with their positions.
inline std::vector<std::pair<LeafPosition, Activity>> leaves(const ProcessTree& t) {
  std::vector<std::pair<LeafPosition, Activity>> out;
  out.reserve(static_cast<std::size_t>(t.leaf_count()));
  std::vector<bool> path;
  detail::collect_leaves(t, path, out);
  return out;
}

inline std::optional<LeafPosition> find_leaf(const ProcessTree& t, Activity a) {
  for (auto& [pos, act] : leaves(t))
    if (act == a) return pos;
  return std::nullopt;
}

/// Leaves of depth d >= depth(t)-1 with no strictly deeper leaf to their right.
inline std::vector<LeafPosition> combination_leaves(const ProcessTree& t) {
  auto ls = leaves(t);
  std::vector<LeafPosition> out;
  int i = t.depth();
  std::size_t deepest_right = 0;
  std::vector<bool> ok(ls.size());
  for (std::size_t j = ls.size(); j-- > 0;) {
    std::size_t d = ls[j].first.depth();
    ok[j] = static_cast<int>(d) >= i - 1 && deepest_right <= d;
    deepest_right = std::max(deepest_right, d);
  }
  for (std::size_t j = 0; j < ls.size(); ++j)
    if (ok[j]) out.push_back(ls[j].first);
  return out;
}

inline bool is_combination_leaf(const ProcessTree& t, const LeafPosition& pos) {
  auto c = combination_leaves(t);
  return std::find(c.begin(), c.end(), pos) != c.end();
}

namespace detail {
inline bool diff_leaves(const ProcessTree& a, const ProcessTree& b, std::vector<bool>& path,
                        std::vector<LeafPosition>& diffs) {
  if (a.is_leaf() != b.is_leaf()) return false;
  if (a.is_leaf()) {
    if (a.activity() != b.activity()) diffs.push_back(LeafPosition{path});
    return true;
  }
  if (a.op() != b.op()) return false;
  path.push_back(false);
  bool ok = diff_leaves(a.left(), b.left(), path, diffs);
  path.back() = true;
  ok = ok && diff_leaves(a.right(), b.right(), path, diffs);
  path.pop_back();
  return ok;
}
}  // namespace detail

/// The shared combination-leaf position at which p1 and p2 differ, if combinable.
inline std::optional<LeafPosition> combinable(const ProcessTree& p1, const ProcessTree& p2) {
  std::vector<bool> path;
  std::vector<LeafPosition> diffs;
  if (!detail::diff_leaves(p1, p2, path, diffs) || diffs.size() != 1) return std::nullopt;
  if (!is_combination_leaf(p1, diffs[0])) return std::nullopt;
  return diffs[0];
}

/// p1 with its differing leaf x replaced by op(x, y). Empty when y already
/// occurs elsewhere in p1; throws when p1 and p2 are not combinable.
inline std::optional<ProcessTree> combine(const ProcessTree& p1, const ProcessTree& p2, Op op) {
  auto pos = combinable(p1, p2);
  if (!pos) throw ContractViolation("combine: trees are not combinable");
  const ProcessTree& x = subtree_at(p1, pos->path);
  const ProcessTree& y = subtree_at(p2, pos->path);
  if (p1.contains_activity(y.activity())) return std::nullopt;
  return replace_at(p1, pos->path, ProcessTree::node(op, x, y));
}

/// combine() when the differing combination leaf is already known.
inline std::optional<ProcessTree> combine_at(const ProcessTree& p1, const ProcessTree& p2,
                                             const LeafPosition& pos, Op op) {
  const ProcessTree& x = subtree_at(p1, pos.path);
  const ProcessTree& y = subtree_at(p2, pos.path);
  if (!x.is_leaf() || !y.is_leaf() || x.activity() == y.activity())
    throw ContractViolation("combine: no differing leaf at the position");
  if (p1.contains_activity(y.activity())) return std::nullopt;
  return replace_at(p1, pos.path, ProcessTree::node(op, x, y));
}

struct SeedPair {
  ProcessTree first;   // combination node replaced by its left leaf
  ProcessTree second;  // ... by its right leaf
  LeafPosition position;
  Op op = Op::kSeq;
};

/// Decomposes a combined tree into the two trees whose combination yields it.
inline SeedPair regular_seeds(const ProcessTree& t) {
  if (t.depth() < 1) throw ContractViolation("regular_seeds: a single leaf has no seeds");
  std::optional<SeedPair> found;
  std::vector<bool> path;
  std::function<void(const ProcessTree&)> walk = [&](const ProcessTree& n) {
    if (n.is_leaf()) return;
    if (n.left().is_leaf() && n.right().is_leaf()) {
      ProcessTree s1 = replace_at(t, path, n.left());
      LeafPosition pos{path};
      if (is_combination_leaf(s1, pos))
        found = SeedPair{s1, replace_at(t, path, n.right()), pos, n.op()};
    }
    path.push_back(false);
    walk(n.left());
    path.back() = true;
    walk(n.right());
    path.pop_back();
  };
  walk(t);
  if (!found) throw ContractViolation("regular_seeds: tree has no combination node");
  return *found;
}

namespace detail {
inline void add_unique(std::vector<ProcessTree>& v, std::unordered_set<std::string>& seen,
                       ProcessTree t) {
  if (seen.insert(t.key()).second) v.push_back(std::move(t));
}

inline std::vector<ProcessTree> f_set(const ProcessTree& t, bool seq_refines_and) {
  if (t.is_leaf()) return {t};
  auto l = f_set(t.left(), seq_refines_and);
  auto r = f_set(t.right(), seq_refines_and);
  std::vector<ProcessTree> out;
  std::unordered_set<std::string> seen;
  if (is_constraining(t.op())) {
    for (const auto& a : l) add_unique(out, seen, a);
    for (const auto& b : r) add_unique(out, seen, b);
  }
  for (const auto& a : l)
    for (const auto& b : r) {
      add_unique(out, seen, ProcessTree::node(t.op(), a, b));
      if (seq_refines_and && t.op() == Op::kAnd) {
        add_unique(out, seen, ProcessTree::node(Op::kSeq, a, b));
        add_unique(out, seen, ProcessTree::node(Op::kSeq, b, a));
      }
    }
  return out;
}
}  // namespace detail

/// f(t) \ {t}: every tree that can be read off t by dropping constrained
/// subtrees. With seq_refines_and, and(A,B) also yields seq(A,B) and seq(B,A).
inline std::vector<ProcessTree> alternative_seed_set(const ProcessTree& t,
                                                     bool seq_refines_and = true) {
  std::vector<ProcessTree> out;
  for (auto& s : detail::f_set(t, seq_refines_and))
    if (s.key() != t.key()) out.push_back(std::move(s));
  return out;
}

/// Length of the path to the outermost loop ancestor of the leaf at pos, or
/// pos.depth() when there is none.
inline std::size_t loop_block_depth(const LeafPosition& pos, const ProcessTree& t) {
  const ProcessTree* cur = &t;
  for (std::size_t i = 0; i < pos.path.size(); ++i) {
    if (cur->is_leaf()) throw ContractViolation("loop_block: position does not resolve");
    if (cur->op() == Op::kLoop) return i;
    cur = &cur->child(pos.path[i]);
  }
  if (!cur->is_leaf()) throw ContractViolation("loop_block: position is not a leaf");
  return pos.path.size();
}

inline ProcessTree loop_block(const LeafPosition& pos, const ProcessTree& t) {
  return subtree_at(t, pos.path, loop_block_depth(pos, t));
}

}  // namespace bpm
