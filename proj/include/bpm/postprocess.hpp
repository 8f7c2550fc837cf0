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
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bpm/discovery.hpp"
#include "bpm/process_tree.hpp"

namespace bpm {

struct PostprocessConfig {
  /// and(A,B) also admits seq(A',B') and seq(B',A') as seeds.
  bool seq_refines_and = true;
  /// Loop repetitions compared by behavioral equivalence.
  int equivalence_loop_max = 3;
  std::size_t language_cap = kDefaultLanguageCap;
};

/// Whether p_prime is in f(p). Children of symmetric operators may match in
/// either order.
inline bool is_seed(const ProcessTree& p_prime, const ProcessTree& p, bool seq_refines_and = true) {
  if (p_prime.depth() > p.depth()) return false;
  if (p.is_leaf()) return p_prime.is_leaf() && p_prime.activity() == p.activity();
  Op x = p.op();
  if (is_constraining(x) &&
      (is_seed(p_prime, p.left(), seq_refines_and) || is_seed(p_prime, p.right(), seq_refines_and)))
    return true;
  if (p_prime.is_leaf()) return false;
  bool refine = seq_refines_and && x == Op::kAnd && p_prime.op() == Op::kSeq;
  if (p_prime.op() != x && !refine) return false;
  if (is_seed(p_prime.left(), p.left(), seq_refines_and) &&
      is_seed(p_prime.right(), p.right(), seq_refines_and))
    return true;
  return (is_symmetric(x) || refine) && is_seed(p_prime.left(), p.right(), seq_refines_and) &&
         is_seed(p_prime.right(), p.left(), seq_refines_and);
}

/// p_prime equals p with exactly one loop node turned into seq.
inline bool is_loop_seed(const ProcessTree& p_prime, const ProcessTree& p) {
  if (p_prime.leaf_count() != p.leaf_count() || !p.has_loop()) return false;
  bool found = false;
  std::vector<bool> path;
  std::function<void(const ProcessTree&)> walk = [&](const ProcessTree& n) {
    if (found || n.is_leaf()) return;
    if (n.op() == Op::kLoop &&
        replace_at(p, path, seq(n.left(), n.right())).key() == p_prime.key())
      found = true;
    path.push_back(false);
    walk(n.left());
    path.back() = true;
    walk(n.right());
    path.pop_back();
  };
  walk(p);
  return found;
}

/// Equal bounded languages with 1..loop_max repetitions per loop.
inline bool behaviorally_equivalent(const ProcessTree& a, const ProcessTree& b, int loop_max = 3,
                                    std::size_t cap = kDefaultLanguageCap) {
  if (a.key() == b.key()) return true;
  if (a.activities() != b.activities()) return false;
  return language(a, 1, loop_max, cap) == language(b, 1, loop_max, cap);
}

enum class RemovalReason { kEquivalent, kAlternativeSeed, kLoopSeed };

constexpr std::string_view reason_name(RemovalReason r) {
  switch (r) {
    case RemovalReason::kEquivalent: return "equivalent_to";
    case RemovalReason::kAlternativeSeed: return "alternative_seed_of";
    case RemovalReason::kLoopSeed: return "loop_seed_of";
  }
  return "?";
}

struct Removal {
  PatternRecord record;
  RemovalReason reason;
  ProcessTree reference;
};

struct MinimalSetReport {
  std::vector<PatternRecord> kept;
  std::vector<Removal> removed;
  std::size_t input_size = 0;
  int equivalence_loop_max = 3;

  double ratio() const {
    return input_size == 0 ? 1.0
                           : static_cast<double>(kept.size()) / static_cast<double>(input_size);
  }
};

/// Reduces patterns to a set without equivalent pairs, seeds or loop seeds.
inline MinimalSetReport minimize(std::vector<PatternRecord> patterns,
                                 const PostprocessConfig& cfg = {}) {
  MinimalSetReport rep;
  rep.input_size = patterns.size();
  rep.equivalence_loop_max = cfg.equivalence_loop_max;
  const std::size_t n = patterns.size();
  std::vector<std::string> text(n);
  for (std::size_t i = 0; i < n; ++i) text[i] = to_string(canonical(patterns[i].tree));

  // Strongest first: deeper, then better supported, then by text.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = patterns[a];
    const auto& y = patterns[b];
    if (x.tree.depth() != y.tree.depth()) return x.tree.depth() > y.tree.depth();
    if (x.support != y.support) return x.support > y.support;
    return text[a] < text[b];
  });

  std::vector<bool> kept(n, true);
  std::vector<std::pair<std::size_t, std::pair<RemovalReason, std::size_t>>> removed;
  auto drop = [&](std::size_t victim, RemovalReason why, std::size_t by) {
    kept[victim] = false;
    removed.push_back({victim, {why, by}});
  };

  // Equivalence classes, bucketed by alphabet.
  std::map<std::vector<Activity>, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < n; ++i) buckets[patterns[i].tree.activities()].push_back(i);
  for (auto& [acts, members] : buckets) {
    if (members.size() < 2) continue;
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      if (patterns[a].support != patterns[b].support)
        return patterns[a].support > patterns[b].support;
      return text[a] < text[b];
    });
    std::vector<std::vector<Word>> langs(members.size());
    for (std::size_t k = 0; k < members.size(); ++k)
      langs[k] = language(patterns[members[k]].tree, 1, cfg.equivalence_loop_max,
                          cfg.language_cap);
    for (std::size_t r = 0; r < members.size(); ++r) {
      if (!kept[members[r]]) continue;
      for (std::size_t k = r + 1; k < members.size(); ++k)
        if (kept[members[k]] && langs[k] == langs[r])
          drop(members[k], RemovalReason::kEquivalent, members[r]);
    }
  }

  for (std::size_t i : order) {
    if (!kept[i]) continue;
    for (std::size_t j : order)
      if (j != i && kept[j] && is_seed(patterns[j].tree, patterns[i].tree, cfg.seq_refines_and))
        drop(j, RemovalReason::kAlternativeSeed, i);
  }

  for (std::size_t i : order) {
    if (!kept[i]) continue;
    for (std::size_t j : order)
      if (j != i && kept[j] && is_loop_seed(patterns[j].tree, patterns[i].tree))
        drop(j, RemovalReason::kLoopSeed, i);
  }

  for (std::size_t i = 0; i < n; ++i)
    if (kept[i]) rep.kept.push_back(patterns[i]);
  for (auto& [victim, why] : removed)
    rep.removed.push_back({patterns[victim], why.first, patterns[why.second].tree});
  sort_patterns(rep.kept);
  return rep;
}

}  // namespace bpm
