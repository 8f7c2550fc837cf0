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

// Shared fixtures and brute-force oracles for the tests. The oracles only use
// the tree accessors; matching and word generation are written from scratch.

#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "bpm/alignment.hpp"
#include "bpm/log_model.hpp"
#include "bpm/process_tree.hpp"

namespace bpm::testing {

using Names = std::vector<std::string>;

inline EventLog log_of(const std::vector<std::string>& rows) {
  std::vector<Trace> ts;
  for (std::size_t i = 0; i < rows.size(); ++i)
    ts.push_back(make_trace(std::to_string(i + 1), std::string_view(rows[i])));
  return EventLog::from_traces(std::move(ts));
}

/// The twelve-trace running example.
inline EventLog fig1_log() {
  return log_of({
      "EI ET PS ED BT BT GP TD SW CO RB",
      "ET EI CV XS BT SW CS D RB CO",
      "CI PS CV I BT XS SW E CO RB I",
      "CI CV PS XS BT D SW CS GP RB CO",
      "CI PS EI ED I XS GP TD CV",
      "EI ET PS ED BT GP TD CO RB",
      "ET EI CV XS BT CS D CO RB",
      "CI PS CV I BT XS E CO RB I",
      "CI CV PS XS BT D CS GP CO RB",
      "CI PS EI ED I XS GP TD CV",
      "ET PS ED BT GP TD SW CO RB",
      "CI PS EI ED I XS GP TD CV",
  });
}

// ---------------------------------------------------------------------------
// Oracle language: words of length <= max_len, loops repeated >= loop_min times.

using OWord = std::vector<std::string>;
using OLang = std::set<OWord>;

inline void oracle_shuffle(const OWord& a, const OWord& b, std::size_t i, std::size_t j,
                           OWord& cur, OLang& out) {
  if (i == a.size() && j == b.size()) {
    out.insert(cur);
    return;
  }
  if (i < a.size()) {
    cur.push_back(a[i]);
    oracle_shuffle(a, b, i + 1, j, cur, out);
    cur.pop_back();
  }
  if (j < b.size()) {
    cur.push_back(b[j]);
    oracle_shuffle(a, b, i, j + 1, cur, out);
    cur.pop_back();
  }
}

inline OLang oracle_language(const ProcessTree& t, std::size_t max_len, int loop_min = 2) {
  OLang out;
  if (max_len == 0) return out;
  if (t.is_leaf()) {
    out.insert(OWord{std::string(t.activity().name())});
    return out;
  }
  OLang l = oracle_language(t.left(), max_len, loop_min);
  OLang r = oracle_language(t.right(), max_len, loop_min);
  switch (t.op()) {
    case Op::kSeq:
      for (const auto& a : l)
        for (const auto& b : r)
          if (a.size() + b.size() <= max_len) {
            OWord w = a;
            w.insert(w.end(), b.begin(), b.end());
            out.insert(w);
          }
      break;
    case Op::kAnd:
      for (const auto& a : l)
        for (const auto& b : r)
          if (a.size() + b.size() <= max_len) {
            OWord cur;
            oracle_shuffle(a, b, 0, 0, cur, out);
          }
      break;
    case Op::kXor:
      out = l;
      out.insert(r.begin(), r.end());
      break;
    case Op::kLoop: {
      // (word, repetitions) pairs grown until the length budget is spent.
      std::vector<std::pair<OWord, int>> todo;
      for (const auto& a : l) todo.push_back({a, 1});
      while (!todo.empty()) {
        auto [w, n] = todo.back();
        todo.pop_back();
        if (n >= loop_min) out.insert(w);
        for (const auto& b : r)
          for (const auto& a : l)
            if (w.size() + b.size() + a.size() <= max_len) {
              OWord x = w;
              x.insert(x.end(), b.begin(), b.end());
              x.insert(x.end(), a.begin(), a.end());
              todo.push_back({x, n + 1});
            }
      }
      break;
    }
  }
  return out;
}

inline OWord names_of(const Trace& t) {
  OWord out;
  for (Activity a : t.events) out.push_back(std::string(a.name()));
  return out;
}

inline bool is_subsequence(const OWord& w, const OWord& s) {
  std::size_t i = 0;
  for (std::size_t k = 0; k < s.size() && i < w.size(); ++k)
    if (s[k] == w[i]) ++i;
  return i == w.size();
}

inline bool oracle_contains(const OLang& lang, const Trace& t) {
  OWord s = names_of(t);
  for (const auto& w : lang)
    if (is_subsequence(w, s)) return true;
  return false;
}

inline bool oracle_contains(const ProcessTree& p, const Trace& t) {
  return oracle_contains(oracle_language(p, t.size()), t);
}

// All embeddings of w in s, 1-based, in lexicographic order of the index lists.
inline void oracle_embeddings(const OWord& w, const OWord& s, std::size_t i, std::size_t from,
                              std::vector<std::size_t>& cur,
                              std::vector<std::vector<std::size_t>>& out) {
  if (i == w.size()) {
    out.push_back(cur);
    return;
  }
  for (std::size_t k = from; k < s.size(); ++k)
    if (s[k] == w[i]) {
      cur.push_back(k + 1);
      oracle_embeddings(w, s, i + 1, k + 1, cur, out);
      cur.pop_back();
    }
}

/// Lexicographically smallest index list over every embedding of every word.
inline std::optional<std::vector<std::size_t>> oracle_smallest_embedding(const ProcessTree& p,
                                                                         const Trace& t) {
  OWord s = names_of(t);
  std::optional<std::vector<std::size_t>> best;
  for (const auto& w : oracle_language(p, t.size())) {
    std::vector<std::vector<std::size_t>> all;
    std::vector<std::size_t> cur;
    oracle_embeddings(w, s, 0, 0, cur, all);
    for (const auto& e : all)
      if (!best || e < *best) best = e;
  }
  return best;
}

/// Independent LOF check: each index is the first match after the previous one.
inline bool oracle_lof(const ShadowMap& m, const Trace& t) {
  OWord s = names_of(t);
  std::size_t from = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::size_t k = from;
    while (k < s.size() && s[k] != m.word[i].name()) ++k;
    if (k == s.size() || k + 1 != m.trace_idx[i]) return false;
    from = k + 1;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Random instances

inline Names letters(std::size_t n) {
  Names out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::string(1, static_cast<char>('a' + i)));
  return out;
}

inline Trace random_trace(std::mt19937_64& rng, const Names& alphabet, std::size_t len,
                          std::string id = "t") {
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  Names ev;
  for (std::size_t i = 0; i < len; ++i) ev.push_back(alphabet[pick(rng)]);
  return make_trace(std::move(id), ev);
}

/// A word inserted into a trace at random positions, keeping its order.
inline Trace plant(std::mt19937_64& rng, const Trace& base, const Word& w) {
  std::uniform_int_distribution<std::size_t> slot(0, base.events.size());
  std::vector<std::size_t> slots;
  for (std::size_t i = 0; i < w.size(); ++i) slots.push_back(slot(rng));
  std::sort(slots.begin(), slots.end());
  Trace out{base.id, {}};
  std::size_t wi = 0;
  for (std::size_t k = 0; k <= base.events.size(); ++k) {
    while (wi < w.size() && slots[wi] == k) out.events.push_back(w[wi++]);
    if (k < base.events.size()) out.events.push_back(base.events[k]);
  }
  return out;
}

/// A random word of the tree; loops repeat loop_min or loop_min + 1 times.
inline Word sample_word(std::mt19937_64& rng, const ProcessTree& t, int loop_min = 2) {
  if (t.is_leaf()) return {t.activity()};
  auto coin = [&] { return rng() % 2 == 0; };
  switch (t.op()) {
    case Op::kSeq: {
      Word w = sample_word(rng, t.left(), loop_min);
      Word r = sample_word(rng, t.right(), loop_min);
      w.insert(w.end(), r.begin(), r.end());
      return w;
    }
    case Op::kAnd: {
      Word a = sample_word(rng, t.left(), loop_min);
      Word b = sample_word(rng, t.right(), loop_min);
      Word w;
      std::size_t i = 0, j = 0;
      while (i < a.size() || j < b.size())
        w.push_back((j == b.size() || (i < a.size() && coin())) ? a[i++] : b[j++]);
      return w;
    }
    case Op::kXor:
      return sample_word(rng, coin() ? t.left() : t.right(), loop_min);
    case Op::kLoop: {
      int reps = loop_min + (coin() ? 1 : 0);
      Word w = sample_word(rng, t.left(), loop_min);
      for (int k = 1; k < reps; ++k) {
        Word r = sample_word(rng, t.right(), loop_min);
        Word a = sample_word(rng, t.left(), loop_min);
        w.insert(w.end(), r.begin(), r.end());
        w.insert(w.end(), a.begin(), a.end());
      }
      return w;
    }
  }
  return {};
}

/// One combination step as mining performs it: p1 and p2 are canonical and
/// differ at one combination leaf.
struct CombinationInstance {
  ProcessTree p1, p2, raw;
};

inline std::optional<CombinationInstance> random_step(std::mt19937_64& rng, const ProcessTree& p1,
                                                      const Names& alphabet, int max_depth,
                                                      bool allow_xor) {
  auto slots = combination_leaves(p1);
  std::shuffle(slots.begin(), slots.end(), rng);
  Names fresh;
  for (const auto& n : alphabet)
    if (!p1.contains_activity(Activity::intern(n))) fresh.push_back(n);
  if (fresh.empty()) return std::nullopt;
  std::vector<Op> ops = {Op::kSeq, Op::kAnd, Op::kLoop};
  if (allow_xor) ops.push_back(Op::kXor);
  for (const auto& pos : slots) {
    if (static_cast<int>(pos.depth()) + 1 > max_depth) continue;
    std::shuffle(fresh.begin(), fresh.end(), rng);
    ProcessTree p2 = replace_at(p1, pos.path, leaf(fresh.front()));
    if (!is_canonical(p2)) continue;
    Op op = ops[std::uniform_int_distribution<std::size_t>(0, ops.size() - 1)(rng)];
    auto raw = combine_at(p1, p2, pos, op);
    if (!raw || raw->depth() > max_depth) continue;
    return CombinationInstance{p1, p2, *raw};
  }
  return std::nullopt;
}

/// Random tree grown by repeated combination from a two-leaf seed.
inline std::optional<CombinationInstance> random_combination(std::mt19937_64& rng,
                                                             const Names& alphabet, int max_depth,
                                                             int max_steps, bool allow_xor) {
  Names a = alphabet;
  std::shuffle(a.begin(), a.end(), rng);
  std::vector<Op> ops = {Op::kSeq, Op::kAnd, Op::kLoop};
  if (allow_xor) ops.push_back(Op::kXor);
  Op op0 = ops[std::uniform_int_distribution<std::size_t>(0, ops.size() - 1)(rng)];
  ProcessTree cur = leaf(a[0]);
  CombinationInstance inst{cur, leaf(a[1]), ProcessTree::node(op0, leaf(a[0]), leaf(a[1]))};
  int steps = std::uniform_int_distribution<int>(0, max_steps)(rng);
  for (int s = 0; s < steps; ++s) {
    auto next = random_step(rng, canonical(inst.raw), alphabet, max_depth, allow_xor);
    if (!next) break;
    inst = *next;
  }
  return inst;
}

}  // namespace bpm::testing
