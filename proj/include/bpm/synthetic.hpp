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
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "bpm/alignment.hpp"
#include "bpm/errors.hpp"
#include "bpm/log_model.hpp"
#include "bpm/process_tree.hpp"

namespace bpm {

struct PlantedPattern {
  ProcessTree tree;
  double support = 0.0;
};

struct SyntheticSpec {
  int activities = 20;
  int traces = 500;
  int length = 20;
  std::uint64_t seed = 1;
  std::vector<PlantedPattern> planted;
  int max_attempts = 500;  // regenerations per trace
};

/// {"activities", "traces", "length", "seed", "planted": [{"tree", "support"}]}
inline SyntheticSpec parse_synthetic_spec(const nlohmann::json& j) {
  SyntheticSpec s;
  try {
    s.activities = j.value("activities", s.activities);
    s.traces = j.value("traces", s.traces);
    s.length = j.value("length", s.length);
    s.seed = j.value("seed", s.seed);
    if (j.contains("planted"))
      for (const auto& p : j.at("planted"))
        s.planted.push_back({parse_tree(p.at("tree").get<std::string>()),
                             p.at("support").get<double>()});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("synthetic spec: ") + e.what());
  }
  return s;
}

namespace detail {
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// Inserts w at random positions of base, keeping the order of both.
inline Word interleave_random(const Word& base, const Word& w, std::mt19937_64& rng) {
  std::size_t n = base.size() + w.size();
  std::vector<std::size_t> slots(n);
  for (std::size_t i = 0; i < n; ++i) slots[i] = i;
  std::shuffle(slots.begin(), slots.end(), rng);
  slots.resize(w.size());
  std::sort(slots.begin(), slots.end());
  Word out;
  out.reserve(n);
  std::size_t bi = 0, wi = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (wi < slots.size() && slots[wi] == k)
      out.push_back(w[wi++]);
    else
      out.push_back(base[bi++]);
  }
  return out;
}
}  // namespace detail

/// Deterministic noise log where each planted pattern is contained in exactly
/// round(support * traces) traces.
inline EventLog gen_synthetic(const SyntheticSpec& spec) {
  if (spec.traces < 1 || spec.length < 1 || spec.activities < 1)
    throw ConfigError("synthetic: traces, length and activities must be positive");
  ActivitySet planted_acts;
  for (const auto& p : spec.planted) {
    if (p.support < 0 || p.support > 1) throw ConfigError("synthetic: support outside [0,1]");
    planted_acts.insert(p.tree.activities().begin(), p.tree.activities().end());
  }
  if (static_cast<int>(planted_acts.size()) > spec.activities)
    throw ConfigError("synthetic: planted patterns need more activities than the budget");

  std::vector<Activity> alphabet(planted_acts.begin(), planted_acts.end());
  for (int k = 1; static_cast<int>(alphabet.size()) < spec.activities; ++k) {
    Activity a = Activity::intern("x" + std::to_string(k));
    if (!planted_acts.count(a)) alphabet.push_back(a);
  }
  std::sort(alphabet.begin(), alphabet.end(), name_less);

  std::mt19937_64 rng(spec.seed);
  const std::size_t m = static_cast<std::size_t>(spec.traces);
  std::vector<std::vector<bool>> chosen(spec.planted.size(), std::vector<bool>(m, false));
  std::vector<std::vector<Word>> langs;
  for (std::size_t p = 0; p < spec.planted.size(); ++p) {
    auto target = static_cast<std::size_t>(std::llround(spec.planted[p].support * spec.traces));
    if (std::abs(static_cast<double>(target) / spec.traces - spec.planted[p].support) > 0.02)
      throw ConfigError("synthetic: too few traces to hit the target support");
    std::vector<std::size_t> idx(m);
    for (std::size_t i = 0; i < m; ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i = 0; i < target; ++i) chosen[p][idx[i]] = true;
    langs.push_back(language(spec.planted[p].tree, 2, 2));
  }

  std::vector<Trace> traces;
  traces.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    bool ok = false;
    Trace t;
    t.id = std::to_string(i + 1);
    for (int attempt = 0; attempt < spec.max_attempts && !ok; ++attempt) {
      std::vector<const Word*> words;
      std::size_t planted_len = 0;
      for (std::size_t p = 0; p < spec.planted.size(); ++p)
        if (chosen[p][i]) {
          words.push_back(&langs[p][detail::uniform_index(rng, langs[p].size())]);
          planted_len += words.back()->size();
        }
      std::size_t noise =
          planted_len >= static_cast<std::size_t>(spec.length) ? 0 : spec.length - planted_len;
      Word events;
      for (std::size_t k = 0; k < noise; ++k)
        events.push_back(alphabet[detail::uniform_index(rng, alphabet.size())]);
      for (const Word* w : words) events = detail::interleave_random(events, *w, rng);
      t.events = std::move(events);
      TraceIndex ix(t);
      ok = true;
      for (std::size_t p = 0; p < spec.planted.size() && ok; ++p)
        ok = classical_align(spec.planted[p].tree, ix).has_value() == chosen[p][i];
    }
    if (!ok) throw ConfigError("synthetic: could not realize the planted supports");
    traces.push_back(std::move(t));
  }
  return EventLog::from_traces(std::move(traces));
}

}  // namespace bpm
