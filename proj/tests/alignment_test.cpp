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

#include <optional>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "bpm/alignment.hpp"
#include "test_support.hpp"

namespace bpm {
namespace {

using Idx = std::vector<std::size_t>;

ProcessTree T(const char* s) { return parse_tree(s); }
Trace tr(const char* s) { return make_trace("t", std::string_view(s)); }

TEST(Lof, Examples) {
  Trace t = tr("a b c b b");
  EXPECT_TRUE(lof_holds(ShadowMap{to_word({"a", "c", "b"}), {1, 3, 4}}, t));
  EXPECT_FALSE(lof_holds(ShadowMap{to_word({"a", "c", "b"}), {1, 3, 5}}, t));
  EXPECT_TRUE(lof_holds(ShadowMap{}, t));
  EXPECT_FALSE(lof_holds(ShadowMap{to_word({"b"}), {4}}, t));
}

TEST(ShadowMapInvariants, Validity) {
  Trace t = tr("a b c");
  EXPECT_TRUE(shadow_map_valid(ShadowMap{to_word({"a", "c"}), {1, 3}}, t));
  EXPECT_FALSE(shadow_map_valid(ShadowMap{to_word({"c", "a"}), {3, 1}}, t));
  EXPECT_FALSE(shadow_map_valid(ShadowMap{to_word({"a", "b"}), {1, 3}}, t));
  EXPECT_FALSE(shadow_map_valid(ShadowMap{to_word({"a"}), {4}}, t));
  auto e = ShadowMap{to_word({"a", "c"}), {1, 3}}.entries();
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[1].word_pos, 2u);
  EXPECT_EQ(e[1].trace_idx, 3u);
}

TEST(Boundary, Examples) {
  EXPECT_EQ(boundary(ShadowMap{to_word({"a", "c", "b"}), {1, 3, 4}}), (Boundary{1, 4}));
  EXPECT_EQ(boundary(ShadowMap{to_word({"a"}), {7}}), (Boundary{7, 7}));
  EXPECT_THROW(boundary(ShadowMap{}), ContractViolation);
}

TEST(Classical, PicksLexicographicallySmallestIndices) {
  auto m = classical_align(T("seq(a,and(b,c))"), tr("a b c b b"));
  ASSERT_TRUE(m);
  EXPECT_EQ(m->trace_idx, (Idx{1, 2, 3}));
  EXPECT_EQ(m->word, to_word({"a", "b", "c"}));
}

TEST(Classical, AbsentOnRunningExampleTraceFive) {
  EventLog log = testing::fig1_log();
  EXPECT_FALSE(classical_align(T("seq(BT,and(CO,RB))"), log[4]));
}

TEST(Classical, SingleLeafLeftmost) {
  auto m = classical_align(T("a"), tr("b a a"));
  ASSERT_TRUE(m);
  EXPECT_EQ(m->trace_idx, (Idx{2}));
}

TEST(Classical, LoopNeedsRepetition) {
  EXPECT_FALSE(classical_align(T("loop(a,b)"), tr("a b c")));
  auto m = classical_align(T("loop(a,b)"), tr("a b c a"));
  ASSERT_TRUE(m);
  EXPECT_EQ(m->trace_idx, (Idx{1, 2, 4}));
  AlignOptions once;
  once.loop_min = 1;
  EXPECT_TRUE(classical_align(T("loop(a,b)"), tr("a c"), once));
}

TEST(Classical, MatchesOracleSmallestEmbedding) {
  std::mt19937_64 rng(41);
  auto alpha = testing::letters(5);
  for (int i = 0; i < 400; ++i) {
    auto inst = testing::random_combination(rng, alpha, 2, 2, true);
    Trace t = testing::random_trace(rng, alpha, 9);
    auto m = classical_align(inst->raw, t);
    auto o = testing::oracle_smallest_embedding(inst->raw, t);
    ASSERT_EQ(m.has_value(), o.has_value()) << to_string(inst->raw);
    if (m) {
      EXPECT_EQ(m->trace_idx, *o) << to_string(inst->raw);
    }
  }
}

TEST(Contains, Examples) {
  EventLog log = testing::fig1_log();
  EXPECT_TRUE(contains(T("seq(BT,and(CO,RB))"), log[0]));
  EXPECT_FALSE(contains(T("seq(BT,and(CO,RB))"), log[4]));
  EXPECT_TRUE(contains(T("seq(xor(a,seq(b,c)),d)"), tr("c b a d")));
  EXPECT_FALSE(contains(T("seq(xor(a,seq(b,c)),d)"), tr("c b d a")));
}

TEST(Render, BracketsMatchedEvents) {
  Trace t = tr("a e f c b c a b c d f e");
  ShadowMap m{to_word({"b", "a", "c", "d", "f", "e"}), {5, 7, 9, 10, 11, 12}};
  EXPECT_EQ(render_alignment(m, t), "a e f c [b] c [a] b [c] [d] [f] [e]");
}

GrowthContext worked_example_context() {
  GrowthContext ctx;
  ctx.p1 = T("seq(and(seq(b,c),d),and(e,f))");
  ctx.p2 = T("seq(and(seq(a,c),d),and(e,f))");
  ctx.map1 = ShadowMap{to_word({"b", "c", "d", "f", "e"}), {5, 6, 10, 11, 12}};
  ctx.map2 = ShadowMap{to_word({"a", "c", "d", "f", "e"}), {1, 4, 10, 11, 12}};
  return ctx;
}

TEST(Growth, WorkedExample) {
  ProcessTree r = T("seq(and(seq(seq(b,a),c),d),and(e,f))");
  Trace t = tr("a e f c b c a b c d f e");
  GrowthContext ctx = worked_example_context();
  ASSERT_TRUE(lof_holds(ctx.map1, t));
  ASSERT_TRUE(lof_holds(ctx.map2, t));
  GrowthStats st;
  auto m = grow_align(r, t, ctx, {}, &st);
  ASSERT_TRUE(m);
  EXPECT_EQ(m->word, to_word({"b", "a", "c", "d", "f", "e"}));
  EXPECT_EQ(m->trace_idx, (Idx{5, 7, 9, 10, 11, 12}));
  EXPECT_EQ(boundary(*m), (Boundary{5, 12}));
  EXPECT_EQ(render_alignment(*m, t), "a e f c [b] c [a] b [c] [d] [f] [e]");
  EXPECT_GT(st.reused, 0u);
}

TEST(Growth, WorkedExampleSeedOrderDoesNotMatter) {
  ProcessTree r = T("seq(and(seq(seq(b,a),c),d),and(e,f))");
  Trace t = tr("a e f c b c a b c d f e");
  GrowthContext ctx = worked_example_context();
  std::swap(ctx.p1, ctx.p2);
  std::swap(ctx.map1, ctx.map2);
  auto m = grow_align(r, t, ctx);
  ASSERT_TRUE(m);
  EXPECT_EQ(m->trace_idx, (Idx{5, 7, 9, 10, 11, 12}));
}

TEST(Growth, LoopPatternAbsent) {
  ProcessTree p = T("seq(loop(seq(b,a),c),and(d,e))");
  Trace t = tr("a c a b c b d e");
  SeedPair s = regular_seeds(p);
  auto m1 = classical_align(s.first, t);
  auto m2 = classical_align(s.second, t);
  ASSERT_TRUE(m1);
  ASSERT_TRUE(m2);
  GrowthContext ctx{s.first, s.second, *m1, *m2, loop_block(s.position, p)};
  EXPECT_FALSE(grow_align(p, t, ctx));
  EXPECT_FALSE(classical_align(p, t));
}

TEST(Growth, AndOfLeavesReusesBothMaps) {
  Trace t = tr("x b y a");
  GrowthContext ctx{T("a"), T("b"), ShadowMap{to_word({"a"}), {4}}, ShadowMap{to_word({"b"}), {2}},
                    T("a")};
  GrowthStats st;
  auto m = grow_align(T("and(a,b)"), t, ctx, {}, &st);
  ASSERT_TRUE(m);
  EXPECT_EQ(m->word, to_word({"b", "a"}));
  EXPECT_EQ(m->trace_idx, (Idx{2, 4}));
  EXPECT_EQ(st.realigned, 0u);
}

TEST(Growth, SeqOfLeavesRealignsAfterFirst) {
  Trace t = tr("b x a b");
  GrowthContext ctx{T("a"), T("b"), ShadowMap{to_word({"a"}), {3}}, ShadowMap{to_word({"b"}), {1}},
                    T("a")};
  auto m = grow_align(T("seq(a,b)"), t, ctx);
  ASSERT_TRUE(m);
  EXPECT_EQ(m->trace_idx, (Idx{3, 4}));
  EXPECT_FALSE(grow_align(T("seq(a,b)"), tr("b x a"),
                          GrowthContext{T("a"), T("b"), ShadowMap{to_word({"a"}), {3}},
                                        ShadowMap{to_word({"b"}), {1}}, T("a")}));
}

TEST(Growth, SeedsThatDoNotDecomposeAreRejected) {
  Trace t = tr("a b c");
  GrowthContext ctx{T("seq(a,b)"), T("seq(c,b)"), ShadowMap{to_word({"a", "b"}), {1, 2}},
                    ShadowMap{to_word({"c"}), {3}}, T("a")};
  EXPECT_THROW(grow_align(T("seq(a,c)"), t, ctx), ContractViolation);
}

// Randomized agreement with the classical engine; the acceptance binary runs
// a larger sweep.
TEST(Growth, AgreesWithClassicalOnRandomInstances) {
  std::mt19937_64 rng(1234);
  auto alpha = testing::letters(8);
  int done = 0;
  while (done < 1500) {
    auto inst = testing::random_combination(rng, alpha, 3, 5, false);
    Trace t = testing::random_trace(rng, alpha, 6 + rng() % 18);
    if (rng() % 2) t = testing::plant(rng, t, testing::sample_word(rng, inst->raw));
    auto m1 = classical_align(inst->p1, t);
    auto m2 = classical_align(inst->p2, t);
    if (!m1 || !m2) continue;
    auto c = classical_align(inst->raw, t);
    auto g = grow_align(inst->raw, t, GrowthContext{inst->p1, inst->p2, *m1, *m2, ProcessTree()});
    ++done;
    ASSERT_EQ(g.has_value(), c.has_value())
        << to_string(inst->raw) << " on " << render_alignment(ShadowMap{}, t);
    if (g) {
      EXPECT_TRUE(shadow_map_valid(*g, t));
      EXPECT_TRUE(testing::oracle_lof(*g, t)) << to_string(inst->raw);
      EXPECT_TRUE(contains(inst->raw, Trace{"w", g->word}));
    }
  }
}

}  // namespace
}  // namespace bpm
