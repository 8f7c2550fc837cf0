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

#include <random>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include <gtest/gtest.h>

#include "bpm/process_tree.hpp"
#include "test_support.hpp"

namespace bpm {
namespace {

ProcessTree T(const char* s) { return parse_tree(s); }

std::set<std::string> texts(const std::vector<ProcessTree>& v) {
  std::set<std::string> out;
  for (const auto& t : v) out.insert(canonical_string(t));
  return out;
}

std::set<std::vector<std::string>> words(const std::vector<Word>& ws) {
  std::set<std::vector<std::string>> out;
  for (const auto& w : ws) {
    std::vector<std::string> n;
    for (Activity a : w) n.push_back(a.name());
    out.insert(n);
  }
  return out;
}

TEST(Depth, Examples) {
  EXPECT_EQ(depth(T("a")), 0);
  EXPECT_EQ(depth(T("seq(BT, and(CO,RB))")), 2);
  EXPECT_EQ(depth(T("seq(and(seq(seq(b,a),c),d), and(e,f))")), 4);
}

TEST(Alphabet, Examples) {
  EXPECT_EQ(alphabet(T("a")), ActivitySet{Activity::intern("a")});
  ActivitySet fig1{Activity::intern("BT"), Activity::intern("CO"), Activity::intern("RB")};
  EXPECT_EQ(alphabet(T("seq(BT,and(CO,RB))")), fig1);
  EXPECT_EQ(alphabet(T("seq(and(seq(seq(b,a),c),d),and(e,f))")).size(), 6u);
}

TEST(Parse, RoundTripAndWhitespace) {
  for (const char* s : {"a", "seq(a,and(b,c))", "loop(xor(a,b),seq(c,d))"})
    EXPECT_EQ(to_string(T(s)), s);
  EXPECT_EQ(to_string(T(" seq ( a , b ) ")), "seq(a,b)");
  EXPECT_EQ(to_string(T("seq(A,a)")), "seq(A,a)");
}

TEST(Parse, QuotedLabels) {
  ProcessTree t = T("seq(\"Send, then wait\",\"x(y)\")");
  EXPECT_EQ(t.left().activity().name(), "Send, then wait");
  EXPECT_EQ(t.right().activity().name(), "x(y)");
  EXPECT_EQ(to_string(parse_tree(to_string(t))), to_string(t));
}

TEST(Parse, ErrorsCarryColumn) {
  try {
    T("seq(a,)");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line, 1u);
    EXPECT_EQ(e.column, 7u);
  }
  EXPECT_THROW(T("foo(a,b)"), ParseError);
  EXPECT_THROW(T("seq(a,b"), ParseError);
  EXPECT_THROW(T("seq(a,b) c"), ParseError);
}

TEST(RepresentativeWord, SymmetricChildrenOrdered) {
  RepresentativeWord w = representative_word(T("and(b,a)"));
  ASSERT_EQ(w.size(), 3u);
  EXPECT_TRUE(w[0].is_op);
  EXPECT_EQ(w[0].op, Op::kAnd);
  EXPECT_EQ(w[1].act.name(), "a");
  EXPECT_EQ(w[2].act.name(), "b");
  RepresentativeWord s = representative_word(T("seq(b,a)"));
  EXPECT_EQ(s[1].act.name(), "b");
  EXPECT_EQ(representative_word(T("and(a,b)")), representative_word(T("and(b,a)")));
}

TEST(RepresentativeWord, CongruenceUnderSwaps) {
  std::mt19937_64 rng(11);
  auto alpha = testing::letters(7);
  for (int i = 0; i < 300; ++i) {
    auto inst = testing::random_combination(rng, alpha, 3, 4, true);
    const ProcessTree& t = inst->raw;
    // Swap the children of every node, one node at a time.
    std::vector<std::vector<bool>> paths{{}};
    for (std::size_t k = 0; k < paths.size(); ++k) {
      const ProcessTree& n = subtree_at(t, paths[k]);
      if (n.is_leaf()) continue;
      auto l = paths[k];
      l.push_back(false);
      auto r = paths[k];
      r.push_back(true);
      paths.push_back(l);
      paths.push_back(r);
      ProcessTree swapped = replace_at(t, paths[k], ProcessTree::node(n.op(), n.right(), n.left()));
      bool same = representative_word(swapped) == representative_word(t);
      EXPECT_EQ(same, is_symmetric(n.op())) << to_string(t);
    }
  }
}

TEST(Language, Examples) {
  EXPECT_EQ(words(language(T("seq(BT,and(CO,RB))"), 1, 1)),
            (std::set<std::vector<std::string>>{{"BT", "CO", "RB"}, {"BT", "RB", "CO"}}));
  EXPECT_EQ(words(language(T("loop(a,b)"), 2, 2)),
            (std::set<std::vector<std::string>>{{"a", "b", "a"}}));
  EXPECT_EQ(words(language(T("xor(a,b)"), 1, 3)),
            (std::set<std::vector<std::string>>{{"a"}, {"b"}}));
  EXPECT_EQ(words(language(T("loop(a,b)"), 1, 3)),
            (std::set<std::vector<std::string>>{{"a"}, {"a", "b", "a"}, {"a", "b", "a", "b", "a"}}));
}

TEST(Language, AgreesWithOracle) {
  // Words of at most five events repeat a loop at most three times.
  std::mt19937_64 rng(5);
  auto alpha = testing::letters(6);
  for (int i = 0; i < 300; ++i) {
    auto inst = testing::random_combination(rng, alpha, 2, 3, true);
    const ProcessTree& t = inst->raw;
    std::set<std::vector<std::string>> lib;
    for (const auto& w : words(language(t, 2, 3)))
      if (w.size() <= 5) lib.insert(w);
    auto ora = testing::oracle_language(t, 5, 2);
    EXPECT_EQ(lib, std::set<std::vector<std::string>>(ora.begin(), ora.end())) << to_string(t);
  }
}

TEST(Language, InterleavingCount) {
  // |and(A,B)| = sum over word pairs of C(|w1|+|w2|, |w1|).
  ProcessTree a = T("xor(a,seq(b,c))");
  ProcessTree b = T("seq(d,seq(e,f))");
  std::size_t expected = 0;
  for (const auto& w1 : language(a, 1, 1))
    for (const auto& w2 : language(b, 1, 1)) {
      std::size_t n = w1.size() + w2.size(), k = w1.size(), c = 1;
      for (std::size_t i = 1; i <= k; ++i) c = c * (n - k + i) / i;
      expected += c;
    }
  EXPECT_EQ(language(and_(a, b), 1, 1).size(), expected);
}

TEST(Language, CapacityNamesSubtree) {
  ProcessTree t = T("and(seq(a,seq(b,seq(c,d))),seq(e,seq(f,seq(g,h))))");
  try {
    language(t, 1, 1, 10);
    FAIL() << "expected CapacityError";
  } catch (const CapacityError& e) {
    EXPECT_NE(std::string(e.what()).find("and("), std::string::npos);
  }
}

TEST(Language, BadBoundsAreContractViolations) {
  EXPECT_THROW(language(T("a"), 0, 1), ContractViolation);
  EXPECT_THROW(language(T("a"), 3, 2), ContractViolation);
}

TEST(CombinationLeaves, Examples) {
  auto single = combination_leaves(T("a"));
  ASSERT_EQ(single.size(), 1u);
  EXPECT_TRUE(single[0].path.empty());

  auto two = combination_leaves(T("seq(a,b)"));
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].path, std::vector<bool>{false});
  EXPECT_EQ(two[1].path, std::vector<bool>{true});

  auto three = combination_leaves(T("seq(a,and(b,c))"));
  ASSERT_EQ(three.size(), 2u);
  EXPECT_EQ(three[0].path, (std::vector<bool>{true, false}));
  EXPECT_EQ(three[1].path, (std::vector<bool>{true, true}));
}

TEST(CombinationLeaves, ShallowLeafLeftOfDeeperOneIsExcluded) {
  // All four leaves qualify in the first tree; b has deeper leaves to its right.
  auto c = combination_leaves(T("seq(seq(a,x),seq(b,c))"));
  EXPECT_EQ(c.size(), 4u);
  auto d = combination_leaves(T("seq(b,seq(a,c))"));
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].path, (std::vector<bool>{true, false}));
}

TEST(Combine, Examples) {
  EXPECT_EQ(to_string(*combine(T("seq(a,b)"), T("seq(a,c)"), Op::kAnd)), "seq(a,and(b,c))");
  EXPECT_EQ(to_string(*combine(T("seq(BT,CO)"), T("seq(BT,RB)"), Op::kAnd)),
            "seq(BT,and(CO,RB))");
  EXPECT_THROW(combine(T("seq(a,b)"), T("seq(a,b)"), Op::kSeq), ContractViolation);
}

TEST(Combine, DuplicateActivityIsRejected) {
  EXPECT_FALSE(combine(T("seq(a,b)"), T("seq(a,a)"), Op::kSeq).has_value());
}

TEST(Combine, NonCombinationLeafIsContractViolation) {
  EXPECT_THROW(combine(T("seq(a,and(b,c))"), T("seq(d,and(b,c))"), Op::kSeq), ContractViolation);
  EXPECT_THROW(combine(T("seq(a,b)"), T("seq(c,d)"), Op::kSeq), ContractViolation);
}

TEST(RegularSeeds, Examples) {
  SeedPair s = regular_seeds(T("seq(a,and(b,c))"));
  EXPECT_EQ(to_string(s.first), "seq(a,b)");
  EXPECT_EQ(to_string(s.second), "seq(a,c)");
  EXPECT_EQ(s.op, Op::kAnd);

  SeedPair f3 = regular_seeds(T("seq(loop(seq(b,a),c),and(d,e))"));
  EXPECT_EQ(to_string(f3.first), "seq(loop(b,c),and(d,e))");
  EXPECT_EQ(to_string(f3.second), "seq(loop(a,c),and(d,e))");
  EXPECT_THROW(regular_seeds(T("a")), ContractViolation);
}

TEST(RegularSeeds, RoundTripOnGeneratedTrees) {
  std::mt19937_64 rng(17);
  auto alpha = testing::letters(8);
  for (int i = 0; i < 2000; ++i) {
    auto inst = testing::random_combination(rng, alpha, 3, 6, true);
    const ProcessTree& t = inst->raw;
    SeedPair s = regular_seeds(t);
    auto back = combine(s.first, s.second, s.op);
    ASSERT_TRUE(back.has_value()) << to_string(t);
    EXPECT_EQ(back->key(), t.key()) << to_string(t);
  }
}

TEST(AlternativeSeeds, FigureFourTree) {
  auto f = texts(alternative_seed_set(T("seq(seq(a,b),seq(c,d))")));
  for (const char* s : {"seq(seq(a,b),c)", "seq(seq(a,b),d)", "seq(a,seq(c,d))", "seq(b,seq(c,d))"})
    EXPECT_TRUE(f.count(s)) << s;
  EXPECT_FALSE(f.count("seq(seq(a,b),seq(c,d))"));
}

TEST(AlternativeSeeds, LeafAndXor) {
  EXPECT_TRUE(alternative_seed_set(T("a")).empty());
  EXPECT_TRUE(alternative_seed_set(T("xor(a,b)")).empty());
}

TEST(AlternativeSeeds, ContainsRegularSeeds) {
  std::mt19937_64 rng(23);
  auto alpha = testing::letters(8);
  for (int i = 0; i < 500; ++i) {
    auto inst = testing::random_combination(rng, alpha, 3, 5, false);
    const ProcessTree& t = inst->raw;
    SeedPair s = regular_seeds(t);
    std::unordered_set<std::string> keys;
    for (const auto& a : alternative_seed_set(t)) keys.insert(a.key());
    EXPECT_TRUE(keys.count(s.first.key())) << to_string(t);
    EXPECT_TRUE(keys.count(s.second.key())) << to_string(t);
  }
}

TEST(LoopBlock, Examples) {
  ProcessTree p = T("seq(loop(seq(b,a),c),and(d,e))");
  EXPECT_EQ(to_string(loop_block(*find_leaf(p, Activity::intern("a")), p)), "loop(seq(b,a),c)");
  EXPECT_EQ(to_string(loop_block(*find_leaf(p, Activity::intern("d")), p)), "d");
  ProcessTree cascade = T("loop(loop(loop(seq(a,b),c),d),e)");
  EXPECT_EQ(loop_block(*find_leaf(cascade, Activity::intern("a")), cascade).key(), cascade.key());
  EXPECT_EQ(to_string(loop_block(LeafPosition{}, T("a"))), "a");
}

TEST(Monotonicity, SeedWordsEmbedInCombination) {
  std::mt19937_64 rng(29);
  auto alpha = testing::letters(7);
  int checked = 0;
  while (checked < 300) {
    auto inst = testing::random_combination(rng, alpha, 2, 3, false);
    auto big = testing::oracle_language(inst->raw, 12);
    for (const ProcessTree* seed : {&inst->p1, &inst->p2})
      for (const auto& w : words(language(*seed, 2, 2))) {
        if (w.size() > 8) continue;
        bool found = false;
        for (const auto& v : big)
          if (testing::is_subsequence(w, v)) {
            found = true;
            break;
          }
        EXPECT_TRUE(found) << to_string(inst->raw);
      }
    ++checked;
  }
}

}  // namespace
}  // namespace bpm
