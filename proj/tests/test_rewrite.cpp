// Copyright 2026 The linvar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "support.hpp"

namespace linvar {
namespace {

using testing::id;
using testing::term;

Theory maltsev_prime() { return derivative(presets::maltsev()); }

Derivation example_chain(const Theory& t) {
  // x = p(x,y,y) = p(y,y,y) = y
  Derivation d{t.name(), {term("x")}, {}, false};
  d.append({id("x = p(x,y,y)"), Orientation::Forward, {}, {{"x", term("x")}, {"y", term("y")}}}, term("p(x,y,y)"));
  d.append({id("p(u,y,z) = p(v,y,z)"), Orientation::Forward, {}, {{"u", term("x")}, {"v", term("y")},
                                                                    {"y", term("y")}, {"z", term("y")}}},
           term("p(y,y,y)"));
  d.append({id("p(x,x,x) = x"), Orientation::Forward, {}, {{"x", term("y")}}}, term("y"));
  return d;
}

TEST(Verify, MaltsevPrimeChain) {
  Theory t = maltsev_prime();
  Derivation d = example_chain(t);
  // The last step uses idempotency, which is not an axiom: route it through p(y,y,x) = x instead.
  d.steps[2] = {id("p(y,y,x) = x"), Orientation::Forward, {}, {{"x", term("y")}, {"y", term("y")}}};
  auto v = verify_derivation(t, d);
  EXPECT_TRUE(v) << v.diagnostic;
}

TEST(Verify, NonAxiomRejectedWithStep) {
  Theory t = maltsev_prime();
  auto v = verify_derivation(t, example_chain(t));
  EXPECT_FALSE(v);
  ASSERT_TRUE(v.failing_step);
  EXPECT_EQ(*v.failing_step, 2u);
  EXPECT_NE(v.diagnostic.find("step 3"), std::string::npos) << v.diagnostic;
}

TEST(Verify, EmptyDerivation) {
  for (const Theory& t : testing::corpus()) EXPECT_TRUE(verify_derivation(t, {t.name(), {term("f(x)")}, {}, false}));
}

TEST(Verify, CorruptedPosition) {
  Theory m = presets::maltsev();
  Derivation d{m.name(), {term("p(x,y,y)")}, {}, false};
  d.append({id("p(x,y,y) = x"), Orientation::Forward, {}, {{"x", term("x")}, {"y", term("y")}}}, term("x"));
  ASSERT_TRUE(verify_derivation(m, d));
  d.steps[0].position = Position{2};
  auto v = verify_derivation(m, d);
  EXPECT_FALSE(v);
  EXPECT_EQ(v.failing_step, std::optional<std::size_t>(0));
}

TEST(Verify, ReflexiveNeedsPermission) {
  Theory m = presets::maltsev();
  Derivation d{m.name(), {term("p(x,y,y)")}, {}, false};
  d.append(reflexive_step({2}, term("y")), term("p(x,y,y)"));
  EXPECT_FALSE(verify_derivation(m, d));
  d.allow_reflexive = true;
  EXPECT_TRUE(verify_derivation(m, d));
}

TEST(Search, AxiomInOneStep) {
  auto r = bfs_prove(presets::maltsev(), id("p(x,y,y) = x"));
  ASSERT_TRUE(r.proved());
  EXPECT_EQ(r.derivation->length(), 1u);
}

TEST(Search, MaltsevPrimeInconsistentInThreeSteps) {
  Theory t = maltsev_prime();
  auto r = bfs_prove(t, id("x = y"));
  ASSERT_TRUE(r.proved());
  EXPECT_EQ(r.derivation->length(), 3u);
  EXPECT_TRUE(verify_derivation(t, *r.derivation));
  EXPECT_EQ(r.derivation->first(), term("x"));
  EXPECT_EQ(r.derivation->last(), term("y"));
}

TEST(Search, NonEntailedIsUnknown) {
  SearchBounds small{20'000, 4, 12};
  auto r = bfs_prove(presets::maltsev(), id("x = p(y,x,x)"), small);
  EXPECT_FALSE(r.proved());
}

TEST(Search, Deterministic) {
  Theory t = maltsev_prime();
  auto a = bfs_prove(t, id("x = y"));
  auto b = bfs_prove(t, id("x = y"));
  ASSERT_TRUE(a.proved() && b.proved());
  EXPECT_EQ(*a.derivation, *b.derivation);
}

// Properties.

TEST(RewriteProperty, ProofsVerify) {
  testing::Rng rng(31);
  int proved = 0;
  for (const Theory& t : testing::corpus()) {
    for (int trial = 0; trial < 6; ++trial) {
      Identity goal = testing::random_flat_identity(rng, t.signature());
      auto r = bfs_prove(t, goal, SearchBounds{3000, 3, 10});
      if (!r.proved()) continue;
      ++proved;
      EXPECT_TRUE(verify_derivation(t, *r.derivation)) << to_string(goal);
      EXPECT_EQ(r.derivation->first(), goal.lhs);
      EXPECT_EQ(r.derivation->last(), goal.rhs);
    }
  }
  EXPECT_GT(proved, 0);
}

TEST(RewriteProperty, RandomWalksVerify) {
  for (const auto& [t, d] : testing::derivation_corpus(32, 10)) {
    EXPECT_TRUE(verify_derivation(t, d)) << t.name();
    EXPECT_TRUE(testing::reference_valid(t, d));
  }
}

TEST(RewriteProperty, MutationsRejected) {
  testing::Rng rng(33);
  auto corpus = testing::derivation_corpus(34, 12);
  std::size_t rejected = 0, still_valid = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const auto& [t, d] = corpus[testing::pick(rng, corpus.size())];
    std::string kind;
    Derivation m = testing::mutate(rng, t, d, kind);
    if (m == d) continue;
    bool expected = testing::reference_valid(t, m);
    bool actual = static_cast<bool>(verify_derivation(t, m));
    EXPECT_EQ(actual, expected) << kind << " mutation of a " << t.name() << " derivation";
    (expected ? still_valid : rejected) += 1;
  }
  EXPECT_GE(rejected, 1000u);
  RecordProperty("rejected", static_cast<int>(rejected));
  RecordProperty("still_valid", static_cast<int>(still_valid));
}

TEST(RewriteProperty, InversionVerifies) {
  for (const auto& [t, d] : testing::derivation_corpus(35, 5)) {
    Derivation r = d.reversed();
    EXPECT_TRUE(verify_derivation(t, r));
    EXPECT_EQ(r.first(), d.last());
  }
}

}  // namespace
}  // namespace linvar
