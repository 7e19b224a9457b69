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

#include <filesystem>

#include "support.hpp"

namespace linvar {
namespace {

using testing::term;

TEST(DerivationJson, ParsesShippedProof) {
  Derivation d = derivation_from_json(Json::parse(read_file(LINVAR_DATA_DIR "/maltsev_semilattice_proof.json")));
  EXPECT_EQ(d.theory, "Maltsev_Semilattice");
  ASSERT_EQ(d.length(), 3u);
  EXPECT_EQ(d.steps[0].orientation, Orientation::Reverse);
  EXPECT_EQ(d.steps[0].position, Position({2}));
  EXPECT_EQ(d.steps[2].substitution.at("y"), term("m(y,y)"));
  Theory t = parse_theory(read_file(LINVAR_DATA_DIR "/maltsev_semilattice.thy"));
  EXPECT_TRUE(verify_derivation(t, d));
}

TEST(DerivationJson, Shape) {
  Derivation d{"T", {term("f(x)"), term("x")}, {}, true};
  d.steps.push_back({parse_identity("f(x) = x"), Orientation::Forward, Position({}), {{"x", term("x")}}});
  Json j = to_json(d);
  EXPECT_EQ(j["terms"], Json::parse(R"j(["f(x)", "x"])j"));
  EXPECT_EQ(j["steps"][0]["dir"], "fwd");
  EXPECT_EQ(j["steps"][0]["pos"], Json::array());
  EXPECT_EQ(j["reflexive"], true);
  EXPECT_EQ(derivation_from_json(j), d);
}

TEST(DerivationJson, Malformed) {
  for (const char* text : {R"({"terms": ["x"]})", R"({"terms": "x", "steps": []})",
                           R"({"terms": ["x"], "steps": [{"eq": "x = x", "dir": "up", "pos": [], "subst": {}}]})",
                           R"({"terms": ["f(x"], "steps": []})",
                           R"({"terms": ["x"], "steps": [{"eq": "x = x", "dir": "fwd", "pos": [-1], "subst": {}}]})"})
    EXPECT_THROW(derivation_from_json(Json::parse(text)), Error) << text;
}

TEST(AlgebraJson, NestedTables) {
  FiniteAlgebra a;
  a.size = 2;
  a.define("m", 2, [](const std::vector<int>& v) { return std::min(v[0], v[1]); });
  a.define("s", 1, [](const std::vector<int>& v) { return 1 - v[0]; });
  Json j = to_json(a);
  EXPECT_EQ(j["tables"]["m"], Json::parse("[[0,0],[0,1]]"));
  EXPECT_EQ(j["tables"]["s"], Json::parse("[1,0]"));
  EXPECT_EQ(algebra_from_json(j), a);
}

TEST(AlgebraJson, FirstArgumentOutermost) {
  FiniteAlgebra a;
  a.size = 3;
  a.define("f", 2, [](const std::vector<int>& v) { return v[0]; });
  Json j = to_json(a);
  EXPECT_EQ(j["tables"]["f"][2][0], 2);
  EXPECT_EQ(j["tables"]["f"][0][2], 0);
}

TEST(AlgebraJson, Malformed) {
  EXPECT_THROW(algebra_from_json(Json::parse(R"({"tables": {}})")), Error);
  EXPECT_THROW(algebra_from_json(Json::parse(R"({"size": 2, "tables": {"m": [[0,0],[0]]}})")), Error);
  EXPECT_THROW(algebra_from_json(Json::parse(R"({"size": 2, "tables": {"m": [["a","b"],[0,1]]}})")), Error);
}

TEST(TheoryJson, Join) {
  Json j = to_json(join_disjoint(presets::maltsev(), presets::maltsev()));
  EXPECT_EQ(j["name"], "Maltsev_Maltsev");
  EXPECT_EQ(j["ops"].size(), 2u);
  EXPECT_EQ(j["renamed"]["p"], "p_2");
  EXPECT_EQ(j["axioms"].size(), 4u);
}

TEST(ReportJson, Classification) {
  Json j = to_json(classify(presets::semilattice()));
  EXPECT_EQ(j["theory"], "Semilattice");
  EXPECT_EQ(j["verdicts"]["cm"]["answer"], "no");
  EXPECT_EQ(j["verdicts"]["cm"]["certificate"]["kind"], "model");
  EXPECT_EQ(j["verdicts"]["cm"]["certificate"]["algebra"]["size"], 2);
  EXPECT_EQ(j["traces"].size(), 2u);
}

TEST(Files, ReadWrite) {
  auto path = std::filesystem::temp_directory_path() / "linvar_io_test.txt";
  write_file(path.string(), "hello\n");
  EXPECT_EQ(read_file(path.string()), "hello\n");
  std::filesystem::remove(path);
  EXPECT_THROW(read_file(path.string()), Error);
}

// Properties.

TEST(IoProperty, DerivationRoundTrip) {
  for (const auto& [theory, d] : testing::derivation_corpus(81, 6)) {
    Derivation back = derivation_from_json(Json::parse(to_json(d).dump()));
    EXPECT_EQ(back, d);
    EXPECT_TRUE(verify_derivation(theory, back));
  }
}

TEST(IoProperty, AlgebraRoundTrip) {
  testing::Rng rng(82);
  for (int trial = 0; trial < 50; ++trial) {
    FiniteAlgebra a;
    a.size = 1 + static_cast<int>(testing::pick(rng, 3));
    Signature sig = testing::random_signature(rng);
    for (const auto& op : sig.ops())
      a.define(op.name, op.arity, [&](const std::vector<int>&) { return static_cast<int>(testing::pick(rng, a.size)); });
    EXPECT_EQ(algebra_from_json(Json::parse(to_json(a).dump())), a);
  }
}

TEST(IoProperty, TheoryRenderRoundTrip) {
  testing::Rng rng(83);
  for (int trial = 0; trial < 30; ++trial) {
    Theory t = testing::random_linear_theory(rng);
    EXPECT_TRUE(theory_equal(parse_theory(render_theory(t)), t));
  }
}

}  // namespace
}  // namespace linvar
