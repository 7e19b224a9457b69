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


// Acceptance checks: prints one PASS/FAIL line per criterion and exits
// nonzero when any fails.

#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "support.hpp"

namespace linvar {
namespace {

using testing::id;
using testing::term;

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool condition, const std::string& what) {
    if (!condition) {
      if (ok) detail << "failed: ";
      else detail << "; ";
      detail << what;
      ok = false;
    }
  }
};

/// A derivation through exactly `terms`, one root or inner rewrite per link.
std::optional<Derivation> connect(const Theory& t, const std::vector<Term>& terms) {
  Derivation d{t.name(), {terms.front()}, {}, false};
  for (std::size_t i = 1; i < terms.size(); ++i) {
    std::vector<Term> fillers;
    for (const auto& v : variables(terms[i])) fillers.push_back(Term::var(v));
    std::optional<DerivationStep> found;
    for_each_rewrite(t, d.last(), fillers, [&](const DerivationStep& s, const Term& next) {
      if (next == terms[i]) found = s;
      return !found;
    });
    if (!found) return std::nullopt;
    d.append(*found, terms[i]);
  }
  return d;
}

/// Same length, variable endpoints, and intermediate terms headed by `symbol`.
bool chain_shape(const Derivation& d, std::size_t length, const std::string& symbol) {
  if (d.length() != length || !d.first().is_var() || !d.last().is_var() || d.first() == d.last()) return false;
  for (std::size_t i = 1; i + 1 < d.terms.size(); ++i)
    if (d.terms[i].is_var() || d.terms[i].name() != symbol) return false;
  return true;
}

std::string render(const Derivation& d) {
  std::string out;
  for (const Term& t : d.terms) out += (out.empty() ? "" : " = ") + to_string(t);
  return out;
}

void ac1(Outcome& o) {
  Theory expected("Expected", {{"p", 3}},
                  {"p(x,y,y) = x", "p(y,y,x) = x", "p(u,y,z) = p(v,y,z)", "p(x,u,z) = p(x,v,z)",
                   "p(x,y,u) = p(x,y,v)"});
  Theory d = derivative(presets::maltsev());
  o.require(theory_equal(d, expected), "derivative differs from the five-identity set");
  o.detail << d.identities().size() << " identities";
}

void check_inconsistency(Outcome& o, const Theory& t, std::size_t max_steps, const std::vector<Term>& reference) {
  auto v = is_inconsistent(t);
  o.require(v.entailed() && v.derivation, t.name() + " not found inconsistent");
  if (!v.derivation) return;
  const Derivation& d = *v.derivation;
  o.require(d.length() <= max_steps, "certificate longer than " + std::to_string(max_steps));
  o.require(static_cast<bool>(verify_derivation(t, d)), "certificate does not verify");
  o.require(chain_shape(d, reference.size() - 1, "p"), "certificate shape differs from the reference chain");
  auto ref = connect(t, reference);
  o.require(ref && verify_derivation(t, *ref), "reference chain is not a derivation");
  o.detail << "certificate " << render(d) << "; reference " << (ref ? render(*ref) : "-") << " verified";
}

void ac2(Outcome& o) {
  check_inconsistency(o, derivative(presets::maltsev()), 3,
                      {term("x"), term("p(x,y,y)"), term("p(y,y,y)"), term("y")});
}

void ac3(Outcome& o) {
  check_inconsistency(o, order_derivative(presets::maltsev()), 2, {term("x"), term("p(x,y,y)"), term("y")});
}

void ac4(Outcome& o) {
  auto keys = weak_independence_profile(presets::maltsev()).keys();
  o.require(keys == std::set<ProfileKey>{{"p", 1}, {"p", 2}, {"p", 3}}, "profile differs");
  o.detail << keys.size() << " positions";
}

void ac5(Outcome& o) {
  struct Golden {
    const char* name;
    std::optional<bool> cm, nci, nperm;
  };
  const Golden goldens[] = {{"Maltsev", true, true, true},
                            {"Semilattice", false, false, false},
                            {"Majority", true, {}, {}},
                            {"HagemannMitschke2", {}, {}, true},
                            {"HagemannMitschke3", {}, {}, true}};
  std::size_t certificates = 0;
  for (const Golden& g : goldens) {
    auto r = classify(*presets::by_name(g.name));
    const std::optional<bool> want[] = {g.cm, g.nci, g.nperm};
    for (std::size_t i = 0; i < 3; ++i) {
      if (!want[i]) continue;
      const Verdict& v = r.verdict(kProperties[i]);
      std::string what = std::string(g.name) + " " + to_string(kProperties[i]);
      o.require(v.yes() == *want[i], what + " answered " + to_string(v.answer));
      if (v.yes()) {
        o.require(v.derivation && verify_derivation(v.stage, *v.derivation), what + " certificate invalid");
        // Independent confirmation by proof search on the same stage.
        o.require(bfs_prove(v.stage, id("x = y")).proved(), what + " not confirmed by proof search");
      } else {
        o.require(v.model && v.model->size == 2 && satisfies(*v.model, v.stage) &&
                      v.assignment.at("x") != v.assignment.at("y"),
                  what + " lacks a verified 2-element model");
      }
      ++certificates;
    }
  }
  o.detail << certificates << " verdicts with verified certificates";
}

void ac6(Outcome& o) {
  std::size_t pairs = 0;
  for (const Theory& a : testing::corpus())
    for (const Theory& b : testing::corpus()) {
      auto r = check_join_decomposition(a, b);
      o.require(r.stages_hold(), a.name() + " + " + b.name());
      ++pairs;
    }
  o.detail << pairs << " ordered pairs, every stage equal";
}

void ac7(Outcome& o) {
  auto corpus = testing::corpus();
  std::vector<ClassificationReport> single;
  for (const Theory& t : corpus) single.push_back(classify(t));
  std::size_t checks = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    for (std::size_t j = 0; j < corpus.size(); ++j) {
      auto joined = classify(join_disjoint(corpus[i], corpus[j]));
      for (Property p : kProperties) {
        ++checks;
        o.require(joined.verdict(p).yes() == (single[i].verdict(p).yes() || single[j].verdict(p).yes()),
                  corpus[i].name() + " + " + corpus[j].name() + " " + to_string(p));
      }
    }
  o.detail << checks << " checks";
}

void ac8(Outcome& o) {
  auto cases = testing::projection_corpus();
  Derivation shipped =
      derivation_from_json(Json::parse(read_file(LINVAR_DATA_DIR "/maltsev_semilattice_proof.json")));
  cases.push_back({presets::maltsev(), presets::semilattice(), shipped, "shipped proof"});
  Derivation collapse{"Maltsev_Semilattice", {term("p(x,y,y)")}, {}, false};
  Theory ms = join_disjoint(presets::maltsev(), presets::semilattice());
  if (auto c = connect(ms, {term("p(x,y,y)"), term("p(m(x,x),y,y)"), term("m(x,x)"), term("x")}))
    cases.push_back({presets::maltsev(), presets::semilattice(), *c, "collapse through m"});
  else
    o.require(false, "hand-built collapse derivation");

  std::size_t passed = 0;
  for (const auto& c : cases) {
    try {
      if (!verify_derivation(join_disjoint(c.first, c.second), c.derivation)) {
        o.require(false, c.label + ": input does not verify");
        continue;
      }
      auto r = project_to_component(c.first, c.second, c.derivation);
      bool flat = true;
      for (const Term& t : r.derivation.terms) flat = flat && t.is_flat();
      bool ok = verify_derivation(r.owner, r.derivation) && flat && r.derivation.first() == c.derivation.first() &&
                r.derivation.last() == c.derivation.last();
      o.require(ok, c.label);
      passed += ok;
    } catch (const Error& e) {
      o.require(false, c.label + ": " + e.what());
    }
  }
  o.require(cases.size() >= 20, "fewer than 20 derivations");
  o.detail << passed << "/" << cases.size() << " projections verified";
}

void ac9(Outcome& o) {
  testing::Rng rng(909);
  std::vector<std::pair<Theory, Identity>> goals;
  for (const Theory& t : testing::corpus()) {
    for (DerivativeKind kind : {DerivativeKind::Derivative, DerivativeKind::Order})
      for (const auto& stage : iterate(t, kind).stages) {
        goals.emplace_back(stage.theory, id("x = y"));
        for (int i = 0; i < 8; ++i) goals.emplace_back(stage.theory, testing::random_flat_identity(rng, t.signature()));
      }
  }
  std::size_t entailed = 0, refuted = 0, violations = 0;
  for (const auto& [t, goal] : goals) {
    FlatFactBase base(t, default_budget(t));
    EntailOptions quiet;
    quiet.find_countermodel = false;
    auto v = entails_flat(base, goal, quiet);
    auto model = refute_entailment(t, goal, 2, 2);
    if (v.entailed()) {
      ++entailed;
      if (model.found()) {
        ++violations;
        o.require(false, t.name() + " " + to_string(goal) + " entailed and refuted");
      }
    } else {
      refuted += model.found();
      if (bfs_prove(t, goal, SearchBounds{2000, 3, 10}).proved()) {
        ++violations;
        o.require(false, t.name() + " " + to_string(goal) + " not entailed but proved");
      }
    }
  }
  o.detail << goals.size() << " goals, " << entailed << " entailed, " << refuted << " refuted by models, "
           << violations << " violations";
}

void ac10(Outcome& o) {
  auto corpus = testing::derivation_corpus(1010, 8);
  testing::Rng rng(1011);
  std::size_t rejected = 0, wrongly_accepted = 0, attempts = 0;
  while (rejected < 1000 && attempts < 20000) {
    ++attempts;
    const auto& [t, d] = corpus[testing::pick(rng, corpus.size())];
    std::string kind;
    Derivation m = testing::mutate(rng, t, d, kind);
    if (m == d || testing::reference_valid(t, m)) continue;
    if (verify_derivation(t, m)) ++wrongly_accepted;
    else ++rejected;
  }
  o.require(wrongly_accepted == 0, std::to_string(wrongly_accepted) + " invalid mutations accepted");
  o.require(rejected >= 1000, "only " + std::to_string(rejected) + " invalid mutations generated");

  std::size_t searched = 0, refused = 0;
  auto accept = [&](const Theory& t, const Derivation& d) {
    ++searched;
    if (!verify_derivation(t, d)) ++refused;
  };
  for (const auto& [t, d] : corpus) accept(t, d);
  for (const Theory& t : testing::corpus()) {
    FlatFactBase base = saturate(t);
    for (const auto& [_, fact] : weak_independence_profile(base).witnesses)
      if (auto v = entails_flat(base, fact, {false}); v.derivation) accept(t, *v.derivation);
    auto r = classify(t);
    for (Property p : kProperties)
      if (const Verdict& v = r.verdict(p); v.derivation) accept(v.stage, *v.derivation);
  }
  o.require(refused == 0, std::to_string(refused) + " search-produced derivations refused");
  o.detail << rejected << " invalid mutations rejected, " << searched << " search-produced derivations accepted";
}

}  // namespace
}  // namespace linvar

int main() {
  using Check = std::function<void(linvar::Outcome&)>;
  const std::pair<const char*, Check> checks[] = {
      {"AC1", linvar::ac1}, {"AC2", linvar::ac2}, {"AC3", linvar::ac3}, {"AC4", linvar::ac4},
      {"AC5", linvar::ac5}, {"AC6", linvar::ac6}, {"AC7", linvar::ac7}, {"AC8", linvar::ac8},
      {"AC9", linvar::ac9}, {"AC10", linvar::ac10}};
  int failures = 0;
  for (const auto& [name, check] : checks) {
    linvar::Outcome outcome;
    auto start = std::chrono::steady_clock::now();
    try {
      check(outcome);
    } catch (const std::exception& e) {
      outcome.require(false, std::string("exception: ") + e.what());
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !outcome.ok;
    std::cout << name << " " << (outcome.ok ? "PASS" : "FAIL") << " (" << std::fixed << std::setprecision(1)
              << seconds << " s) " << outcome.detail.str() << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
