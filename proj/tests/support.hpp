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

// Seeded generators shared by the test suites.

#pragma once

#include <algorithm>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "linvar/linvar.hpp"

namespace linvar::testing {

using Rng = std::mt19937;

inline std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

inline const std::vector<std::string>& var_pool() {
  static const std::vector<std::string> pool{"x", "y", "z", "u", "w"};
  return pool;
}

inline Term random_var(Rng& rng, std::size_t vars = 3) { return Term::var(var_pool()[pick(rng, vars)]); }

/// Random term over `sig` with at most `depth` nested applications.
inline Term random_term(Rng& rng, const Signature& sig, std::size_t depth, std::size_t vars = 3) {
  if (depth == 0 || sig.empty() || pick(rng, 3) == 0) return random_var(rng, vars);
  const OperationSymbol& op = sig.ops()[pick(rng, sig.size())];
  std::vector<Term> args;
  for (std::size_t i = 0; i < op.arity; ++i) args.push_back(random_term(rng, sig, depth - 1, vars));
  return Term::app(op.name, std::move(args));
}

/// Random flat term (a variable or one symbol applied to variables).
inline Term random_flat_term(Rng& rng, const Signature& sig, std::size_t vars = 3) {
  return random_term(rng, sig, 1, vars);
}

inline Identity random_flat_identity(Rng& rng, const Signature& sig, std::size_t vars = 3) {
  return {random_flat_term(rng, sig, vars), random_flat_term(rng, sig, vars)};
}

inline Signature random_signature(Rng& rng) {
  Signature sig;
  std::size_t n = 1 + pick(rng, 2);
  const char* names[] = {"f", "g", "h"};
  for (std::size_t i = 0; i < n; ++i) sig.add({names[i], 1 + pick(rng, 3)});
  return sig;
}

/// Random linear idempotent theory: explicit idempotency for every symbol plus
/// a few random flat axioms.
inline Theory random_linear_theory(Rng& rng, const std::string& name = "Random") {
  Signature sig = random_signature(rng);
  Theory t(name, sig);
  for (const auto& op : sig.ops()) t.add(idempotency_law(op));
  std::size_t extra = pick(rng, 3);
  for (std::size_t i = 0; i < extra; ++i) t.add(random_flat_identity(rng, sig));
  return t;
}

/// Random walk of `steps` rewrites starting from `start`.
inline Derivation random_derivation(Rng& rng, const Theory& theory, const Term& start, std::size_t steps,
                                    std::size_t max_size = 20) {
  Derivation d{theory.name(), {start}, {}, false};
  std::vector<Term> fillers{Term::var("x"), Term::var("y"), Term::var("z")};
  for (std::size_t i = 0; i < steps; ++i) {
    std::vector<std::pair<DerivationStep, Term>> options;
    for_each_rewrite(theory, d.last(), fillers, [&](const DerivationStep& s, const Term& next) {
      if (next.size() <= max_size) options.emplace_back(s, next);
      return true;
    });
    if (options.empty()) break;
    auto& [s, next] = options[pick(rng, options.size())];
    d.append(s, next);
  }
  return d;
}

inline std::vector<Theory> corpus() { return presets::all(); }

namespace detail {

inline Term instantiate(const Term& t, const Substitution& sigma, bool& unbound) {
  if (t.is_var()) {
    auto it = sigma.find(t.name());
    if (it == sigma.end()) {
      unbound = true;
      return t;
    }
    return it->second;
  }
  std::vector<Term> args;
  for (const Term& a : t.args()) args.push_back(instantiate(a, sigma, unbound));
  return Term::app(t.name(), std::move(args));
}

inline std::optional<Term> rewrite_at(const Term& t, const std::vector<std::size_t>& path, std::size_t depth,
                                      const Term& expected, const Term& replacement) {
  if (depth == path.size()) {
    if (!(t == expected)) return std::nullopt;
    return replacement;
  }
  std::size_t i = path[depth];
  if (i == 0 || i > t.arity()) return std::nullopt;
  auto inner = rewrite_at(t.arg(i - 1), path, depth + 1, expected, replacement);
  if (!inner) return std::nullopt;
  std::vector<Term> args(t.args().begin(), t.args().end());
  args[i - 1] = *inner;
  return Term::app(t.name(), std::move(args));
}

}  // namespace detail

/// Second implementation of derivation checking, written directly from the
/// definition of a rewrite step, used to cross-check the library verifier.
inline bool reference_valid(const Theory& theory, const Derivation& d) {
  if (d.terms.size() != d.steps.size() + 1) return false;
  std::set<Identity> axioms;
  for (const Identity& e : theory.identities()) axioms.insert(e);
  for (std::size_t i = 0; i < d.steps.size(); ++i) {
    const DerivationStep& s = d.steps[i];
    bool reflexive = s.equation.lhs.is_var() && s.equation.lhs == s.equation.rhs;
    if (reflexive ? !d.allow_reflexive : !axioms.contains(canonicalize_identity(s.equation))) return false;
    bool forward = s.orientation == Orientation::Forward;
    bool unbound = false;
    Term from = detail::instantiate(forward ? s.equation.lhs : s.equation.rhs, s.substitution, unbound);
    Term to = detail::instantiate(forward ? s.equation.rhs : s.equation.lhs, s.substitution, unbound);
    if (unbound) return false;
    auto next = detail::rewrite_at(d.terms[i], s.position.path(), 0, from, to);
    if (!next || !(*next == d.terms[i + 1])) return false;
  }
  return true;
}

/// One single-field mutation of a derivation with at least one step.
inline Derivation mutate(Rng& rng, const Theory& theory, const Derivation& d, std::string& kind) {
  Derivation m = d;
  std::size_t i = pick(rng, d.steps.size());
  DerivationStep& s = m.steps[i];
  Signature sig = theory.signature();
  switch (pick(rng, 5)) {
    case 0: {
      kind = "equation";
      std::vector<Identity> axioms(theory.identities().begin(), theory.identities().end());
      if (pick(rng, 2) == 0 && axioms.size() > 1) {
        Identity other = axioms[pick(rng, axioms.size())];
        if (!(canonicalize_identity(other) == canonicalize_identity(s.equation))) {
          s.equation = other;
          break;
        }
      }
      // Perturb one side of the equation.
      Term& side = pick(rng, 2) == 0 ? s.equation.lhs : s.equation.rhs;
      auto where = positions(side);
      side = replace_at(side, where[pick(rng, where.size())], random_flat_term(rng, sig));
      break;
    }
    case 1:
      kind = "orientation";
      s.orientation = opposite(s.orientation);
      break;
    case 2: {
      kind = "position";
      std::vector<std::size_t> path = s.position.path();
      if (path.empty() || pick(rng, 3) == 0) {
        path.push_back(1 + pick(rng, 3));
      } else if (pick(rng, 2) == 0) {
        path.pop_back();
      } else {
        path.back() = 1 + pick(rng, 4);
      }
      s.position = Position(path);
      break;
    }
    case 3: {
      kind = "substitution";
      if (s.substitution.empty()) {
        s.substitution["x"] = random_term(rng, sig, 1);
        break;
      }
      auto it = s.substitution.begin();
      std::advance(it, pick(rng, s.substitution.size()));
      it->second = random_term(rng, sig, 2);
      break;
    }
    default: {
      kind = "term";
      std::size_t k = pick(rng, m.terms.size());
      auto where = positions(m.terms[k]);
      m.terms[k] = replace_at(m.terms[k], where[pick(rng, where.size())], random_term(rng, sig, 1));
      break;
    }
  }
  return m;
}

/// Derivations produced by the proof search and by random walks over the corpus.
inline std::vector<std::pair<Theory, Derivation>> derivation_corpus(std::uint32_t seed, std::size_t walks_per_theory) {
  Rng rng(seed);
  std::vector<std::pair<Theory, Derivation>> out;
  for (const Theory& t : corpus()) {
    for (const auto& op : t.signature().ops()) {
      auto proof = bfs_prove(t, idempotency_law(op));
      if (proof.proved() && proof.derivation->length() > 0) out.emplace_back(t, *proof.derivation);
    }
    for (std::size_t w = 0; w < walks_per_theory; ++w) {
      Term start = random_term(rng, t.signature(), 2);
      Derivation d = random_derivation(rng, t, start, 1 + pick(rng, 4));
      if (d.length() > 0) out.emplace_back(t, std::move(d));
    }
  }
  return out;
}

/// A derivation of F(w) = v over join_disjoint(first, second).
struct ProjectionCase {
  Theory first, second;
  Derivation derivation;
  std::string label;
};

namespace detail {

/// G(x,..,x) -> x over `t`, by saturation.
inline std::optional<Derivation> collapse_derivation(const Theory& t, const OperationSymbol& op) {
  FlatFactBase base(t, default_budget(t));
  Identity law = idempotency_law(op);
  auto v = entails_flat(base, law, {false});
  if (!v.entailed()) return std::nullopt;
  return *v.derivation;
}

/// Rewrites every occurrence of variable `v` in the flat term `start` to
/// G(v,..,v) using the reversed collapse derivation.
inline Derivation expand_variable(const Derivation& collapse, const Term& start, const std::string& v) {
  Derivation grow = instantiate(collapse, {{"x", Term::var(v)}}).reversed();
  Derivation out{collapse.theory, {start}, {}, false};
  for (std::size_t j = 0; j < start.arity(); ++j)
    if (start.arg(j) == Term::var(v)) out = out.then(embed(grow, out.last(), Position({j + 1})));
  return out;
}

}  // namespace detail

/// Projection instances over the corpus joins: flat witness derivations of
/// the owner, the same derivations with a variable expanded through a
/// symbol of the other component, and proof-search results.
inline std::vector<ProjectionCase> projection_corpus(bool with_search = true) {
  std::vector<ProjectionCase> out;
  const auto theories = corpus();
  for (const Theory& a : theories)
    for (const Theory& b : theories) {
      Theory joined = join_disjoint(a, b);
      Theory b_in = renamed_component(b, joined.rename_map());
      for (int side = 0; side < 2; ++side) {
        const Theory& owner = side == 0 ? a : b_in;
        const Theory& other = side == 0 ? b_in : a;
        std::string tag = joined.name() + (side == 0 ? " first" : " second");
        auto profile = weak_independence_profile(saturate(owner));
        if (profile.empty()) continue;
        const Identity& fact = profile.witnesses.begin()->second;
        auto proof = entails_flat(saturate(owner), fact, {false});
        if (!proof.entailed()) continue;
        Derivation d = proof.derivation->reversed();
        d.theory = joined.name();
        out.push_back({a, b, d, tag + " flat"});

        const std::string v = fact.lhs.name();
        auto collapse = detail::collapse_derivation(other, other.signature().ops().front());
        if (collapse) {
          collapse->theory = joined.name();
          Substitution tau{{v, Term::app(other.signature().ops().front().name,
                                         std::vector<Term>(other.signature().ops().front().arity, Term::var(v)))}};
          Derivation e = detail::expand_variable(*collapse, d.first(), v).then(instantiate(d, tau));
          e = e.then(instantiate(*collapse, {{"x", Term::var(v)}}));
          out.push_back({a, b, e, tag + " expanded"});
        }
        if (with_search) {
          auto found = bfs_prove(joined, {fact.rhs, fact.lhs}, SearchBounds{3000, 3, 10});
          if (found.proved() && found.derivation->length() > 0)
            out.push_back({a, b, *found.derivation, tag + " search"});
        }
      }
    }
  return out;
}

inline Identity id(const char* text) { return parse_identity(text); }
inline Term term(const char* text) { return parse_term(text); }

}  // namespace linvar::testing
