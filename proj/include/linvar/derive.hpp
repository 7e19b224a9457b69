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

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "linvar/error.hpp"
#include "linvar/flatsat.hpp"
#include "linvar/theory.hpp"

namespace linvar {

/// (symbol, 1-based argument position).
using ProfileKey = std::pair<std::string, std::size_t>;

/// Positions at which some operation is weakly independent, each with a
/// witnessing fact x = F(w) where w_i is not x.
struct WeakIndependenceProfile {
  std::map<ProfileKey, Identity> witnesses;

  bool contains(const std::string& symbol, std::size_t position) const {
    return witnesses.contains({symbol, position});
  }
  std::set<ProfileKey> keys() const {
    std::set<ProfileKey> out;
    for (const auto& [k, _] : witnesses) out.insert(k);
    return out;
  }
  std::size_t size() const { return witnesses.size(); }
  bool empty() const { return witnesses.empty(); }
};

/// Canonical facts x = F(w): x first, then the other variables named
/// y1, y2, ... in order of first occurrence in w.
using OrderFactSet = std::set<Identity>;

namespace detail {

inline void require_profile_budget(const FlatFactBase& base) {
  std::size_t need = base.theory().signature().max_arity() + 1;
  if (base.budget() < need)
    throw BudgetTooSmall("profile queries need a budget of at least " + std::to_string(need) + ", got " +
                         std::to_string(base.budget()));
}

/// The fact x = atom with x the variable atom 0, in canonical naming.
inline Identity canonical_fact(const FlatFactBase& base, std::size_t atom) {
  const FlatContext& ctx = base.context();
  std::map<std::size_t, std::string> names{{0, "x"}};
  std::vector<Term> args;
  for (std::size_t a : ctx.args_of(atom)) {
    auto it = names.find(a);
    if (it == names.end()) it = names.emplace(a, "y" + std::to_string(names.size())).first;
    args.push_back(Term::var(it->second));
  }
  return {Term::var("x"), Term::app(ctx.ops()[ctx.op_of(atom)].name, std::move(args))};
}

/// Applications in the class of the variable atom 0.
inline std::vector<std::size_t> fact_atoms(const FlatFactBase& base) {
  std::vector<std::size_t> out;
  for (std::size_t atom : base.members(0))
    if (!base.context().is_var_atom(atom)) out.push_back(atom);
  return out;
}

}  // namespace detail

inline WeakIndependenceProfile weak_independence_profile(const FlatFactBase& base) {
  detail::require_profile_budget(base);
  WeakIndependenceProfile profile;
  for (std::size_t atom : detail::fact_atoms(base)) {
    auto args = base.context().args_of(atom);
    const std::string& symbol = base.context().ops()[base.context().op_of(atom)].name;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == 0) continue;
      Identity fact = detail::canonical_fact(base, atom);
      auto [it, inserted] = profile.witnesses.try_emplace({symbol, i + 1}, fact);
      if (!inserted && fact < it->second) it->second = fact;
    }
  }
  return profile;
}

inline WeakIndependenceProfile weak_independence_profile(const Theory& theory,
                                                         std::optional<std::size_t> budget = std::nullopt) {
  return weak_independence_profile(saturate(theory, budget.value_or(default_budget(theory))));
}

inline OrderFactSet order_facts(const FlatFactBase& base) {
  detail::require_profile_budget(base);
  OrderFactSet facts;
  for (std::size_t atom : detail::fact_atoms(base)) facts.insert(detail::canonical_fact(base, atom));
  return facts;
}

/// F(z1..u..zn) = F(z1..u'..zn), differing only at `position`.
inline Identity independence_identity(const OperationSymbol& op, std::size_t position) {
  std::vector<Term> left, right;
  for (std::size_t i = 1; i <= op.arity; ++i) {
    Term z = Term::var("z" + std::to_string(i));
    left.push_back(i == position ? Term::var("u") : z);
    right.push_back(i == position ? Term::var("v") : z);
  }
  return {Term::app(op.name, std::move(left)), Term::app(op.name, std::move(right))};
}

/// Identities x = F(w') with each w'_i either x or w_i.
inline std::vector<Identity> order_mixtures(const Identity& fact) {
  const Term& app = fact.rhs;
  const Term& x = fact.lhs;
  std::vector<std::size_t> open;
  for (std::size_t i = 0; i < app.arity(); ++i)
    if (!(app.arg(i) == x)) open.push_back(i);
  std::vector<Identity> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << open.size()); ++mask) {
    std::vector<Term> args(app.args().begin(), app.args().end());
    for (std::size_t j = 0; j < open.size(); ++j)
      if (mask >> j & 1) args[open[j]] = x;
    out.push_back({x, Term::app(app.name(), std::move(args))});
  }
  return out;
}

inline Theory derivative_from_profile(const Theory& theory, const WeakIndependenceProfile& profile) {
  Theory out = theory;
  out.set_name(theory.name() + "_d");
  for (const auto& [key, _] : profile.witnesses)
    out.add(independence_identity(*theory.signature().find(key.first), key.second));
  return out;
}

inline Theory order_derivative_from_facts(const Theory& theory, const OrderFactSet& facts) {
  Theory out = theory;
  out.set_name(theory.name() + "_o");
  for (const Identity& fact : facts)
    for (const Identity& e : order_mixtures(fact)) out.add(e);
  return out;
}

inline Theory derivative(const Theory& theory, std::optional<std::size_t> budget = std::nullopt) {
  return derivative_from_profile(theory, weak_independence_profile(theory, budget));
}

inline Theory order_derivative(const Theory& theory, std::optional<std::size_t> budget = std::nullopt) {
  auto base = saturate(theory, budget.value_or(default_budget(theory)));
  return order_derivative_from_facts(theory, order_facts(base));
}

enum class DerivativeKind { Derivative, Order };
enum class StopReason { Inconsistent, Fixpoint };

inline const char* to_string(DerivativeKind k) { return k == DerivativeKind::Derivative ? "derivative" : "order"; }
inline const char* to_string(StopReason r) { return r == StopReason::Inconsistent ? "inconsistent" : "fixpoint"; }

struct IterationStage {
  Theory theory;
  /// Filled for derivative iterations.
  std::set<ProfileKey> profile;
  /// Filled for order-derivative iterations.
  OrderFactSet facts;
  /// Identities this stage added to the previous one.
  std::vector<Identity> added;
  EntailmentVerdict consistency;
};

struct IterationTrace {
  DerivativeKind kind = DerivativeKind::Derivative;
  std::size_t budget = 0;
  std::vector<IterationStage> stages;
  StopReason reason = StopReason::Fixpoint;

  std::size_t stop_index() const { return stages.size() - 1; }
  const IterationStage& last() const { return stages.back(); }
  bool inconsistent() const { return reason == StopReason::Inconsistent; }
  /// Stage k, or the final stage once the iteration has stopped.
  const Theory& stage(std::size_t k) const { return stages[std::min(k, stop_index())].theory; }
};

struct IterateOptions {
  std::optional<std::size_t> budget;
  EntailOptions entail;
  /// Safety net; the iteration terminates on its own.
  std::size_t max_stages = 10'000;
};

/// Applies the chosen operator until a stage is inconsistent or the
/// profile (or fact set) stops growing.
inline IterationTrace iterate(const Theory& theory, DerivativeKind kind, const IterateOptions& options = {}) {
  IterationTrace trace;
  trace.kind = kind;
  trace.budget = options.budget.value_or(default_budget(theory));
  EntailOptions quiet = options.entail;
  quiet.find_countermodel = false;

  Theory current = theory;
  std::optional<std::set<ProfileKey>> previous_profile;
  std::optional<OrderFactSet> previous_facts;
  for (std::size_t k = 0; k < options.max_stages; ++k) {
    FlatFactBase base(current, trace.budget);
    IterationStage stage{current, {}, {}, {}, is_inconsistent(base, quiet)};
    if (!trace.stages.empty()) {
      const auto& before = trace.stages.back().theory.identities();
      for (const Identity& e : current.identities())
        if (!before.contains(e)) stage.added.push_back(e);
    }
    if (stage.consistency.entailed()) {
      trace.stages.push_back(std::move(stage));
      trace.reason = StopReason::Inconsistent;
      return trace;
    }
    Theory next;
    bool fixpoint = false;
    if (kind == DerivativeKind::Derivative) {
      auto profile = weak_independence_profile(base);
      stage.profile = profile.keys();
      fixpoint = previous_profile && *previous_profile == stage.profile;
      previous_profile = stage.profile;
      next = derivative_from_profile(current, profile);
    } else {
      stage.facts = order_facts(base);
      fixpoint = previous_facts && *previous_facts == stage.facts;
      previous_facts = stage.facts;
      next = order_derivative_from_facts(current, stage.facts);
    }
    if (fixpoint && options.entail.find_countermodel)
      stage.consistency = is_inconsistent(base, options.entail);
    trace.stages.push_back(std::move(stage));
    if (fixpoint) {
      trace.reason = StopReason::Fixpoint;
      return trace;
    }
    next.set_name(theory.name() + "_" + (kind == DerivativeKind::Derivative ? "d" : "o") + std::to_string(k + 1));
    current = std::move(next);
  }
  throw Error("iteration did not stabilize within " + std::to_string(options.max_stages) + " stages");
}

}  // namespace linvar
