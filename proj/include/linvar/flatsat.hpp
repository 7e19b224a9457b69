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

// Decision procedure for linear goals over a linear idempotent theory.
//
// Any derivation of a linear goal F(x) = y over a linear theory can be
// flattened into root-level steps between flat terms (a variable, or one
// symbol applied to variables). Within a fixed context of `budget`
// variables the flat atoms form a finite set, and the partition generated
// by all axiom instances over that context decides the goal.

#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "linvar/derivation.hpp"
#include "linvar/error.hpp"
#include "linvar/models.hpp"
#include "linvar/term.hpp"
#include "linvar/theory.hpp"
#include "linvar/union_find.hpp"

namespace linvar {

inline std::size_t default_budget(const Theory& theory) {
  return 2 * theory.signature().max_arity() + 2;
}

/// Indexes the flat atoms over variables {0..budget-1}: variables first,
/// then each symbol's applications in row-major order of argument tuples.
class FlatContext {
 public:
  static constexpr std::size_t kMaxAtoms = 40'000'000;

  FlatContext(const Signature& signature, std::size_t budget) : ops_(signature.ops()), budget_(budget) {
    if (budget == 0) throw BudgetTooSmall("variable budget must be positive");
    std::size_t offset = budget;
    for (const auto& op : ops_) {
      offsets_.push_back(offset);
      std::size_t count = 1;
      for (std::size_t i = 0; i < op.arity; ++i) {
        if (count > kMaxAtoms / budget) throw Error("flat atom universe exceeds limit");
        count *= budget;
      }
      offset += count;
      if (offset > kMaxAtoms) throw Error("flat atom universe exceeds limit");
    }
    offsets_.push_back(offset);
    total_ = offset;
  }

  std::size_t budget() const { return budget_; }
  std::size_t atom_count() const { return total_; }
  const std::vector<OperationSymbol>& ops() const { return ops_; }
  std::size_t offset(std::size_t op) const { return offsets_[op]; }

  bool is_var_atom(std::size_t atom) const { return atom < budget_; }

  std::size_t op_of(std::size_t atom) const {
    std::size_t op = 0;
    while (offsets_[op + 1] <= atom) ++op;
    return op;
  }

  std::vector<std::size_t> args_of(std::size_t atom) const {
    std::size_t op = op_of(atom);
    std::vector<std::size_t> args(ops_[op].arity);
    std::size_t rest = atom - offsets_[op];
    for (std::size_t i = args.size(); i-- > 0;) {
      args[i] = rest % budget_;
      rest /= budget_;
    }
    return args;
  }

  std::size_t app_atom(std::size_t op, const std::vector<std::size_t>& args) const {
    std::size_t index = 0;
    for (std::size_t a : args) index = index * budget_ + a;
    return offsets_[op] + index;
  }

  std::optional<std::size_t> op_index(const std::string& name) const {
    for (std::size_t i = 0; i < ops_.size(); ++i)
      if (ops_[i].name == name) return i;
    return std::nullopt;
  }

  Term to_term(std::size_t atom, const std::vector<std::string>& names) const {
    if (is_var_atom(atom)) return Term::var(names[atom]);
    std::size_t op = op_of(atom);
    std::vector<Term> args;
    for (std::size_t a : args_of(atom)) args.push_back(Term::var(names[a]));
    return Term::app(ops_[op].name, std::move(args));
  }

  /// Atom for a flat term whose variables are mapped by `index`.
  std::size_t encode(const Term& flat, const std::map<std::string, std::size_t>& index) const {
    if (flat.is_var()) return index.at(flat.name());
    auto op = op_index(flat.name());
    if (!op) throw UnknownSymbol("unknown symbol '" + flat.name() + "'");
    if (ops_[*op].arity != flat.arity()) throw ArityMismatch("arity mismatch for '" + flat.name() + "'");
    std::vector<std::size_t> args;
    for (const Term& a : flat.args()) {
      if (!a.is_var()) throw Error("term " + to_string(flat) + " is not flat");
      args.push_back(index.at(a.name()));
    }
    return app_atom(*op, args);
  }

 private:
  std::vector<OperationSymbol> ops_;
  std::size_t budget_;
  std::vector<std::size_t> offsets_;
  std::size_t total_ = 0;
};

namespace detail {

/// A flat identity side over the identity's own variable indices.
struct FlatPattern {
  std::optional<std::size_t> op;
  std::vector<std::size_t> vars;  // single entry when op is empty
};

struct FlatIdentity {
  Identity identity;
  std::vector<std::string> variables;
  FlatPattern lhs;
  FlatPattern rhs;

  const FlatPattern& side(Orientation o, bool pattern) const {
    bool left = (o == Orientation::Forward) == pattern;
    return left ? lhs : rhs;
  }
};

inline FlatPattern compile_side(const Term& t, const std::vector<std::string>& vars, const FlatContext& ctx) {
  auto var_index = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(vars.begin(), vars.end(), name) - vars.begin());
  };
  if (t.is_var()) return {std::nullopt, {var_index(t.name())}};
  FlatPattern p{ctx.op_index(t.name()), {}};
  for (const Term& a : t.args()) p.vars.push_back(var_index(a.name()));
  return p;
}

inline std::size_t instantiate(const FlatPattern& p, const std::vector<std::size_t>& values,
                               const FlatContext& ctx) {
  if (!p.op) return values[p.vars[0]];
  std::size_t index = 0;
  for (std::size_t v : p.vars) index = index * ctx.budget() + values[v];
  return ctx.offset(*p.op) + index;
}

}  // namespace detail

/// One union performed during saturation: the axiom instance that merged
/// atoms `a` and `b`.
struct TraceEntry {
  std::size_t a;
  std::size_t b;
  std::size_t identity;
  std::vector<std::size_t> assignment;
};

/// Partition of the flat atoms over a bounded variable context, closed under
/// axiom instances. Immutable once built.
class FlatFactBase {
 public:
  FlatFactBase(const Theory& theory, std::size_t budget) : theory_(theory), context_(theory.signature(), budget) {
    for (const Identity& e : theory.identities()) {
      if (!e.is_flat())
        throw NotLinearIdempotent("identity " + to_string(e) + " is not linear");
      detail::FlatIdentity fi{e, e.variables(), {}, {}};
      fi.lhs = detail::compile_side(e.lhs, fi.variables, context_);
      fi.rhs = detail::compile_side(e.rhs, fi.variables, context_);
      identities_.push_back(std::move(fi));
    }
    classes_ = UnionFind(context_.atom_count());
    saturate();
  }

  const Theory& theory() const { return theory_; }
  const FlatContext& context() const { return context_; }
  std::size_t budget() const { return context_.budget(); }
  const std::vector<TraceEntry>& closure_trace() const { return trace_; }

  bool same_class(std::size_t a, std::size_t b) const { return classes_.same(a, b); }
  std::size_t class_of(std::size_t atom) const { return classes_.find(atom); }

  /// Every atom in the class of `atom`, ascending.
  std::vector<std::size_t> members(std::size_t atom) const {
    std::vector<std::size_t> out;
    std::size_t root = classes_.find(atom);
    for (std::size_t a = 0; a < context_.atom_count(); ++a)
      if (classes_.find(a) == root) out.push_back(a);
    return out;
  }

  /// Distinct variable atoms in one class.
  bool collapses_variables() const { return budget() >= 2 && classes_.same(0, 1); }

  /// Default names v0, v1, ... for the context variables.
  std::vector<std::string> default_names() const {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < budget(); ++i) names.push_back(canonical_variable(i));
    return names;
  }

  /// Shortest root-level flat derivation from atom `from` to atom `to`, or
  /// nullopt if they lie in different classes.
  ///
  /// When `variable_limit` is given, only atoms over the first
  /// `variable_limit` context variables are visited; nullopt if no such
  /// derivation exists.
  std::optional<Derivation> shortest_derivation(std::size_t from, std::size_t to,
                                                const std::vector<std::string>& names,
                                                std::optional<std::size_t> variable_limit = std::nullopt) const {
    if (!same_class(from, to)) return std::nullopt;
    std::size_t limit = std::min(variable_limit.value_or(budget()), budget());
    struct Parent {
      std::size_t prev;
      std::size_t identity;
      Orientation orientation;
      std::vector<std::size_t> assignment;
    };
    std::map<std::size_t, Parent> parents;
    std::deque<std::size_t> queue{from};
    parents.emplace(from, Parent{from, 0, Orientation::Forward, {}});
    while (!queue.empty() && !parents.contains(to)) {
      std::size_t atom = queue.front();
      queue.pop_front();
      for_each_neighbor(atom, limit, [&](std::size_t next, std::size_t id, Orientation o,
                                         const std::vector<std::size_t>& values) {
        if (parents.contains(next)) return true;
        parents.emplace(next, Parent{atom, id, o, values});
        queue.push_back(next);
        return next != to;
      });
    }
    if (!parents.contains(to)) return std::nullopt;
    std::vector<std::size_t> path{to};
    while (path.back() != from) path.push_back(parents.at(path.back()).prev);
    Derivation d{theory_.name(), {context_.to_term(from, names)}, {}, false};
    for (std::size_t i = path.size() - 1; i-- > 0;) {
      const Parent& p = parents.at(path[i]);
      d.append(make_step(p.identity, p.orientation, p.assignment, names), context_.to_term(path[i], names));
    }
    return d;
  }

  /// Derivation read off the union forest recorded in closure_trace.
  std::optional<Derivation> trace_derivation(std::size_t from, std::size_t to,
                                             const std::vector<std::string>& names) const {
    if (!same_class(from, to)) return std::nullopt;
    std::map<std::size_t, std::vector<std::size_t>> adjacency;
    for (std::size_t i = 0; i < trace_.size(); ++i) {
      adjacency[trace_[i].a].push_back(i);
      adjacency[trace_[i].b].push_back(i);
    }
    std::map<std::size_t, std::size_t> via;
    std::deque<std::size_t> queue{from};
    via.emplace(from, std::numeric_limits<std::size_t>::max());
    while (!queue.empty() && !via.contains(to)) {
      std::size_t atom = queue.front();
      queue.pop_front();
      for (std::size_t e : adjacency[atom]) {
        std::size_t next = trace_[e].a == atom ? trace_[e].b : trace_[e].a;
        if (via.emplace(next, e).second) queue.push_back(next);
      }
    }
    std::vector<std::size_t> path{to};
    while (path.back() != from) {
      const TraceEntry& e = trace_[via.at(path.back())];
      path.push_back(e.a == path.back() ? e.b : e.a);
    }
    Derivation d{theory_.name(), {context_.to_term(from, names)}, {}, false};
    for (std::size_t i = path.size() - 1; i-- > 0;) {
      const TraceEntry& e = trace_[via.at(path[i])];
      Orientation o = e.a == path[i + 1] ? Orientation::Forward : Orientation::Reverse;
      d.append(make_step(e.identity, o, e.assignment, names), context_.to_term(path[i], names));
    }
    return d;
  }

 private:
  void saturate() {
    const std::size_t b = budget();
    for (std::size_t id = 0; id < identities_.size(); ++id) {
      const auto& fi = identities_[id];
      std::vector<std::size_t> values(fi.variables.size(), 0);
      while (true) {
        std::size_t l = detail::instantiate(fi.lhs, values, context_);
        std::size_t r = detail::instantiate(fi.rhs, values, context_);
        if (classes_.unite(l, r)) trace_.push_back({l, r, id, values});
        std::size_t i = values.size();
        while (i > 0 && values[i - 1] == b - 1) values[--i] = 0;
        if (i == 0) break;
        ++values[i - 1];
      }
    }
  }

  /// Calls fn(next_atom, identity, orientation, assignment) for every axiom
  /// instance over the first `limit` context variables with `atom` as its
  /// pattern side. Free variables take values in descending order, so that
  /// fresh variables are preferred over repeated ones. Stops when fn returns
  /// false.
  template <class Fn>
  void for_each_neighbor(std::size_t atom, std::size_t limit, Fn fn) const {
    const std::size_t b = limit;
    std::optional<std::size_t> atom_op;
    std::vector<std::size_t> atom_args;
    if (!context_.is_var_atom(atom)) {
      atom_op = context_.op_of(atom);
      atom_args = context_.args_of(atom);
    }
    constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
    for (std::size_t id = 0; id < identities_.size(); ++id) {
      const auto& fi = identities_[id];
      for (Orientation o : {Orientation::Forward, Orientation::Reverse}) {
        const auto& pattern = fi.side(o, true);
        const auto& target = fi.side(o, false);
        std::vector<std::size_t> values(fi.variables.size(), kUnset);
        bool ok = true;
        if (!pattern.op) {
          if (atom_op) continue;
          values[pattern.vars[0]] = atom;
        } else {
          if (pattern.op != atom_op) continue;
          for (std::size_t j = 0; j < pattern.vars.size() && ok; ++j) {
            std::size_t& slot = values[pattern.vars[j]];
            if (slot == kUnset) slot = atom_args[j];
            else ok = slot == atom_args[j];
          }
        }
        if (!ok) continue;
        std::vector<std::size_t> free;
        for (std::size_t v = 0; v < values.size(); ++v)
          if (values[v] == kUnset) free.push_back(v);
        for (std::size_t v : values)
          if (v != kUnset && v >= b) ok = false;
        if (!ok) continue;
        for (std::size_t v : free) values[v] = b - 1;
        while (true) {
          std::size_t next = detail::instantiate(target, values, context_);
          if (next != atom && !fn(next, id, o, values)) return;
          std::size_t i = free.size();
          while (i > 0 && values[free[i - 1]] == 0) values[free[--i]] = b - 1;
          if (i == 0) break;
          --values[free[i - 1]];
        }
      }
    }
  }

  DerivationStep make_step(std::size_t id, Orientation o, const std::vector<std::size_t>& values,
                           const std::vector<std::string>& names) const {
    const auto& fi = identities_[id];
    Substitution sigma;
    for (std::size_t v = 0; v < fi.variables.size(); ++v)
      sigma.emplace(fi.variables[v], Term::var(names[values[v]]));
    return {fi.identity, o, Position{}, sigma};
  }

  Theory theory_;
  FlatContext context_;
  std::vector<detail::FlatIdentity> identities_;
  UnionFind classes_;
  std::vector<TraceEntry> trace_;
};

inline FlatFactBase saturate(const Theory& theory, std::size_t budget) { return FlatFactBase(theory, budget); }
inline FlatFactBase saturate(const Theory& theory) { return FlatFactBase(theory, default_budget(theory)); }

struct EntailmentVerdict {
  enum class Kind { Entailed, NotEntailed, NotEntailedWithModel };
  Kind kind = Kind::NotEntailed;
  /// Flat derivation, for Entailed.
  std::optional<Derivation> derivation;
  /// Countermodel, for NotEntailedWithModel.
  std::optional<FiniteAlgebra> model;
  Assignment assignment;

  bool entailed() const { return kind == Kind::Entailed; }
};

inline const char* to_string(EntailmentVerdict::Kind k) {
  switch (k) {
    case EntailmentVerdict::Kind::Entailed: return "entailed";
    case EntailmentVerdict::Kind::NotEntailed: return "not-entailed";
    case EntailmentVerdict::Kind::NotEntailedWithModel: return "not-entailed-with-model";
  }
  return "?";
}

struct EntailOptions {
  /// Search for a countermodel when the goal is not entailed.
  bool find_countermodel = true;
  int model_min = 2;
  int model_max = 3;
  ModelSearchOptions model_search;
};

/// Names for the context: goal variables first, then fresh names.
inline std::vector<std::string> context_names(const std::vector<std::string>& goal_vars, std::size_t budget) {
  std::unordered_set<std::string> taken(goal_vars.begin(), goal_vars.end());
  std::vector<std::string> names(goal_vars.begin(), goal_vars.end());
  for (std::size_t i = names.size(); i < budget; ++i) {
    std::string name = fresh_name(canonical_variable(i), taken);
    taken.insert(name);
    names.push_back(name);
  }
  return names;
}

namespace detail {

/// Certificate for an arbitrary flat goal over a theory that proves x = y.
/// Root-level steps cannot move a variable equation inside an argument, so
/// the derivation rewrites arguments in place and is not flat in general.
inline std::optional<Derivation> collapsed_derivation(const FlatFactBase& base, const Identity& goal) {
  const std::string& theory = base.theory().name();
  auto xy_names = context_names({"x", "y"}, base.budget());
  auto xy = base.shortest_derivation(0, 1, xy_names, 2);
  if (!xy) xy = base.shortest_derivation(0, 1, xy_names);
  if (!xy) return std::nullopt;

  auto between = [&](const std::string& a, const std::string& b) {
    if (a == b) return Derivation{theory, {Term::var(a)}, {}, false};
    return instantiate(*xy, {{"x", Term::var(a)}, {"y", Term::var(b)}});
  };
  // Derivation from a flat term to one of its variables (x for constants).
  auto to_variable = [&](const Term& s) -> std::optional<Derivation> {
    Derivation d{theory, {s}, {}, false};
    if (s.is_var()) return d;
    std::string target = s.arity() > 0 ? s.arg(0).name() : "x";
    for (std::size_t j = 0; j < s.arity(); ++j)
      if (s.arg(j).name() != target) d = d.then(embed(between(s.arg(j).name(), target), d.last(), {j + 1}));
    std::map<std::string, std::size_t> index{{target, 0}};
    std::size_t atom = base.context().encode(d.last(), index);
    auto names = context_names({target}, base.budget());
    auto collapse = base.shortest_derivation(atom, 0, names, 1);
    if (!collapse) collapse = base.shortest_derivation(atom, 0, names);
    if (!collapse) return std::nullopt;
    return d.then(*collapse);
  };
  auto left = to_variable(goal.lhs);
  auto right = to_variable(goal.rhs);
  if (!left || !right) return std::nullopt;
  return left->then(between(left->last().name(), right->last().name())).then(right->reversed());
}

}  // namespace detail

inline EntailmentVerdict entails_flat(const FlatFactBase& base, const Identity& goal,
                                      const EntailOptions& options = {}) {
  if (!goal.is_flat()) throw Error("goal " + to_string(goal) + " is not a linear identity");
  std::vector<std::string> vars = goal.variables();
  if (vars.size() > base.budget())
    throw BudgetTooSmall("goal uses " + std::to_string(vars.size()) + " variables but the budget is " +
                         std::to_string(base.budget()));
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < vars.size(); ++i) index.emplace(vars[i], i);
  std::size_t l = base.context().encode(goal.lhs, index);
  std::size_t r = base.context().encode(goal.rhs, index);
  EntailmentVerdict verdict;
  if (base.same_class(l, r)) {
    verdict.kind = EntailmentVerdict::Kind::Entailed;
    auto names = context_names(vars, base.budget());
    verdict.derivation = base.shortest_derivation(l, r, names, std::max<std::size_t>(vars.size(), 1));
    if (!verdict.derivation) verdict.derivation = base.shortest_derivation(l, r, names);
    return verdict;
  }
  if (base.collapses_variables()) {
    if (auto d = detail::collapsed_derivation(base, goal)) {
      verdict.kind = EntailmentVerdict::Kind::Entailed;
      verdict.derivation = std::move(d);
      return verdict;
    }
  }
  if (options.find_countermodel) {
    auto model = refute_entailment(base.theory(), goal, options.model_min, options.model_max, options.model_search);
    if (model.found()) {
      verdict.kind = EntailmentVerdict::Kind::NotEntailedWithModel;
      verdict.model = model.algebra;
      verdict.assignment = model.assignment;
    }
  }
  return verdict;
}

/// Decides theory |= x = y. The certificate for Entailed connects x to y.
inline EntailmentVerdict is_inconsistent(const FlatFactBase& base, const EntailOptions& options = {}) {
  EntailmentVerdict verdict;
  const Theory& theory = base.theory();
  if (theory.signature().empty()) return verdict;
  if (base.budget() < 2) throw BudgetTooSmall("inconsistency needs a budget of at least 2");
  const auto& op = theory.signature().ops().front();
  Identity probe{Term::var("x"), Term::app(op.name, std::vector<Term>(op.arity, Term::var("y")))};
  if (op.arity == 0) probe.rhs = Term::var("y");
  EntailOptions quiet = options;
  quiet.find_countermodel = false;
  if (entails_flat(base, probe, quiet).entailed()) {
    verdict.kind = EntailmentVerdict::Kind::Entailed;
    auto names = context_names({"x", "y"}, base.budget());
    verdict.derivation = base.shortest_derivation(0, 1, names, 2);
    if (!verdict.derivation) verdict.derivation = base.shortest_derivation(0, 1, names);
    return verdict;
  }
  if (options.find_countermodel) {
    auto model = refute_entailment(theory, {Term::var("x"), Term::var("y")}, options.model_min,
                                   options.model_max, options.model_search);
    if (model.found()) {
      verdict.kind = EntailmentVerdict::Kind::NotEntailedWithModel;
      verdict.model = model.algebra;
      verdict.assignment = model.assignment;
    }
  }
  return verdict;
}

inline EntailmentVerdict is_inconsistent(const Theory& theory, const EntailOptions& options = {}) {
  if (theory.signature().empty()) return {};
  return is_inconsistent(saturate(theory), options);
}

}  // namespace linvar
