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
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "linvar/derivation.hpp"
#include "linvar/term.hpp"
#include "linvar/theory.hpp"

namespace linvar {

struct SearchBounds {
  std::size_t max_terms = 200'000;
  /// Steps explored from each endpoint.
  std::size_t max_depth = 10;
  /// Node count of any explored term.
  std::size_t max_term_size = 24;
};

struct SearchStatistics {
  std::size_t terms_seen = 0;
  std::size_t forward_depth = 0;
  std::size_t backward_depth = 0;
  bool term_limit_hit = false;
};

struct ProofSearchOutcome {
  std::optional<Derivation> derivation;
  SearchStatistics statistics;

  bool proved() const { return derivation.has_value(); }
};

/// Calls fn(step, result) for every single rewrite of `t` by `theory`, in
/// the order: equation, orientation (forward first), position (preorder),
/// then values for variables that occur only in the replacement, drawn from
/// `fillers` lexicographically. Stops when fn returns false.
template <class Fn>
bool for_each_rewrite(const Theory& theory, const Term& t, const std::vector<Term>& fillers, Fn fn) {
  std::vector<Position> where = positions(t);
  for (const Identity& e : theory.identities()) {
    for (Orientation o : {Orientation::Forward, Orientation::Reverse}) {
      DerivationStep probe{e, o, {}, {}};
      const Term& pattern = probe.pattern();
      std::vector<std::string> unbound = variables(probe.replacement());
      {
        std::vector<std::string> bound = variables(pattern);
        std::erase_if(unbound, [&](const std::string& v) {
          return std::find(bound.begin(), bound.end(), v) != bound.end();
        });
      }
      for (const Position& p : where) {
        auto sigma = match_term(pattern, subterm_at(t, p));
        if (!sigma) continue;
        std::vector<std::size_t> choice(unbound.size(), 0);
        if (!unbound.empty() && fillers.empty()) continue;
        while (true) {
          Substitution full = *sigma;
          for (std::size_t i = 0; i < unbound.size(); ++i) full[unbound[i]] = fillers[choice[i]];
          DerivationStep step{e, o, p, full};
          Term result = replace_at(t, p, apply_substitution(step.replacement(), full));
          if (!fn(step, result)) return false;
          std::size_t i = unbound.size();
          while (i > 0 && choice[i - 1] + 1 == fillers.size()) choice[--i] = 0;
          if (i == 0) break;
          ++choice[i - 1];
        }
      }
    }
  }
  return true;
}

/// Bounded bidirectional breadth-first search for a derivation of
/// goal.lhs = goal.rhs. Goal variables are held fixed; variables introduced
/// by an equation range over the goal variables plus one fresh variable.
inline ProofSearchOutcome bfs_prove(const Theory& theory, const Identity& goal, const SearchBounds& bounds = {}) {
  ProofSearchOutcome outcome;
  if (goal.lhs == goal.rhs) {
    outcome.derivation = Derivation{theory.name(), {goal.lhs}, {}, false};
    return outcome;
  }

  std::vector<std::string> goal_vars = goal.variables();
  std::vector<Term> fillers;
  for (const auto& v : goal_vars) fillers.push_back(Term::var(v));
  fillers.push_back(Term::var(fresh_name("z", {goal_vars.begin(), goal_vars.end()})));

  struct Side {
    std::unordered_map<Term, std::pair<Term, DerivationStep>, TermHash> parent;
    std::vector<Term> frontier;
    std::size_t depth = 0;

    Derivation path_to(const std::string& theory_name, const Term& root, const Term& t) const {
      std::vector<std::pair<Term, DerivationStep>> rev;
      Term cur = t;
      while (!(cur == root)) {
        const auto& [prev, step] = parent.at(cur);
        rev.push_back({cur, step});
        cur = prev;
      }
      Derivation d{theory_name, {root}, {}, false};
      for (auto it = rev.rbegin(); it != rev.rend(); ++it) d.append(it->second, it->first);
      return d;
    }
  };

  Side forward, backward;
  DerivationStep none{};
  forward.parent.emplace(goal.lhs, std::make_pair(goal.lhs, none));
  backward.parent.emplace(goal.rhs, std::make_pair(goal.rhs, none));
  forward.frontier.push_back(goal.lhs);
  backward.frontier.push_back(goal.rhs);
  outcome.statistics.terms_seen = 2;

  auto meet = [&](const Term& t) {
    Derivation left = forward.path_to(theory.name(), goal.lhs, t);
    Derivation right = backward.path_to(theory.name(), goal.rhs, t).reversed();
    return left.then(right);
  };

  // Expands one layer of `side`; returns the meeting term if found.
  auto expand = [&](Side& side, const Side& other) -> std::optional<Term> {
    std::vector<Term> next;
    std::optional<Term> met;
    for (const Term& t : side.frontier) {
      bool keep_going = for_each_rewrite(theory, t, fillers, [&](const DerivationStep& step, const Term& result) {
        if (result.size() > bounds.max_term_size) return true;
        if (side.parent.contains(result)) return true;
        side.parent.emplace(result, std::make_pair(t, step));
        ++outcome.statistics.terms_seen;
        if (other.parent.contains(result)) {
          met = result;
          return false;
        }
        if (outcome.statistics.terms_seen >= bounds.max_terms) {
          outcome.statistics.term_limit_hit = true;
          return false;
        }
        next.push_back(result);
        return true;
      });
      if (!keep_going) break;
    }
    side.frontier = std::move(next);
    ++side.depth;
    return met;
  };

  while (true) {
    bool progressed = false;
    for (int turn = 0; turn < 2; ++turn) {
      Side& side = turn == 0 ? forward : backward;
      Side& other = turn == 0 ? backward : forward;
      if (side.depth >= bounds.max_depth || side.frontier.empty()) continue;
      progressed = true;
      auto met = expand(side, other);
      if (met) {
        outcome.derivation = meet(*met);
        break;
      }
      if (outcome.statistics.term_limit_hit) break;
    }
    outcome.statistics.forward_depth = forward.depth;
    outcome.statistics.backward_depth = backward.depth;
    if (outcome.derivation || outcome.statistics.term_limit_hit || !progressed) break;
  }
  return outcome;
}

}  // namespace linvar
