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
#include <vector>

#include "linvar/term.hpp"
#include "linvar/theory.hpp"

namespace linvar {

enum class Orientation { Forward, Reverse };

inline Orientation opposite(Orientation o) {
  return o == Orientation::Forward ? Orientation::Reverse : Orientation::Forward;
}

/// One positioned, oriented application of an equation. The substitution is
/// kept explicitly: with collapsing equations used in reverse it cannot be
/// recovered from the two terms alone.
struct DerivationStep {
  Identity equation;
  Orientation orientation = Orientation::Forward;
  Position position;
  Substitution substitution;

  const Term& pattern() const {
    return orientation == Orientation::Forward ? equation.lhs : equation.rhs;
  }
  const Term& replacement() const {
    return orientation == Orientation::Forward ? equation.rhs : equation.lhs;
  }

  /// The same rewrite read from right to left.
  DerivationStep inverted() const { return {equation, opposite(orientation), position, substitution}; }

  bool is_reflexive() const { return equation.lhs.is_var() && equation.lhs == equation.rhs; }

  friend bool operator==(const DerivationStep&, const DerivationStep&) = default;
};

/// Terms t0..tn and the n steps connecting them.
struct Derivation {
  std::string theory;
  std::vector<Term> terms;
  std::vector<DerivationStep> steps;
  /// Steps may use the reflexive equation v = v.
  bool allow_reflexive = false;

  const Term& first() const { return terms.front(); }
  const Term& last() const { return terms.back(); }
  std::size_t length() const { return steps.size(); }

  void append(const DerivationStep& step, const Term& next) {
    steps.push_back(step);
    terms.push_back(next);
  }

  /// tn..t0 with every step inverted.
  Derivation reversed() const {
    Derivation out{theory, {terms.rbegin(), terms.rend()}, {}, allow_reflexive};
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) out.steps.push_back(it->inverted());
    return out;
  }

  /// Concatenation; requires last() == rest.first().
  Derivation then(const Derivation& rest) const {
    Derivation out = *this;
    out.allow_reflexive = allow_reflexive || rest.allow_reflexive;
    for (std::size_t i = 0; i < rest.steps.size(); ++i) out.append(rest.steps[i], rest.terms[i + 1]);
    return out;
  }

  friend bool operator==(const Derivation&, const Derivation&) = default;
};

/// The substitution instance: every term and step binding is mapped by sigma.
inline Derivation instantiate(const Derivation& d, const Substitution& sigma) {
  Derivation out{d.theory, {}, {}, d.allow_reflexive};
  for (const Term& t : d.terms) out.terms.push_back(apply_substitution(t, sigma));
  for (const DerivationStep& s : d.steps) {
    DerivationStep step = s;
    for (auto& [_, t] : step.substitution) t = apply_substitution(t, sigma);
    out.steps.push_back(std::move(step));
  }
  return out;
}

/// Runs `d` inside `context` at position `at`; requires subterm_at(context, at) == d.first().
inline Derivation embed(const Derivation& d, const Term& context, const Position& at) {
  Derivation out{d.theory, {}, {}, d.allow_reflexive};
  for (const Term& t : d.terms) out.terms.push_back(replace_at(context, at, t));
  for (const DerivationStep& s : d.steps) {
    DerivationStep step = s;
    step.position = at.concat(s.position);
    out.steps.push_back(std::move(step));
  }
  return out;
}

inline DerivationStep reflexive_step(const Position& at, const Term& subterm) {
  Term v = Term::var("v0");
  return {{v, v}, Orientation::Forward, at, {{"v0", subterm}}};
}

struct VerificationResult {
  bool ok = true;
  std::optional<std::size_t> failing_step;
  std::string diagnostic;

  explicit operator bool() const { return ok; }
};

/// Applies `step` to `t`; nullopt when the oriented instance does not sit at
/// the recorded position.
inline std::optional<Term> apply_step(const Term& t, const DerivationStep& step) {
  if (!is_valid_position(t, step.position)) return std::nullopt;
  for (const auto& v : step.equation.variables())
    if (!step.substitution.contains(v)) return std::nullopt;
  if (apply_substitution(step.pattern(), step.substitution) != subterm_at(t, step.position))
    return std::nullopt;
  return replace_at(t, step.position, apply_substitution(step.replacement(), step.substitution));
}

inline VerificationResult verify_derivation(const Theory& theory, const Derivation& d) {
  auto fail = [](std::optional<std::size_t> step, std::string why) {
    return VerificationResult{false, step, std::move(why)};
  };
  if (d.terms.empty()) return fail(std::nullopt, "derivation has no terms");
  if (d.terms.size() != d.steps.size() + 1)
    return fail(std::nullopt, "derivation has " + std::to_string(d.terms.size()) + " terms but " +
                                  std::to_string(d.steps.size()) + " steps");
  for (std::size_t i = 0; i < d.steps.size(); ++i) {
    const DerivationStep& step = d.steps[i];
    std::string where = "step " + std::to_string(i + 1) + ": ";
    if (step.is_reflexive()) {
      if (!d.allow_reflexive) return fail(i, where + "reflexive equation not permitted");
    } else if (!theory.contains(step.equation)) {
      return fail(i, where + "equation " + to_string(step.equation) + " is not in " + theory.name());
    }
    const Term& before = d.terms[i];
    if (!is_valid_position(before, step.position))
      return fail(i, where + "position " + to_string(step.position) + " is not valid in " +
                         to_string(before));
    for (const auto& v : step.equation.variables())
      if (!step.substitution.contains(v))
        return fail(i, where + "substitution does not bind " + v);
    Term instance = apply_substitution(step.pattern(), step.substitution);
    if (instance != subterm_at(before, step.position))
      return fail(i, where + "instance " + to_string(instance) + " does not match " +
                         to_string(subterm_at(before, step.position)) + " at " +
                         to_string(step.position));
    Term after = replace_at(before, step.position, apply_substitution(step.replacement(), step.substitution));
    if (after != d.terms[i + 1])
      return fail(i, where + "rewriting yields " + to_string(after) + " but the next term is " +
                         to_string(d.terms[i + 1]));
  }
  return {};
}

}  // namespace linvar
