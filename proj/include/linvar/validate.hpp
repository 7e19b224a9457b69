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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "linvar/flatsat.hpp"
#include "linvar/rewrite.hpp"
#include "linvar/theory.hpp"

namespace linvar {

enum class Idempotency { Explicit, Derivable, NotEstablished };

inline const char* to_string(Idempotency i) {
  switch (i) {
    case Idempotency::Explicit: return "explicit";
    case Idempotency::Derivable: return "derivable";
    case Idempotency::NotEstablished: return "not-established";
  }
  return "?";
}

struct ValidationReport {
  bool is_linear = true;
  std::map<std::string, Idempotency> idempotency;
  /// Non-linear identities.
  std::vector<Identity> offending;

  bool idempotent() const {
    for (const auto& [_, status] : idempotency)
      if (status == Idempotency::NotEstablished) return false;
    return true;
  }
  bool linear_idempotent() const { return is_linear && idempotent(); }
};

/// F(x,...,x) = x.
inline Identity idempotency_law(const OperationSymbol& op) {
  return {Term::app(op.name, std::vector<Term>(op.arity, Term::var("x"))), Term::var("x")};
}

/// Linearity, plus per-symbol idempotency: explicit when the law is an axiom
/// up to canonical form, derivable when flat saturation (or, for non-linear
/// theories, bounded proof search) proves it.
inline ValidationReport validate(const Theory& theory, std::optional<std::size_t> budget = std::nullopt) {
  ValidationReport report;
  for (const Identity& e : theory.identities()) {
    theory.check_term(e.lhs);
    theory.check_term(e.rhs);
    if (!e.is_linear()) {
      report.is_linear = false;
      report.offending.push_back(e);
    }
  }
  std::optional<FlatFactBase> base;
  for (const auto& op : theory.signature().ops()) {
    Identity law = idempotency_law(op);
    if (op.arity > 0 && theory.contains(law)) {
      report.idempotency[op.name] = Idempotency::Explicit;
      continue;
    }
    report.idempotency[op.name] = Idempotency::NotEstablished;
    if (op.arity == 0) continue;
    if (!report.is_linear) {
      if (bfs_prove(theory, law, SearchBounds{20'000, 4, 16}).proved())
        report.idempotency[op.name] = Idempotency::Derivable;
      continue;
    }
    if (!base) base.emplace(theory, std::max<std::size_t>(budget.value_or(default_budget(theory)), 1));
    EntailOptions quiet;
    quiet.find_countermodel = false;
    if (entails_flat(*base, law, quiet).entailed()) report.idempotency[op.name] = Idempotency::Derivable;
  }
  return report;
}

}  // namespace linvar
