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

// Classification of linear idempotent theories:
//   congruence modular        iff the first derivative is inconsistent;
//   some congruence identity  iff some iterated derivative is inconsistent;
//   n-permutable for some n   iff some iterated order derivative is.

#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "linvar/derive.hpp"
#include "linvar/error.hpp"
#include "linvar/flatsat.hpp"
#include "linvar/rewrite.hpp"
#include "linvar/validate.hpp"

namespace linvar {

enum class Property { CM, NCI, NPerm };
enum class Answer { Yes, No, Unknown };

inline constexpr std::array<Property, 3> kProperties{Property::CM, Property::NCI, Property::NPerm};

inline const char* to_string(Property p) {
  switch (p) {
    case Property::CM: return "cm";
    case Property::NCI: return "nci";
    case Property::NPerm: return "nperm";
  }
  return "?";
}

inline const char* describe(Property p) {
  switch (p) {
    case Property::CM: return "congruence modular";
    case Property::NCI: return "nontrivial congruence identity";
    case Property::NPerm: return "n-permutable for some n";
  }
  return "?";
}

inline const char* to_string(Answer a) {
  switch (a) {
    case Answer::Yes: return "yes";
    case Answer::No: return "no";
    case Answer::Unknown: return "unknown";
  }
  return "?";
}

struct Verdict {
  Property property = Property::CM;
  Answer answer = Answer::Unknown;
  /// The stage whose consistency decided the answer.
  Theory stage;
  /// Derivation of x = y over `stage`, for yes.
  std::optional<Derivation> derivation;
  /// Nontrivial model of `stage` with x != y, for no.
  std::optional<FiniteAlgebra> model;
  Assignment assignment;
  std::size_t stages_used = 0;
  std::string note;

  bool yes() const { return answer == Answer::Yes; }
};

struct ClassificationReport {
  std::string theory;
  ValidationReport validation;
  bool sufficient_only = false;
  Verdict cm;
  Verdict nci;
  Verdict nperm;
  std::vector<IterationTrace> traces;

  const Verdict& verdict(Property p) const {
    switch (p) {
      case Property::CM: return cm;
      case Property::NCI: return nci;
      case Property::NPerm: return nperm;
    }
    return cm;
  }
};

struct ClassifyOptions {
  std::optional<std::size_t> budget;
  EntailOptions entail;
  /// Run the derivative and order-derivative pipelines concurrently.
  std::size_t threads = 1;
  /// Accept idempotent non-linear theories and report only the sound
  /// direction: CM yes when a proof search finds the derivative inconsistent.
  bool sufficient_only = false;
  SearchBounds search;
};

namespace detail {

inline Verdict verdict_from(Property p, const Theory& stage, const EntailmentVerdict& consistency,
                            std::size_t stages_used) {
  Verdict v;
  v.property = p;
  v.stage = stage;
  v.stages_used = stages_used;
  if (consistency.entailed()) {
    v.answer = Answer::Yes;
    v.derivation = consistency.derivation;
    return v;
  }
  v.answer = Answer::No;
  if (consistency.model) {
    v.model = consistency.model;
    v.assignment = consistency.assignment;
  } else {
    v.note = "saturation-fixpoint consistent, no small model found";
  }
  return v;
}

inline Verdict iteration_verdict(Property p, const IterationTrace& trace, const EntailOptions& entail) {
  const IterationStage& last = trace.last();
  EntailmentVerdict consistency = last.consistency;
  if (!consistency.entailed() && !consistency.model && entail.find_countermodel)
    consistency = is_inconsistent(FlatFactBase(last.theory, trace.budget), entail);
  return verdict_from(p, last.theory, consistency, trace.stop_index());
}

inline void require_linear_idempotent(const Theory& theory, const ValidationReport& report) {
  if (!report.is_linear)
    throw NotLinearIdempotent("theory '" + theory.name() + "' is not linear: " + to_string(report.offending.front()));
  for (const auto& [symbol, status] : report.idempotency)
    if (status == Idempotency::NotEstablished)
      throw NotLinearIdempotent("theory '" + theory.name() + "': idempotency of '" + symbol +
                                "' is not established");
}

/// Sound-only CM check for idempotent theories that are not linear. Weak
/// independence facts are searched for by bounded proof search, so the
/// derivative may be an under-approximation; inconsistency of it still
/// implies inconsistency of the true derivative.
inline ClassificationReport classify_sufficient_only(const Theory& theory, ValidationReport validation,
                                                     const ClassifyOptions& options) {
  for (const auto& [symbol, status] : validation.idempotency)
    if (status == Idempotency::NotEstablished)
      throw NotLinearIdempotent("theory '" + theory.name() + "': idempotency of '" + symbol +
                                "' is not established");
  ClassificationReport report;
  report.theory = theory.name();
  report.validation = std::move(validation);
  report.sufficient_only = true;

  Theory derived = theory;
  derived.set_name(theory.name() + "_d");
  // Candidate witnesses x = F(w) with w over {x, y}.
  for (const auto& op : theory.signature().ops()) {
    if (op.arity >= 16) continue;
    std::vector<bool> independent(op.arity + 1, false);
    for (std::size_t mask = 1; mask < (std::size_t{1} << op.arity); ++mask) {
      std::vector<Term> args;
      for (std::size_t j = 0; j < op.arity; ++j) args.push_back(Term::var(mask >> j & 1 ? "y" : "x"));
      Identity fact{Term::var("x"), Term::app(op.name, std::move(args))};
      if (!bfs_prove(theory, fact, options.search).proved()) continue;
      for (std::size_t j = 0; j < op.arity; ++j)
        if (mask >> j & 1) independent[j + 1] = true;
    }
    for (std::size_t i = 1; i <= op.arity; ++i)
      if (independent[i]) derived.add(independence_identity(op, i));
  }
  auto proof = bfs_prove(derived, {Term::var("x"), Term::var("y")}, options.search);
  for (Property p : kProperties) {
    Verdict v;
    v.property = p;
    v.stage = derived;
    v.stages_used = 1;
    if (p == Property::CM && proof.proved()) {
      v.answer = Answer::Yes;
      v.derivation = proof.derivation;
      v.note = "sufficient condition only";
    } else {
      v.note = p == Property::CM ? "sufficient condition not met within search bounds"
                                 : "not decided for non-linear theories";
    }
    (p == Property::CM ? report.cm : p == Property::NCI ? report.nci : report.nperm) = std::move(v);
  }
  return report;
}

}  // namespace detail

inline ClassificationReport classify(const Theory& theory, const ClassifyOptions& options = {}) {
  ValidationReport validation = validate(theory, options.budget);
  if (options.sufficient_only && !validation.is_linear)
    return detail::classify_sufficient_only(theory, std::move(validation), options);
  detail::require_linear_idempotent(theory, validation);

  IterateOptions iterate_options;
  iterate_options.budget = options.budget;
  iterate_options.entail = options.entail;

  IterationTrace derivative_trace, order_trace;
  if (options.threads > 1) {
    auto order = std::async(std::launch::async, [&] { return iterate(theory, DerivativeKind::Order, iterate_options); });
    derivative_trace = iterate(theory, DerivativeKind::Derivative, iterate_options);
    order_trace = order.get();
  } else {
    derivative_trace = iterate(theory, DerivativeKind::Derivative, iterate_options);
    order_trace = iterate(theory, DerivativeKind::Order, iterate_options);
  }

  ClassificationReport report;
  report.theory = theory.name();
  report.validation = std::move(validation);

  // CM looks at the first derivative only; a trace that stops at stage 0
  // is already inconsistent there.
  {
    const IterationStage& first = derivative_trace.stages[std::min<std::size_t>(1, derivative_trace.stop_index())];
    EntailmentVerdict consistency = first.consistency;
    if (!consistency.entailed() && !consistency.model && options.entail.find_countermodel)
      consistency = is_inconsistent(FlatFactBase(first.theory, derivative_trace.budget), options.entail);
    report.cm = detail::verdict_from(Property::CM, first.theory, consistency, 1);
  }
  report.nci = detail::iteration_verdict(Property::NCI, derivative_trace, options.entail);
  report.nperm = detail::iteration_verdict(Property::NPerm, order_trace, options.entail);
  report.traces.push_back(std::move(derivative_trace));
  report.traces.push_back(std::move(order_trace));
  return report;
}

struct StageComparison {
  DerivativeKind kind = DerivativeKind::Derivative;
  std::size_t stage = 0;
  bool equal = false;
};

struct PropertyComparison {
  Property property = Property::CM;
  bool join = false;
  bool first = false;
  bool second = false;

  bool holds() const { return join == (first || second); }
};

struct DecompositionReport {
  std::string first;
  std::string second;
  std::vector<StageComparison> stages;
  std::vector<PropertyComparison> properties;

  bool stages_hold() const {
    return std::all_of(stages.begin(), stages.end(), [](const StageComparison& s) { return s.equal; });
  }
  bool properties_hold() const {
    return std::all_of(properties.begin(), properties.end(), [](const PropertyComparison& p) { return p.holds(); });
  }
  bool holds() const { return stages_hold() && properties_hold(); }
};

/// Checks that derivatives commute with joins stage by stage, and that each
/// property of the join is the disjunction of the components' properties.
/// All three theories are saturated with the join's budget.
inline DecompositionReport check_join_decomposition(const Theory& a, const Theory& b,
                                                    const ClassifyOptions& options = {}) {
  Theory joined = join_disjoint(a, b);
  ClassifyOptions shared = options;
  shared.budget = options.budget.value_or(default_budget(joined));
  shared.sufficient_only = false;

  auto ra = classify(a, shared);
  auto rb = classify(b, shared);
  auto rj = classify(joined, shared);

  DecompositionReport report;
  report.first = a.name();
  report.second = b.name();
  for (std::size_t t = 0; t < 2; ++t) {
    const IterationTrace& ta = ra.traces[t];
    const IterationTrace& tb = rb.traces[t];
    const IterationTrace& tj = rj.traces[t];
    // Compare up to the earliest inconsistency, otherwise up to the last fixpoint.
    std::optional<std::size_t> bound;
    for (const IterationTrace* tr : {&ta, &tb, &tj})
      if (tr->inconsistent()) bound = std::min(bound.value_or(tr->stop_index()), tr->stop_index());
    if (!bound) bound = std::max({ta.stop_index(), tb.stop_index(), tj.stop_index()});
    for (std::size_t k = 0; k <= *bound; ++k) {
      Theory expected = join_disjoint(ta.stage(k), tb.stage(k));
      report.stages.push_back({tj.kind, k, theory_equal(tj.stage(k), expected)});
    }
  }
  for (Property p : kProperties)
    report.properties.push_back({p, rj.verdict(p).yes(), ra.verdict(p).yes(), rb.verdict(p).yes()});
  return report;
}

}  // namespace linvar
