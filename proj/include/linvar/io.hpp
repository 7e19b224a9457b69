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

// JSON encodings of derivations, algebras, theories and reports.

#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "linvar/classify.hpp"
#include "linvar/derivation.hpp"
#include "linvar/error.hpp"
#include "linvar/models.hpp"
#include "linvar/theory.hpp"

namespace linvar {

using Json = nlohmann::ordered_json;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
}

inline Json to_json(const Position& p) { return Json(p.path()); }

inline Json to_json(const DerivationStep& step) {
  Json subst = Json::object();
  for (const auto& [v, t] : step.substitution) subst[v] = to_string(t);
  return {{"eq", to_string(step.equation)},
          {"dir", step.orientation == Orientation::Forward ? "fwd" : "rev"},
          {"pos", to_json(step.position)},
          {"subst", std::move(subst)}};
}

inline Json to_json(const Derivation& d) {
  Json terms = Json::array();
  for (const Term& t : d.terms) terms.push_back(to_string(t));
  Json steps = Json::array();
  for (const auto& s : d.steps) steps.push_back(to_json(s));
  Json out{{"theory", d.theory}, {"terms", std::move(terms)}, {"steps", std::move(steps)}};
  if (d.allow_reflexive) out["reflexive"] = true;
  return out;
}

inline Derivation derivation_from_json(const Json& j) {
  try {
    Derivation d;
    d.theory = j.value("theory", std::string{});
    d.allow_reflexive = j.value("reflexive", false);
    if (!j.at("terms").is_array() || !j.at("steps").is_array()) throw Error("\"terms\" and \"steps\" must be arrays");
    for (const auto& t : j.at("terms")) d.terms.push_back(parse_term(t.get<std::string>()));
    for (const auto& s : j.at("steps")) {
      DerivationStep step;
      step.equation = parse_identity(s.at("eq").get<std::string>());
      std::string dir = s.at("dir").get<std::string>();
      if (dir != "fwd" && dir != "rev") throw Error("step direction must be \"fwd\" or \"rev\", got \"" + dir + "\"");
      step.orientation = dir == "fwd" ? Orientation::Forward : Orientation::Reverse;
      const Json& pos = s.at("pos");
      if (!pos.is_array()) throw Error("step position must be an array");
      std::vector<std::size_t> path;
      for (const auto& k : pos) {
        if (!k.is_number_unsigned() || k.get<std::size_t>() == 0)
          throw Error("position entries must be positive integers, got " + k.dump());
        path.push_back(k.get<std::size_t>());
      }
      step.position = Position(std::move(path));
      for (const auto& [v, t] : s.at("subst").items()) step.substitution.emplace(v, parse_term(t.get<std::string>()));
      d.steps.push_back(std::move(step));
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed derivation JSON: ") + e.what());
  }
}

namespace detail {

inline Json table_json(const FiniteAlgebra& a, const std::vector<int>& table, std::size_t arity,
                       std::size_t offset) {
  if (arity == 0) return table[offset];
  Json rows = Json::array();
  std::size_t stride = FiniteAlgebra::table_length(a.size, arity - 1);
  for (int i = 0; i < a.size; ++i)
    rows.push_back(table_json(a, table, arity - 1, offset + static_cast<std::size_t>(i) * stride));
  return rows;
}

inline void table_from_json(const Json& j, std::size_t arity, std::vector<int>& out) {
  if (arity == 0) {
    out.push_back(j.get<int>());
    return;
  }
  for (const auto& row : j) table_from_json(row, arity - 1, out);
}

inline std::size_t nesting_depth(const Json& j) { return j.is_array() && !j.empty() ? 1 + nesting_depth(j[0]) : 0; }

}  // namespace detail

/// Tables are nested arrays indexed by argument values, first argument outermost.
inline Json to_json(const FiniteAlgebra& a) {
  Json tables = Json::object();
  for (const auto& [symbol, table] : a.tables) tables[symbol] = detail::table_json(a, table, a.arities.at(symbol), 0);
  return {{"size", a.size}, {"tables", std::move(tables)}};
}

inline FiniteAlgebra algebra_from_json(const Json& j) {
  try {
    FiniteAlgebra a;
    a.size = j.at("size").get<int>();
    for (const auto& [symbol, table] : j.at("tables").items()) {
      std::size_t arity = detail::nesting_depth(table);
      std::vector<int> flat;
      detail::table_from_json(table, arity, flat);
      if (flat.size() != FiniteAlgebra::table_length(a.size, arity))
        throw Error("table for '" + symbol + "' has the wrong shape");
      a.arities[symbol] = arity;
      a.tables[symbol] = std::move(flat);
    }
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed algebra JSON: ") + e.what());
  }
}

inline Json to_json(const Assignment& rho) {
  Json out = Json::object();
  for (const auto& [v, value] : rho) out[v] = value;
  return out;
}

inline Json to_json(const Theory& t) {
  Json ops = Json::array();
  for (const auto& op : t.signature().ops()) ops.push_back({{"name", op.name}, {"arity", op.arity}});
  Json axioms = Json::array();
  for (const auto& e : t.identities()) axioms.push_back(to_string(e));
  Json out{{"name", t.name()}, {"ops", std::move(ops)}, {"axioms", std::move(axioms)}};
  if (!t.rename_map().empty()) out["renamed"] = t.rename_map();
  return out;
}

inline Json to_json(const EntailmentVerdict& v) {
  Json out{{"verdict", to_string(v.kind)}};
  if (v.derivation) out["derivation"] = to_json(*v.derivation);
  if (v.model) {
    out["model"] = to_json(*v.model);
    out["assignment"] = to_json(v.assignment);
  }
  return out;
}

inline Json to_json(const Verdict& v) {
  Json out{{"answer", to_string(v.answer)}, {"stage", v.stage.name()}, {"stages_used", v.stages_used}};
  if (v.derivation) {
    out["certificate"] = {{"kind", "derivation"}, {"derivation", to_json(*v.derivation)}};
  } else if (v.model) {
    out["certificate"] = {{"kind", "model"}, {"algebra", to_json(*v.model)}, {"assignment", to_json(v.assignment)}};
  } else {
    out["certificate"] = {{"kind", "none"}};
  }
  if (!v.note.empty()) out["note"] = v.note;
  return out;
}

inline Json to_json(const IterationTrace& trace) {
  Json stages = Json::array();
  for (std::size_t k = 0; k < trace.stages.size(); ++k) {
    const IterationStage& s = trace.stages[k];
    Json added = Json::array();
    for (const auto& e : s.added) added.push_back(to_string(e));
    Json stage{{"index", k}, {"theory", s.theory.name()}, {"axioms", s.theory.identities().size()},
               {"added", std::move(added)}, {"inconsistent", s.consistency.entailed()}};
    if (trace.kind == DerivativeKind::Derivative) {
      Json profile = Json::array();
      for (const auto& [symbol, position] : s.profile) profile.push_back({symbol, position});
      stage["profile"] = std::move(profile);
    } else {
      Json facts = Json::array();
      for (const auto& f : s.facts) facts.push_back(to_string(f));
      stage["facts"] = std::move(facts);
    }
    stages.push_back(std::move(stage));
  }
  return {{"kind", to_string(trace.kind)},
          {"budget", trace.budget},
          {"stop", to_string(trace.reason)},
          {"stop_index", trace.stop_index()},
          {"stages", std::move(stages)}};
}

inline Json to_json(const ValidationReport& r) {
  Json idem = Json::object();
  for (const auto& [symbol, status] : r.idempotency) idem[symbol] = to_string(status);
  Json offending = Json::array();
  for (const auto& e : r.offending) offending.push_back(to_string(e));
  return {{"linear", r.is_linear},
          {"idempotency", std::move(idem)},
          {"linear_idempotent", r.linear_idempotent()},
          {"offending", std::move(offending)}};
}

inline Json to_json(const ClassificationReport& r) {
  Json traces = Json::array();
  for (const auto& t : r.traces) traces.push_back(to_json(t));
  Json out{{"theory", r.theory},
           {"validation", to_json(r.validation)},
           {"verdicts", {{"cm", to_json(r.cm)}, {"nci", to_json(r.nci)}, {"nperm", to_json(r.nperm)}}},
           {"traces", std::move(traces)}};
  if (r.sufficient_only) out["sufficient_only"] = true;
  return out;
}

inline Json to_json(const DecompositionReport& r) {
  Json stages = Json::array();
  for (const auto& s : r.stages) stages.push_back({{"kind", to_string(s.kind)}, {"stage", s.stage}, {"equal", s.equal}});
  Json props = Json::object();
  for (const auto& p : r.properties)
    props[to_string(p.property)] = {{"join", p.join}, {"first", p.first}, {"second", p.second}, {"holds", p.holds()}};
  return {{"first", r.first}, {"second", r.second}, {"stages", std::move(stages)},
          {"properties", std::move(props)}, {"holds", r.holds()}};
}

}  // namespace linvar
