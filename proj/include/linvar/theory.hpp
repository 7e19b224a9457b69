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

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "linvar/error.hpp"
#include "linvar/term.hpp"

namespace linvar {

/// An unordered pair of terms; stored with the orientation given.
struct Identity {
  Term lhs;
  Term rhs;

  bool is_linear() const { return lhs.is_linear() && rhs.is_linear(); }
  bool is_flat() const { return lhs.is_flat() && rhs.is_flat(); }

  std::vector<std::string> variables() const {
    std::vector<std::string> out;
    collect_variables(lhs, out);
    collect_variables(rhs, out);
    return out;
  }

  Identity flipped() const { return {rhs, lhs}; }

  friend bool operator==(const Identity&, const Identity&) = default;
  friend auto operator<=>(const Identity&, const Identity&) = default;
};

inline std::string to_string(const Identity& e) {
  return to_string(e.lhs) + " = " + to_string(e.rhs);
}

inline Identity parse_identity(Lexer& lex) {
  Term lhs = parse_term(lex);
  lex.expect(Lexer::Kind::Equals, "'='");
  Term rhs = parse_term(lex);
  return {lhs, rhs};
}

inline Identity parse_identity(std::string_view text) {
  Lexer lex(text);
  Identity e = parse_identity(lex);
  if (lex.peek().kind != Lexer::Kind::End) lex.fail("trailing input");
  return e;
}

/// Canonical representative of an identity up to symmetry and injective
/// renaming: of the two orientations, each jointly renamed to v0, v1, ...
/// in preorder first-occurrence order, the lexicographically smaller pair.
inline Identity canonicalize_identity(const Identity& e) {
  auto renamed = [](const Term& a, const Term& b) {
    Term both[] = {a, b};
    Substitution sigma = canonical_renaming(both);
    return Identity{apply_substitution(a, sigma), apply_substitution(b, sigma)};
  };
  Identity forward = renamed(e.lhs, e.rhs);
  Identity reverse = renamed(e.rhs, e.lhs);
  return std::min(forward, reverse);
}

struct OperationSymbol {
  std::string name;
  std::size_t arity;

  friend bool operator==(const OperationSymbol&, const OperationSymbol&) = default;
  friend auto operator<=>(const OperationSymbol&, const OperationSymbol&) = default;
};

/// Operation symbols in declaration order with unique names.
class Signature {
 public:
  Signature() = default;
  Signature(std::initializer_list<OperationSymbol> ops) {
    for (const auto& op : ops) add(op);
  }

  void add(const OperationSymbol& op) {
    if (auto existing = find(op.name)) {
      if (existing->arity != op.arity)
        throw ArityMismatch("symbol '" + op.name + "' declared with arities " +
                            std::to_string(existing->arity) + " and " + std::to_string(op.arity));
      return;
    }
    ops_.push_back(op);
  }

  std::optional<OperationSymbol> find(std::string_view name) const {
    for (const auto& op : ops_)
      if (op.name == name) return op;
    return std::nullopt;
  }

  bool contains(std::string_view name) const { return find(name).has_value(); }

  const std::vector<OperationSymbol>& ops() const { return ops_; }
  bool empty() const { return ops_.empty(); }
  std::size_t size() const { return ops_.size(); }

  std::size_t max_arity() const {
    std::size_t m = 0;
    for (const auto& op : ops_) m = std::max(m, op.arity);
    return m;
  }

  std::set<OperationSymbol> as_set() const { return {ops_.begin(), ops_.end()}; }

 private:
  std::vector<OperationSymbol> ops_;
};

/// A named signature and a finite set of canonicalized identities.
class Theory {
 public:
  Theory() = default;
  Theory(std::string name, Signature signature) : name_(std::move(name)), signature_(std::move(signature)) {}

  Theory(std::string name, Signature signature, std::initializer_list<std::string_view> axioms)
      : Theory(std::move(name), std::move(signature)) {
    for (auto text : axioms) add(parse_identity(text));
  }

  /// Checks symbols against the signature and stores the canonical form.
  void add(const Identity& e) {
    check_term(e.lhs);
    check_term(e.rhs);
    identities_.insert(canonicalize_identity(e));
  }

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }
  const Signature& signature() const { return signature_; }
  const std::set<Identity>& identities() const { return identities_; }
  bool contains(const Identity& e) const { return identities_.contains(canonicalize_identity(e)); }

  /// Symbol renames applied to the second operand of a join.
  const std::map<std::string, std::string>& rename_map() const { return rename_map_; }
  void set_rename_map(std::map<std::string, std::string> m) { rename_map_ = std::move(m); }

  void check_term(const Term& t) const {
    if (t.is_var()) return;
    auto op = signature_.find(t.name());
    if (!op) throw UnknownSymbol("unknown symbol '" + t.name() + "' in " + to_string(t));
    if (op->arity != t.arity())
      throw ArityMismatch("symbol '" + t.name() + "' has arity " + std::to_string(op->arity) +
                          " but is applied to " + std::to_string(t.arity()) + " arguments");
    for (const Term& a : t.args()) check_term(a);
  }

 private:
  std::string name_;
  Signature signature_;
  std::set<Identity> identities_;
  std::map<std::string, std::string> rename_map_;
};

inline Term rename_symbols(const Term& t, const std::map<std::string, std::string>& renames) {
  if (t.is_var() || renames.empty()) return t;
  std::vector<Term> args;
  for (const Term& a : t.args()) args.push_back(rename_symbols(a, renames));
  auto it = renames.find(t.name());
  return Term::app(it == renames.end() ? t.name() : it->second, std::move(args));
}

/// Union over disjoint signatures. Symbols of `b` that clash with `a` are
/// renamed to `<name>_2` (or the next free suffix) and recorded.
inline Theory join_disjoint(const Theory& a, const Theory& b) {
  Signature sig = a.signature();
  std::map<std::string, std::string> renames;
  for (const auto& op : b.signature().ops()) {
    std::string name = op.name;
    if (sig.contains(name)) {
      for (std::size_t k = 2;; ++k) {
        std::string candidate = op.name + "_" + std::to_string(k);
        if (!sig.contains(candidate) && !b.signature().contains(candidate)) {
          name = candidate;
          break;
        }
      }
      renames.emplace(op.name, name);
    }
    sig.add({name, op.arity});
  }
  std::string name = b.name().empty() ? a.name() : a.name().empty() ? b.name() : a.name() + "_" + b.name();
  Theory out(name, sig);
  for (const auto& e : a.identities()) out.add(e);
  for (const auto& e : b.identities())
    out.add({rename_symbols(e.lhs, renames), rename_symbols(e.rhs, renames)});
  out.set_rename_map(std::move(renames));
  return out;
}

/// `b` as it appears inside join_disjoint(a, b).
inline Theory renamed_component(const Theory& b, const std::map<std::string, std::string>& renames) {
  Signature sig;
  for (const auto& op : b.signature().ops()) {
    auto it = renames.find(op.name);
    sig.add({it == renames.end() ? op.name : it->second, op.arity});
  }
  Theory out(b.name(), sig);
  for (const auto& e : b.identities())
    out.add({rename_symbols(e.lhs, renames), rename_symbols(e.rhs, renames)});
  return out;
}

/// Equality of canonical identity sets. Throws SignatureMismatch when the
/// signatures differ as sets.
inline bool theory_equal(const Theory& a, const Theory& b) {
  if (a.signature().as_set() != b.signature().as_set())
    throw SignatureMismatch("theories '" + a.name() + "' and '" + b.name() +
                            "' have different signatures");
  return a.identities() == b.identities();
}

// ---------------------------------------------------------------------------
// DSL
//
//   theory <name>
//   op <symbol>/<arity>
//   axiom <term> = <term>
//
// '#' starts a comment.

inline Theory parse_theory(std::string_view text) {
  struct PendingAxiom {
    Identity identity;
    std::size_t line;
  };
  std::string name;
  Signature sig;
  std::vector<PendingAxiom> axioms;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    Lexer lex(line, line_no);
    if (lex.peek().kind == Lexer::Kind::End) {
      if (end == text.size()) break;
      continue;
    }
    auto keyword = lex.expect(Lexer::Kind::Identifier, "keyword");
    if (keyword.text == "theory") {
      name = lex.expect(Lexer::Kind::Identifier, "theory name").text;
    } else if (keyword.text == "op") {
      auto sym = lex.expect(Lexer::Kind::Identifier, "operation symbol");
      lex.expect(Lexer::Kind::Slash, "'/'");
      auto arity = lex.expect(Lexer::Kind::Number, "arity");
      OperationSymbol op{sym.text, std::stoul(arity.text)};
      if (auto existing = sig.find(op.name); existing && existing->arity != op.arity)
        throw ParseError("symbol '" + op.name + "' redeclared with a different arity", sym.line,
                         sym.column);
      sig.add(op);
    } else if (keyword.text == "axiom") {
      axioms.push_back({parse_identity(lex), line_no});
    } else {
      throw ParseError("unknown keyword '" + keyword.text + "'", keyword.line, keyword.column);
    }
    if (lex.peek().kind != Lexer::Kind::End) lex.fail("trailing input");
    if (end == text.size()) break;
  }

  Theory theory(name, sig);
  for (const auto& axiom : axioms) {
    try {
      theory.add(axiom.identity);
    } catch (const ArityMismatch& e) {
      throw ArityMismatch("line " + std::to_string(axiom.line) + ": " + e.what());
    } catch (const UnknownSymbol& e) {
      throw UnknownSymbol("line " + std::to_string(axiom.line) + ": " + e.what());
    }
  }
  return theory;
}

inline std::string render_theory(const Theory& theory) {
  std::string out;
  if (!theory.name().empty()) out += "theory " + theory.name() + "\n";
  for (const auto& [from, to] : theory.rename_map()) out += "# renamed " + from + " -> " + to + "\n";
  for (const auto& op : theory.signature().ops())
    out += "op " + op.name + "/" + std::to_string(op.arity) + "\n";
  for (const auto& e : theory.identities()) out += "axiom " + to_string(e) + "\n";
  return out;
}

}  // namespace linvar
