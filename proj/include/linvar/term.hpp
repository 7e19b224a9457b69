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
#include <cctype>
#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "linvar/error.hpp"

namespace linvar {

/// Total order on names: shorter names first, then lexicographic. Keeps the
/// canonical enumeration v0 < v1 < ... < v9 < v10 in numeric order.
inline std::strong_ordering compare_names(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return a.size() <=> b.size();
  return a.compare(b) <=> 0;
}

inline std::string canonical_variable(std::size_t index) {
  return "v" + std::to_string(index);
}

/// Immutable first-order term. Copies share structure.
class Term {
  struct Node {
    bool is_var;
    std::string name;
    std::vector<Term> args;
    std::size_t size;
    std::size_t depth;
    std::size_t hash;
  };

 public:
  Term() : Term(var("x")) {}

  static Term var(std::string name) {
    std::size_t h = std::hash<std::string>{}(name) * 0x9e3779b97f4a7c15ULL + 1;
    return Term(std::make_shared<const Node>(Node{true, std::move(name), {}, 1, 0, h}));
  }

  static Term app(std::string symbol, std::vector<Term> args) {
    std::size_t size = 1;
    std::size_t depth = 0;
    std::size_t h = std::hash<std::string>{}(symbol) + 0x51ed27;
    for (const Term& a : args) {
      size += a.size();
      depth = std::max(depth, a.depth() + 1);
      h = h * 1000003ULL ^ a.hash();
    }
    if (!args.empty()) depth = std::max<std::size_t>(depth, 1);
    else depth = 1;
    return Term(std::make_shared<const Node>(
        Node{false, std::move(symbol), std::move(args), size, depth, h}));
  }

  bool is_var() const { return node_->is_var; }
  bool is_app() const { return !node_->is_var; }
  /// Variable name or operation symbol.
  const std::string& name() const { return node_->name; }
  std::span<const Term> args() const { return node_->args; }
  const Term& arg(std::size_t i) const { return node_->args[i]; }
  std::size_t arity() const { return node_->args.size(); }
  /// Number of nodes.
  std::size_t size() const { return node_->size; }
  /// 0 for variables, 1 for flat applications.
  std::size_t depth() const { return node_->depth; }
  std::size_t hash() const { return node_->hash; }

  bool is_flat() const { return depth() <= 1; }

  /// At most one function symbol.
  bool is_linear() const {
    if (is_var()) return true;
    return std::all_of(args().begin(), args().end(),
                       [](const Term& a) { return a.is_var(); });
  }

  friend bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    if (a.hash() != b.hash() || a.size() != b.size()) return false;
    if (a.is_var() != b.is_var() || a.name() != b.name()) return false;
    if (a.arity() != b.arity()) return false;
    for (std::size_t i = 0; i < a.arity(); ++i)
      if (!(a.arg(i) == b.arg(i))) return false;
    return true;
  }

  /// Variables before applications; applications by symbol, arity, children.
  friend std::strong_ordering operator<=>(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    if (a.is_var() != b.is_var())
      return a.is_var() ? std::strong_ordering::less : std::strong_ordering::greater;
    if (a.is_var()) return compare_names(a.name(), b.name());
    if (auto c = a.name().compare(b.name()) <=> 0; c != 0) return c;
    if (auto c = a.arity() <=> b.arity(); c != 0) return c;
    for (std::size_t i = 0; i < a.arity(); ++i)
      if (auto c = a.arg(i) <=> b.arg(i); c != 0) return c;
    return std::strong_ordering::equal;
  }

 private:
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};

inline std::string to_string(const Term& t) {
  if (t.is_var()) return t.name();
  std::string out = t.name() + "(";
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i) out += ",";
    out += to_string(t.arg(i));
  }
  return out + ")";
}

/// Path of 1-based child indices; empty path is the root.
class Position {
 public:
  Position() = default;
  Position(std::initializer_list<std::size_t> path) : path_(path) {}
  explicit Position(std::vector<std::size_t> path) : path_(std::move(path)) {}

  const std::vector<std::size_t>& path() const { return path_; }
  bool is_root() const { return path_.empty(); }
  std::size_t length() const { return path_.size(); }
  std::size_t operator[](std::size_t i) const { return path_[i]; }

  Position child(std::size_t index) const {
    Position p = *this;
    p.path_.push_back(index);
    return p;
  }

  Position concat(const Position& rest) const {
    Position p = *this;
    p.path_.insert(p.path_.end(), rest.path_.begin(), rest.path_.end());
    return p;
  }

  /// True if this position is an ancestor of (or equal to) `other`.
  bool is_prefix_of(const Position& other) const {
    return path_.size() <= other.path_.size() &&
           std::equal(path_.begin(), path_.end(), other.path_.begin());
  }

  bool is_strict_prefix_of(const Position& other) const {
    return path_.size() < other.path_.size() && is_prefix_of(other);
  }

  /// Suffix of `other` below this position. Requires is_prefix_of(other).
  Position relative(const Position& other) const {
    return Position(std::vector<std::size_t>(other.path_.begin() + path_.size(),
                                             other.path_.end()));
  }

  friend bool operator==(const Position&, const Position&) = default;
  friend auto operator<=>(const Position&, const Position&) = default;

 private:
  std::vector<std::size_t> path_;
};

inline std::string to_string(const Position& p) {
  std::string out = "[";
  for (std::size_t i = 0; i < p.length(); ++i) {
    if (i) out += ",";
    out += std::to_string(p[i]);
  }
  return out + "]";
}

using Substitution = std::map<std::string, Term>;

inline bool is_valid_position(const Term& t, const Position& p) {
  const Term* cur = &t;
  for (std::size_t index : p.path()) {
    if (index < 1 || index > cur->arity()) return false;
    cur = &cur->arg(index - 1);
  }
  return true;
}

inline const Term& subterm_at(const Term& t, const Position& p) {
  const Term* cur = &t;
  for (std::size_t index : p.path()) {
    if (index < 1 || index > cur->arity())
      throw InvalidPosition("position " + to_string(p) + " is not valid in " + to_string(t));
    cur = &cur->arg(index - 1);
  }
  return *cur;
}

namespace detail {
inline Term replace_from(const Term& t, const Position& p, std::size_t depth, const Term& u) {
  if (depth == p.length()) return u;
  std::size_t index = p[depth];
  if (index < 1 || index > t.arity())
    throw InvalidPosition("position " + to_string(p) + " is not valid");
  std::vector<Term> args(t.args().begin(), t.args().end());
  args[index - 1] = replace_from(t.arg(index - 1), p, depth + 1, u);
  return Term::app(t.name(), std::move(args));
}
}  // namespace detail

inline Term replace_at(const Term& t, const Position& p, const Term& u) {
  return detail::replace_from(t, p, 0, u);
}

inline Term apply_substitution(const Term& t, const Substitution& sigma) {
  if (sigma.empty()) return t;
  if (t.is_var()) {
    auto it = sigma.find(t.name());
    return it == sigma.end() ? t : it->second;
  }
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const Term& a : t.args()) args.push_back(apply_substitution(a, sigma));
  return Term::app(t.name(), std::move(args));
}

/// (sigma then tau)(x) = tau(sigma(x)).
inline Substitution compose(const Substitution& sigma, const Substitution& tau) {
  Substitution out;
  for (const auto& [v, t] : sigma) out.emplace(v, apply_substitution(t, tau));
  for (const auto& [v, t] : tau) out.emplace(v, t);
  return out;
}

namespace detail {
inline bool match_into(const Term& pattern, const Term& target, Substitution& sigma) {
  if (pattern.is_var()) {
    auto [it, inserted] = sigma.emplace(pattern.name(), target);
    return inserted || it->second == target;
  }
  if (!target.is_app() || target.name() != pattern.name() || target.arity() != pattern.arity())
    return false;
  for (std::size_t i = 0; i < pattern.arity(); ++i)
    if (!match_into(pattern.arg(i), target.arg(i), sigma)) return false;
  return true;
}
}  // namespace detail

/// One-sided syntactic matching.
inline std::optional<Substitution> match_term(const Term& pattern, const Term& target) {
  Substitution sigma;
  if (!detail::match_into(pattern, target, sigma)) return std::nullopt;
  return sigma;
}

/// Extends `sigma` in place; false (sigma unspecified) on conflict.
inline bool match_term_into(const Term& pattern, const Term& target, Substitution& sigma) {
  return detail::match_into(pattern, target, sigma);
}

/// Variables in preorder first-occurrence order, appended to `out`.
inline void collect_variables(const Term& t, std::vector<std::string>& out) {
  if (t.is_var()) {
    if (std::find(out.begin(), out.end(), t.name()) == out.end()) out.push_back(t.name());
    return;
  }
  for (const Term& a : t.args()) collect_variables(a, out);
}

inline std::vector<std::string> variables(const Term& t) {
  std::vector<std::string> out;
  collect_variables(t, out);
  return out;
}

/// Renaming sending the i-th first-occurring variable of `terms` to v_i.
inline Substitution canonical_renaming(std::span<const Term> terms) {
  std::vector<std::string> vars;
  for (const Term& t : terms) collect_variables(t, vars);
  Substitution sigma;
  for (std::size_t i = 0; i < vars.size(); ++i) sigma.emplace(vars[i], Term::var(canonical_variable(i)));
  return sigma;
}

inline Term canonical_rename(const Term& t) {
  return apply_substitution(t, canonical_renaming(std::span<const Term>(&t, 1)));
}

/// All positions of `t` in preorder.
inline std::vector<Position> positions(const Term& t) {
  std::vector<Position> out;
  std::function<void(const Term&, const Position&)> walk = [&](const Term& u, const Position& p) {
    out.push_back(p);
    for (std::size_t i = 0; i < u.arity(); ++i) walk(u.arg(i), p.child(i + 1));
  };
  walk(t, Position{});
  return out;
}

/// Returns a name of the form `<stem><k>` not in `taken` (or `stem` itself when free).
inline std::string fresh_name(const std::string& stem, const std::unordered_set<std::string>& taken) {
  if (!taken.contains(stem)) return stem;
  for (std::size_t k = 1;; ++k) {
    std::string candidate = stem + std::to_string(k);
    if (!taken.contains(candidate)) return candidate;
  }
}

// ---------------------------------------------------------------------------
// Text syntax

class Lexer {
 public:
  enum class Kind { Identifier, LParen, RParen, Comma, Equals, Slash, Number, End };

  struct Token {
    Kind kind;
    std::string text;
    std::size_t line;
    std::size_t column;
  };

  explicit Lexer(std::string_view text, std::size_t line = 1, std::size_t column_offset = 0)
      : text_(text), line_(line), column_offset_(column_offset) {
    advance();
  }

  const Token& peek() const { return current_; }

  Token next() {
    Token t = current_;
    advance();
    return t;
  }

  Token expect(Kind kind, const char* what) {
    if (current_.kind != kind) fail(std::string("expected ") + what);
    return next();
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message + (current_.kind == Kind::End ? " at end of input"
                                                            : " near '" + current_.text + "'"),
                     current_.line, current_.column);
  }

 private:
  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::size_t column = column_offset_ + pos_ + 1;
    if (pos_ >= text_.size()) {
      current_ = {Kind::End, "", line_, column};
      return;
    }
    char c = text_[pos_];
    auto single = [&](Kind k) {
      current_ = {k, std::string(1, c), line_, column};
      ++pos_;
    };
    switch (c) {
      case '(': return single(Kind::LParen);
      case ')': return single(Kind::RParen);
      case ',': return single(Kind::Comma);
      case '=': return single(Kind::Equals);
      case '/': return single(Kind::Slash);
      default: break;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      current_ = {Kind::Identifier, std::string(text_.substr(start, pos_ - start)), line_, column};
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      current_ = {Kind::Number, std::string(text_.substr(start, pos_ - start)), line_, column};
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line_, column);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_;
  std::size_t column_offset_;
  Token current_{Kind::End, "", 1, 1};
};

inline Term parse_term(Lexer& lex) {
  auto id = lex.expect(Lexer::Kind::Identifier, "identifier");
  if (lex.peek().kind != Lexer::Kind::LParen) {
    if (!std::islower(static_cast<unsigned char>(id.text[0])))
      throw ParseError("variable '" + id.text + "' must start with a lowercase letter", id.line,
                       id.column);
    return Term::var(id.text);
  }
  lex.next();
  std::vector<Term> args;
  if (lex.peek().kind != Lexer::Kind::RParen) {
    args.push_back(parse_term(lex));
    while (lex.peek().kind == Lexer::Kind::Comma) {
      lex.next();
      args.push_back(parse_term(lex));
    }
  }
  lex.expect(Lexer::Kind::RParen, "')'");
  return Term::app(id.text, std::move(args));
}

inline Term parse_term(std::string_view text) {
  Lexer lex(text);
  Term t = parse_term(lex);
  if (lex.peek().kind != Lexer::Kind::End) lex.fail("trailing input");
  return t;
}

}  // namespace linvar
