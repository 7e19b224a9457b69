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
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "linvar/error.hpp"
#include "linvar/term.hpp"
#include "linvar/theory.hpp"

namespace linvar {

using Assignment = std::map<std::string, int>;

/// Finite universe {0..size-1} with one row-major table per symbol.
struct FiniteAlgebra {
  int size = 1;
  std::map<std::string, std::size_t> arities;
  std::map<std::string, std::vector<int>> tables;

  static std::size_t table_length(int size, std::size_t arity) {
    std::size_t n = 1;
    for (std::size_t i = 0; i < arity; ++i) n *= static_cast<std::size_t>(size);
    return n;
  }

  /// Adds a symbol whose table is filled by `op` over row-major tuples.
  template <class Fn>
  void define(const std::string& symbol, std::size_t arity, Fn op) {
    arities[symbol] = arity;
    std::vector<int> table(table_length(size, arity));
    std::vector<int> tuple(arity, 0);
    for (std::size_t cell = 0; cell < table.size(); ++cell) {
      std::size_t rest = cell;
      for (std::size_t i = arity; i-- > 0;) {
        tuple[i] = static_cast<int>(rest % static_cast<std::size_t>(size));
        rest /= static_cast<std::size_t>(size);
      }
      table[cell] = op(static_cast<const std::vector<int>&>(tuple));
    }
    tables[symbol] = std::move(table);
  }

  int apply(const std::string& symbol, const std::vector<int>& args) const {
    auto it = tables.find(symbol);
    if (it == tables.end()) throw EvaluationError("no table for symbol '" + symbol + "'");
    std::size_t cell = 0;
    for (int a : args) cell = cell * static_cast<std::size_t>(size) + static_cast<std::size_t>(a);
    return it->second.at(cell);
  }

  friend bool operator==(const FiniteAlgebra&, const FiniteAlgebra&) = default;
};

inline int eval_term(const FiniteAlgebra& algebra, const Term& t, const Assignment& rho) {
  if (t.is_var()) {
    auto it = rho.find(t.name());
    if (it == rho.end()) throw EvaluationError("variable '" + t.name() + "' is not assigned");
    return it->second;
  }
  std::vector<int> args;
  args.reserve(t.arity());
  for (const Term& a : t.args()) args.push_back(eval_term(algebra, a, rho));
  return algebra.apply(t.name(), args);
}

struct SatisfactionResult {
  bool ok = true;
  std::optional<Identity> violated;
  Assignment assignment;

  explicit operator bool() const { return ok; }
};

/// Calls `fn(assignment)` for every assignment of `vars` into {0..size-1},
/// lexicographically with the first variable most significant. Stops when
/// `fn` returns false.
template <class Fn>
bool for_each_assignment(const std::vector<std::string>& vars, int size, Fn fn) {
  std::vector<int> values(vars.size(), 0);
  Assignment rho;
  while (true) {
    for (std::size_t i = 0; i < vars.size(); ++i) rho[vars[i]] = values[i];
    if (!fn(static_cast<const Assignment&>(rho))) return false;
    std::size_t i = vars.size();
    while (i > 0 && values[i - 1] == size - 1) values[--i] = 0;
    if (i == 0) return true;
    ++values[i - 1];
  }
}

inline SatisfactionResult satisfies(const FiniteAlgebra& algebra, const Theory& theory) {
  SatisfactionResult result;
  for (const Identity& e : theory.identities()) {
    for_each_assignment(e.variables(), algebra.size, [&](const Assignment& rho) {
      if (eval_term(algebra, e.lhs, rho) != eval_term(algebra, e.rhs, rho)) {
        result = {false, e, rho};
        return false;
      }
      return true;
    });
    if (!result.ok) return result;
  }
  return result;
}

/// eval(lhs) != eval(rhs) under some extension of `partial`.
struct Disequality {
  Term lhs;
  Term rhs;
  Assignment partial;
};

struct ModelSearchOptions {
  /// Pre-fix every diagonal F(a,...,a) = a.
  bool idempotent = true;
  /// Decision budget per size; exceeding it reports LimitReached.
  std::uint64_t node_limit = 2'000'000;
};

struct ModelSearchResult {
  enum class Status { Found, NoneInRange, LimitReached };
  Status status = Status::NoneInRange;
  FiniteAlgebra algebra;
  Assignment assignment;
  std::uint64_t nodes = 0;

  bool found() const { return status == Status::Found; }
  explicit operator bool() const { return found(); }
};

namespace detail {

/// Backtracking search over the operation tables of one universe size.
class TableSearch {
 public:
  TableSearch(const Theory& theory, int size, const ModelSearchOptions& options)
      : theory_(theory), size_(size), options_(options) {
    std::size_t offset = 0;
    for (const auto& op : theory.signature().ops()) {
      offsets_[op.name] = offset;
      symbols_.push_back(op);
      offset += FiniteAlgebra::table_length(size, op.arity);
    }
    values_.assign(offset, -1);
    watches_.resize(offset);
    build_constraints();
  }

  ModelSearchResult run(const std::optional<Disequality>& goal) {
    ModelSearchResult result;
    if (infeasible_) return result;
    if (options_.idempotent) {
      for (const auto& op : symbols_) {
        if (op.arity == 0) continue;
        for (int a = 0; a < size_; ++a) {
          std::vector<int> diag(op.arity, a);
          if (!assign(cell_of(op.name, diag), a)) return result;
        }
      }
    }
    base_trail_ = trail_.size();
    if (!goal) {
      if (search(result)) result.status = ModelSearchResult::Status::Found;
      return finish(result);
    }
    std::vector<std::string> free;
    {
      std::vector<std::string> vars;
      collect_variables(goal->lhs, vars);
      collect_variables(goal->rhs, vars);
      for (const auto& v : vars)
        if (!goal->partial.contains(v)) free.push_back(v);
    }
    bool found = false;
    for_each_assignment(free, size_, [&](const Assignment& extra) {
      goal_ = *goal;
      for (const auto& [v, x] : extra) goal_->partial[v] = x;
      if (goal_fails()) return true;
      if (search(result)) {
        found = true;
        result.assignment = goal_->partial;
        return false;
      }
      return !limit_hit_;
    });
    if (found) result.status = ModelSearchResult::Status::Found;
    return finish(result);
  }

 private:
  struct Side {
    bool is_cell;
    std::size_t value;  // cell id or element
  };
  struct Constraint {
    Side a;
    Side b;
  };

  std::size_t cell_of(const std::string& symbol, const std::vector<int>& args) const {
    std::size_t cell = 0;
    for (int a : args) cell = cell * static_cast<std::size_t>(size_) + static_cast<std::size_t>(a);
    return offsets_.at(symbol) + cell;
  }

  Side side_of(const Term& t, const Assignment& rho) const {
    if (t.is_var()) return {false, static_cast<std::size_t>(rho.at(t.name()))};
    std::vector<int> args;
    for (const Term& a : t.args()) args.push_back(rho.at(a.name()));
    return {true, cell_of(t.name(), args)};
  }

  void build_constraints() {
    for (const Identity& e : theory_.identities()) {
      bool flat = e.is_flat();
      for_each_assignment(e.variables(), size_, [&](const Assignment& rho) {
        if (!flat) {
          deep_.push_back({e, rho});
          return true;
        }
        Side a = side_of(e.lhs, rho);
        Side b = side_of(e.rhs, rho);
        if (!a.is_cell && !b.is_cell) {
          if (a.value != b.value) infeasible_ = true;
          return !infeasible_;
        }
        if (a.is_cell && b.is_cell && a.value == b.value) return true;
        if (!a.is_cell) std::swap(a, b);
        std::size_t id = constraints_.size();
        constraints_.push_back({a, b});
        watches_[a.value].push_back(id);
        if (b.is_cell) watches_[b.value].push_back(id);
        return true;
      });
      if (infeasible_) return;
    }
  }

  /// Sets a cell and propagates equalities; false on conflict.
  bool assign(std::size_t cell, int value) {
    std::vector<std::pair<std::size_t, int>> queue{{cell, value}};
    while (!queue.empty()) {
      auto [c, v] = queue.back();
      queue.pop_back();
      if (values_[c] >= 0) {
        if (values_[c] != v) return false;
        continue;
      }
      values_[c] = v;
      trail_.push_back(c);
      for (std::size_t id : watches_[c]) {
        const Constraint& k = constraints_[id];
        const Side& other = (k.a.is_cell && k.a.value == c) ? k.b : k.a;
        if (!other.is_cell) {
          if (static_cast<int>(other.value) != v) return false;
        } else if (values_[other.value] < 0) {
          queue.push_back({other.value, v});
        } else if (values_[other.value] != v) {
          return false;
        }
      }
    }
    return true;
  }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      values_[trail_.back()] = -1;
      trail_.pop_back();
    }
  }

  std::optional<int> partial_eval(const Term& t, const Assignment& rho) const {
    if (t.is_var()) {
      auto it = rho.find(t.name());
      if (it == rho.end()) return std::nullopt;
      return it->second;
    }
    std::vector<int> args;
    for (const Term& a : t.args()) {
      auto v = partial_eval(a, rho);
      if (!v) return std::nullopt;
      args.push_back(*v);
    }
    auto off = offsets_.find(t.name());
    if (off == offsets_.end()) return std::nullopt;
    int v = values_[cell_of(t.name(), args)];
    if (v < 0) return std::nullopt;
    return v;
  }

  bool deep_fails() const {
    for (const auto& [e, rho] : deep_) {
      auto a = partial_eval(e.lhs, rho);
      auto b = partial_eval(e.rhs, rho);
      if (a && b && *a != *b) return true;
    }
    return false;
  }

  bool goal_fails() const {
    if (!goal_) return false;
    auto a = partial_eval(goal_->lhs, goal_->partial);
    auto b = partial_eval(goal_->rhs, goal_->partial);
    return a && b && *a == *b;
  }

  bool search(ModelSearchResult& result) {
    if (deep_fails() || goal_fails()) return false;
    while (next_ < values_.size() && values_[next_] >= 0) ++next_;
    if (next_ == values_.size()) return true;
    if (++result.nodes > options_.node_limit) {
      limit_hit_ = true;
      return false;
    }
    std::size_t cell = next_;
    for (int v = 0; v < size_; ++v) {
      std::size_t mark = trail_.size();
      std::size_t saved_next = next_;
      if (assign(cell, v) && search(result)) return true;
      undo(mark);
      next_ = saved_next;
      if (limit_hit_) return false;
    }
    return false;
  }

  ModelSearchResult& finish(ModelSearchResult& result) {
    if (result.found()) {
      result.algebra.size = size_;
      for (const auto& op : symbols_) {
        std::size_t off = offsets_.at(op.name);
        std::size_t len = FiniteAlgebra::table_length(size_, op.arity);
        result.algebra.arities[op.name] = op.arity;
        result.algebra.tables[op.name] =
            std::vector<int>(values_.begin() + static_cast<std::ptrdiff_t>(off),
                             values_.begin() + static_cast<std::ptrdiff_t>(off + len));
      }
    } else if (limit_hit_) {
      result.status = ModelSearchResult::Status::LimitReached;
    }
    return result;
  }

  const Theory& theory_;
  int size_;
  ModelSearchOptions options_;
  std::map<std::string, std::size_t> offsets_;
  std::vector<OperationSymbol> symbols_;
  std::vector<int> values_;
  std::vector<std::vector<std::size_t>> watches_;
  std::vector<Constraint> constraints_;
  std::vector<std::pair<Identity, Assignment>> deep_;
  std::vector<std::size_t> trail_;
  std::size_t base_trail_ = 0;
  std::size_t next_ = 0;
  std::optional<Disequality> goal_;
  bool infeasible_ = false;
  bool limit_hit_ = false;
};

}  // namespace detail

/// First model in search order (size ascending, then goal-variable values,
/// then table cells in lexicographic order with values ascending).
inline ModelSearchResult find_model(const Theory& theory, int lo, int hi,
                                    const std::optional<Disequality>& constraint = std::nullopt,
                                    const ModelSearchOptions& options = {}) {
  ModelSearchResult last;
  bool limited = false;
  std::uint64_t nodes = 0;
  for (int size = std::max(lo, 1); size <= hi; ++size) {
    detail::TableSearch search(theory, size, options);
    ModelSearchResult r = search.run(constraint);
    nodes += r.nodes;
    if (r.found()) {
      r.nodes = nodes;
      return r;
    }
    limited = limited || r.status == ModelSearchResult::Status::LimitReached;
  }
  last.nodes = nodes;
  last.status = limited ? ModelSearchResult::Status::LimitReached : ModelSearchResult::Status::NoneInRange;
  return last;
}

/// A model of the theory in which the two sides of `goal` differ.
inline ModelSearchResult refute_entailment(const Theory& theory, const Identity& goal, int lo = 2,
                                           int hi = 3, const ModelSearchOptions& options = {}) {
  return find_model(theory, lo, hi, Disequality{goal.lhs, goal.rhs, {}}, options);
}

}  // namespace linvar
