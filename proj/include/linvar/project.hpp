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

// Projection of derivations over a disjoint join onto one component.
//
// Given a derivation of F(x) = y over the join of two theories, the
// occurrences of the derivation are linked by a successor relation that
// follows each subterm through every rewrite step, in both directions.
// Following it from the root of the first term to an occurrence of y gives a
// chain of subterms headed by symbols of F's theory; collapsing their
// arguments to variables yields a flat derivation inside that theory.

#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "linvar/derivation.hpp"
#include "linvar/error.hpp"
#include "linvar/flatsat.hpp"
#include "linvar/term.hpp"
#include "linvar/theory.hpp"
#include "linvar/union_find.hpp"

namespace linvar {

/// A join theory entails x = y; carries the derivation when one was built.
class InconsistencyDetected : public Error {
 public:
  InconsistencyDetected(const std::string& message, std::optional<Derivation> certificate)
      : Error(message), certificate_(std::move(certificate)) {}

  const std::optional<Derivation>& certificate() const { return certificate_; }

 private:
  std::optional<Derivation> certificate_;
};

/// Subterm occurrence: term index in the derivation and position within it.
struct Occurrence {
  std::size_t index = 0;
  Position position;

  friend bool operator==(const Occurrence&, const Occurrence&) = default;
  friend auto operator<=>(const Occurrence&, const Occurrence&) = default;
};

inline std::string to_string(const Occurrence& o) {
  return "t" + std::to_string(o.index) + to_string(o.position);
}

/// 1: disjoint from the rewrite; 2: strictly above it; 3: inside the
/// substituted part (or at a variable left-hand side); 4: the rewritten
/// subterm itself under an application left-hand side.
enum class EdgeCase { Disjoint = 1, Above = 2, Inside = 3, Root = 4 };

struct SuccessorEdge {
  Occurrence from;
  Occurrence to;
  EdgeCase kind = EdgeCase::Disjoint;
  std::size_t step = 0;
  /// The step is read from t_{step+1} to t_step.
  bool reverse = false;
};

struct SuccessorGraph {
  std::vector<SuccessorEdge> edges;
  std::map<Occurrence, std::vector<std::size_t>> outgoing;

  void add(SuccessorEdge e) {
    outgoing[e.from].push_back(edges.size());
    edges.push_back(std::move(e));
  }
};

using MarkSet = std::set<Occurrence>;

namespace detail {

/// The step between t_i and t_{i+1}, oriented in the direction of `reverse`.
inline DerivationStep oriented_step(const Derivation& d, std::size_t i, bool reverse) {
  return reverse ? d.steps[i].inverted() : d.steps[i];
}

/// Locates `rel` inside `pattern`: the variable it falls under, and the
/// remaining path below that variable.
inline std::optional<std::pair<std::string, Position>> locate_in_pattern(const Term& pattern, const Position& rel) {
  const Term* cur = &pattern;
  std::size_t depth = 0;
  while (!cur->is_var()) {
    if (depth == rel.length()) return std::nullopt;
    cur = &cur->arg(rel[depth++] - 1);
  }
  std::vector<std::size_t> rest(rel.path().begin() + static_cast<std::ptrdiff_t>(depth), rel.path().end());
  return std::make_pair(cur->name(), Position(std::move(rest)));
}

inline std::vector<Position> variable_positions(const Term& t, const std::string& v) {
  std::vector<Position> out;
  for (const Position& p : positions(t))
    if (subterm_at(t, p).is_var() && subterm_at(t, p).name() == v) out.push_back(p);
  return out;
}

}  // namespace detail

inline SuccessorGraph build_successor_graph(const Derivation& d) {
  SuccessorGraph graph;
  for (std::size_t i = 0; i < d.steps.size(); ++i) {
    for (bool reverse : {false, true}) {
      std::size_t a = reverse ? i + 1 : i;
      std::size_t b = reverse ? i : i + 1;
      DerivationStep st = detail::oriented_step(d, i, reverse);
      const Term& lhs = st.pattern();
      const Term& rhs = st.replacement();
      const Position& s = st.position;
      for (const Position& u : positions(d.terms[a])) {
        auto edge = [&](std::size_t index, Position to, EdgeCase kind) {
          graph.add({{a, u}, {index, std::move(to)}, kind, i, reverse});
        };
        if (!s.is_prefix_of(u) && !u.is_prefix_of(s)) {
          edge(b, u, EdgeCase::Disjoint);
        } else if (u.is_strict_prefix_of(s)) {
          edge(b, u, EdgeCase::Above);
        } else if (u == s && !lhs.is_var()) {
          edge(b, s, EdgeCase::Root);
        } else {
          auto located = detail::locate_in_pattern(lhs, s.relative(u));
          if (!located) continue;
          const auto& [w, below] = *located;
          for (const Position& p : detail::variable_positions(lhs, w)) edge(a, s.concat(p).concat(below), EdgeCase::Inside);
          for (const Position& p : detail::variable_positions(rhs, w)) edge(b, s.concat(p).concat(below), EdgeCase::Inside);
        }
      }
    }
  }
  return graph;
}

/// Occurrences reachable from the root of t0.
inline MarkSet mark_T(const SuccessorGraph& graph) {
  MarkSet marked{{0, Position{}}};
  std::deque<Occurrence> queue{{0, Position{}}};
  while (!queue.empty()) {
    Occurrence o = queue.front();
    queue.pop_front();
    auto it = graph.outgoing.find(o);
    if (it == graph.outgoing.end()) continue;
    for (std::size_t e : it->second)
      if (marked.insert(graph.edges[e].to).second) queue.push_back(graph.edges[e].to);
  }
  return marked;
}

inline MarkSet mark_T(const Derivation& d) { return mark_T(build_successor_graph(d)); }

inline std::unordered_set<std::string> derivation_variables(const Derivation& d) {
  std::unordered_set<std::string> out;
  for (const Term& t : d.terms)
    for (const auto& v : variables(t)) out.insert(v);
  for (const auto& step : d.steps)
    for (const auto& [_, value] : step.substitution)
      for (const auto& v : variables(value)) out.insert(v);
  return out;
}

/// Replaces every variable lying under a marked occurrence by a fresh
/// variable and recomputes each step's substitution. Throws Error if the
/// result does not verify against `theory`.
inline Derivation z_substituted_derivation(const Theory& theory, const Derivation& d, const MarkSet& marked) {
  std::string z = fresh_name("z", derivation_variables(d));
  Derivation out{d.theory, {}, {}, d.allow_reflexive};
  for (std::size_t i = 0; i < d.terms.size(); ++i) {
    std::function<Term(const Term&, const Position&, bool)> walk = [&](const Term& t, const Position& p, bool under) {
      under = under || marked.contains({i, p});
      if (t.is_var()) return under ? Term::var(z) : t;
      std::vector<Term> args;
      for (std::size_t j = 0; j < t.arity(); ++j) args.push_back(walk(t.arg(j), p.child(j + 1), under));
      return Term::app(t.name(), std::move(args));
    };
    out.terms.push_back(walk(d.terms[i], Position{}, false));
  }
  for (std::size_t i = 0; i < d.steps.size(); ++i) {
    const DerivationStep& step = d.steps[i];
    Substitution sigma;
    bool ok = is_valid_position(out.terms[i], step.position) && is_valid_position(out.terms[i + 1], step.position) &&
              match_term_into(step.pattern(), subterm_at(out.terms[i], step.position), sigma) &&
              match_term_into(step.replacement(), subterm_at(out.terms[i + 1], step.position), sigma);
    if (!ok) throw Error("z-substitution broke step " + std::to_string(i + 1));
    out.steps.push_back({step.equation, step.orientation, step.position, std::move(sigma)});
  }
  if (auto v = verify_derivation(theory, out); !v)
    throw Error("z-substituted derivation does not verify: " + v.diagnostic);
  return out;
}

inline Derivation z_substituted_derivation(const Theory& theory, const Derivation& d) {
  return z_substituted_derivation(theory, d, mark_T(d));
}

struct ProjectionResult {
  Derivation derivation;
  /// The component owning the head symbol, as it appears inside the join.
  Theory owner;
  std::vector<Occurrence> chain;
  std::vector<EdgeCase> chain_cases;
};

namespace detail {

/// The 0- or 1-step derivation that an edge witnesses between the subterms
/// at its endpoints.
inline Derivation edge_witness(const std::string& theory, const Derivation& d, const SuccessorEdge& e) {
  const Term& from = subterm_at(d.terms[e.from.index], e.from.position);
  Derivation w{theory, {from}, {}, false};
  if (e.kind == EdgeCase::Disjoint || e.kind == EdgeCase::Inside) return w;
  DerivationStep st = oriented_step(d, e.step, e.reverse);
  st.position = e.from.position.relative(st.position);
  w.append(st, subterm_at(d.terms[e.to.index], e.to.position));
  return w;
}

/// Union-find over subterm nodes where every union carries a derivation
/// between the two nodes' terms.
class WitnessedClasses {
 public:
  std::size_t node(const Term& t) {
    terms_.push_back(t);
    classes_.add();
    return terms_.size() - 1;
  }

  std::size_t variable(const std::string& name) {
    auto it = vars_.find(name);
    if (it != vars_.end()) return it->second;
    std::size_t n = node(Term::var(name));
    vars_.emplace(name, n);
    return n;
  }

  void link(std::size_t a, std::size_t b, Derivation witness) {
    adjacency_.resize(terms_.size());
    adjacency_[a].push_back(links_.size());
    adjacency_[b].push_back(links_.size());
    links_.push_back({a, b, std::move(witness)});
    classes_.unite(a, b);
  }

  void link_syntactic(std::size_t a, std::size_t b, const std::string& theory) {
    link(a, b, Derivation{theory, {terms_[a]}, {}, false});
  }

  const Term& term(std::size_t n) const { return terms_[n]; }
  std::size_t find(std::size_t n) const { return classes_.find(n); }
  const std::map<std::string, std::size_t>& variables() const { return vars_; }

  /// Derivation from node a's term to node b's term along recorded links.
  Derivation connect(std::size_t a, std::size_t b, const std::string& theory) const {
    std::map<std::size_t, std::pair<std::size_t, std::size_t>> via;  // node -> (previous, link)
    std::deque<std::size_t> queue{a};
    via.emplace(a, std::make_pair(a, links_.size()));
    while (!queue.empty() && !via.contains(b)) {
      std::size_t n = queue.front();
      queue.pop_front();
      if (n >= adjacency_.size()) continue;
      for (std::size_t l : adjacency_[n]) {
        std::size_t m = links_[l].a == n ? links_[l].b : links_[l].a;
        if (via.emplace(m, std::make_pair(n, l)).second) queue.push_back(m);
      }
    }
    std::vector<std::pair<std::size_t, std::size_t>> path;
    for (std::size_t n = b; n != a; n = via.at(n).first) path.push_back({n, via.at(n).second});
    Derivation out{theory, {terms_[a]}, {}, false};
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      const Link& link = links_[it->second];
      out = out.then(link.b == it->first ? link.witness : link.witness.reversed());
    }
    return out;
  }

 private:
  struct Link {
    std::size_t a;
    std::size_t b;
    Derivation witness;
  };
  std::vector<Term> terms_;
  UnionFind classes_;
  std::map<std::string, std::size_t> vars_;
  std::vector<Link> links_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

/// z = F(z,...,z) followed by the z-substituted derivation, when the owner
/// proves the idempotency instance.
inline std::optional<Derivation> inconsistency_from_marks(const Theory& joined, const Theory& owner,
                                                         const Derivation& d) {
  Derivation zd = z_substituted_derivation(joined, d);
  const Term& head = zd.first();
  Identity law{head, Term::var(head.arity() ? head.arg(0).name() : "z")};
  if (head.arity() == 0) return zd;
  EntailOptions quiet;
  quiet.find_countermodel = false;
  auto verdict = entails_flat(saturate(owner), law, quiet);
  if (!verdict.derivation) return zd;
  Derivation prefix = verdict.derivation->reversed();
  prefix.theory = joined.name();
  return prefix.then(zd);
}

}  // namespace detail

/// Projects a derivation of F(x) = y over join_disjoint(first, second) to a
/// flat derivation over the component owning F, plus v = v.
inline ProjectionResult project_to_component(const Theory& first, const Theory& second, const Derivation& d) {
  Theory joined = join_disjoint(first, second);
  Theory second_in_join = renamed_component(second, joined.rename_map());

  if (d.terms.empty()) throw NotAProjectionInstance("derivation has no terms");
  if (auto v = verify_derivation(joined, d); !v)
    throw NotAProjectionInstance("derivation does not verify against " + joined.name() + ": " + v.diagnostic);
  const Term& head = d.first();
  const Term& target = d.last();
  if (head.is_var() || !head.is_flat())
    throw NotAProjectionInstance("first term " + to_string(head) + " is not an application to variables");
  if (!target.is_var()) throw NotAProjectionInstance("last term " + to_string(target) + " is not a variable");

  bool in_first = first.signature().contains(head.name());
  bool in_second = second_in_join.signature().contains(head.name());
  if (in_first && in_second) throw OwnerAmbiguous("symbol '" + head.name() + "' belongs to both components");
  if (!in_first && !in_second) throw NotAProjectionInstance("symbol '" + head.name() + "' belongs to neither component");
  Theory owner = in_first ? first : second_in_join;

  // Shortest successor chain from the root of t0 to an occurrence of y.
  SuccessorGraph graph = build_successor_graph(d);
  Occurrence start{0, Position{}};
  std::map<Occurrence, std::size_t> via{{start, graph.edges.size()}};
  std::deque<Occurrence> queue{start};
  std::optional<Occurrence> goal;
  auto term_of = [&](const Occurrence& o) -> const Term& { return subterm_at(d.terms[o.index], o.position); };
  while (!queue.empty() && !goal) {
    Occurrence o = queue.front();
    queue.pop_front();
    auto it = graph.outgoing.find(o);
    if (it == graph.outgoing.end()) continue;
    for (std::size_t e : it->second) {
      const Occurrence& next = graph.edges[e].to;
      if (!via.emplace(next, e).second) continue;
      if (term_of(next) == target) {
        goal = next;
        break;
      }
      queue.push_back(next);
    }
  }
  if (!goal)
    throw InconsistencyDetected("the root of the first term never reaches " + to_string(target) + "; " +
                                    joined.name() + " is inconsistent",
                                detail::inconsistency_from_marks(joined, owner, d));

  ProjectionResult result;
  result.owner = owner;
  std::vector<std::size_t> chain_edges;
  for (Occurrence o = *goal; o != start; o = graph.edges[via.at(o)].from) chain_edges.push_back(via.at(o));
  std::reverse(chain_edges.begin(), chain_edges.end());
  result.chain.push_back(start);
  for (std::size_t e : chain_edges) {
    result.chain.push_back(graph.edges[e].to);
    result.chain_cases.push_back(graph.edges[e].kind);
  }
  const std::size_t k = chain_edges.size();

  // The first collapsing root step ends the part of the chain headed by
  // owner symbols; everything after it is one node of the class of y.
  std::size_t collapse = k - 1;
  for (std::size_t i = 0; i < k; ++i) {
    const SuccessorEdge& e = graph.edges[chain_edges[i]];
    if (e.kind == EdgeCase::Root && detail::oriented_step(d, e.step, e.reverse).replacement().is_var()) {
      collapse = i;
      break;
    }
  }

  const std::string& jname = joined.name();
  detail::WitnessedClasses classes;
  std::vector<std::vector<std::size_t>> slots(collapse + 1);
  for (std::size_t i = 0; i <= collapse; ++i) {
    const Term& r = term_of(result.chain[i]);
    for (std::size_t j = 0; j < r.arity(); ++j) {
      std::size_t n = classes.node(r.arg(j));
      slots[i].push_back(n);
      if (r.arg(j).is_var()) classes.link_syntactic(n, classes.variable(r.arg(j).name()), jname);
    }
  }
  std::vector<std::size_t> tail(k + 1, 0);
  for (std::size_t i = collapse + 1; i <= k; ++i) {
    tail[i] = classes.node(term_of(result.chain[i]));
    if (term_of(result.chain[i]).is_var())
      classes.link_syntactic(tail[i], classes.variable(term_of(result.chain[i]).name()), jname);
  }

  for (std::size_t i = 0; i < k; ++i) {
    const SuccessorEdge& e = graph.edges[chain_edges[i]];
    if (i > collapse) {
      classes.link(tail[i], tail[i + 1], detail::edge_witness(jname, d, e));
      continue;
    }
    if (e.kind == EdgeCase::Root) {
      DerivationStep st = detail::oriented_step(d, e.step, e.reverse);
      const Term& lhs = st.pattern();
      const Term& rhs = st.replacement();
      std::map<std::string, std::vector<std::size_t>> matched;
      for (std::size_t j = 0; j < lhs.arity(); ++j) matched[lhs.arg(j).name()].push_back(slots[i][j]);
      if (i < collapse)
        for (std::size_t j = 0; j < rhs.arity(); ++j) matched[rhs.arg(j).name()].push_back(slots[i + 1][j]);
      else
        matched[rhs.name()].push_back(tail[i + 1]);
      for (const auto& [_, group] : matched)
        for (std::size_t g = 1; g < group.size(); ++g) classes.link_syntactic(group[0], group[g], jname);
      continue;
    }
    // Positional transport; under case 2 one child is rewritten below.
    std::optional<std::size_t> changed;
    DerivationStep st = detail::oriented_step(d, e.step, e.reverse);
    if (e.kind == EdgeCase::Above) changed = e.from.position.relative(st.position)[0] - 1;
    for (std::size_t j = 0; j < slots[i].size(); ++j) {
      if (changed && *changed == j) {
        Position child = e.from.position.child(j + 1);
        DerivationStep inner = st;
        inner.position = child.relative(st.position);
        Derivation w{jname, {subterm_at(d.terms[e.from.index], child)}, {}, false};
        w.append(inner, subterm_at(d.terms[e.to.index], child));
        classes.link(slots[i][j], slots[i + 1][j], std::move(w));
      } else {
        classes.link_syntactic(slots[i][j], slots[i + 1][j], jname);
      }
    }
  }

  // Resolve classes to variables.
  std::map<std::size_t, std::string> phi;
  for (const auto& [name, n] : classes.variables()) {
    auto [it, inserted] = phi.emplace(classes.find(n), name);
    if (!inserted && it->second != name) {
      Derivation certificate = classes.connect(classes.variables().at(it->second), n, jname);
      throw InconsistencyDetected("the derivation identifies " + it->second + " and " + name + "; " + jname +
                                      " is inconsistent",
                                  certificate);
    }
  }
  auto taken = derivation_variables(d);
  std::size_t fresh = 0;
  auto phi_of = [&](std::size_t n) {
    std::size_t root = classes.find(n);
    auto it = phi.find(root);
    if (it != phi.end()) return Term::var(it->second);
    std::string name;
    do name = canonical_variable(fresh++);
    while (taken.contains(name));
    phi.emplace(root, name);
    return Term::var(name);
  };
  auto u = [&](std::size_t i) {
    const Term& r = term_of(result.chain[i]);
    std::vector<Term> args;
    for (std::size_t n : slots[i]) args.push_back(phi_of(n));
    return Term::app(r.name(), std::move(args));
  };

  Derivation& out = result.derivation;
  out = Derivation{owner.name(), {u(0)}, {}, true};
  for (std::size_t i = 0; i <= collapse; ++i) {
    const SuccessorEdge& e = graph.edges[chain_edges[i]];
    if (e.kind != EdgeCase::Root) continue;
    DerivationStep st = detail::oriented_step(d, e.step, e.reverse);
    Substitution sigma;
    Term current = out.last();
    if (!match_term_into(st.pattern(), current, sigma)) throw Error("projection lost a root match");
    Term next = i < collapse ? u(i + 1) : target;
    if (!match_term_into(st.replacement(), next, sigma)) throw Error("projection lost a root match");
    out.append({st.equation, st.orientation, Position{}, std::move(sigma)}, next);
  }
  if (out.last() != target) throw Error("projection did not reach " + to_string(target));
  if (auto v = verify_derivation(owner, out); !v) throw Error("projected derivation does not verify: " + v.diagnostic);
  return result;
}

}  // namespace linvar
