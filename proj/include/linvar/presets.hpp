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

#include <optional>
#include <string>
#include <vector>

#include "linvar/theory.hpp"

namespace linvar::presets {

inline Theory maltsev() {
  return Theory("Maltsev", {{"p", 3}}, {"p(x,y,y) = x", "p(y,y,x) = x"});
}

inline Theory majority() {
  return Theory("Majority", {{"m", 3}}, {"m(x,x,y) = x", "m(x,y,x) = x", "m(y,x,x) = x"});
}

inline Theory minority() {
  return Theory("Minority", {{"r", 3}}, {"r(x,x,y) = y", "r(x,y,x) = y", "r(y,x,x) = y"});
}

/// Idempotent commutative binary operation.
inline Theory semilattice() {
  return Theory("Semilattice", {{"m", 2}}, {"m(x,x) = x", "m(x,y) = m(y,x)"});
}

/// Idempotent ternary operation invariant under all argument permutations.
inline Theory totally_symmetric() {
  return Theory("TotallySymmetric", {{"s", 3}},
                {"s(x,x,x) = x", "s(x,y,z) = s(y,x,z)", "s(x,y,z) = s(x,z,y)"});
}

inline Theory empty() { return Theory("Empty", {}); }

namespace detail {
inline Term app(const std::string& f, std::initializer_list<const char*> vars) {
  std::vector<Term> args;
  for (const char* v : vars) args.push_back(Term::var(v));
  return Term::app(f, std::move(args));
}
}  // namespace detail

/// Jónsson terms d0..dk.
inline Theory jonsson(std::size_t k) {
  Signature sig;
  for (std::size_t i = 0; i <= k; ++i) sig.add({"d" + std::to_string(i), 3});
  Theory t("Jonsson" + std::to_string(k), sig);
  auto d = [](std::size_t i) { return "d" + std::to_string(i); };
  t.add({detail::app(d(0), {"x", "y", "z"}), Term::var("x")});
  t.add({detail::app(d(k), {"x", "y", "z"}), Term::var("z")});
  for (std::size_t i = 0; i <= k; ++i) t.add({detail::app(d(i), {"x", "y", "x"}), Term::var("x")});
  for (std::size_t i = 0; i < k; ++i) {
    if (i % 2 == 0)
      t.add({detail::app(d(i), {"x", "x", "z"}), detail::app(d(i + 1), {"x", "x", "z"})});
    else
      t.add({detail::app(d(i), {"x", "z", "z"}), detail::app(d(i + 1), {"x", "z", "z"})});
  }
  return t;
}

/// Day terms m0..mk.
inline Theory day(std::size_t k) {
  Signature sig;
  for (std::size_t i = 0; i <= k; ++i) sig.add({"m" + std::to_string(i), 4});
  Theory t("Day" + std::to_string(k), sig);
  auto m = [](std::size_t i) { return "m" + std::to_string(i); };
  t.add({detail::app(m(0), {"x", "y", "z", "u"}), Term::var("x")});
  t.add({detail::app(m(k), {"x", "y", "z", "u"}), Term::var("u")});
  for (std::size_t i = 0; i <= k; ++i) t.add({detail::app(m(i), {"x", "y", "y", "x"}), Term::var("x")});
  for (std::size_t i = 0; i < k; ++i) {
    if (i % 2 == 0)
      t.add({detail::app(m(i), {"x", "x", "u", "u"}), detail::app(m(i + 1), {"x", "x", "u", "u"})});
    else
      t.add({detail::app(m(i), {"x", "y", "y", "u"}), detail::app(m(i + 1), {"x", "y", "y", "u"})});
  }
  return t;
}

/// Hagemann–Mitschke terms q1..qk.
inline Theory hagemann_mitschke(std::size_t k) {
  Signature sig;
  for (std::size_t i = 1; i <= k; ++i) sig.add({"q" + std::to_string(i), 3});
  Theory t("HagemannMitschke" + std::to_string(k), sig);
  auto q = [](std::size_t i) { return "q" + std::to_string(i); };
  t.add({Term::var("x"), detail::app(q(1), {"x", "y", "y"})});
  for (std::size_t i = 1; i < k; ++i)
    t.add({detail::app(q(i), {"x", "x", "y"}), detail::app(q(i + 1), {"x", "y", "y"})});
  t.add({detail::app(q(k), {"x", "x", "y"}), Term::var("y")});
  return t;
}

/// The built-in corpus.
inline std::vector<Theory> all() {
  return {maltsev(),   majority(),  semilattice(),          minority(),
          totally_symmetric(), jonsson(3), day(2), hagemann_mitschke(2), hagemann_mitschke(3)};
}

/// Looks up a preset by name, including parameterized ones such as
/// "Jonsson4" or "HagemannMitschke3".
inline std::optional<Theory> by_name(const std::string& name) {
  for (const Theory& t : all())
    if (t.name() == name) return t;
  if (name == "Empty") return empty();
  auto parameter = [&](const std::string& stem) -> std::optional<std::size_t> {
    if (name.size() <= stem.size() || name.compare(0, stem.size(), stem) != 0) return std::nullopt;
    std::string digits = name.substr(stem.size());
    if (digits.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
    return std::stoul(digits);
  };
  if (auto k = parameter("Jonsson"); k && *k >= 1) return jonsson(*k);
  if (auto k = parameter("Day"); k && *k >= 1) return day(*k);
  if (auto k = parameter("HagemannMitschke"); k && *k >= 1) return hagemann_mitschke(*k);
  return std::nullopt;
}

}  // namespace linvar::presets
