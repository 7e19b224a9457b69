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

// linvar command-line tool.
//
// Exit codes: 0 definitive answer, 1 usage or validation error, 2 unknown
// (search bounds exhausted).

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "linvar/linvar.hpp"

namespace {

using namespace linvar;

constexpr const char* kVersion = "0.1.0";

enum Exit { kDefinitive = 0, kInvalid = 1, kUnknown = 2 };

struct Options {
  std::vector<std::string> paths;
  std::optional<std::size_t> budget;
  int min_size = 2;
  int max_size = 3;
  std::string refute;
  std::string json_path;
  std::size_t threads = 0;
  bool order = false;
  bool iterate_all = false;
  bool check_decomposition = false;
  bool sufficient_only = false;
};

struct Outcome {
  int code = kDefinitive;
  Json payload = Json::object();
};

/// A theory file, or the name of a built-in preset when no such file exists.
Theory load_theory(const std::string& arg) {
  if (!std::filesystem::exists(arg)) {
    if (auto preset = presets::by_name(arg)) return *preset;
    throw Error("file not found: '" + arg + "'");
  }
  return parse_theory(read_file(arg));
}

std::optional<std::size_t> effective_budget(const Options& o) {
  if (o.budget) return o.budget;
  if (const char* env = std::getenv("LINVAR_BUDGET"); env && *env) {
    try {
      return static_cast<std::size_t>(std::stoul(env));
    } catch (const std::exception&) {
      throw Error(std::string("LINVAR_BUDGET is not a number: '") + env + "'");
    }
  }
  return std::nullopt;
}

std::size_t effective_threads(const Options& o) {
  if (o.threads) return o.threads;
  return std::max<unsigned>(1, std::thread::hardware_concurrency());
}

void print_derivation(const Derivation& d) {
  std::cout << "  " << to_string(d.terms.front()) << "\n";
  for (std::size_t i = 0; i < d.steps.size(); ++i) {
    const auto& s = d.steps[i];
    std::cout << "  = " << to_string(d.terms[i + 1]) << "    [" << to_string(s.equation)
              << (s.orientation == Orientation::Forward ? "" : ", reversed") << " at " << to_string(s.position)
              << "]\n";
  }
}

Outcome run_validate(const Options& o) {
  Theory t = load_theory(o.paths.at(0));
  ValidationReport r = validate(t, effective_budget(o));
  std::cout << "theory " << t.name() << ": " << t.identities().size() << " axioms\n";
  std::cout << "linear: " << (r.is_linear ? "yes" : "no") << "\n";
  for (const auto& e : r.offending) std::cout << "  non-linear axiom: " << to_string(e) << "\n";
  for (const auto& [symbol, status] : r.idempotency)
    std::cout << "idempotent " << symbol << ": " << to_string(status) << "\n";
  std::cout << (r.linear_idempotent() ? "valid linear idempotent theory" : "not a linear idempotent theory") << "\n";
  return {r.linear_idempotent() ? kDefinitive : kInvalid, to_json(r)};
}

Outcome run_derive(const Options& o) {
  Theory t = load_theory(o.paths.at(0));
  detail::require_linear_idempotent(t, validate(t, effective_budget(o)));
  DerivativeKind kind = o.order ? DerivativeKind::Order : DerivativeKind::Derivative;
  IterateOptions io;
  io.budget = effective_budget(o);
  io.entail.find_countermodel = false;
  if (!o.iterate_all) {
    Theory next = kind == DerivativeKind::Order ? order_derivative(t, io.budget) : derivative(t, io.budget);
    std::cout << render_theory(next);
    return {kDefinitive, {{"theory", to_json(next)}}};
  }
  IterationTrace trace = iterate(t, kind, io);
  for (std::size_t k = 0; k < trace.stages.size(); ++k) {
    std::cout << "# stage " << k << (trace.stages[k].consistency.entailed() ? " (inconsistent)" : "") << "\n";
    std::cout << render_theory(trace.stages[k].theory) << "\n";
  }
  std::cout << "# stopped at stage " << trace.stop_index() << ": " << to_string(trace.reason) << "\n";
  return {kDefinitive, to_json(trace)};
}

Outcome run_classify(const Options& o) {
  Theory t = load_theory(o.paths.at(0));
  ClassifyOptions co;
  co.budget = effective_budget(o);
  co.threads = effective_threads(o);
  co.sufficient_only = o.sufficient_only;
  ClassificationReport r = classify(t, co);
  std::cout << "theory " << r.theory << (r.sufficient_only ? " (sufficient conditions only)" : "") << "\n";
  bool unknown = false;
  for (Property p : kProperties) {
    const Verdict& v = r.verdict(p);
    unknown = unknown || v.answer == Answer::Unknown;
    std::cout << (p == Property::CM ? "CM" : p == Property::NCI ? "NCI" : "n-permutable") << ": "
              << to_string(v.answer);
    if (v.derivation)
      std::cout << " (stage " << v.stages_used << " inconsistent, " << v.derivation->length() << "-step certificate)";
    else if (v.model)
      std::cout << " (stage " << v.stages_used << " has a model of size " << v.model->size << ")";
    if (!v.note.empty()) std::cout << " [" << v.note << "]";
    std::cout << "\n";
  }
  return {unknown ? kUnknown : kDefinitive, to_json(r)};
}

Outcome run_entail(const Options& o) {
  Theory t = load_theory(o.paths.at(0));
  if (o.paths.size() < 2) throw CLI::ValidationError("entail needs a goal identity");
  Identity goal = parse_identity(o.paths[1]);
  t.check_term(goal.lhs);
  t.check_term(goal.rhs);
  if (goal.is_flat() && t.signature().size() > 0 && validate(t).is_linear) {
    std::size_t budget = effective_budget(o).value_or(default_budget(t));
    budget = std::max(budget, goal.variables().size());
    EntailOptions eo;
    eo.model_min = o.min_size;
    eo.model_max = o.max_size;
    auto v = entails_flat(saturate(t, budget), goal, eo);
    switch (v.kind) {
      case EntailmentVerdict::Kind::Entailed:
        std::cout << "entailed; " << v.derivation->length() << "-step flat derivation\n";
        print_derivation(*v.derivation);
        std::cout << to_json(*v.derivation).dump(2) << "\n";
        break;
      case EntailmentVerdict::Kind::NotEntailedWithModel:
        std::cout << "not entailed; countermodel size " << v.model->size << "\n" << to_json(*v.model).dump() << "\n";
        std::cout << "assignment " << to_json(v.assignment).dump() << "\n";
        break;
      case EntailmentVerdict::Kind::NotEntailed:
        std::cout << "not entailed; no countermodel of size " << o.min_size << ".." << o.max_size << "\n";
        break;
    }
    return {kDefinitive, to_json(v)};
  }
  auto proof = bfs_prove(t, goal);
  if (proof.proved()) {
    std::cout << "entailed; " << proof.derivation->length() << "-step derivation\n";
    print_derivation(*proof.derivation);
    return {kDefinitive, {{"verdict", "entailed"}, {"derivation", to_json(*proof.derivation)}}};
  }
  auto model = refute_entailment(t, goal, o.min_size, o.max_size);
  if (model.found()) {
    std::cout << "not entailed; countermodel size " << model.algebra.size << "\n" << to_json(model.algebra).dump() << "\n";
    return {kDefinitive, {{"verdict", "not-entailed-with-model"}, {"model", to_json(model.algebra)}}};
  }
  std::cout << "unknown: no proof within search bounds and no countermodel\n";
  return {kUnknown, {{"verdict", "unknown"}}};
}

Outcome run_models(const Options& o) {
  Theory t = load_theory(o.paths.at(0));
  ModelSearchOptions mo;
  mo.idempotent = validate(t, effective_budget(o)).idempotent();
  std::optional<Disequality> goal;
  if (!o.refute.empty()) {
    Identity e = parse_identity(o.refute);
    t.check_term(e.lhs);
    t.check_term(e.rhs);
    goal = Disequality{e.lhs, e.rhs, {}};
  }
  auto r = find_model(t, o.min_size, o.max_size, goal, mo);
  if (r.found()) {
    std::cout << "model of size " << r.algebra.size << "\n" << to_json(r.algebra).dump(2) << "\n";
    if (goal) std::cout << "assignment " << to_json(r.assignment).dump() << "\n";
    Json payload{{"status", "found"}, {"algebra", to_json(r.algebra)}};
    if (goal) payload["assignment"] = to_json(r.assignment);
    return {kDefinitive, payload};
  }
  bool limit = r.status == ModelSearchResult::Status::LimitReached;
  std::cout << (limit ? "search limit reached" : "no model") << " in sizes " << o.min_size << ".." << o.max_size
            << "\n";
  return {kUnknown, {{"status", limit ? "limit-reached" : "none-in-range"}}};
}

Outcome run_join(const Options& o) {
  if (o.paths.size() < 2) throw CLI::ValidationError("join needs two theories");
  Theory a = load_theory(o.paths[0]);
  Theory b = load_theory(o.paths[1]);
  Theory j = join_disjoint(a, b);
  if (!o.check_decomposition) {
    std::cout << render_theory(j);
    return {kDefinitive, to_json(j)};
  }
  ClassifyOptions co;
  co.budget = effective_budget(o);
  co.threads = effective_threads(o);
  auto r = check_join_decomposition(a, b, co);
  for (const auto& s : r.stages)
    std::cout << to_string(s.kind) << " stage " << s.stage << ": " << (s.equal ? "join commutes" : "MISMATCH") << "\n";
  for (const auto& p : r.properties)
    std::cout << describe(p.property) << ": join " << (p.join ? "yes" : "no") << " = " << (p.first ? "yes" : "no")
              << " or " << (p.second ? "yes" : "no") << (p.holds() ? "" : "  VIOLATED") << "\n";
  std::cout << (r.holds() ? "decomposition holds" : "decomposition FAILS") << "\n";
  return {kDefinitive, to_json(r)};
}

Outcome run_project(const Options& o) {
  if (o.paths.size() < 3) throw CLI::ValidationError("project needs two theories and a derivation");
  Theory a = load_theory(o.paths[0]);
  Theory b = load_theory(o.paths[1]);
  Derivation d = derivation_from_json(Json::parse(read_file(o.paths[2])));
  try {
    ProjectionResult r = project_to_component(a, b, d);
    bool ok = verify_derivation(r.owner, r.derivation).ok;
    std::cout << "projected onto " << r.owner.name() << " (" << r.derivation.length() << " steps, "
              << (ok ? "verified" : "NOT verified") << ")\n";
    print_derivation(r.derivation);
    Json payload = to_json(r.derivation);
    payload["verified"] = ok;
    payload["owner"] = r.owner.name();
    std::cout << payload.dump(2) << "\n";
    return {ok ? kDefinitive : kInvalid, payload};
  } catch (const InconsistencyDetected& e) {
    std::cout << "inconsistency detected: " << e.what() << "\n";
    Json payload{{"inconsistent", true}, {"message", e.what()}};
    if (e.certificate()) {
      print_derivation(*e.certificate());
      payload["certificate"] = to_json(*e.certificate());
    }
    return {kDefinitive, payload};
  }
}

Outcome run_check(const Options& o) {
  if (o.paths.size() < 2) throw CLI::ValidationError("check-derivation needs a theory and a derivation");
  Theory t = load_theory(o.paths[0]);
  Derivation d = derivation_from_json(Json::parse(read_file(o.paths[1])));
  auto v = verify_derivation(t, d);
  if (v.ok) {
    std::cout << "valid derivation of " << to_string(d.first()) << " = " << to_string(d.last()) << " in "
              << d.length() << " steps\n";
    return {kDefinitive, {{"valid", true}}};
  }
  std::cout << "invalid: " << v.diagnostic << "\n";
  Json payload{{"valid", false}, {"diagnostic", v.diagnostic}};
  if (v.failing_step) payload["failing_step"] = *v.failing_step + 1;
  return {kInvalid, payload};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decide congruence modularity, congruence identities and n-permutability of linear idempotent theories"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, const std::string& paths_help, int expected) {
    sub->add_option("paths", o.paths, paths_help)->required()->expected(1, expected);
    sub->add_option("--budget", o.budget, "variable budget for flat saturation")->check(CLI::PositiveNumber);
    sub->add_option("--json", o.json_path, "write a JSON run report to this path");
    sub->add_option("--threads", o.threads, "worker threads (default: all cores)");
  };

  auto* validate_cmd = app.add_subcommand("validate", "check linearity and idempotency");
  common(validate_cmd, "theory file", 1);
  auto* derive_cmd = app.add_subcommand("derive", "compute the derivative or order derivative");
  common(derive_cmd, "theory file", 1);
  derive_cmd->add_flag("--order", o.order, "use the order derivative");
  derive_cmd->add_flag("--iterate", o.iterate_all, "iterate to inconsistency or fixpoint");
  auto* classify_cmd = app.add_subcommand("classify", "decide CM, NCI and n-permutability");
  common(classify_cmd, "theory file", 1);
  classify_cmd->add_flag("--sufficient-only", o.sufficient_only,
                         "accept non-linear idempotent theories; report only sufficient conditions");
  auto* entail_cmd = app.add_subcommand("entail", "decide a linear identity");
  common(entail_cmd, "theory file and goal \"lhs = rhs\"", 2);
  entail_cmd->add_option("--min", o.min_size, "smallest countermodel size");
  entail_cmd->add_option("--max", o.max_size, "largest countermodel size");
  auto* models_cmd = app.add_subcommand("models", "search for finite models");
  common(models_cmd, "theory file", 1);
  models_cmd->add_option("--min", o.min_size, "smallest model size");
  models_cmd->add_option("--max", o.max_size, "largest model size");
  models_cmd->add_option("--refute", o.refute, "identity the model must violate");
  auto* join_cmd = app.add_subcommand("join", "disjoint join of two theories");
  common(join_cmd, "two theory files", 2);
  join_cmd->add_flag("--check-decomposition", o.check_decomposition, "compare stages and properties");
  auto* project_cmd = app.add_subcommand("project", "project a join derivation onto one component");
  common(project_cmd, "two theory files and a derivation JSON file", 3);
  auto* check_cmd = app.add_subcommand("check-derivation", "verify a derivation JSON file");
  common(check_cmd, "theory file and derivation JSON file", 2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "validate") outcome = run_validate(o);
    else if (command == "derive") outcome = run_derive(o);
    else if (command == "classify") outcome = run_classify(o);
    else if (command == "entail") outcome = run_entail(o);
    else if (command == "models") outcome = run_models(o);
    else if (command == "join") outcome = run_join(o);
    else if (command == "project") outcome = run_project(o);
    else outcome = run_check(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    outcome = {kInvalid, {{"error", e.what()}}};
  }

  if (!o.json_path.empty()) {
    Json argv_json = Json::array();
    for (int i = 0; i < argc; ++i) argv_json.push_back(argv[i]);
    Json budget_json = "default";
    try {
      if (auto budget = effective_budget(o)) budget_json = *budget;
    } catch (const std::exception&) {
      budget_json = "invalid";
    }
    Json report{{"command", std::move(argv_json)},
                {"version", kVersion},
                {"budget", std::move(budget_json)},
                {"wall_ms", std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count()},
                {"exit_code", outcome.code},
                {"result", outcome.payload}};
    try {
      write_file(o.json_path, report.dump(2) + "\n");
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kInvalid;
    }
  }
  return outcome.code;
}
