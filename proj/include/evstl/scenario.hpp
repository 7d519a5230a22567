#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "evstl/abstraction.hpp"
#include "evstl/buchi.hpp"
#include "evstl/cbf.hpp"
#include "evstl/controller.hpp"
#include "evstl/feedback.hpp"
#include "evstl/formula.hpp"

namespace evstl {

struct EventChange {
  double t = 0.0;
  std::set<std::string> events;
};

/// Everything needed to run one specification: robots, declarations,
/// formula text, timing and the event source.
struct Scenario {
  std::string name;
  Dynamics dynamics;
  Eigen::VectorXd x0;
  double dt = 0.1;
  double horizon = 10.0;
  ClassK gain;
  Declarations decls;
  std::string formula;
  bool interactive = false;
  std::vector<EventChange> changes;  // sorted by time

  std::size_t samples() const;  // horizon / dt + 1
  /// Event set of the scripted source at time t.
  std::set<std::string> events_at(double t) const;
  /// Index of the robot whose state contains joint dimension `dim`.
  std::size_t robot_of(std::size_t dim) const;
};

/// Parses the JSON scenario format described in docs/. Throws SpecError
/// (or ParseError for the formula) on malformed input.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::filesystem::path& path);

struct CompiledSpec {
  StlFormula formula;
  Abstraction abstraction;
  std::vector<CbfTemplate> templates;
  BuchiAutomaton automaton;
  ConflictReport conflicts;
  InadmissibleResult inadmissible;
  double compile_seconds = 0.0;
  std::uint64_t source_hash = 0;

  /// A-priori warnings: conflicts then inadmissible environments.
  std::vector<FeedbackEvent> apriori() const;
};

/// Parse, abstract, translate, run the a-priori checks, and confirm the
/// initial state admits a transition. Throws SpecError when it does not.
CompiledSpec compile(const Scenario& scenario, const TranslateOptions& options = {});

std::string to_json(const CompiledSpec& compiled);
/// Rebuilds a compiled artifact; the scenario supplies the declarations.
CompiledSpec compiled_from_json(const std::string& json_text, const Scenario& scenario);

std::uint64_t fnv1a(std::string_view bytes);

/// Compiles, reusing `<stem>.<hash>.compiled.json` beside the scenario
/// file when its hash matches the file content.
CompiledSpec compile_cached(const std::filesystem::path& scenario_path, const Scenario& scenario);

}  // namespace evstl
