#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "evstl/abstraction.hpp"
#include "evstl/buchi.hpp"
#include "evstl/formula.hpp"

namespace evstl {

/// No outgoing transition of the current state is consistent with the
/// sensed environment.
class InadmissibleEnvironment : public std::runtime_error {
 public:
  InadmissibleEnvironment(const std::string& state, std::set<std::string> events)
      : std::runtime_error("no transition out of " + state + " admits the sensed events"),
        state_(state),
        events_(std::move(events)) {}

  const std::string& state() const { return state_; }
  const std::set<std::string>& events() const { return events_; }

 private:
  std::string state_;
  std::set<std::string> events_;
};

/// No admissible path from the current state reaches an accepting cycle.
class SpecificationUnrealizable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PropRole { Event, Controlled, Observed };

/// Minimal sets of controlled propositions which, set true with every
/// other controlled proposition false, satisfy `label` under `env`.
/// Ordered by size, then lexicographically. Throws std::invalid_argument
/// when the label is unsatisfiable under `env`.
std::vector<std::vector<std::string>> minimal_true_sets(const BoolExpr& label,
                                                        const std::map<std::string, bool>& env,
                                                        const std::set<std::string>& controlled);

/// Symbolic planner over a Büchi automaton: evaluates propositions from
/// the state, keeps the current automaton state and picks the active
/// transition on a shortest path to an accepting cycle.
class Planner {
 public:
  struct Step {
    std::size_t transition = 0;
    std::vector<std::string> active_props;
    std::size_t state = 0;
    bool advanced = false;
  };

  Planner(const BuchiAutomaton& automaton, const Abstraction& abstraction, const Declarations& decls);

  /// Truth of every alphabet symbol: events from `sigma`, predicate
  /// propositions from the sign of h (true iff h >= 0).
  std::uint64_t eval_props(const Eigen::VectorXd& x, const std::set<std::string>& sigma) const;
  std::map<std::string, bool> eval_props_named(const Eigen::VectorXd& x,
                                               const std::set<std::string>& sigma) const;

  /// One planning step. Moves to the active transition's target when its
  /// label holds (never on the first call), then selects a new active
  /// transition for the sensed environment.
  const Step& find_transition(const std::set<std::string>& sigma, const Eigen::VectorXd& x);

  bool has_plan() const { return plan_.has_value(); }
  const Step& plan() const { return *plan_; }
  std::size_t current_state() const { return current_; }
  const std::vector<std::size_t>& suffix_cycle() const { return suffix_; }

  bool label_holds(const Eigen::VectorXd& x, const std::set<std::string>& sigma) const;

  /// Current state is accepting, on the planned suffix cycle, and the
  /// active label holds.
  bool terminal_accepting(const Eigen::VectorXd& x, const std::set<std::string>& sigma) const;

  /// Minimal controlled sets for one transition under the fixed part of
  /// `letter` (events and observed propositions).
  std::vector<std::uint64_t> minimal_sets(std::size_t transition, std::uint64_t letter) const;
  std::vector<std::string> names(std::uint64_t mask) const;

  PropRole role(std::size_t bit) const;
  std::uint64_t fixed_mask() const { return event_mask_ | observed_mask_; }
  std::uint64_t controlled_mask() const { return controlled_mask_; }
  const BuchiAutomaton& automaton() const { return automaton_; }

  /// Per-state path length to an accepting cycle over transitions admitted
  /// by `letter`'s fixed part; npos when unreachable.
  const std::vector<std::size_t>& distances(std::uint64_t letter) const;

  void reset();

 private:
  bool consistent(const GuardCube& cube, std::uint64_t letter) const;
  bool admissible(std::size_t transition, std::uint64_t letter) const;
  std::vector<std::size_t> shortest_cycle(std::size_t goal) const;

  const BuchiAutomaton& automaton_;
  std::vector<std::optional<Predicate>> predicate_of_bit_;
  std::uint64_t event_mask_ = 0;
  std::uint64_t controlled_mask_ = 0;
  std::uint64_t observed_mask_ = 0;
  std::vector<char> goal_;
  mutable std::map<std::uint64_t, std::vector<std::size_t>> distance_cache_;

  std::size_t current_;
  std::optional<Step> plan_;
  std::vector<std::size_t> suffix_;
};

}  // namespace evstl
