#pragma once

#include <Eigen/Core>

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "evstl/buchi.hpp"
#include "evstl/controller.hpp"
#include "evstl/formula.hpp"
#include "evstl/planner.hpp"

namespace evstl {

enum class FeedbackKind { PossibleConflict, InadmissibleEnv, Unreachable, QpInfeasible };
enum class Severity { Warning, Fatal };

std::string to_string(FeedbackKind kind);
std::string to_string(Severity severity);

struct FeedbackEvent {
  FeedbackKind kind = FeedbackKind::PossibleConflict;
  Severity severity = Severity::Warning;
  std::string location;  // transition, state or sample
  std::optional<double> time;
  std::optional<std::size_t> robot;
  std::vector<std::string> predicates;
  std::vector<std::string> events;  // environment literals or combination
  std::string detail;
};

/// Conservative emptiness test of {h1 >= 0} ∩ {h2 >= 0} for two predicate
/// literals. nullopt when the pair is outside the supported table.
std::optional<bool> safe_sets_disjoint(const Predicate& p, const Predicate& q);

struct ConflictReport {
  std::vector<FeedbackEvent> conflicts;
  /// Predicate pairs that could share a transition but were not analysed.
  std::vector<std::pair<std::string, std::string>> unchecked;
};

/// For every transition and every minimal controlled set it may demand,
/// test the predicate pairs pairwise. One event per predicate pair.
ConflictReport apriori_conflicts(const Planner& planner, const Abstraction& abstraction,
                                 const Declarations& decls);

struct InadmissibleReport {
  std::string state;
  std::vector<std::set<std::string>> combinations;
};

struct InadmissibleResult {
  std::vector<InadmissibleReport> states;
  bool skipped = false;  // too many events to enumerate
};

/// Per state, the event assignments under which no outgoing label can be
/// satisfied whatever the controlled propositions do.
InadmissibleResult apriori_inadmissible_env(const Planner& planner, std::size_t event_cap = 12);

std::vector<FeedbackEvent> to_events(const InadmissibleResult& result);

/// Fatal Unreachable events for in-window F-kind barriers whose remaining
/// distance exceeds ||u_max|| (b + t_int - t).
std::vector<FeedbackEvent> runtime_check(const std::vector<const ActiveCbf*>& active, const Eigen::VectorXd& x,
                                         double t, const Dynamics& dynamics);

/// Distance from x to {h >= 0} as used by runtime_check.
double distance_to_satisfaction(const Predicate& pred, const Eigen::VectorXd& x);
/// Euclidean norm of the control bound over the dimensions `pred` reads.
double speed_bound(const Predicate& pred, const Dynamics& dynamics);

FeedbackEvent report_infeasible(double t, std::size_t robot, const LinearConstraint& constraint,
                                const RobotModel& model);

}  // namespace evstl
