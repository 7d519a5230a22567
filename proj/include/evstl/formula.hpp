#pragma once

#include <Eigen/Core>

#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "evstl/bool_expr.hpp"

namespace evstl {

/// Raised when a specification or scenario is malformed beyond syntax
/// (unknown identifiers, bad intervals, inconsistent dimensions).
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a spatial gradient is requested at a point where the
/// predicate function is not differentiable (the center of a norm ball,
/// coincident robots, or the peak of an angle predicate).
class GradientSingularity : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Distance under which a norm-based gradient is considered singular.
inline constexpr double kSingularityRadius = 1e-6;

enum class PredicateKind { SphereInner, SphereOuter, PairDistanceMin, AngleAbsTarget, Halfspace };

std::string to_string(PredicateKind kind);
PredicateKind predicate_kind_from_string(std::string_view text);

/// Real-valued function h over the joint state whose sign gives a
/// predicate's truth value (true iff h >= 0).
///
/// `dims` holds joint-state indices. For the pair kind the first half of
/// `dims` belongs to `robots[0]` and the second half to `robots[1]`.
struct PredicateFunction {
  PredicateKind kind = PredicateKind::SphereInner;
  std::vector<int> robots;
  std::vector<std::size_t> dims;

  std::vector<double> center;  // sphere kinds
  double radius = 0.0;         // sphere kinds
  double min_distance = 0.0;   // pair kind
  double target = 0.0;         // angle kind
  double tolerance = 0.0;      // angle kind
  std::vector<double> normal;  // halfspace
  double offset = 0.0;         // halfspace

  /// Throws SpecError when parameters are inconsistent with the kind or
  /// when a dimension index is outside [0, state_dim).
  void validate(std::size_t state_dim) const;
};

struct Predicate {
  std::string name;
  PredicateFunction func;
  bool negated = false;
};

/// h(x), sign-flipped for negated predicates.
double eval_h(const Predicate& pred, const Eigen::VectorXd& x);
double eval_h(const PredicateFunction& func, const Eigen::VectorXd& x);

/// Spatial gradient of eval_h over the joint state. Throws
/// GradientSingularity at non-differentiable points.
Eigen::VectorXd grad_h(const Predicate& pred, const Eigen::VectorXd& x);

/// Name tables that classify identifiers in a specification.
struct Declarations {
  std::map<std::string, Predicate> predicates;
  std::set<std::string> events;

  bool is_predicate(const std::string& name) const { return predicates.count(name) > 0; }
  bool is_event(const std::string& name) const { return events.count(name) > 0; }
  const Predicate& predicate(const std::string& name) const;
};

struct TimeInterval {
  double lower = 0.0;
  double upper = kInfinity;

  bool unbounded() const { return upper == kInfinity; }
  friend bool operator==(const TimeInterval&, const TimeInterval&) = default;
};

std::string to_string(const TimeInterval& interval);

struct PredicateLiteral {
  std::string predicate;
  bool negated = false;

  friend bool operator==(const PredicateLiteral&, const PredicateLiteral&) = default;
};

/// Conjunction of predicate literals (the state-formula layer).
struct PredicateConj {
  std::vector<PredicateLiteral> literals;

  friend bool operator==(const PredicateConj&, const PredicateConj&) = default;
};

/// Left side of a guarded always: either a Boolean formula over
/// environment events or a conjunction of predicate literals.
struct Antecedent {
  std::optional<BoolExpr> events;
  PredicateConj predicates;

  bool over_events() const { return events.has_value(); }
  friend bool operator==(const Antecedent&, const Antecedent&) = default;
};

enum class FormulaKind { Always, Eventually, Until, Implies, Conjunction };

/// Event-based STL formula.
///
///   Always       G[a,b](body)          untimed G(body) is [0, inf)
///   Eventually   F[a,b](body)
///   Until        (body) U[a,b] (goal)
///   Implies      G(antecedent -> children[0])
///   Conjunction  children[0] & children[1] & ...
struct StlFormula {
  FormulaKind kind = FormulaKind::Always;
  TimeInterval interval;
  PredicateConj body;
  PredicateConj goal;
  Antecedent antecedent;
  std::vector<StlFormula> children;

  static StlFormula always(TimeInterval iv, PredicateConj body);
  static StlFormula eventually(TimeInterval iv, PredicateConj body);
  static StlFormula until(TimeInterval iv, PredicateConj left, PredicateConj right);
  static StlFormula implies(Antecedent antecedent, StlFormula body);
  static StlFormula conjunction(std::vector<StlFormula> operands);

  friend bool operator==(const StlFormula&, const StlFormula&) = default;
};

/// Parses the concrete syntax documented in docs/specification-format.md.
/// Throws ParseError for syntax and well-formedness problems.
StlFormula parse_formula(std::string_view text, const Declarations& decls);

/// Canonical text; parse_formula(to_string(f)) == f.
std::string to_string(const StlFormula& formula);
std::string to_string(const PredicateConj& conj);

/// Every predicate literal occurring in the formula, in traversal order.
std::vector<PredicateLiteral> predicate_occurrences(const StlFormula& formula);

/// Sampled execution: joint states and event sets at t = k * dt.
struct Trace {
  double dt = 0.1;
  std::vector<Eigen::VectorXd> states;
  std::vector<std::set<std::string>> events;

  std::size_t size() const { return states.size(); }
  void validate() const;
};

enum class Verdict { Satisfied, Violated, Inconclusive };

std::string to_string(Verdict verdict);

struct MonitorResult {
  Verdict verdict = Verdict::Satisfied;
  /// For violations: the earliest sample at which the violated subformula
  /// was evaluated (or the first failing sample of an always), and its text.
  std::optional<std::size_t> witness_index;
  double witness_time = 0.0;
  std::string witness;
};

/// Offline monitor over a finite trace, evaluated at sample 0.
///
/// Untimed always is checked over the whole recorded trace; bounded
/// obligations that reach past the last sample are Inconclusive unless
/// already decided. Guarded always re-evaluates its body at every rising
/// edge of the antecedent.
MonitorResult monitor(const Trace& trace, const StlFormula& formula, const Declarations& decls);

}  // namespace evstl
