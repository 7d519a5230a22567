#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evstl/formula.hpp"
#include "evstl/ltl.hpp"

namespace evstl {

/// Temporal role of an abstracted predicate occurrence. Selects the
/// barrier-function shape instantiated for it at run time.
enum class TemporalKind { Eventually, Always, UntilLeft, UntilRight };

std::string to_string(TemporalKind kind);
TemporalKind temporal_kind_from_string(const std::string& text);

/// Proposition standing in for one predicate occurrence, remembering the
/// interval and operator it appeared under.
struct ControlledProp {
  std::string name;
  std::string predicate;
  bool negated = false;  // literal polarity in the formula
  TimeInterval interval;
  TemporalKind kind = TemporalKind::Eventually;
  /// For until operands: the propositions of the opposite operand.
  std::vector<std::string> partners;

  friend bool operator==(const ControlledProp&, const ControlledProp&) = default;
};

struct Abstraction {
  LtlFormula ltl;
  /// Controllable propositions, in formula traversal order.
  std::vector<ControlledProp> controlled;
  /// Propositions from predicate antecedents of guarded always. Their truth
  /// is read from the state; the planner never tries to steer them.
  std::vector<ControlledProp> observed;

  const ControlledProp* find(const std::string& name) const;
};

/// Rewrites an Event-based STL formula into untimed LTL: timed F/G/U
/// become F/G/U and every predicate literal becomes a fresh proposition
/// named `p_<predicate>_<a>_<b>` (`not_` prefix for negated literals, a
/// numeric suffix when the name is already taken).
Abstraction abstract(const StlFormula& formula);

}  // namespace evstl
