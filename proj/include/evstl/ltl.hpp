#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace evstl {

enum class LtlKind { True, False, Prop, Not, And, Or, Implies, Next, Until, Release, Eventually, Always };

/// Untimed LTL formula over named propositions.
struct LtlFormula {
  LtlKind kind = LtlKind::True;
  std::string name;  // Prop only
  std::vector<LtlFormula> args;

  static LtlFormula constant(bool value);
  static LtlFormula prop(std::string name);
  static LtlFormula negate(LtlFormula f);
  static LtlFormula conjunction(std::vector<LtlFormula> fs);
  static LtlFormula disjunction(std::vector<LtlFormula> fs);
  static LtlFormula implies(LtlFormula lhs, LtlFormula rhs);
  static LtlFormula next(LtlFormula f);
  static LtlFormula until(LtlFormula lhs, LtlFormula rhs);
  static LtlFormula release(LtlFormula lhs, LtlFormula rhs);
  static LtlFormula eventually(LtlFormula f);
  static LtlFormula always(LtlFormula f);

  /// Sorted, duplicate-free proposition names.
  std::vector<std::string> props() const;

  /// Number of X/U/R/F/G operators.
  std::size_t temporal_depth_count() const;

  friend bool operator==(const LtlFormula&, const LtlFormula&) = default;
};

/// Spin-like syntax: `->` (right associative) < `|` < `&` < `U`,`R` < unary
/// `!`, `X`, `F`, `G`. Constants are `true` and `false`.
LtlFormula parse_ltl(std::string_view text);

std::string to_string(const LtlFormula& f);

}  // namespace evstl
