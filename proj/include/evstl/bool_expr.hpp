#pragma once

#include <functional>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace evstl {

/// Error raised by any of the text parsers, carrying the byte offset of the
/// offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : std::runtime_error(message + " (at offset " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Immutable Boolean expression over named variables.
///
/// Nodes are shared, so copies are cheap. Used for environment antecedents
/// in specifications and as the printable form of automaton labels.
class BoolExpr {
 public:
  enum class Kind { True, False, Var, Not, And, Or };

  BoolExpr();  // constant true

  static BoolExpr constant(bool value);
  static BoolExpr var(std::string name);
  static BoolExpr negate(BoolExpr operand);
  static BoolExpr conjunction(std::vector<BoolExpr> operands);
  static BoolExpr disjunction(std::vector<BoolExpr> operands);

  /// Grammar: or := and ('|' and)* ; and := unary ('&' unary)* ;
  /// unary := '!' unary | '(' or ')' | 'true' | 'false' | identifier
  static BoolExpr parse(std::string_view text);

  Kind kind() const;
  const std::string& name() const;
  const std::vector<BoolExpr>& operands() const;

  bool eval(const std::function<bool(const std::string&)>& value_of) const;
  bool eval(const std::set<std::string>& true_vars) const;

  /// Sorted, duplicate-free variable names.
  std::vector<std::string> vars() const;

  std::string to_string() const;

  friend bool operator==(const BoolExpr& lhs, const BoolExpr& rhs);

 private:
  struct Node;
  explicit BoolExpr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

struct Literal {
  std::string var;
  bool positive = true;

  friend auto operator<=>(const Literal&, const Literal&) = default;
};

/// Conjunction of literals, kept sorted.
using Cube = std::vector<Literal>;

/// Disjunctive normal form. Contradictory cubes are dropped and cubes
/// subsumed by a weaker cube are removed, so an empty result means the
/// expression is unsatisfiable and a single empty cube means it is valid.
std::vector<Cube> to_dnf(const BoolExpr& expr);

BoolExpr from_dnf(const std::vector<Cube>& cubes);

}  // namespace evstl
