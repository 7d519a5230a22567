#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "evstl/bool_expr.hpp"
#include "evstl/ltl.hpp"

namespace evstl {

/// Conjunction of literals over an automaton alphabet, as bit masks.
struct GuardCube {
  std::uint64_t pos = 0;
  std::uint64_t neg = 0;

  bool eval(std::uint64_t letter) const { return (letter & pos) == pos && (letter & neg) == 0; }
  friend bool operator==(const GuardCube&, const GuardCube&) = default;
  friend auto operator<=>(const GuardCube&, const GuardCube&) = default;
};

/// Transition label in disjunctive normal form. No cubes means unsatisfiable.
struct Guard {
  std::vector<GuardCube> cubes;

  bool eval(std::uint64_t letter) const;
  bool satisfiable() const { return !cubes.empty(); }
  /// Drops contradictory cubes and cubes implied by a weaker one.
  void simplify();
};

struct BuchiTransition {
  std::size_t source = 0;
  std::size_t label = 0;  // index into BuchiAutomaton::labels()
  std::size_t target = 0;
};

class TranslationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Letter = std::set<std::string>;
using Word = std::vector<Letter>;

/// Transition-labelled Büchi automaton with state-based acceptance.
class BuchiAutomaton {
 public:
  /// Alphabet position of a proposition, adding it when new. At most 64.
  std::size_t intern(const std::string& prop);
  const std::vector<std::string>& alphabet() const { return alphabet_; }
  /// Position of `prop`, or npos.
  std::size_t find(const std::string& prop) const;

  std::size_t add_state(bool accepting, std::string name = {});
  std::size_t add_transition(std::size_t source, Guard label, std::size_t target);
  std::size_t add_transition(std::size_t source, const BoolExpr& label, std::size_t target);
  void set_initial(std::size_t state) { initial_ = state; }

  std::size_t size() const { return accepting_.size(); }
  std::size_t initial() const { return initial_; }
  bool accepting(std::size_t state) const { return accepting_[state]; }
  const std::string& name(std::size_t state) const { return names_[state]; }
  /// State named `name`, or npos.
  std::size_t state_named(const std::string& name) const;

  const std::vector<BuchiTransition>& transitions() const { return transitions_; }
  const std::vector<std::size_t>& outgoing(std::size_t state) const { return outgoing_[state]; }
  const Guard& label(const BuchiTransition& t) const { return labels_[t.label]; }
  const std::vector<Guard>& labels() const { return labels_; }

  BoolExpr label_expr(const BuchiTransition& t) const;
  std::uint64_t encode(const Letter& letter) const;
  Letter decode(std::uint64_t letter) const;

  /// Removes transitions with unsatisfiable labels; returns how many.
  std::size_t prune();

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<std::string> alphabet_;
  std::vector<bool> accepting_;
  std::vector<std::string> names_;
  std::vector<Guard> labels_;
  std::map<std::vector<GuardCube>, std::size_t> label_index_;
  std::vector<BuchiTransition> transitions_;
  std::vector<std::vector<std::size_t>> outgoing_;
  std::size_t initial_ = 0;
};

struct TranslateOptions {
  std::size_t state_cap = 100000;
};

/// Tableau translation to a generalized automaton followed by counter
/// degeneralization. The alphabet is the formula's propositions in sorted
/// order. Throws TranslationError when the state cap is exceeded.
BuchiAutomaton translate(const LtlFormula& formula, const TranslateOptions& options = {});

/// Whether prefix·cycle^ω has an accepting run. `cycle` must be nonempty.
bool accepts_lasso(const BuchiAutomaton& automaton, const Word& prefix, const Word& cycle);

/// Direct evaluation of LTL semantics on prefix·cycle^ω.
bool ltl_holds_on_lasso(const LtlFormula& formula, const Word& prefix, const Word& cycle);

/// One transition per line, `src -- label --> dst`, preceded by a header
/// naming the initial and accepting states.
std::string dump(const BuchiAutomaton& automaton);

}  // namespace evstl
