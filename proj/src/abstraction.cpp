#include "evstl/abstraction.hpp"

#include <charconv>
#include <set>

namespace evstl {

std::string to_string(TemporalKind kind) {
  switch (kind) {
    case TemporalKind::Eventually:
      return "F";
    case TemporalKind::Always:
      return "G";
    case TemporalKind::UntilLeft:
      return "U-left";
    case TemporalKind::UntilRight:
      return "U-right";
  }
  return "?";
}

TemporalKind temporal_kind_from_string(const std::string& text) {
  for (auto k : {TemporalKind::Eventually, TemporalKind::Always, TemporalKind::UntilLeft,
                 TemporalKind::UntilRight}) {
    if (to_string(k) == text) return k;
  }
  throw SpecError("unknown temporal kind '" + text + "'");
}

const ControlledProp* Abstraction::find(const std::string& name) const {
  for (const auto* table : {&controlled, &observed}) {
    for (const auto& p : *table) {
      if (p.name == name) return &p;
    }
  }
  return nullptr;
}

namespace {

std::string bound_text(double v) {
  if (v == kInfinity) return "inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, end);
  for (auto& c : s) {
    if (c == '.') c = 'p';
    if (c == '-') c = 'm';
    if (c == '+') c = '_';
  }
  return s;
}

class Abstractor {
 public:
  Abstraction run(const StlFormula& f) {
    Abstraction out;
    out.ltl = rewrite(f, out);
    return out;
  }

 private:
  std::string fresh_name(const PredicateLiteral& lit, const TimeInterval& iv) {
    std::string base = "p_" + std::string(lit.negated ? "not_" : "") + lit.predicate + "_" +
                       bound_text(iv.lower) + "_" + bound_text(iv.upper);
    std::string name = base;
    for (int n = 2; taken_.count(name); ++n) name = base + "_" + std::to_string(n);
    taken_.insert(name);
    return name;
  }

  std::vector<ControlledProp> props_for(const PredicateConj& conj, const TimeInterval& iv,
                                        TemporalKind kind) {
    std::vector<ControlledProp> out;
    for (const auto& lit : conj.literals) {
      ControlledProp p;
      p.name = fresh_name(lit, iv);
      p.predicate = lit.predicate;
      p.negated = lit.negated;
      p.interval = iv;
      p.kind = kind;
      out.push_back(std::move(p));
    }
    return out;
  }

  static LtlFormula conj_of(const std::vector<ControlledProp>& props) {
    std::vector<LtlFormula> leaves;
    for (const auto& p : props) leaves.push_back(LtlFormula::prop(p.name));
    return LtlFormula::conjunction(std::move(leaves));
  }

  static LtlFormula from_events(const BoolExpr& e) {
    switch (e.kind()) {
      case BoolExpr::Kind::True:
        return LtlFormula::constant(true);
      case BoolExpr::Kind::False:
        return LtlFormula::constant(false);
      case BoolExpr::Kind::Var:
        return LtlFormula::prop(e.name());
      case BoolExpr::Kind::Not:
        return LtlFormula::negate(from_events(e.operands().front()));
      case BoolExpr::Kind::And:
      case BoolExpr::Kind::Or: {
        std::vector<LtlFormula> parts;
        for (const auto& c : e.operands()) parts.push_back(from_events(c));
        return e.kind() == BoolExpr::Kind::And ? LtlFormula::conjunction(std::move(parts))
                                               : LtlFormula::disjunction(std::move(parts));
      }
    }
    return LtlFormula::constant(true);
  }

  LtlFormula rewrite(const StlFormula& f, Abstraction& out) {
    auto keep = [&](std::vector<ControlledProp>& props, std::vector<ControlledProp>& table) {
      table.insert(table.end(), props.begin(), props.end());
    };
    switch (f.kind) {
      case FormulaKind::Eventually: {
        auto props = props_for(f.body, f.interval, TemporalKind::Eventually);
        keep(props, out.controlled);
        return LtlFormula::eventually(conj_of(props));
      }
      case FormulaKind::Always: {
        auto props = props_for(f.body, f.interval, TemporalKind::Always);
        keep(props, out.controlled);
        return LtlFormula::always(conj_of(props));
      }
      case FormulaKind::Until: {
        auto left = props_for(f.body, f.interval, TemporalKind::UntilLeft);
        auto right = props_for(f.goal, f.interval, TemporalKind::UntilRight);
        std::vector<std::string> left_names, right_names;
        for (const auto& p : left) left_names.push_back(p.name);
        for (const auto& p : right) right_names.push_back(p.name);
        for (auto& p : left) p.partners = right_names;
        for (auto& p : right) p.partners = left_names;
        LtlFormula ltl = LtlFormula::until(conj_of(left), conj_of(right));
        keep(left, out.controlled);
        keep(right, out.controlled);
        return ltl;
      }
      case FormulaKind::Implies: {
        LtlFormula lhs;
        if (f.antecedent.over_events()) {
          lhs = from_events(*f.antecedent.events);
        } else {
          auto props = props_for(f.antecedent.predicates, TimeInterval{}, TemporalKind::Always);
          keep(props, out.observed);
          lhs = conj_of(props);
        }
        LtlFormula rhs = rewrite(f.children.front(), out);
        return LtlFormula::always(LtlFormula::implies(std::move(lhs), std::move(rhs)));
      }
      case FormulaKind::Conjunction: {
        std::vector<LtlFormula> parts;
        for (const auto& c : f.children) parts.push_back(rewrite(c, out));
        return LtlFormula::conjunction(std::move(parts));
      }
    }
    return LtlFormula::constant(true);
  }

  std::set<std::string> taken_;
};

}  // namespace

Abstraction abstract(const StlFormula& formula) { return Abstractor().run(formula); }

}  // namespace evstl
