#include "evstl/formula.hpp"

#include <cmath>

namespace evstl {

std::string to_string(PredicateKind kind) {
  switch (kind) {
    case PredicateKind::SphereInner:
      return "sphere-inner";
    case PredicateKind::SphereOuter:
      return "sphere-outer";
    case PredicateKind::PairDistanceMin:
      return "pair-distance-min";
    case PredicateKind::AngleAbsTarget:
      return "angle-abs-target";
    case PredicateKind::Halfspace:
      return "halfspace";
  }
  return "?";
}

PredicateKind predicate_kind_from_string(std::string_view text) {
  for (auto kind : {PredicateKind::SphereInner, PredicateKind::SphereOuter,
                    PredicateKind::PairDistanceMin, PredicateKind::AngleAbsTarget,
                    PredicateKind::Halfspace}) {
    if (to_string(kind) == text) return kind;
  }
  throw SpecError("unknown predicate kind '" + std::string(text) + "'");
}

void PredicateFunction::validate(std::size_t state_dim) const {
  if (dims.empty()) throw SpecError("predicate reads no state dimensions");
  for (auto d : dims) {
    if (d >= state_dim) {
      throw SpecError("predicate dimension " + std::to_string(d) + " outside state of size " +
                      std::to_string(state_dim));
    }
  }
  switch (kind) {
    case PredicateKind::SphereInner:
    case PredicateKind::SphereOuter:
      if (center.size() != dims.size()) throw SpecError("sphere center/dims size mismatch");
      if (!(radius > 0)) throw SpecError("sphere radius must be positive");
      break;
    case PredicateKind::PairDistanceMin:
      if (robots.size() != 2 || robots[0] == robots[1]) {
        throw SpecError("pair-distance-min needs two distinct robots");
      }
      if (dims.size() % 2 != 0) throw SpecError("pair-distance-min needs matching dims per robot");
      if (!(min_distance > 0)) throw SpecError("pair-distance-min separation must be positive");
      break;
    case PredicateKind::AngleAbsTarget:
      if (dims.size() != 1) throw SpecError("angle-abs-target reads exactly one dimension");
      if (!(tolerance > 0)) throw SpecError("angle tolerance must be positive");
      break;
    case PredicateKind::Halfspace: {
      if (normal.size() != dims.size()) throw SpecError("halfspace normal/dims size mismatch");
      double n2 = 0;
      for (double a : normal) n2 += a * a;
      if (n2 == 0) throw SpecError("halfspace normal must be nonzero");
      break;
    }
  }
}

namespace {

double distance_to_center(const PredicateFunction& f, const Eigen::VectorXd& x) {
  double s = 0;
  for (std::size_t k = 0; k < f.dims.size(); ++k) {
    double d = x[static_cast<Eigen::Index>(f.dims[k])] - f.center[k];
    s += d * d;
  }
  return std::sqrt(s);
}

double pair_distance(const PredicateFunction& f, const Eigen::VectorXd& x) {
  std::size_t half = f.dims.size() / 2;
  double s = 0;
  for (std::size_t k = 0; k < half; ++k) {
    double d = x[static_cast<Eigen::Index>(f.dims[k])] -
               x[static_cast<Eigen::Index>(f.dims[half + k])];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

double eval_h(const PredicateFunction& f, const Eigen::VectorXd& x) {
  switch (f.kind) {
    case PredicateKind::SphereInner:
      return f.radius - distance_to_center(f, x);
    case PredicateKind::SphereOuter:
      return distance_to_center(f, x) - f.radius;
    case PredicateKind::PairDistanceMin:
      return pair_distance(f, x) - f.min_distance;
    case PredicateKind::AngleAbsTarget: {
      double theta = x[static_cast<Eigen::Index>(f.dims[0])];
      return f.tolerance - std::abs(std::abs(theta) - f.target);
    }
    case PredicateKind::Halfspace: {
      double s = 0;
      for (std::size_t k = 0; k < f.dims.size(); ++k) {
        s += f.normal[k] * x[static_cast<Eigen::Index>(f.dims[k])];
      }
      return s - f.offset;
    }
  }
  return 0.0;
}

double eval_h(const Predicate& pred, const Eigen::VectorXd& x) {
  double h = eval_h(pred.func, x);
  return pred.negated ? -h : h;
}

Eigen::VectorXd grad_h(const Predicate& pred, const Eigen::VectorXd& x) {
  const auto& f = pred.func;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
  auto at = [](std::size_t d) { return static_cast<Eigen::Index>(d); };
  switch (f.kind) {
    case PredicateKind::SphereInner:
    case PredicateKind::SphereOuter: {
      double dist = distance_to_center(f, x);
      if (dist < kSingularityRadius) {
        throw GradientSingularity("predicate '" + pred.name + "' evaluated at its center");
      }
      double sign = f.kind == PredicateKind::SphereInner ? -1.0 : 1.0;
      for (std::size_t k = 0; k < f.dims.size(); ++k) {
        g[at(f.dims[k])] = sign * (x[at(f.dims[k])] - f.center[k]) / dist;
      }
      break;
    }
    case PredicateKind::PairDistanceMin: {
      double dist = pair_distance(f, x);
      if (dist < kSingularityRadius) {
        throw GradientSingularity("predicate '" + pred.name + "' evaluated at coincident robots");
      }
      std::size_t half = f.dims.size() / 2;
      for (std::size_t k = 0; k < half; ++k) {
        double d = (x[at(f.dims[k])] - x[at(f.dims[half + k])]) / dist;
        g[at(f.dims[k])] = d;
        g[at(f.dims[half + k])] = -d;
      }
      break;
    }
    case PredicateKind::AngleAbsTarget: {
      double theta = x[at(f.dims[0])];
      double gap = std::abs(theta) - f.target;
      if (std::abs(gap) < kSingularityRadius) {
        throw GradientSingularity("predicate '" + pred.name + "' evaluated at its target angle");
      }
      // one-sided derivative at theta == 0, turning toward +target
      double sign_theta = theta < 0 ? -1.0 : 1.0;
      double sign_gap = gap < 0 ? -1.0 : 1.0;
      g[at(f.dims[0])] = -sign_gap * sign_theta;
      break;
    }
    case PredicateKind::Halfspace:
      for (std::size_t k = 0; k < f.dims.size(); ++k) g[at(f.dims[k])] = f.normal[k];
      break;
  }
  return pred.negated ? Eigen::VectorXd(-g) : g;
}

const Predicate& Declarations::predicate(const std::string& name) const {
  auto it = predicates.find(name);
  if (it == predicates.end()) throw SpecError("unknown predicate '" + name + "'");
  return it->second;
}

StlFormula StlFormula::always(TimeInterval iv, PredicateConj body) {
  StlFormula f;
  f.kind = FormulaKind::Always;
  f.interval = iv;
  f.body = std::move(body);
  return f;
}

StlFormula StlFormula::eventually(TimeInterval iv, PredicateConj body) {
  StlFormula f;
  f.kind = FormulaKind::Eventually;
  f.interval = iv;
  f.body = std::move(body);
  return f;
}

StlFormula StlFormula::until(TimeInterval iv, PredicateConj left, PredicateConj right) {
  StlFormula f;
  f.kind = FormulaKind::Until;
  f.interval = iv;
  f.body = std::move(left);
  f.goal = std::move(right);
  return f;
}

StlFormula StlFormula::implies(Antecedent antecedent, StlFormula body) {
  StlFormula f;
  f.kind = FormulaKind::Implies;
  f.antecedent = std::move(antecedent);
  f.children.push_back(std::move(body));
  return f;
}

StlFormula StlFormula::conjunction(std::vector<StlFormula> operands) {
  StlFormula f;
  f.kind = FormulaKind::Conjunction;
  f.children = std::move(operands);
  return f;
}

namespace {

void collect_occurrences(const StlFormula& f, std::vector<PredicateLiteral>& out) {
  auto add = [&](const PredicateConj& c) {
    out.insert(out.end(), c.literals.begin(), c.literals.end());
  };
  switch (f.kind) {
    case FormulaKind::Always:
    case FormulaKind::Eventually:
      add(f.body);
      break;
    case FormulaKind::Until:
      add(f.body);
      add(f.goal);
      break;
    case FormulaKind::Implies:
      if (!f.antecedent.over_events()) add(f.antecedent.predicates);
      collect_occurrences(f.children.front(), out);
      break;
    case FormulaKind::Conjunction:
      for (const auto& c : f.children) collect_occurrences(c, out);
      break;
  }
}

}  // namespace

std::vector<PredicateLiteral> predicate_occurrences(const StlFormula& formula) {
  std::vector<PredicateLiteral> out;
  collect_occurrences(formula, out);
  return out;
}

void Trace::validate() const {
  if (!(dt > 0)) throw SpecError("trace sample period must be positive");
  if (states.size() != events.size()) throw SpecError("trace states/events length mismatch");
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Satisfied:
      return "satisfied";
    case Verdict::Violated:
      return "violated";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

}  // namespace evstl
