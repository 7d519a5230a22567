#include <cmath>

#include "evstl/formula.hpp"

namespace evstl {

namespace {

class TraceMonitor {
 public:
  TraceMonitor(const Trace& trace, const Declarations& decls) : trace_(trace), decls_(decls) {}

  MonitorResult eval(const StlFormula& f, std::size_t k) const {
    switch (f.kind) {
      case FormulaKind::Always:
        return eval_always(f, k);
      case FormulaKind::Eventually:
        return eval_eventually(f, k);
      case FormulaKind::Until:
        return eval_until(f, k);
      case FormulaKind::Implies:
        return eval_implies(f, k);
      case FormulaKind::Conjunction: {
        MonitorResult out;
        for (const auto& child : f.children) out = combine(out, eval(child, k));
        return out;
      }
    }
    return {};
  }

 private:
  std::size_t last() const { return trace_.size() - 1; }

  std::size_t steps(double seconds) const {
    return static_cast<std::size_t>(std::llround(seconds / trace_.dt));
  }

  // Window [k+a, k+b] in samples; `hi` saturates for unbounded intervals.
  std::pair<std::size_t, std::size_t> window(const TimeInterval& iv, std::size_t k) const {
    std::size_t lo = k + steps(iv.lower);
    std::size_t hi = iv.unbounded() ? std::numeric_limits<std::size_t>::max() : k + steps(iv.upper);
    return {lo, hi};
  }

  bool literal_holds(const PredicateLiteral& lit, std::size_t k) const {
    double h = eval_h(decls_.predicate(lit.predicate), trace_.states[k]);
    return (lit.negated ? -h : h) >= 0.0;
  }

  bool conj_holds(const PredicateConj& c, std::size_t k) const {
    for (const auto& lit : c.literals) {
      if (!literal_holds(lit, k)) return false;
    }
    return true;
  }

  bool antecedent_holds(const Antecedent& a, std::size_t k) const {
    if (a.over_events()) return a.events->eval(trace_.events[k]);
    return conj_holds(a.predicates, k);
  }

  MonitorResult violated(const StlFormula& f, std::size_t at) const {
    MonitorResult r;
    r.verdict = Verdict::Violated;
    r.witness_index = at;
    r.witness_time = static_cast<double>(at) * trace_.dt;
    r.witness = to_string(f);
    return r;
  }

  static MonitorResult inconclusive(const StlFormula& f) {
    MonitorResult r;
    r.verdict = Verdict::Inconclusive;
    r.witness = to_string(f);
    return r;
  }

  static MonitorResult combine(const MonitorResult& a, const MonitorResult& b) {
    if (a.verdict == Verdict::Violated && b.verdict == Verdict::Violated) {
      return *b.witness_index < *a.witness_index ? b : a;
    }
    if (a.verdict == Verdict::Violated) return a;
    if (b.verdict == Verdict::Violated) return b;
    if (a.verdict == Verdict::Inconclusive) return a;
    return b;
  }

  MonitorResult eval_always(const StlFormula& f, std::size_t k) const {
    auto [lo, hi] = window(f.interval, k);
    for (std::size_t j = lo; j <= std::min(hi, last()); ++j) {
      if (!conj_holds(f.body, j)) return violated(f, j);
    }
    if (!f.interval.unbounded() && hi > last()) return inconclusive(f);
    return {};
  }

  MonitorResult eval_eventually(const StlFormula& f, std::size_t k) const {
    auto [lo, hi] = window(f.interval, k);
    for (std::size_t j = lo; j <= std::min(hi, last()); ++j) {
      if (conj_holds(f.body, j)) return {};
    }
    if (hi <= last()) return violated(f, k);
    return inconclusive(f);
  }

  MonitorResult eval_until(const StlFormula& f, std::size_t k) const {
    auto [lo, hi] = window(f.interval, k);
    for (std::size_t j = lo; j <= std::min(hi, last()); ++j) {
      bool left = conj_holds(f.body, j);
      if (left && conj_holds(f.goal, j)) return {};
      if (!left) return violated(f, k);
    }
    if (hi <= last()) return violated(f, k);
    return inconclusive(f);
  }

  MonitorResult eval_implies(const StlFormula& f, std::size_t k) const {
    MonitorResult out;
    bool previous = false;
    for (std::size_t j = k; j <= last(); ++j) {
      bool now = antecedent_holds(f.antecedent, j);
      if (now && (j == k || !previous)) out = combine(out, eval(f.children.front(), j));
      previous = now;
    }
    return out;
  }

  const Trace& trace_;
  const Declarations& decls_;
};

}  // namespace

MonitorResult monitor(const Trace& trace, const StlFormula& formula, const Declarations& decls) {
  trace.validate();
  if (trace.size() == 0) {
    MonitorResult r;
    r.verdict = Verdict::Inconclusive;
    r.witness = to_string(formula);
    return r;
  }
  return TraceMonitor(trace, decls).eval(formula, 0);
}

}  // namespace evstl
