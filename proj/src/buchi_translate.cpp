#include <algorithm>
#include <deque>
#include <map>
#include <tuple>

#include "evstl/buchi.hpp"

namespace evstl {

namespace {

enum class Op { True, False, Lit, And, Or, Next, Until, Release, Eventually, Always };

struct Node {
  Op op = Op::True;
  int a = -1;
  int b = -1;
  int bit = -1;
  bool positive = true;
};

struct Term {
  std::uint64_t pos = 0;
  std::uint64_t neg = 0;
  std::uint64_t postponed = 0;
  std::vector<int> next;

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term&, const Term&) = default;
};

bool subset(std::uint64_t x, std::uint64_t y) { return (x & ~y) == 0; }

bool dominates(const Term& x, const Term& y) {
  return subset(x.pos, y.pos) && subset(x.neg, y.neg) && subset(x.postponed, y.postponed) &&
         std::includes(y.next.begin(), y.next.end(), x.next.begin(), x.next.end());
}

void reduce(std::vector<Term>& terms) {
  std::sort(terms.begin(), terms.end());
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
  if (terms.size() > 512) return;
  std::vector<Term> kept;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    bool drop = false;
    for (std::size_t j = 0; j < terms.size() && !drop; ++j) {
      drop = j != i && dominates(terms[j], terms[i]);
    }
    if (!drop) kept.push_back(terms[i]);
  }
  terms = std::move(kept);
}

std::vector<Term> product(const std::vector<Term>& xs, const std::vector<Term>& ys) {
  std::vector<Term> out;
  for (const auto& x : xs) {
    for (const auto& y : ys) {
      Term t;
      t.pos = x.pos | y.pos;
      t.neg = x.neg | y.neg;
      if (t.pos & t.neg) continue;
      t.postponed = x.postponed | y.postponed;
      std::set_union(x.next.begin(), x.next.end(), y.next.begin(), y.next.end(), std::back_inserter(t.next));
      out.push_back(std::move(t));
    }
  }
  reduce(out);
  return out;
}

class Tableau {
 public:
  explicit Tableau(const LtlFormula& f) {
    for (const auto& p : f.props()) alphabet_.push_back(p);
    root_ = nnf(f, false);
  }

  BuchiAutomaton build(const TranslateOptions& options) {
    BuchiAutomaton out;
    for (const auto& p : alphabet_) out.intern(p);
    if (nodes_[root_].op == Op::False) {
      out.add_state(false);
      return out;
    }

    // generalized automaton: states are sets of obligations
    struct GEdge {
      std::size_t target;
      std::uint64_t acc;
      Guard guard;
    };
    std::map<std::vector<int>, std::size_t> ids;
    std::vector<std::vector<int>> sets;
    std::vector<std::vector<GEdge>> edges;
    auto gstate = [&](const std::vector<int>& s) {
      auto [it, fresh] = ids.try_emplace(s, sets.size());
      if (fresh) {
        if (sets.size() >= options.state_cap) {
          throw TranslationError("automaton exceeds state cap of " + std::to_string(options.state_cap));
        }
        sets.push_back(s);
        edges.emplace_back();
      }
      return it->second;
    };
    gstate(nodes_[root_].op == Op::True ? std::vector<int>{} : std::vector<int>{root_});
    const std::size_t k = eventualities_.size();
    const std::uint64_t all = k == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1;
    for (std::size_t q = 0; q < sets.size(); ++q) {
      std::vector<Term> terms{Term{}};
      for (int member : sets[q]) terms = product(terms, expand(member));
      std::map<std::pair<std::size_t, std::uint64_t>, Guard> grouped;
      for (const auto& t : terms) {
        std::size_t target = gstate(t.next);
        grouped[{target, all & ~t.postponed}].cubes.push_back({t.pos, t.neg});
      }
      for (auto& [key, guard] : grouped) {
        guard.simplify();
        edges[q].push_back({key.first, key.second, std::move(guard)});
      }
    }

    // counter degeneralization
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> ba_ids;
    std::deque<std::pair<std::size_t, std::size_t>> queue;
    auto bstate = [&](std::size_t q, std::size_t j) {
      auto [it, fresh] = ba_ids.try_emplace({q, j}, out.size());
      if (fresh) {
        if (out.size() >= options.state_cap) {
          throw TranslationError("automaton exceeds state cap of " + std::to_string(options.state_cap));
        }
        out.add_state(j == k);
        queue.emplace_back(q, j);
      }
      return it->second;
    };
    out.set_initial(bstate(0, 0));
    while (!queue.empty()) {
      auto [q, j] = queue.front();
      queue.pop_front();
      std::size_t src = ba_ids.at({q, j});
      std::map<std::pair<std::size_t, std::size_t>, Guard> merged;
      for (const auto& e : edges[q]) {
        std::size_t level = j == k ? 0 : j;
        while (level < k && ((e.acc >> level) & 1)) ++level;
        auto& g = merged[{e.target, level}];
        g.cubes.insert(g.cubes.end(), e.guard.cubes.begin(), e.guard.cubes.end());
      }
      for (auto& [key, guard] : merged) {
        guard.simplify();
        if (!guard.satisfiable()) continue;
        std::size_t dst = bstate(key.first, key.second);
        out.add_transition(src, std::move(guard), dst);
      }
    }
    return out;
  }

 private:
  int intern(Node n) {
    auto key = std::make_tuple(static_cast<int>(n.op), n.a, n.b, n.bit, n.positive);
    auto [it, fresh] = index_.try_emplace(key, static_cast<int>(nodes_.size()));
    if (fresh) {
      nodes_.push_back(n);
      if (n.op == Op::Until || n.op == Op::Eventually) {
        if (eventualities_.size() == 64) throw TranslationError("more than 64 eventualities");
        eventualities_[it->second] = static_cast<int>(eventualities_.size());
      }
    }
    return it->second;
  }

  int constant(bool v) { return intern({v ? Op::True : Op::False}); }

  int binary(Op op, int a, int b) {
    Op ka = nodes_[a].op, kb = nodes_[b].op;
    if (op == Op::And) {
      if (ka == Op::False || kb == Op::False) return constant(false);
      if (ka == Op::True) return b;
      if (kb == Op::True) return a;
    }
    if (op == Op::Or) {
      if (ka == Op::True || kb == Op::True) return constant(true);
      if (ka == Op::False) return b;
      if (kb == Op::False) return a;
    }
    if ((op == Op::And || op == Op::Or) && a == b) return a;
    if (op == Op::Until || op == Op::Release) {
      if (kb == Op::True || kb == Op::False) return b;
      if (op == Op::Until && ka == Op::True) return unary(Op::Eventually, b);
      if (op == Op::Until && ka == Op::False) return b;
      if (op == Op::Release && ka == Op::False) return unary(Op::Always, b);
      if (op == Op::Release && ka == Op::True) return b;
    }
    return intern({op, a, b});
  }

  int unary(Op op, int a) {
    Op ka = nodes_[a].op;
    if (ka == Op::True || ka == Op::False) return a;
    return intern({op, a});
  }

  int nnf(const LtlFormula& f, bool neg) {
    auto fold = [&](Op op) {
      int acc = nnf(f.args[0], neg);
      for (std::size_t i = 1; i < f.args.size(); ++i) acc = binary(op, acc, nnf(f.args[i], neg));
      return acc;
    };
    switch (f.kind) {
      case LtlKind::True:
        return constant(!neg);
      case LtlKind::False:
        return constant(neg);
      case LtlKind::Prop: {
        auto it = std::find(alphabet_.begin(), alphabet_.end(), f.name);
        Node n{Op::Lit};
        n.bit = static_cast<int>(it - alphabet_.begin());
        n.positive = !neg;
        return intern(n);
      }
      case LtlKind::Not:
        return nnf(f.args[0], !neg);
      case LtlKind::And:
        return fold(neg ? Op::Or : Op::And);
      case LtlKind::Or:
        return fold(neg ? Op::And : Op::Or);
      case LtlKind::Implies:
        return neg ? binary(Op::And, nnf(f.args[0], false), nnf(f.args[1], true))
                   : binary(Op::Or, nnf(f.args[0], true), nnf(f.args[1], false));
      case LtlKind::Next:
        return unary(Op::Next, nnf(f.args[0], neg));
      case LtlKind::Until:
        return binary(neg ? Op::Release : Op::Until, nnf(f.args[0], neg), nnf(f.args[1], neg));
      case LtlKind::Release:
        return binary(neg ? Op::Until : Op::Release, nnf(f.args[0], neg), nnf(f.args[1], neg));
      case LtlKind::Eventually:
        return unary(neg ? Op::Always : Op::Eventually, nnf(f.args[0], neg));
      case LtlKind::Always:
        return unary(neg ? Op::Eventually : Op::Always, nnf(f.args[0], neg));
    }
    return constant(true);
  }

  const std::vector<Term>& expand(int id) {
    auto cached = memo_.find(id);
    if (cached != memo_.end()) return cached->second;
    const Node n = nodes_[id];
    std::vector<Term> out;
    Term self;
    self.next = {id};
    auto postponing = [&] {
      Term t = self;
      t.postponed = std::uint64_t{1} << eventualities_.at(id);
      return t;
    };
    switch (n.op) {
      case Op::True:
        out = {Term{}};
        break;
      case Op::False:
        break;
      case Op::Lit: {
        Term t;
        (n.positive ? t.pos : t.neg) = std::uint64_t{1} << n.bit;
        out = {t};
        break;
      }
      case Op::And:
        out = product(expand(n.a), expand(n.b));
        break;
      case Op::Or:
        out = expand(n.a);
        for (const auto& t : expand(n.b)) out.push_back(t);
        reduce(out);
        break;
      case Op::Next: {
        Term t;
        t.next = {n.a};
        out = {t};
        break;
      }
      case Op::Until:
        out = expand(n.b);
        for (const auto& t : product(expand(n.a), {postponing()})) out.push_back(t);
        reduce(out);
        break;
      case Op::Release:
        out = product(expand(n.a), expand(n.b));
        for (const auto& t : product(expand(n.b), {self})) out.push_back(t);
        reduce(out);
        break;
      case Op::Eventually:
        out = expand(n.a);
        out.push_back(postponing());
        reduce(out);
        break;
      case Op::Always:
        out = product(expand(n.a), {self});
        break;
    }
    return memo_.emplace(id, std::move(out)).first->second;
  }

  std::vector<std::string> alphabet_;
  std::vector<Node> nodes_;
  std::map<std::tuple<int, int, int, int, bool>, int> index_;
  std::map<int, int> eventualities_;
  std::map<int, std::vector<Term>> memo_;
  int root_ = -1;
};

}  // namespace

BuchiAutomaton translate(const LtlFormula& formula, const TranslateOptions& options) {
  return Tableau(formula).build(options);
}

}  // namespace evstl
