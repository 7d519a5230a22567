#include "evstl/buchi.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace evstl {

bool Guard::eval(std::uint64_t letter) const {
  return std::any_of(cubes.begin(), cubes.end(), [&](const GuardCube& c) { return c.eval(letter); });
}

void Guard::simplify() {
  std::erase_if(cubes, [](const GuardCube& c) { return (c.pos & c.neg) != 0; });
  std::sort(cubes.begin(), cubes.end());
  cubes.erase(std::unique(cubes.begin(), cubes.end()), cubes.end());
  auto implies = [](const GuardCube& weak, const GuardCube& strong) {
    return (weak.pos & ~strong.pos) == 0 && (weak.neg & ~strong.neg) == 0;
  };
  std::vector<GuardCube> kept;
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < cubes.size() && !dominated; ++j) {
      dominated = j != i && implies(cubes[j], cubes[i]) && !(implies(cubes[i], cubes[j]) && j > i);
    }
    if (!dominated) kept.push_back(cubes[i]);
  }
  cubes = std::move(kept);
}

std::size_t BuchiAutomaton::intern(const std::string& prop) {
  std::size_t at = find(prop);
  if (at != npos) return at;
  if (alphabet_.size() == 64) throw TranslationError("more than 64 propositions");
  alphabet_.push_back(prop);
  return alphabet_.size() - 1;
}

std::size_t BuchiAutomaton::find(const std::string& prop) const {
  auto it = std::find(alphabet_.begin(), alphabet_.end(), prop);
  return it == alphabet_.end() ? npos : static_cast<std::size_t>(it - alphabet_.begin());
}

std::size_t BuchiAutomaton::add_state(bool accepting, std::string name) {
  if (name.empty()) name = "s" + std::to_string(accepting_.size());
  accepting_.push_back(accepting);
  names_.push_back(std::move(name));
  outgoing_.emplace_back();
  return accepting_.size() - 1;
}

std::size_t BuchiAutomaton::add_transition(std::size_t source, Guard label, std::size_t target) {
  auto [it, fresh] = label_index_.try_emplace(label.cubes, labels_.size());
  if (fresh) labels_.push_back(std::move(label));
  transitions_.push_back({source, it->second, target});
  outgoing_[source].push_back(transitions_.size() - 1);
  return transitions_.size() - 1;
}

std::size_t BuchiAutomaton::add_transition(std::size_t source, const BoolExpr& label,
                                           std::size_t target) {
  Guard g;
  for (const auto& cube : to_dnf(label)) {
    GuardCube c;
    for (const auto& lit : cube) {
      std::uint64_t bit = std::uint64_t{1} << intern(lit.var);
      (lit.positive ? c.pos : c.neg) |= bit;
    }
    g.cubes.push_back(c);
  }
  g.simplify();
  return add_transition(source, std::move(g), target);
}

std::size_t BuchiAutomaton::state_named(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  return it == names_.end() ? npos : static_cast<std::size_t>(it - names_.begin());
}

BoolExpr BuchiAutomaton::label_expr(const BuchiTransition& t) const {
  std::vector<Cube> cubes;
  for (const auto& gc : labels_[t.label].cubes) {
    Cube cube;
    for (std::size_t i = 0; i < alphabet_.size(); ++i) {
      std::uint64_t bit = std::uint64_t{1} << i;
      if (gc.pos & bit) cube.push_back({alphabet_[i], true});
      if (gc.neg & bit) cube.push_back({alphabet_[i], false});
    }
    std::sort(cube.begin(), cube.end());
    cubes.push_back(std::move(cube));
  }
  return from_dnf(cubes);
}

std::uint64_t BuchiAutomaton::encode(const Letter& letter) const {
  std::uint64_t out = 0;
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    if (letter.count(alphabet_[i])) out |= std::uint64_t{1} << i;
  }
  return out;
}

Letter BuchiAutomaton::decode(std::uint64_t letter) const {
  Letter out;
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    if (letter & (std::uint64_t{1} << i)) out.insert(alphabet_[i]);
  }
  return out;
}

std::size_t BuchiAutomaton::prune() {
  std::vector<BuchiTransition> kept;
  for (const auto& t : transitions_) {
    if (labels_[t.label].satisfiable()) kept.push_back(t);
  }
  std::size_t removed = transitions_.size() - kept.size();
  transitions_ = std::move(kept);
  for (auto& out : outgoing_) out.clear();
  for (std::size_t i = 0; i < transitions_.size(); ++i) outgoing_[transitions_[i].source].push_back(i);
  return removed;
}

bool accepts_lasso(const BuchiAutomaton& a, const Word& prefix, const Word& cycle) {
  if (cycle.empty()) throw std::invalid_argument("lasso cycle must be nonempty");
  const std::size_t P = prefix.size(), N = P + cycle.size(), S = a.size();
  if (S == 0) return false;
  std::vector<std::uint64_t> letters;
  for (const auto& l : prefix) letters.push_back(a.encode(l));
  for (const auto& l : cycle) letters.push_back(a.encode(l));
  auto succ_pos = [&](std::size_t i) { return i + 1 < N ? i + 1 : P; };
  auto node = [&](std::size_t pos, std::size_t s) { return pos * S + s; };

  std::vector<std::vector<std::size_t>> edges(N * S);
  for (std::size_t pos = 0; pos < N; ++pos) {
    for (const auto& t : a.transitions()) {
      if (a.label(t).eval(letters[pos])) edges[node(pos, t.source)].push_back(node(succ_pos(pos), t.target));
    }
  }

  auto reach_from = [&](std::size_t start, bool include_start) {
    std::vector<char> seen(N * S, 0);
    std::vector<std::size_t> stack;
    if (include_start) {
      seen[start] = 1;
      stack.push_back(start);
    } else {
      for (std::size_t n : edges[start]) {
        if (!seen[n]) seen[n] = 1, stack.push_back(n);
      }
    }
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t n : edges[v]) {
        if (!seen[n]) seen[n] = 1, stack.push_back(n);
      }
    }
    return seen;
  };

  auto reachable = reach_from(node(0, a.initial()), true);
  for (std::size_t pos = P; pos < N; ++pos) {
    for (std::size_t s = 0; s < S; ++s) {
      std::size_t v = node(pos, s);
      if (!reachable[v] || !a.accepting(s)) continue;
      if (reach_from(v, false)[v]) return true;
    }
  }
  return false;
}

namespace {

class LassoEvaluator {
 public:
  LassoEvaluator(const Word& prefix, const Word& cycle) : P_(prefix.size()) {
    letters_ = prefix;
    letters_.insert(letters_.end(), cycle.begin(), cycle.end());
  }

  std::vector<bool> eval(const LtlFormula& f) const {
    const std::size_t N = letters_.size();
    std::vector<bool> out(N, false);
    auto fixpoint = [&](bool init, const std::function<bool(std::size_t, const std::vector<bool>&)>& step) {
      std::vector<bool> v(N, init);
      for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t k = N; k-- > 0;) {
          bool nv = step(k, v);
          if (nv != v[k]) v[k] = nv, changed = true;
        }
      }
      return v;
    };
    switch (f.kind) {
      case LtlKind::True:
        out.assign(N, true);
        break;
      case LtlKind::False:
        break;
      case LtlKind::Prop:
        for (std::size_t k = 0; k < N; ++k) out[k] = letters_[k].count(f.name) > 0;
        break;
      case LtlKind::Not: {
        auto a = eval(f.args[0]);
        for (std::size_t k = 0; k < N; ++k) out[k] = !a[k];
        break;
      }
      case LtlKind::And:
      case LtlKind::Or: {
        bool is_and = f.kind == LtlKind::And;
        out.assign(N, is_and);
        for (const auto& arg : f.args) {
          auto a = eval(arg);
          for (std::size_t k = 0; k < N; ++k) out[k] = is_and ? out[k] && a[k] : out[k] || a[k];
        }
        break;
      }
      case LtlKind::Implies: {
        auto a = eval(f.args[0]), b = eval(f.args[1]);
        for (std::size_t k = 0; k < N; ++k) out[k] = !a[k] || b[k];
        break;
      }
      case LtlKind::Next: {
        auto a = eval(f.args[0]);
        for (std::size_t k = 0; k < N; ++k) out[k] = a[succ(k)];
        break;
      }
      case LtlKind::Until: {
        auto a = eval(f.args[0]), b = eval(f.args[1]);
        out = fixpoint(false, [&](std::size_t k, const std::vector<bool>& v) { return b[k] || (a[k] && v[succ(k)]); });
        break;
      }
      case LtlKind::Release: {
        auto a = eval(f.args[0]), b = eval(f.args[1]);
        out = fixpoint(true, [&](std::size_t k, const std::vector<bool>& v) { return b[k] && (a[k] || v[succ(k)]); });
        break;
      }
      case LtlKind::Eventually: {
        auto a = eval(f.args[0]);
        out = fixpoint(false, [&](std::size_t k, const std::vector<bool>& v) { return a[k] || v[succ(k)]; });
        break;
      }
      case LtlKind::Always: {
        auto a = eval(f.args[0]);
        out = fixpoint(true, [&](std::size_t k, const std::vector<bool>& v) { return a[k] && v[succ(k)]; });
        break;
      }
    }
    return out;
  }

 private:
  std::size_t succ(std::size_t k) const { return k + 1 < letters_.size() ? k + 1 : P_; }

  Word letters_;
  std::size_t P_;
};

}  // namespace

bool ltl_holds_on_lasso(const LtlFormula& formula, const Word& prefix, const Word& cycle) {
  if (cycle.empty()) throw std::invalid_argument("lasso cycle must be nonempty");
  return LassoEvaluator(prefix, cycle).eval(formula)[0];
}

std::string dump(const BuchiAutomaton& a) {
  std::string out = "initial: " + a.name(a.initial()) + "\naccepting:";
  for (std::size_t s = 0; s < a.size(); ++s) {
    if (a.accepting(s)) out += " " + a.name(s);
  }
  out += "\n";
  for (const auto& t : a.transitions()) {
    auto flag = [&](std::size_t s) { return a.name(s) + (a.accepting(s) ? "*" : ""); };
    out += flag(t.source) + " -- " + a.label_expr(t).to_string() + " --> " + flag(t.target) + "\n";
  }
  return out;
}

}  // namespace evstl
