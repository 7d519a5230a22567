#include "evstl/planner.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <tuple>

namespace evstl {

namespace {

constexpr std::size_t npos = BuchiAutomaton::npos;

std::vector<std::uint64_t> minimize(std::vector<std::uint64_t> sets) {
  std::sort(sets.begin(), sets.end());
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
  std::vector<std::uint64_t> out;
  for (auto s : sets) {
    bool has_subset = std::any_of(sets.begin(), sets.end(), [&](std::uint64_t o) {
      return o != s && (o & ~s) == 0;
    });
    if (!has_subset) out.push_back(s);
  }
  return out;
}

}  // namespace

std::vector<std::vector<std::string>> minimal_true_sets(const BoolExpr& label,
                                                        const std::map<std::string, bool>& env,
                                                        const std::set<std::string>& controlled) {
  std::vector<std::vector<std::string>> candidates;
  for (const auto& cube : to_dnf(label)) {
    bool ok = true;
    std::vector<std::string> forced;
    for (const auto& lit : cube) {
      auto it = env.find(lit.var);
      if (it != env.end() && it->second != lit.positive) ok = false;
      if (it == env.end() && controlled.count(lit.var) && lit.positive) forced.push_back(lit.var);
    }
    if (!ok) continue;
    std::sort(forced.begin(), forced.end());
    candidates.push_back(std::move(forced));
  }
  if (candidates.empty()) throw std::invalid_argument("label unsatisfiable under the environment");
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  std::vector<std::vector<std::string>> out;
  for (const auto& c : candidates) {
    bool has_subset = std::any_of(candidates.begin(), candidates.end(), [&](const auto& o) {
      return o != c && std::includes(c.begin(), c.end(), o.begin(), o.end());
    });
    if (!has_subset) out.push_back(c);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& l, const auto& r) { return l.size() < r.size(); });
  return out;
}

Planner::Planner(const BuchiAutomaton& automaton, const Abstraction& abstraction, const Declarations& decls)
    : automaton_(automaton), current_(automaton.initial()) {
  const auto& alphabet = automaton.alphabet();
  predicate_of_bit_.resize(alphabet.size());
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    const ControlledProp* prop = abstraction.find(alphabet[i]);
    std::uint64_t bit = std::uint64_t{1} << i;
    if (!prop) {
      event_mask_ |= bit;
      continue;
    }
    bool observed = std::any_of(abstraction.observed.begin(), abstraction.observed.end(),
                                [&](const ControlledProp& p) { return p.name == prop->name; });
    (observed ? observed_mask_ : controlled_mask_) |= bit;
    Predicate pred = decls.predicate(prop->predicate);
    pred.negated = prop->negated;
    predicate_of_bit_[i] = std::move(pred);
  }

  goal_.assign(automaton.size(), 0);
  for (std::size_t s = 0; s < automaton.size(); ++s) {
    if (automaton.accepting(s)) goal_[s] = !shortest_cycle(s).empty();
  }
}

void Planner::reset() {
  current_ = automaton_.initial();
  plan_.reset();
  suffix_.clear();
}

PropRole Planner::role(std::size_t bit) const {
  std::uint64_t m = std::uint64_t{1} << bit;
  if (controlled_mask_ & m) return PropRole::Controlled;
  if (observed_mask_ & m) return PropRole::Observed;
  return PropRole::Event;
}

std::uint64_t Planner::eval_props(const Eigen::VectorXd& x, const std::set<std::string>& sigma) const {
  std::uint64_t out = 0;
  const auto& alphabet = automaton_.alphabet();
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    bool value = predicate_of_bit_[i] ? eval_h(*predicate_of_bit_[i], x) >= 0.0 : sigma.count(alphabet[i]) > 0;
    if (value) out |= std::uint64_t{1} << i;
  }
  return out;
}

std::map<std::string, bool> Planner::eval_props_named(const Eigen::VectorXd& x,
                                                      const std::set<std::string>& sigma) const {
  std::uint64_t letter = eval_props(x, sigma);
  std::map<std::string, bool> out;
  const auto& alphabet = automaton_.alphabet();
  for (std::size_t i = 0; i < alphabet.size(); ++i) out[alphabet[i]] = (letter >> i) & 1;
  return out;
}

bool Planner::consistent(const GuardCube& cube, std::uint64_t letter) const {
  std::uint64_t fixed = fixed_mask();
  std::uint64_t fixed_true = letter & fixed;
  return (cube.pos & fixed & ~fixed_true) == 0 && (cube.neg & fixed_true) == 0;
}

bool Planner::admissible(std::size_t transition, std::uint64_t letter) const {
  const auto& cubes = automaton_.label(automaton_.transitions()[transition]).cubes;
  return std::any_of(cubes.begin(), cubes.end(), [&](const GuardCube& c) { return consistent(c, letter); });
}

std::vector<std::uint64_t> Planner::minimal_sets(std::size_t transition, std::uint64_t letter) const {
  std::vector<std::uint64_t> sets;
  for (const auto& c : automaton_.label(automaton_.transitions()[transition]).cubes) {
    if (consistent(c, letter)) sets.push_back(c.pos & controlled_mask_);
  }
  sets = minimize(std::move(sets));
  std::sort(sets.begin(), sets.end(), [&](std::uint64_t l, std::uint64_t r) {
    int cl = std::popcount(l), cr = std::popcount(r);
    if (cl != cr) return cl < cr;
    return names(l) < names(r);
  });
  return sets;
}

std::vector<std::string> Planner::names(std::uint64_t mask) const {
  std::vector<std::string> out;
  const auto& alphabet = automaton_.alphabet();
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    if ((mask >> i) & 1) out.push_back(alphabet[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> Planner::shortest_cycle(std::size_t goal) const {
  std::vector<std::size_t> parent(automaton_.size(), npos);
  std::deque<std::size_t> queue;
  for (std::size_t t : automaton_.outgoing(goal)) {
    std::size_t dst = automaton_.transitions()[t].target;
    if (dst == goal) return {goal};
    if (parent[dst] == npos) parent[dst] = goal, queue.push_back(dst);
  }
  while (!queue.empty()) {
    std::size_t s = queue.front();
    queue.pop_front();
    for (std::size_t t : automaton_.outgoing(s)) {
      std::size_t dst = automaton_.transitions()[t].target;
      if (dst == goal) {
        std::vector<std::size_t> cycle{s};
        while (parent[cycle.back()] != goal) cycle.push_back(parent[cycle.back()]);
        cycle.push_back(goal);
        std::reverse(cycle.begin(), cycle.end());
        return cycle;
      }
      if (parent[dst] == npos) parent[dst] = s, queue.push_back(dst);
    }
  }
  return {};
}

const std::vector<std::size_t>& Planner::distances(std::uint64_t letter) const {
  std::uint64_t key = letter & fixed_mask();
  auto cached = distance_cache_.find(key);
  if (cached != distance_cache_.end()) return cached->second;
  const auto& transitions = automaton_.transitions();
  std::vector<std::vector<std::size_t>> reverse(automaton_.size());
  for (std::size_t t = 0; t < transitions.size(); ++t) {
    if (admissible(t, letter)) reverse[transitions[t].target].push_back(transitions[t].source);
  }
  std::vector<std::size_t> dist(automaton_.size(), npos);
  std::deque<std::size_t> queue;
  for (std::size_t s = 0; s < automaton_.size(); ++s) {
    if (goal_[s]) dist[s] = 0, queue.push_back(s);
  }
  while (!queue.empty()) {
    std::size_t s = queue.front();
    queue.pop_front();
    for (std::size_t p : reverse[s]) {
      if (dist[p] == npos) dist[p] = dist[s] + 1, queue.push_back(p);
    }
  }
  return distance_cache_.emplace(key, std::move(dist)).first->second;
}

bool Planner::label_holds(const Eigen::VectorXd& x, const std::set<std::string>& sigma) const {
  if (!plan_) return false;
  return automaton_.label(automaton_.transitions()[plan_->transition]).eval(eval_props(x, sigma));
}

bool Planner::terminal_accepting(const Eigen::VectorXd& x, const std::set<std::string>& sigma) const {
  if (!plan_ || !automaton_.accepting(current_)) return false;
  if (std::find(suffix_.begin(), suffix_.end(), current_) == suffix_.end()) return false;
  return label_holds(x, sigma);
}

const Planner::Step& Planner::find_transition(const std::set<std::string>& sigma, const Eigen::VectorXd& x) {
  std::uint64_t letter = eval_props(x, sigma);
  bool advanced = false;
  if (plan_) {
    const auto& active = automaton_.transitions()[plan_->transition];
    if (automaton_.label(active).eval(letter)) {
      current_ = active.target;
      advanced = true;
    }
  }

  const auto& dist = distances(letter);
  const auto& transitions = automaton_.transitions();
  bool any_admissible = false;
  std::optional<std::tuple<std::size_t, int, std::size_t, std::size_t>> best;
  std::uint64_t best_set = 0;
  for (std::size_t t : automaton_.outgoing(current_)) {
    if (!admissible(t, letter)) continue;
    any_admissible = true;
    std::size_t d = dist[transitions[t].target];
    if (d == npos) continue;
    std::uint64_t cheapest = minimal_sets(t, letter).front();
    auto key = std::make_tuple(d + 1, std::popcount(cheapest), transitions[t].target, t);
    if (!best || key < *best) best = key, best_set = cheapest;
  }
  if (!any_admissible) throw InadmissibleEnvironment(automaton_.name(current_), sigma);
  if (!best) {
    throw SpecificationUnrealizable("no admissible path from " + automaton_.name(current_) +
                                    " reaches an accepting cycle");
  }

  Step step;
  step.transition = std::get<3>(*best);
  step.active_props = names(best_set);
  step.state = current_;
  step.advanced = advanced;
  plan_ = step;

  // follow the shortest admissible path to its goal to record the suffix
  std::size_t s = transitions[step.transition].target;
  while (dist[s] > 0) {
    for (std::size_t t : automaton_.outgoing(s)) {
      if (admissible(t, letter) && dist[transitions[t].target] + 1 == dist[s]) {
        s = transitions[t].target;
        break;
      }
    }
  }
  suffix_ = shortest_cycle(s);
  if (goal_[current_] && dist[transitions[step.transition].target] == 0 &&
      std::find(suffix_.begin(), suffix_.end(), current_) == suffix_.end()) {
    auto own = shortest_cycle(current_);
    if (std::find(own.begin(), own.end(), transitions[step.transition].target) != own.end()) suffix_ = own;
  }
  return *plan_;
}

}  // namespace evstl
