#include "evstl/feedback.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <sstream>

namespace evstl {

std::string to_string(FeedbackKind kind) {
  switch (kind) {
    case FeedbackKind::PossibleConflict:
      return "PossibleConflict";
    case FeedbackKind::InadmissibleEnv:
      return "InadmissibleEnv";
    case FeedbackKind::Unreachable:
      return "Unreachable";
    case FeedbackKind::QpInfeasible:
      return "QpInfeasible";
  }
  return "?";
}

std::string to_string(Severity severity) { return severity == Severity::Warning ? "warning" : "fatal"; }

namespace {

enum class Shape { Ball, Outside, Half, Angle };

struct Region {
  Shape shape;
  std::vector<std::size_t> dims;
  std::vector<double> vec;  // center or normal
  double scalar = 0.0;      // radius or offset
  double lo = 0.0, hi = 0.0;
};

std::optional<Region> region_of(const Predicate& p) {
  const auto& f = p.func;
  switch (f.kind) {
    case PredicateKind::SphereInner:
    case PredicateKind::SphereOuter: {
      bool inside = (f.kind == PredicateKind::SphereInner) != p.negated;
      return Region{inside ? Shape::Ball : Shape::Outside, f.dims, f.center, f.radius};
    }
    case PredicateKind::Halfspace: {
      double s = p.negated ? -1.0 : 1.0;
      std::vector<double> normal;
      for (double a : f.normal) normal.push_back(s * a);
      return Region{Shape::Half, f.dims, normal, s * f.offset};
    }
    case PredicateKind::AngleAbsTarget: {
      if (p.negated) return std::nullopt;
      Region r{Shape::Angle, f.dims, {}, 0.0};
      r.lo = std::max(0.0, f.target - f.tolerance);
      r.hi = f.target + f.tolerance;
      return r;
    }
    case PredicateKind::PairDistanceMin:
      return std::nullopt;
  }
  return std::nullopt;
}

// Restrict a region to `common`; nullopt when the projection is the whole
// subspace.
std::optional<Region> project(const Region& r, const std::vector<std::size_t>& common) {
  Region out = r;
  out.dims = common;
  out.vec.clear();
  for (std::size_t d : common) {
    auto k = static_cast<std::size_t>(std::find(r.dims.begin(), r.dims.end(), d) - r.dims.begin());
    if (!r.vec.empty()) out.vec.push_back(r.vec[k]);
  }
  bool covers = common.size() == r.dims.size();
  if (r.shape == Shape::Outside && !covers) return std::nullopt;
  if (r.shape == Shape::Half && !covers) {
    for (std::size_t k = 0; k < r.dims.size(); ++k) {
      if (std::find(common.begin(), common.end(), r.dims[k]) == common.end() && r.vec[k] != 0.0) return std::nullopt;
    }
  }
  return out;
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

std::optional<bool> disjoint(const Region& p, const Region& q) {
  if (p.shape > q.shape) return disjoint(q, p);
  switch (p.shape) {
    case Shape::Ball:
      switch (q.shape) {
        case Shape::Ball:
          return distance(p.vec, q.vec) >= p.scalar + q.scalar;
        case Shape::Outside:
          return distance(p.vec, q.vec) + p.scalar <= q.scalar;
        case Shape::Half:
          return dot(q.vec, p.vec) + p.scalar * norm(q.vec) <= q.scalar;
        case Shape::Angle:
          return std::nullopt;
      }
      break;
    case Shape::Outside:
      if (q.shape == Shape::Angle) return std::nullopt;
      return false;
    case Shape::Half: {
      if (q.shape == Shape::Angle) return std::nullopt;
      // only opposite parallel halfspaces can be disjoint
      double np = norm(p.vec), nq = norm(q.vec);
      if (np == 0.0 || nq == 0.0) return false;
      double cosine = dot(p.vec, q.vec) / (np * nq);
      if (cosine > -1.0 + 1e-12) return false;
      double k = nq / np;
      return p.scalar >= -q.scalar / k;
    }
    case Shape::Angle:
      return p.hi <= q.lo || q.hi <= p.lo;
  }
  return std::nullopt;
}

std::vector<std::size_t> common_dims(const PredicateFunction& f, const PredicateFunction& g) {
  std::vector<std::size_t> out;
  for (std::size_t d : f.dims) {
    if (std::find(g.dims.begin(), g.dims.end(), d) != g.dims.end()) out.push_back(d);
  }
  return out;
}

std::string literal_name(const Predicate& p) { return (p.negated ? "!" : "") + p.name; }

}  // namespace

std::optional<bool> safe_sets_disjoint(const Predicate& p, const Predicate& q) {
  auto common = common_dims(p.func, q.func);
  if (common.empty()) return false;
  auto rp = region_of(p), rq = region_of(q);
  if (!rp || !rq) return std::nullopt;
  auto pp = project(*rp, common), pq = project(*rq, common);
  if (!pp || !pq) return false;
  return disjoint(*pp, *pq);
}

ConflictReport apriori_conflicts(const Planner& planner, const Abstraction& abstraction,
                                 const Declarations& decls) {
  const BuchiAutomaton& automaton = planner.automaton();
  const auto& alphabet = automaton.alphabet();
  const std::uint64_t ctrl = planner.controlled_mask();
  const std::uint64_t fixed = planner.fixed_mask();

  std::vector<std::optional<Predicate>> literal(alphabet.size());
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    if (!((ctrl >> i) & 1)) continue;
    const ControlledProp* prop = abstraction.find(alphabet[i]);
    Predicate p = decls.predicate(prop->predicate);
    p.negated = prop->negated;
    literal[i] = std::move(p);
  }

  std::map<std::pair<std::size_t, std::size_t>, std::optional<bool>> verdicts;
  std::map<std::pair<std::string, std::string>, std::size_t> event_of_pair;
  std::map<std::pair<std::string, std::string>, std::size_t> hits;
  ConflictReport report;

  for (std::size_t ti = 0; ti < automaton.transitions().size(); ++ti) {
    const auto& t = automaton.transitions()[ti];
    const auto& cubes = automaton.label(t).cubes;
    for (const auto& cube : cubes) {
      std::uint64_t set = cube.pos & ctrl;
      if (std::popcount(set) < 2) continue;
      bool minimal = std::none_of(cubes.begin(), cubes.end(), [&](const GuardCube& o) {
        std::uint64_t oset = o.pos & ctrl;
        bool weaker_env = (o.pos & fixed & ~cube.pos) == 0 && (o.neg & fixed & ~cube.neg) == 0;
        return weaker_env && oset != set && (oset & ~set) == 0;
      });
      if (!minimal) continue;
      for (std::size_t i = 0; i < alphabet.size(); ++i) {
        if (!((set >> i) & 1)) continue;
        for (std::size_t j = i + 1; j < alphabet.size(); ++j) {
          if (!((set >> j) & 1)) continue;
          const Predicate& p = *literal[i];
          const Predicate& q = *literal[j];
          std::pair<std::string, std::string> key = std::minmax(literal_name(p), literal_name(q));
          auto [vit, fresh] = verdicts.try_emplace({i, j});
          if (fresh) vit->second = safe_sets_disjoint(p, q);
          const auto& verdict = vit->second;
          if (!verdict) {
            if (std::find(report.unchecked.begin(), report.unchecked.end(), key) == report.unchecked.end()) {
              report.unchecked.push_back(key);
            }
            continue;
          }
          if (!*verdict) continue;
          ++hits[key];
          if (event_of_pair.count(key)) continue;
          FeedbackEvent e;
          e.kind = FeedbackKind::PossibleConflict;
          e.severity = Severity::Warning;
          e.location = automaton.name(t.source) + " -> " + automaton.name(t.target);
          e.predicates = {key.first, key.second};
          for (std::size_t b = 0; b < alphabet.size(); ++b) {
            std::uint64_t m = std::uint64_t{1} << b;
            if (!(fixed & m)) continue;
            if (cube.pos & m) e.events.push_back(alphabet[b]);
            if (cube.neg & m) e.events.push_back("!" + alphabet[b]);
          }
          event_of_pair[key] = report.conflicts.size();
          report.conflicts.push_back(std::move(e));
        }
      }
    }
  }
  for (auto& [key, index] : event_of_pair) {
    auto& e = report.conflicts[index];
    e.detail = "safe sets of " + key.first + " and " + key.second + " do not intersect; demanded together on " +
               std::to_string(hits[key]) + " transition(s)";
  }
  return report;
}

InadmissibleResult apriori_inadmissible_env(const Planner& planner, std::size_t event_cap) {
  const BuchiAutomaton& automaton = planner.automaton();
  std::vector<std::size_t> event_bits;
  for (std::size_t i = 0; i < automaton.alphabet().size(); ++i) {
    if (planner.role(i) == PropRole::Event) event_bits.push_back(i);
  }
  InadmissibleResult result;
  if (event_bits.size() > event_cap) {
    result.skipped = true;
    return result;
  }
  std::uint64_t event_mask = 0;
  for (std::size_t b : event_bits) event_mask |= std::uint64_t{1} << b;

  for (std::size_t s = 0; s < automaton.size(); ++s) {
    InadmissibleReport rep;
    rep.state = automaton.name(s);
    for (std::uint64_t combo = 0; combo < (std::uint64_t{1} << event_bits.size()); ++combo) {
      std::uint64_t assign = 0;
      for (std::size_t k = 0; k < event_bits.size(); ++k) {
        if ((combo >> k) & 1) assign |= std::uint64_t{1} << event_bits[k];
      }
      bool ok = false;
      for (std::size_t t : automaton.outgoing(s)) {
        for (const auto& c : automaton.label(automaton.transitions()[t]).cubes) {
          if ((c.pos & event_mask & ~assign) == 0 && (c.neg & event_mask & assign) == 0) ok = true;
        }
        if (ok) break;
      }
      if (!ok) {
        std::set<std::string> names;
        for (std::size_t b : event_bits) {
          if ((assign >> b) & 1) names.insert(automaton.alphabet()[b]);
        }
        rep.combinations.push_back(std::move(names));
      }
    }
    if (!rep.combinations.empty()) result.states.push_back(std::move(rep));
  }
  return result;
}

std::vector<FeedbackEvent> to_events(const InadmissibleResult& result) {
  std::vector<FeedbackEvent> out;
  for (const auto& rep : result.states) {
    for (const auto& combo : rep.combinations) {
      FeedbackEvent e;
      e.kind = FeedbackKind::InadmissibleEnv;
      e.severity = Severity::Warning;
      e.location = rep.state;
      e.events.assign(combo.begin(), combo.end());
      std::string shown = "{";
      for (const auto& name : combo) shown += (shown.size() > 1 ? ", " : "") + name;
      e.detail = "no transition out of " + rep.state + " admits events " + shown + "}";
      out.push_back(std::move(e));
    }
  }
  return out;
}

double distance_to_satisfaction(const Predicate& pred, const Eigen::VectorXd& x) {
  double gap = std::max(0.0, -eval_h(pred, x));
  if (pred.func.kind == PredicateKind::Halfspace) gap /= norm(pred.func.normal);
  return gap;
}

double speed_bound(const Predicate& pred, const Dynamics& dynamics) {
  double s = 0.0;
  for (std::size_t d : pred.func.dims) {
    for (const auto& r : dynamics.robots) {
      auto it = std::find(r.dims.begin(), r.dims.end(), d);
      if (it == r.dims.end()) continue;
      auto k = static_cast<Eigen::Index>(it - r.dims.begin());
      if (k >= r.u_max.size()) continue;
      double b = std::max(std::abs(r.u_max[k]), std::abs(r.u_min[k]));
      s += b * b;
    }
  }
  return std::sqrt(s);
}

std::vector<FeedbackEvent> runtime_check(const std::vector<const ActiveCbf*>& active, const Eigen::VectorXd& x,
                                         double t, const Dynamics& dynamics) {
  std::vector<FeedbackEvent> out;
  for (const ActiveCbf* c : active) {
    if (!c->tmpl.shrinking()) continue;
    const Predicate& pred = c->tmpl.predicate;
    double gap = distance_to_satisfaction(pred, x);
    double budget = speed_bound(pred, dynamics) * std::max(0.0, c->window_end() - t);
    if (gap <= 0.0 || !(gap > budget)) continue;
    FeedbackEvent e;
    e.kind = FeedbackKind::Unreachable;
    e.severity = Severity::Fatal;
    e.time = t;
    e.predicates = {literal_name(pred)};
    std::ostringstream detail;
    detail << c->tmpl.prop.name << ": distance " << gap << " exceeds reachable " << budget << " before t="
           << c->window_end();
    e.detail = detail.str();
    out.push_back(std::move(e));
  }
  return out;
}

FeedbackEvent report_infeasible(double t, std::size_t robot, const LinearConstraint& constraint,
                                const RobotModel& model) {
  FeedbackEvent e;
  e.kind = FeedbackKind::QpInfeasible;
  e.severity = Severity::Fatal;
  e.time = t;
  e.robot = robot;
  std::ostringstream detail;
  Eigen::IOFormat row(Eigen::FullPrecision, Eigen::DontAlignCols, ", ", ", ", "", "", "[", "]");
  detail << model.name << ": g.u >= " << constraint.rhs << " with g = " << constraint.gvec.transpose().format(row)
         << " has no solution in box " << model.u_min.transpose().format(row) << " .. "
         << model.u_max.transpose().format(row);
  e.detail = detail.str();
  return e;
}

}  // namespace evstl
