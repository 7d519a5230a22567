#include "evstl/simulation.hpp"

#include <chrono>

namespace evstl {

std::string to_string(TerminalStatus status) {
  switch (status) {
    case TerminalStatus::Running:
      return "running";
    case TerminalStatus::HorizonAccepting:
      return "horizon-reached-accepting";
    case TerminalStatus::StoppedFatal:
      return "stopped-fatal";
    case TerminalStatus::HorizonNonaccepting:
      return "horizon-reached-nonaccepting";
  }
  return "?";
}

TerminalStatus terminal_status_from_string(const std::string& text) {
  for (auto s : {TerminalStatus::Running, TerminalStatus::HorizonAccepting, TerminalStatus::StoppedFatal,
                 TerminalStatus::HorizonNonaccepting}) {
    if (to_string(s) == text) return s;
  }
  throw std::invalid_argument("unknown terminal status '" + text + "'");
}

Trace RunLog::trace() const {
  Trace t;
  t.dt = dt;
  for (const auto& r : records) {
    t.states.push_back(r.x);
    t.events.push_back(r.sigma);
  }
  return t;
}

Simulation::Simulation(const Scenario& scenario, const CompiledSpec& compiled)
    : scenario_(scenario),
      compiled_(compiled),
      planner_(compiled.automaton, compiled.abstraction, scenario.decls),
      registry_(compiled.templates),
      x_(scenario.x0) {
  log_.dt = scenario.dt;
  log_.apriori = compiled.apriori();
}

void Simulation::reset() {
  planner_.reset();
  registry_.clear();
  x_ = scenario_.x0;
  k_ = 0;
  last_sigma_.reset();
  status_ = TerminalStatus::Running;
  log_.records.clear();
  log_.status = status_;
}

std::string Simulation::buchi_state() const { return compiled_.automaton.name(planner_.current_state()); }

void Simulation::stop(SampleRecord& rec, FeedbackEvent event) {
  event.time = rec.t;
  if (event.location.empty()) event.location = buchi_state();
  rec.feedback.push_back(std::move(event));
  status_ = TerminalStatus::StoppedFatal;
}

const SampleRecord& Simulation::step(const std::set<std::string>& sigma) {
  if (done()) throw std::logic_error("simulation already finished");
  auto start = std::chrono::steady_clock::now();
  const double t = time();
  const auto& robots = scenario_.dynamics.robots;

  SampleRecord rec;
  rec.t = t;
  rec.x = x_;
  rec.sigma = sigma;
  rec.u.assign(robots.size(), Eigen::VectorXd());
  rec.cbf.assign(robots.size(), std::nullopt);

  bool replan = !last_sigma_ || *last_sigma_ != sigma || !planner_.has_plan() || planner_.label_holds(x_, sigma);
  last_sigma_ = sigma;
  if (replan) {
    try {
      planner_.find_transition(sigma, x_);
    } catch (const InadmissibleEnvironment& e) {
      stop(rec, {FeedbackKind::InadmissibleEnv, Severity::Fatal, e.state(), {}, {},
                 {}, {e.events().begin(), e.events().end()}, e.what()});
    } catch (const SpecificationUnrealizable& e) {
      stop(rec, {FeedbackKind::InadmissibleEnv, Severity::Fatal, buchi_state(), {}, {}, {},
                 {sigma.begin(), sigma.end()}, e.what()});
    }
  }
  rec.state = buchi_state();

  if (!done()) {
    rec.active_props = planner_.plan().active_props;
    registry_.update(rec.active_props, t, x_);
    auto active = registry_.active(t);
    auto unreachable = runtime_check(active, x_, t, scenario_.dynamics);
    if (!unreachable.empty()) {
      for (auto& e : unreachable) e.location = rec.state;
      for (std::size_t i = 0; i + 1 < unreachable.size(); ++i) rec.feedback.push_back(unreachable[i]);
      stop(rec, unreachable.back());
    }
    for (std::size_t i = 0; i < robots.size() && !done(); ++i) {
      auto res = control_step(scenario_.dynamics, i, active, x_, t, scenario_.dt, scenario_.gain);
      rec.u[i] = res.u;
      if (res.combined) rec.cbf[i] = res.combined->value;
      if (!res.feasible) stop(rec, report_infeasible(t, i, *res.constraint, robots[i]));
    }
  }
  rec.compute_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const bool last = k_ + 1 >= scenario_.samples();
  if (!done()) {
    if (last) {
      status_ = planner_.terminal_accepting(x_, sigma) ? TerminalStatus::HorizonAccepting
                                                       : TerminalStatus::HorizonNonaccepting;
    } else {
      x_ = scenario_.dynamics.euler(x_, rec.u, scenario_.dt);
      ++k_;
    }
  }
  log_.status = status_;
  log_.records.push_back(std::move(rec));
  return log_.records.back();
}

std::vector<SafeSet> Simulation::safe_sets() const {
  std::vector<SafeSet> out;
  const double t = time();
  for (const ActiveCbf* c : registry_.active(t)) {
    const Predicate& p = c->tmpl.predicate;
    const auto& f = p.func;
    // value - h does not depend on x for every template shape
    double shift = value(*c, x_, t) - eval_h(p, x_);
    SafeSet s;
    s.prop = c->tmpl.prop.name;
    s.dims = f.dims;
    switch (f.kind) {
      case PredicateKind::SphereInner:
      case PredicateKind::SphereOuter: {
        bool inside = (f.kind == PredicateKind::SphereInner) != p.negated;
        s.kind = inside ? "inside" : "outside";
        s.center = f.center;
        s.radius = inside ? f.radius + shift : f.radius - shift;
        break;
      }
      case PredicateKind::PairDistanceMin:
        if (p.negated) continue;
        s.kind = "outside";
        s.radius = f.min_distance - shift;
        break;
      default:
        continue;
    }
    if (s.radius < 0) s.radius = 0;
    out.push_back(std::move(s));
  }
  return out;
}

RunLog run(const Scenario& scenario, const CompiledSpec& compiled) {
  Simulation sim(scenario, compiled);
  while (!sim.done()) sim.step(scenario.events_at(sim.time()));
  return sim.log();
}

Trace zero_control_extension(const RunLog& log, const Scenario& scenario) {
  Trace trace = log.trace();
  if (trace.states.empty()) return trace;
  std::vector<Eigen::VectorXd> zero;
  for (const auto& r : scenario.dynamics.robots) zero.push_back(Eigen::VectorXd::Zero(r.u_max.size()));
  while (trace.size() < scenario.samples()) {
    trace.states.push_back(scenario.dynamics.euler(trace.states.back(), zero, scenario.dt));
    trace.events.push_back(trace.events.back());
  }
  return trace;
}

}  // namespace evstl
