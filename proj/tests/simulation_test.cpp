#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "evstl/simulation.hpp"
#include "support.hpp"

using namespace evstl;

namespace {

struct Loaded {
  Scenario scenario;
  CompiledSpec compiled;
};

Loaded load(const std::string& name) {
  Loaded l;
  l.scenario = load_scenario(evstl::testing::scenario_file(name));
  l.compiled = compile(l.scenario);
  return l;
}

Letter induced_letter(const Planner& planner, const SampleRecord& rec) {
  Letter l;
  for (const auto& [name, on] : planner.eval_props_named(rec.x, rec.sigma)) {
    if (on) l.insert(name);
  }
  return l;
}

TEST(Simulation, SingleRobotReachesGoal) {
  auto l = load("single_robot");
  auto log = run(l.scenario, l.compiled);
  EXPECT_EQ(log.status, TerminalStatus::HorizonAccepting);
  ASSERT_EQ(log.records.size(), l.scenario.samples());
  const auto& near = l.scenario.decls.predicate("near55");
  std::optional<double> reached;
  for (const auto& r : log.records) {
    if (!reached && eval_h(near, r.x) >= 0) reached = r.t;
    if (r.cbf[0]) EXPECT_GE(*r.cbf[0], -1e-3) << r.t;
  }
  ASSERT_TRUE(reached);
  EXPECT_GE(*reached, 2.0);
  EXPECT_LE(*reached, 12.0);
  // nothing moves before the alarm
  EXPECT_EQ(log.records[20].x, log.records[0].x);
}

TEST(Simulation, NoEventsNeverMoves) {
  auto l = load("single_robot");
  l.scenario.changes.clear();
  auto log = run(l.scenario, l.compiled);
  EXPECT_EQ(log.status, TerminalStatus::HorizonAccepting);
  for (const auto& r : log.records) {
    EXPECT_EQ(r.x, l.scenario.x0);
    EXPECT_TRUE(r.active_props.empty());
  }
}

TEST(Simulation, Deterministic) {
  auto l = load("physical_demo_alarm");
  auto a = run(l.scenario, l.compiled);
  auto b = run(l.scenario, l.compiled);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    EXPECT_EQ(a.records[k].x, b.records[k].x);
    EXPECT_EQ(a.records[k].state, b.records[k].state);
    EXPECT_EQ(a.records[k].active_props, b.records[k].active_props);
  }
  EXPECT_EQ(a.status, b.status);
}

// Replays a log through a fresh planner that replans on an event change,
// a held label or a missing plan.
TEST(Simulation, ReplanRule) {
  for (const char* name : {"single_robot", "physical_demo", "physical_demo_alarm"}) {
    auto l = load(name);
    auto log = run(l.scenario, l.compiled);
    Planner ref(l.compiled.automaton, l.compiled.abstraction, l.scenario.decls);
    std::optional<std::set<std::string>> last;
    for (const auto& r : log.records) {
      if (!last || *last != r.sigma || !ref.has_plan() || ref.label_holds(r.x, r.sigma)) {
        ref.find_transition(r.sigma, r.x);
      }
      last = r.sigma;
      ASSERT_EQ(l.compiled.automaton.name(ref.current_state()), r.state) << name << " t=" << r.t;
      ASSERT_EQ(ref.plan().active_props, r.active_props) << name << " t=" << r.t;
    }
  }
}

// The letters seen along an accepting run, with the last one repeated,
// form a lasso the automaton accepts.
TEST(Simulation, AcceptingRunsInduceAcceptedLasso) {
  for (const char* name : {"single_robot", "physical_demo", "physical_demo_alarm"}) {
    auto l = load(name);
    auto log = run(l.scenario, l.compiled);
    ASSERT_EQ(log.status, TerminalStatus::HorizonAccepting) << name;
    Planner p(l.compiled.automaton, l.compiled.abstraction, l.scenario.decls);
    Word prefix;
    for (const auto& r : log.records) prefix.push_back(induced_letter(p, r));
    Word cycle{prefix.back()};
    EXPECT_TRUE(accepts_lasso(l.compiled.automaton, prefix, cycle)) << name;
  }
}

TEST(Simulation, MonitorAgreesOnAcceptingRuns) {
  for (const char* name : {"single_robot", "physical_demo", "physical_demo_alarm"}) {
    auto l = load(name);
    auto log = run(l.scenario, l.compiled);
    ASSERT_EQ(log.status, TerminalStatus::HorizonAccepting) << name;
    auto verdict = monitor(log.trace(), l.compiled.formula, l.scenario.decls);
    EXPECT_EQ(verdict.verdict, Verdict::Satisfied) << name << ": " << verdict.witness;
  }
}

TEST(Simulation, UnreachableStopsAndExtensionViolates) {
  auto l = load("unreachable");
  auto log = run(l.scenario, l.compiled);
  EXPECT_EQ(log.status, TerminalStatus::StoppedFatal);
  ASSERT_EQ(log.records.size(), 1u);
  const auto& fb = log.records[0].feedback;
  ASSERT_EQ(fb.size(), 1u);
  EXPECT_EQ(fb[0].kind, FeedbackKind::Unreachable);
  EXPECT_EQ(fb[0].time, 0.0);
  EXPECT_EQ(fb[0].location, log.records[0].state);
  auto ext = zero_control_extension(log, l.scenario);
  EXPECT_EQ(ext.size(), l.scenario.samples());
  EXPECT_EQ(monitor(ext, l.compiled.formula, l.scenario.decls).verdict, Verdict::Violated);
}

TEST(Simulation, StepAfterDoneThrows) {
  auto l = load("unreachable");
  Simulation sim(l.scenario, l.compiled);
  sim.step({});
  EXPECT_TRUE(sim.done());
  EXPECT_THROW(sim.step({}), std::logic_error);
  sim.reset();
  EXPECT_FALSE(sim.done());
  EXPECT_EQ(sim.sample(), 0u);
}

TEST(Simulation, SampleRateRobustness) {
  auto coarse = load("single_robot");
  auto fine = coarse;
  fine.scenario.dt = 0.05;
  fine.compiled = compile(fine.scenario);
  auto a = run(coarse.scenario, coarse.compiled);
  auto b = run(fine.scenario, fine.compiled);
  ASSERT_EQ(a.status, TerminalStatus::HorizonAccepting);
  ASSERT_EQ(b.status, TerminalStatus::HorizonAccepting);
  EXPECT_LT((a.records.back().x - b.records.back().x).norm(), 0.05);
}

TEST(Simulation, SafeSetsMatchBarrierSign) {
  auto l = load("single_robot");
  Simulation sim(l.scenario, l.compiled);
  int checked = 0;
  while (!sim.done()) {
    sim.step(l.scenario.events_at(sim.time()));
    if (sim.done()) break;
    auto sets = sim.safe_sets();
    auto active = sim.registry().active(sim.time());
    ASSERT_EQ(sets.size(), active.size());
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const auto& s = sets[i];
      EXPECT_EQ(s.kind, "inside");
      double d = std::hypot(sim.state()[0] - s.center[0], sim.state()[1] - s.center[1]);
      double v = value(*active[i], sim.state(), sim.time());
      EXPECT_NEAR(s.radius - d, v, 1e-9);
      ++checked;
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(RunLog, JsonlRoundTrip) {
  auto l = load("physical_demo_alarm");
  auto log = run(l.scenario, l.compiled);
  std::stringstream out;
  write_jsonl(log, out);
  auto back = read_jsonl(out);
  EXPECT_EQ(back.status, log.status);
  EXPECT_EQ(back.dt, log.dt);
  ASSERT_EQ(back.records.size(), log.records.size());
  for (std::size_t k = 0; k < log.records.size(); ++k) {
    const auto& a = log.records[k];
    const auto& b = back.records[k];
    EXPECT_EQ(a.t, b.t);
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.sigma, b.sigma);
    EXPECT_EQ(a.state, b.state);
    EXPECT_EQ(a.active_props, b.active_props);
    EXPECT_EQ(a.cbf, b.cbf);
  }
  EXPECT_EQ(to_string(terminal_status_from_string(to_string(log.status))), to_string(log.status));
}

TEST(RunLog, Csv) {
  auto l = load("single_robot");
  auto log = run(l.scenario, l.compiled);
  std::stringstream out;
  write_csv(log, l.scenario, out);
  std::string line;
  std::size_t lines = 0;
  std::getline(out, line);
  EXPECT_EQ(line.rfind("t,", 0), 0u);
  while (std::getline(out, line)) ++lines;
  EXPECT_EQ(lines, log.records.size() * l.scenario.dynamics.state_dim);
}

}  // namespace
