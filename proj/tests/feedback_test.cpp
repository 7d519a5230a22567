#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "evstl/feedback.hpp"
#include "evstl/scenario.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace evstl;
using evstl::testing::sphere;
using evstl::testing::vec;

namespace {

RobotModel holonomic(std::vector<std::size_t> dims, Eigen::VectorXd u_max) {
  RobotModel r;
  r.name = "r1";
  const auto n = static_cast<Eigen::Index>(dims.size());
  r.dims = std::move(dims);
  r.u_max = u_max;
  r.u_min = -u_max;
  r.g = Eigen::MatrixXd::Identity(n, n);
  r.A = Eigen::MatrixXd::Zero(n, n);
  r.c = Eigen::VectorXd::Zero(n);
  return r;
}

Dynamics one_robot(Eigen::VectorXd u_max) {
  Dynamics d;
  d.robots = {holonomic({0, 1}, u_max)};
  d.state_dim = 2;
  return d;
}

TEST(SafeSetsDisjoint, Balls) {
  auto a = sphere("a", {0, 1}, {0, 0}, 1);
  EXPECT_EQ(safe_sets_disjoint(a, sphere("b", {0, 1}, {3, 0}, 1)), true);
  EXPECT_EQ(safe_sets_disjoint(a, sphere("b", {0, 1}, {1.5, 0}, 1)), false);
  // touching balls count as disjoint
  EXPECT_EQ(safe_sets_disjoint(a, sphere("b", {0, 1}, {2, 0}, 1)), true);
  EXPECT_EQ(safe_sets_disjoint(a, a), false);
}

TEST(SafeSetsDisjoint, BallAgainstOutside) {
  auto a = sphere("a", {0, 1}, {0, 0}, 1);
  EXPECT_EQ(safe_sets_disjoint(a, sphere("o", {0, 1}, {0.5, 0}, 2, true)), true);
  EXPECT_EQ(safe_sets_disjoint(a, sphere("o", {0, 1}, {1.5, 0}, 2, true)), false);
  auto inside_of_negated = sphere("n", {0, 1}, {0, 0}, 3);
  inside_of_negated.negated = true;
  EXPECT_EQ(safe_sets_disjoint(a, inside_of_negated), true);
}

TEST(SafeSetsDisjoint, UnsupportedAndUnrelated) {
  auto a = sphere("a", {0, 1}, {0, 0}, 1);
  EXPECT_EQ(safe_sets_disjoint(a, sphere("b", {2, 3}, {0, 0}, 1)), false);
  auto pair = evstl::testing::pair("p", 0, 1, {0, 1, 2, 3}, 0.3);
  EXPECT_EQ(safe_sets_disjoint(a, pair), std::nullopt);
}

TEST(SafeSetsDisjoint, Halfspaces) {
  auto left = evstl::testing::halfspace("l", {0}, {-1}, -1);  // x <= 1
  auto right = evstl::testing::halfspace("r", {0}, {1}, 2);   // x >= 2
  EXPECT_EQ(safe_sets_disjoint(left, right), true);
  EXPECT_EQ(safe_sets_disjoint(left, evstl::testing::halfspace("r", {0}, {1}, 0.5)), false);
  EXPECT_EQ(safe_sets_disjoint(sphere("b", {0}, {5}, 1), left), true);
}

// Disjoint verdicts are checked against a dense grid of the plane.
TEST(SafeSetsDisjointProperty, NeverClaimsDisjointWhenGridFindsCommonPoint) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-3, 3);
  std::uniform_real_distribution<double> r(0.3, 2);
  for (int i = 0; i < 200; ++i) {
    auto p = sphere("p", {0, 1}, {u(rng), u(rng)}, r(rng), i % 3 == 0);
    auto q = sphere("q", {0, 1}, {u(rng), u(rng)}, r(rng), i % 5 == 0);
    auto verdict = safe_sets_disjoint(p, q);
    ASSERT_TRUE(verdict.has_value());
    if (!*verdict) continue;
    for (double x = -6; x <= 6; x += 0.05) {
      for (double y = -6; y <= 6; y += 0.05) {
        auto z = vec({x, y});
        ASSERT_FALSE(eval_h(p, z) > 1e-9 && eval_h(q, z) > 1e-9) << i;
      }
    }
  }
}

TEST(Apriori, PhysicalDemoConflict) {
  auto scenario = load_scenario(evstl::testing::scenario_file("physical_demo"));
  auto compiled = compile(scenario);
  ASSERT_EQ(compiled.conflicts.conflicts.size(), 1u);
  const auto& e = compiled.conflicts.conflicts[0];
  EXPECT_EQ(e.kind, FeedbackKind::PossibleConflict);
  EXPECT_EQ(e.severity, Severity::Warning);
  EXPECT_EQ(e.predicates, (std::vector<std::string>{"goal1", "station1"}));
  EXPECT_TRUE(compiled.inadmissible.states.empty());
}

TEST(Apriori, FourRobotDockingConflicts) {
  auto scenario = load_scenario(evstl::testing::scenario_file("four_robot"));
  auto compiled = compile(scenario);
  std::set<std::vector<std::string>> pairs;
  for (const auto& e : compiled.conflicts.conflicts) pairs.insert(e.predicates);
  EXPECT_EQ(pairs, (std::set<std::vector<std::string>>{{"dock1", "goal1"}, {"dock3", "goal3"}}));
  // pair predicates are outside the table
  EXPECT_FALSE(compiled.conflicts.unchecked.empty());
}

TEST(Apriori, InadmissibleEnvironment) {
  Declarations d;
  d.events = {"e", "f"};
  Abstraction a;
  BuchiAutomaton b;
  b.intern("e");
  b.intern("f");
  auto s0 = b.add_state(true, "s0");
  auto s1 = b.add_state(true, "s1");
  b.set_initial(s0);
  b.add_transition(s0, BoolExpr::parse("true"), s1);
  b.add_transition(s1, BoolExpr::parse("!e"), s1);
  Planner planner(b, a, d);
  auto result = apriori_inadmissible_env(planner);
  ASSERT_EQ(result.states.size(), 1u);
  EXPECT_EQ(result.states[0].state, "s1");
  EXPECT_EQ(result.states[0].combinations,
            (std::vector<std::set<std::string>>{{"e"}, {"e", "f"}}));
  auto events = to_events(result);
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[0].kind, FeedbackKind::InadmissibleEnv);
  EXPECT_EQ(events[0].location, "s1");
  EXPECT_TRUE(apriori_inadmissible_env(planner, 1).skipped);
}

TEST(RuntimeCheck, FarGoalIsUnreachable) {
  Declarations d;
  evstl::testing::declare(d, sphere("far", {0, 1}, {20, 20}, 1));
  auto c = instantiate(evstl::testing::make_template(d.predicate("far"), TemporalKind::Eventually, 0, 10), 0,
                       vec({0, 0}));
  auto dyn = one_robot(vec({0.7, 0.7}));
  EXPECT_NEAR(distance_to_satisfaction(d.predicate("far"), vec({0, 0})), std::sqrt(800.0) - 1, 1e-12);
  EXPECT_NEAR(distance_to_satisfaction(d.predicate("far"), vec({0, 0})), 27.28, 0.01);
  EXPECT_NEAR(speed_bound(d.predicate("far"), dyn), 0.7 * std::sqrt(2.0), 1e-12);
  auto events = runtime_check({&c}, vec({0, 0}), 0.0, dyn);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].kind, FeedbackKind::Unreachable);
  EXPECT_EQ(events[0].severity, Severity::Fatal);
  EXPECT_EQ(events[0].predicates, std::vector<std::string>{"far"});
  EXPECT_EQ(events[0].time, 0.0);
}

TEST(RuntimeCheck, ReachableOrAlwaysKindIsQuiet) {
  auto d = evstl::testing::single_robot_decls();
  auto dyn = one_robot(vec({1, 1}));
  auto f = instantiate(evstl::testing::make_template(d.predicate("near55"), TemporalKind::Eventually, 0, 10), 0,
                       vec({0, 0}));
  EXPECT_TRUE(runtime_check({&f}, vec({0, 0}), 0.0, dyn).empty());
  EXPECT_TRUE(runtime_check({&f}, vec({5, 5}), 10.0, dyn).empty());
  // sample clock a rounding error past the window end
  EXPECT_TRUE(runtime_check({&f}, vec({5, 5}), 10.0 + 1e-12, dyn).empty());
  // gap equal to the budget is still reachable
  auto unit = one_robot(vec({0.6, 0.8}));
  EXPECT_TRUE(runtime_check({&f}, vec({5, 2}), 8.0, unit).empty());
  EXPECT_EQ(runtime_check({&f}, vec({5, 2}), 8.5, unit).size(), 1u);
  auto g = instantiate(evstl::testing::make_template(d.predicate("near55"), TemporalKind::Always, 0, 10), 0,
                       vec({0, 0}));
  EXPECT_TRUE(runtime_check({&g}, vec({-50, -50}), 9.0, dyn).empty());
}

TEST(RuntimeCheckProperty, OnceUnreachableAlwaysUnreachable) {
  auto d = evstl::testing::single_robot_decls();
  auto dyn = one_robot(vec({1, 1}));
  auto c = instantiate(evstl::testing::make_template(d.predicate("near55"), TemporalKind::Eventually, 0, 10), 0,
                       vec({0, 0}));
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> u(-20, 20);
  for (int i = 0; i < 200; ++i) {
    auto x = vec({u(rng), u(rng)});
    bool fired = false;
    double prev_budget = 1e300;
    for (int k = 0; k <= 100; ++k) {
      double t = 0.1 * k;
      double budget = speed_bound(d.predicate("near55"), dyn) * (c.window_end() - t);
      EXPECT_LT(budget, prev_budget);
      prev_budget = budget;
      bool now = !runtime_check({&c}, x, t, dyn).empty();
      if (fired) EXPECT_TRUE(now);
      fired = fired || now;
    }
  }
}

TEST(ReportInfeasible, Fields) {
  auto robot = holonomic({0, 1}, vec({1, 1}));
  auto e = report_infeasible(2.5, 0, LinearConstraint{vec({1, 0}), 3.0}, robot);
  EXPECT_EQ(e.kind, FeedbackKind::QpInfeasible);
  EXPECT_EQ(e.severity, Severity::Fatal);
  EXPECT_EQ(e.time, 2.5);
  EXPECT_EQ(e.robot, 0u);
  EXPECT_NE(e.detail.find("r1"), std::string::npos);
  EXPECT_EQ(to_string(FeedbackKind::QpInfeasible), "QpInfeasible");
  EXPECT_EQ(to_string(Severity::Warning), "warning");
}

}  // namespace
