#include <gtest/gtest.h>

#include "evstl/planner.hpp"
#include "support.hpp"

using namespace evstl;
using evstl::testing::vec;

namespace {

const std::string kP = "p_near55_0_10";

Abstraction single_abstraction() {
  Abstraction a;
  a.ltl = parse_ltl("G(alarm -> F " + kP + ")");
  a.controlled.push_back({kP, "near55", false, {0, 10}, TemporalKind::Eventually, {}});
  return a;
}

// s0 -> s1 without alarm; with alarm wait in s2 until p.
BuchiAutomaton alarm_automaton() {
  BuchiAutomaton b;
  b.intern("alarm");
  b.intern(kP);
  auto s0 = b.add_state(false, "s0");
  auto s1 = b.add_state(true, "s1");
  auto s2 = b.add_state(false, "s2");
  b.set_initial(s0);
  b.add_transition(s0, BoolExpr::parse("!alarm"), s1);
  b.add_transition(s0, BoolExpr::parse("alarm"), s2);
  b.add_transition(s1, BoolExpr::parse("!alarm"), s1);
  b.add_transition(s1, BoolExpr::parse("alarm"), s2);
  b.add_transition(s2, BoolExpr::parse(kP), s1);
  b.add_transition(s2, BoolExpr::parse("!" + kP), s2);
  return b;
}

TEST(EvalProps, Examples) {
  auto d = evstl::testing::single_robot_decls();
  auto a = single_abstraction();
  auto b = translate(a.ltl);
  Planner planner(b, a, d);
  auto at = [&](Eigen::VectorXd x, std::set<std::string> s) { return planner.eval_props_named(x, s); };
  EXPECT_EQ(at(vec({5, 5}), {"alarm"}), (std::map<std::string, bool>{{"alarm", true}, {kP, true}}));
  EXPECT_EQ(at(vec({0, 0}), {}), (std::map<std::string, bool>{{"alarm", false}, {kP, false}}));
  EXPECT_TRUE(at(vec({5, 6}), {}).at(kP));
  EXPECT_FALSE(at(vec({5, 6.0001}), {}).at(kP));
}

TEST(EvalProps, NegatedLiteralHoldsOnBoundary) {
  auto d = evstl::testing::single_robot_decls();
  Abstraction a;
  a.controlled.push_back({"p_not_near55_0_10", "near55", true, {0, 10}, TemporalKind::Always, {}});
  BuchiAutomaton b = translate(parse_ltl("G p_not_near55_0_10"));
  Planner planner(b, a, d);
  EXPECT_TRUE(planner.eval_props_named(vec({5, 6}), {}).at("p_not_near55_0_10"));
  EXPECT_FALSE(planner.eval_props_named(vec({5, 5.5}), {}).at("p_not_near55_0_10"));
  EXPECT_TRUE(planner.eval_props_named(vec({0, 0}), {}).at("p_not_near55_0_10"));
}

TEST(FindTransition, WaitingStateActivatesGoal) {
  auto d = evstl::testing::single_robot_decls();
  auto a = single_abstraction();
  auto b = alarm_automaton();
  Planner planner(b, a, d);
  const std::set<std::string> alarm{"alarm"};
  auto first = planner.find_transition(alarm, vec({0, 0}));
  EXPECT_FALSE(first.advanced);
  EXPECT_EQ(b.name(first.state), "s0");
  EXPECT_TRUE(first.active_props.empty());
  EXPECT_TRUE(planner.label_holds(vec({0, 0}), alarm));

  auto second = planner.find_transition(alarm, vec({0, 0}));
  EXPECT_TRUE(second.advanced);
  EXPECT_EQ(b.name(second.state), "s2");
  EXPECT_EQ(b.name(b.transitions()[second.transition].target), "s1");
  EXPECT_EQ(second.active_props, std::vector<std::string>{kP});
  EXPECT_FALSE(planner.label_holds(vec({0, 0}), alarm));
  EXPECT_FALSE(planner.terminal_accepting(vec({0, 0}), alarm));

  auto third = planner.find_transition(alarm, vec({5, 5}));
  EXPECT_EQ(b.name(third.state), "s1");
  EXPECT_TRUE(planner.terminal_accepting(vec({5, 5}), alarm));
}

TEST(FindTransition, NoAlarmNeedsNothing) {
  auto d = evstl::testing::single_robot_decls();
  auto a = single_abstraction();
  auto b = translate(a.ltl);
  Planner planner(b, a, d);
  auto step = planner.find_transition({}, vec({0, 0}));
  EXPECT_TRUE(step.active_props.empty());
  EXPECT_TRUE(b.accepting(b.transitions()[step.transition].target));
  planner.find_transition({}, vec({0, 0}));
  EXPECT_TRUE(planner.terminal_accepting(vec({0, 0}), {}));
}

TEST(FindTransition, TranslatedAutomatonAlarm) {
  auto d = evstl::testing::single_robot_decls();
  auto a = single_abstraction();
  auto b = translate(a.ltl);
  Planner planner(b, a, d);
  auto step = planner.find_transition({"alarm"}, vec({0, 0}));
  EXPECT_EQ(step.active_props, std::vector<std::string>{kP});
}

TEST(FindTransition, TieBreakPrefersFewerProps) {
  Declarations d;
  for (auto name : {"a", "b", "c"}) evstl::testing::declare(d, evstl::testing::sphere(name, {0}, {0}, 1));
  Abstraction a;
  for (auto name : {"pa", "pb", "pc"}) {
    a.controlled.push_back({name, std::string(name).substr(1), false, {0, 5}, TemporalKind::Eventually, {}});
  }
  BuchiAutomaton b;
  auto s0 = b.add_state(false, "s0");
  auto s1 = b.add_state(true, "s1");
  auto s2 = b.add_state(true, "s2");
  b.set_initial(s0);
  b.add_transition(s0, BoolExpr::parse("pa & pb"), s1);
  b.add_transition(s0, BoolExpr::parse("pc"), s2);
  b.add_transition(s1, BoolExpr::parse("true"), s1);
  b.add_transition(s2, BoolExpr::parse("true"), s2);
  Planner planner(b, a, d);
  auto step = planner.find_transition({}, vec({5}));
  EXPECT_EQ(step.active_props, std::vector<std::string>{"pc"});
}

TEST(FindTransition, ShortestPrefixWins) {
  Declarations d;
  evstl::testing::declare(d, evstl::testing::sphere("a", {0}, {0}, 1));
  Abstraction a;
  a.controlled.push_back({"pa", "a", false, {0, 5}, TemporalKind::Eventually, {}});
  BuchiAutomaton b;
  auto s0 = b.add_state(false, "s0");
  auto s1 = b.add_state(false, "s1");
  auto s2 = b.add_state(true, "s2");
  b.set_initial(s0);
  b.intern("pa");
  b.add_transition(s0, BoolExpr::parse("true"), s1);
  b.add_transition(s1, BoolExpr::parse("true"), s2);
  b.add_transition(s0, BoolExpr::parse("pa"), s2);
  b.add_transition(s2, BoolExpr::parse("true"), s2);
  Planner planner(b, a, d);
  auto step = planner.find_transition({}, vec({5}));
  EXPECT_EQ(b.name(b.transitions()[step.transition].target), "s2");
  EXPECT_EQ(step.active_props, std::vector<std::string>{"pa"});
}

TEST(FindTransition, Nondeterministic) {
  // two transitions with the same label; only one leads to an accepting cycle
  Declarations d;
  d.events = {"e"};
  Abstraction a;
  BuchiAutomaton b;
  b.intern("e");
  auto s0 = b.add_state(false, "s0");
  auto dead = b.add_state(true, "dead");
  auto live = b.add_state(true, "live");
  b.set_initial(s0);
  b.add_transition(s0, BoolExpr::parse("e"), dead);
  b.add_transition(s0, BoolExpr::parse("e"), live);
  b.add_transition(live, BoolExpr::parse("true"), live);
  Planner planner(b, a, d);
  auto step = planner.find_transition({"e"}, vec({0}));
  EXPECT_EQ(b.name(b.transitions()[step.transition].target), "live");
  planner.find_transition({"e"}, vec({0}));
  EXPECT_EQ(b.name(planner.current_state()), "live");
  EXPECT_TRUE(planner.terminal_accepting(vec({0}), {"e"}));
}

TEST(FindTransition, InadmissibleEnvironment) {
  Declarations d;
  d.events = {"e"};
  Abstraction a;
  BuchiAutomaton b;
  b.intern("e");
  auto s0 = b.add_state(true, "s0");
  b.set_initial(s0);
  b.add_transition(s0, BoolExpr::parse("!e"), s0);
  Planner planner(b, a, d);
  EXPECT_NO_THROW(planner.find_transition({}, vec({0})));
  try {
    planner.find_transition({"e"}, vec({0}));
    FAIL();
  } catch (const InadmissibleEnvironment& ex) {
    EXPECT_EQ(ex.state(), "s0");
    EXPECT_EQ(ex.events(), std::set<std::string>{"e"});
  }
}

TEST(FindTransition, Unrealizable) {
  Declarations d;
  d.events = {"e"};
  Abstraction a;
  BuchiAutomaton b;
  b.intern("e");
  auto s0 = b.add_state(false, "s0");
  b.set_initial(s0);
  b.add_transition(s0, BoolExpr::parse("true"), s0);
  Planner planner(b, a, d);
  EXPECT_THROW(planner.find_transition({}, vec({0})), SpecificationUnrealizable);
}

TEST(FindTransition, DeterministicHistories) {
  auto d = evstl::testing::single_robot_decls();
  auto a = single_abstraction();
  auto b = translate(a.ltl);
  std::vector<std::pair<std::set<std::string>, Eigen::VectorXd>> inputs = {
      {{}, vec({0, 0})}, {{"alarm"}, vec({1, 1})}, {{"alarm"}, vec({5, 5})}, {{}, vec({5, 5})}, {{"alarm"}, vec({0, 0})}};
  Planner p1(b, a, d), p2(b, a, d);
  for (const auto& [sigma, x] : inputs) {
    auto s1 = p1.find_transition(sigma, x);
    auto s2 = p2.find_transition(sigma, x);
    EXPECT_EQ(s1.transition, s2.transition);
    EXPECT_EQ(s1.active_props, s2.active_props);
    EXPECT_EQ(s1.state, s2.state);
  }
}

TEST(MinimalTrueSets, Examples) {
  std::set<std::string> controlled{"p1", "p2", "pi"};
  EXPECT_EQ(minimal_true_sets(BoolExpr::parse("!alarm & !pi"), {{"alarm", false}}, controlled),
            (std::vector<std::vector<std::string>>{{}}));
  EXPECT_EQ(minimal_true_sets(BoolExpr::parse("p1 & p2"), {}, controlled),
            (std::vector<std::vector<std::string>>{{"p1", "p2"}}));
  EXPECT_EQ(minimal_true_sets(BoolExpr::parse("p2 | p1"), {}, controlled),
            (std::vector<std::vector<std::string>>{{"p1"}, {"p2"}}));
  EXPECT_EQ(minimal_true_sets(BoolExpr::parse("p1 & p2 | pi"), {}, controlled),
            (std::vector<std::vector<std::string>>{{"pi"}, {"p1", "p2"}}));
  EXPECT_THROW(minimal_true_sets(BoolExpr::parse("alarm & pi"), {{"alarm", false}}, controlled),
               std::invalid_argument);
}

}  // namespace
