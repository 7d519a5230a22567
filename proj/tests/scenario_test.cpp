#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>

#include "evstl/scenario.hpp"
#include "support.hpp"

using namespace evstl;

namespace {

std::string single_robot_text(const std::string& extra = "", const std::string& formula = "G(alarm -> F[0,10](near55))",
                              const std::string& robot_extra = "") {
  return R"({"name": "t", "dt": 0.1, "horizon": 20,
    "robots": [{"name": "r1", "state": ["x", "y"], "x0": [0, 0], "u_max": [1, 1])" +
         robot_extra + R"(}],
    "events": ["alarm"],
    "predicates": {"near55": {"kind": "sphere-inner", "robot": "r1", "dims": ["x", "y"], "center": [5, 5], "radius": 1}},
    "formula": ")" +
         formula + "\"" + extra + "}";
}

TEST(ParseScenario, SingleRobot) {
  auto s = parse_scenario(single_robot_text(R"(, "event_source": {"type": "scripted", "changes": [{"t": 2, "events": ["alarm"]}, {"t": 5, "events": []}]})"));
  EXPECT_EQ(s.samples(), 201u);
  EXPECT_EQ(s.dynamics.state_dim, 2u);
  EXPECT_EQ(s.gain.gamma, 1.0);
  EXPECT_EQ(s.gain.gamma_negative, 1.0);
  EXPECT_TRUE(s.events_at(0).empty());
  EXPECT_TRUE(s.events_at(1.9).empty());
  EXPECT_EQ(s.events_at(2.0), std::set<std::string>{"alarm"});
  EXPECT_EQ(s.events_at(4.9), std::set<std::string>{"alarm"});
  EXPECT_TRUE(s.events_at(5.0).empty());
  EXPECT_EQ(s.robot_of(1), 0u);
  EXPECT_THROW(s.robot_of(2), std::out_of_range);
}

TEST(ParseScenario, Gains) {
  auto s = parse_scenario(single_robot_text(R"(, "gamma": 2)"));
  EXPECT_EQ(s.gain.gamma, 2.0);
  EXPECT_EQ(s.gain.gamma_negative, 2.0);
  s = parse_scenario(single_robot_text(R"(, "gamma": 2, "gamma_negative": 0.5)"));
  EXPECT_EQ(s.gain.gamma_negative, 0.5);
  EXPECT_THROW(parse_scenario(single_robot_text(R"(, "gamma": 0)")), SpecError);
}

TEST(ParseScenario, Rejects) {
  EXPECT_THROW(parse_scenario("{"), SpecError);
  EXPECT_THROW(parse_scenario("[]"), SpecError);
  EXPECT_THROW(parse_scenario(single_robot_text(R"(, "dt": 0)")), SpecError);
  EXPECT_THROW(parse_scenario(single_robot_text(R"(, "horizon": 20.05)")), SpecError);
  EXPECT_THROW(parse_scenario(single_robot_text("", "G(alarm -> F[0,10](near55))", R"(, "u_min": [0.1, -1])")),
               SpecError);
  EXPECT_THROW(parse_scenario(single_robot_text("", "G(alarm -> F[0,10](near55))", R"(, "x0": [0, 0, 0])")),
               SpecError);
  EXPECT_THROW(parse_scenario(single_robot_text(R"(, "events": ["alarm", "alarm"])")), SpecError);
  EXPECT_THROW(
      parse_scenario(single_robot_text(R"(, "event_source": {"type": "scripted", "changes": [{"t": 1, "events": ["fire"]}]})")),
      SpecError);
  EXPECT_THROW(parse_scenario(single_robot_text(R"(, "event_source": {"type": "radio"})")), SpecError);
}

TEST(ParseScenario, Interactive) {
  auto s = parse_scenario(single_robot_text(R"(, "event_source": {"type": "interactive"})"));
  EXPECT_TRUE(s.interactive);
  EXPECT_TRUE(s.changes.empty());
}

TEST(Compile, SingleRobot) {
  auto s = load_scenario(evstl::testing::scenario_file("single_robot"));
  auto c = compile(s);
  EXPECT_EQ(to_string(c.abstraction.ltl), "G (alarm -> F p_near55_0_10)");
  ASSERT_EQ(c.templates.size(), 1u);
  EXPECT_EQ(c.templates[0].prop.name, "p_near55_0_10");
  EXPECT_EQ(c.automaton.size(), 3u);
  EXPECT_TRUE(c.apriori().empty());
}

TEST(Compile, IntervalOffGrid) {
  auto s = parse_scenario(single_robot_text("", "G(alarm -> F[0,10.05](near55))"));
  EXPECT_THROW(compile(s), SpecError);
  auto coarse = parse_scenario(single_robot_text(R"(, "dt": 0.3, "horizon": 21)"));
  EXPECT_THROW(compile(coarse), SpecError);
}

TEST(Compile, FormulaErrors) {
  auto s = parse_scenario(single_robot_text("", "G(!alarm)"));
  EXPECT_THROW(compile(s), ParseError);
  auto bad = parse_scenario(single_robot_text("", "G(alarm -> F[0,10](nowhere))"));
  EXPECT_THROW(compile(bad), ParseError);
}

TEST(CompiledJson, RoundTrip) {
  auto s = load_scenario(evstl::testing::scenario_file("physical_demo"));
  auto c = compile(s);
  auto text = to_json(c);
  auto back = compiled_from_json(text, s);
  EXPECT_EQ(to_string(back.abstraction.ltl), to_string(c.abstraction.ltl));
  EXPECT_EQ(dump(back.automaton), dump(c.automaton));
  EXPECT_EQ(back.templates.size(), c.templates.size());
  EXPECT_EQ(back.conflicts.conflicts.size(), c.conflicts.conflicts.size());
  back.compile_seconds = c.compile_seconds;
  EXPECT_EQ(to_json(back), text);

  auto other = load_scenario(evstl::testing::scenario_file("single_robot"));
  EXPECT_THROW(compiled_from_json(text, other), SpecError);
  EXPECT_THROW(compiled_from_json("not json", s), SpecError);
}

TEST(Fnv1a, KnownValues) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
}

TEST(CompileCached, WritesAndReuses) {
  auto dir = std::filesystem::temp_directory_path() / "evstl_cache_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  auto path = dir / "single_robot.json";
  std::filesystem::copy_file(evstl::testing::scenario_file("single_robot"), path);
  auto s = load_scenario(path);
  auto first = compile_cached(path, s);

  std::vector<std::filesystem::path> written;
  for (const auto& e : std::filesystem::directory_iterator(dir)) written.push_back(e.path().filename());
  ASSERT_EQ(written.size(), 2u);
  std::regex name(R"(single_robot\.[0-9a-f]{16}\.compiled\.json)");
  int matches = 0;
  for (const auto& w : written) matches += std::regex_match(w.string(), name);
  EXPECT_EQ(matches, 1);

  auto second = compile_cached(path, s);
  EXPECT_EQ(second.source_hash, first.source_hash);
  EXPECT_EQ(dump(second.automaton), dump(first.automaton));

  // editing the scenario produces a new artifact
  std::ofstream(path, std::ios::app) << "\n";
  compile_cached(path, load_scenario(path));
  EXPECT_EQ(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator()), 3);
  std::filesystem::remove_all(dir);
}

}  // namespace
