#include <gtest/gtest.h>

#include <random>

#include "evstl/bool_expr.hpp"
#include "evstl/ltl.hpp"

using namespace evstl;

namespace {

TEST(BoolExpr, ParseAndEval) {
  auto e = BoolExpr::parse("!a & (b | c)");
  EXPECT_TRUE(e.eval(std::set<std::string>{"b"}));
  EXPECT_FALSE(e.eval(std::set<std::string>{"a", "b"}));
  EXPECT_FALSE(e.eval(std::set<std::string>{}));
  EXPECT_EQ(e.vars(), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_TRUE(BoolExpr().eval(std::set<std::string>{}));
}

TEST(BoolExpr, Precedence) {
  // & binds tighter than |
  auto e = BoolExpr::parse("a | b & c");
  EXPECT_TRUE(e.eval(std::set<std::string>{"a"}));
  EXPECT_FALSE(e.eval(std::set<std::string>{"b"}));
}

TEST(BoolExpr, ParseErrors) {
  for (const char* bad : {"", "a &", "(a", "a b", "a & | b", "&"}) {
    EXPECT_THROW(BoolExpr::parse(bad), ParseError) << bad;
  }
}

TEST(Dnf, ContradictionAndTautology) {
  EXPECT_TRUE(to_dnf(BoolExpr::parse("a & !a")).empty());
  auto valid = to_dnf(BoolExpr::parse("a | !a"));
  ASSERT_EQ(valid.size(), 1u);
  EXPECT_TRUE(valid[0].empty());
}

TEST(Dnf, Subsumption) {
  auto cubes = to_dnf(BoolExpr::parse("a | a & b"));
  ASSERT_EQ(cubes.size(), 1u);
  EXPECT_EQ(cubes[0], (Cube{{"a", true}}));
}

std::string random_text(std::mt19937& rng, int depth) {
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  static const char* vars[] = {"a", "b", "c", "d"};
  if (depth == 0 || pick(3) == 0) return vars[pick(4)];
  switch (pick(3)) {
    case 0:
      return "!" + random_text(rng, depth - 1);
    case 1:
      return "(" + random_text(rng, depth - 1) + " & " + random_text(rng, depth - 1) + ")";
    default:
      return "(" + random_text(rng, depth - 1) + " | " + random_text(rng, depth - 1) + ")";
  }
}

TEST(BoolExprProperty, PrintParseAndDnfPreserveEvaluation) {
  std::mt19937 rng(5);
  const std::vector<std::string> vars{"a", "b", "c", "d"};
  for (int i = 0; i < 300; ++i) {
    auto e = BoolExpr::parse(random_text(rng, 4));
    auto printed = BoolExpr::parse(e.to_string());
    auto dnf = from_dnf(to_dnf(e));
    for (int m = 0; m < 16; ++m) {
      std::set<std::string> on;
      for (int k = 0; k < 4; ++k) {
        if (m >> k & 1) on.insert(vars[k]);
      }
      ASSERT_EQ(e.eval(on), printed.eval(on)) << e.to_string();
      ASSERT_EQ(e.eval(on), dnf.eval(on)) << e.to_string();
    }
  }
}

TEST(Ltl, ParseAndPrint) {
  auto f = parse_ltl("G(alarm -> F p)");
  EXPECT_EQ(f.kind, LtlKind::Always);
  EXPECT_EQ(f.props(), (std::vector<std::string>{"alarm", "p"}));
  EXPECT_EQ(f.temporal_depth_count(), 2u);
  EXPECT_EQ(parse_ltl(to_string(f)), f);
  // -> is right associative
  EXPECT_EQ(parse_ltl("a -> b -> c"), parse_ltl("a -> (b -> c)"));
  EXPECT_EQ(parse_ltl("a | b & c"), parse_ltl("a | (b & c)"));
  EXPECT_EQ(parse_ltl("!a U b"), parse_ltl("(!a) U b"));
  EXPECT_THROW(parse_ltl("a U"), ParseError);
}

}  // namespace
