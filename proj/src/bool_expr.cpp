#include "evstl/bool_expr.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <set>

namespace evstl {

struct BoolExpr::Node {
  Kind kind = Kind::True;
  std::string name;
  std::vector<BoolExpr> operands;
};

BoolExpr::BoolExpr() {
  static const auto true_node = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::True;
    return std::shared_ptr<const Node>(n);
  }();
  node_ = true_node;
}

BoolExpr::BoolExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

BoolExpr BoolExpr::constant(bool value) {
  if (value) return BoolExpr();
  static const auto false_node = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::False;
    return std::shared_ptr<const Node>(n);
  }();
  return BoolExpr(false_node);
}

BoolExpr BoolExpr::var(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->name = std::move(name);
  return BoolExpr(std::move(n));
}

BoolExpr BoolExpr::negate(BoolExpr operand) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Not;
  n->operands.push_back(std::move(operand));
  return BoolExpr(std::move(n));
}

BoolExpr BoolExpr::conjunction(std::vector<BoolExpr> operands) {
  if (operands.empty()) return constant(true);
  if (operands.size() == 1) return std::move(operands.front());
  auto n = std::make_shared<Node>();
  n->kind = Kind::And;
  n->operands = std::move(operands);
  return BoolExpr(std::move(n));
}

BoolExpr BoolExpr::disjunction(std::vector<BoolExpr> operands) {
  if (operands.empty()) return constant(false);
  if (operands.size() == 1) return std::move(operands.front());
  auto n = std::make_shared<Node>();
  n->kind = Kind::Or;
  n->operands = std::move(operands);
  return BoolExpr(std::move(n));
}

BoolExpr::Kind BoolExpr::kind() const { return node_->kind; }
const std::string& BoolExpr::name() const { return node_->name; }
const std::vector<BoolExpr>& BoolExpr::operands() const { return node_->operands; }

bool BoolExpr::eval(const std::function<bool(const std::string&)>& value_of) const {
  switch (kind()) {
    case Kind::True:
      return true;
    case Kind::False:
      return false;
    case Kind::Var:
      return value_of(name());
    case Kind::Not:
      return !operands().front().eval(value_of);
    case Kind::And:
      return std::all_of(operands().begin(), operands().end(),
                         [&](const BoolExpr& e) { return e.eval(value_of); });
    case Kind::Or:
      return std::any_of(operands().begin(), operands().end(),
                         [&](const BoolExpr& e) { return e.eval(value_of); });
  }
  return false;
}

bool BoolExpr::eval(const std::set<std::string>& true_vars) const {
  return eval([&](const std::string& v) { return true_vars.count(v) > 0; });
}

namespace {

void collect_vars(const BoolExpr& e, std::set<std::string>& out) {
  if (e.kind() == BoolExpr::Kind::Var) out.insert(e.name());
  for (const auto& child : e.operands()) collect_vars(child, out);
}

}  // namespace

std::vector<std::string> BoolExpr::vars() const {
  std::set<std::string> names;
  collect_vars(*this, names);
  return {names.begin(), names.end()};
}

std::string BoolExpr::to_string() const {
  switch (kind()) {
    case Kind::True:
      return "true";
    case Kind::False:
      return "false";
    case Kind::Var:
      return name();
    case Kind::Not: {
      const auto& child = operands().front();
      bool atomic = child.kind() != Kind::And && child.kind() != Kind::Or;
      return atomic ? "!" + child.to_string() : "!(" + child.to_string() + ")";
    }
    case Kind::And:
    case Kind::Or: {
      std::string sep = kind() == Kind::And ? " & " : " | ";
      std::string out;
      for (std::size_t i = 0; i < operands().size(); ++i) {
        const auto& child = operands()[i];
        if (i) out += sep;
        // nested binaries are always parenthesized so printing is injective
        bool nested = child.kind() == Kind::And || child.kind() == Kind::Or;
        out += nested ? "(" + child.to_string() + ")" : child.to_string();
      }
      return out;
    }
  }
  return {};
}

bool operator==(const BoolExpr& lhs, const BoolExpr& rhs) {
  if (lhs.node_ == rhs.node_) return true;
  return lhs.kind() == rhs.kind() && lhs.name() == rhs.name() &&
         lhs.operands() == rhs.operands();
}

namespace {

class BoolParser {
 public:
  explicit BoolParser(std::string_view text) : text_(text) {}

  BoolExpr parse_all() {
    BoolExpr e = parse_or();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      // tolerate the doubled forms && and ||
      if ((c == '&' || c == '|') && pos_ < text_.size() && text_[pos_] == c) ++pos_;
      return true;
    }
    return false;
  }

  BoolExpr parse_or() {
    std::vector<BoolExpr> parts{parse_and()};
    while (accept('|')) parts.push_back(parse_and());
    return BoolExpr::disjunction(std::move(parts));
  }

  BoolExpr parse_and() {
    std::vector<BoolExpr> parts{parse_unary()};
    while (accept('&')) parts.push_back(parse_unary());
    return BoolExpr::conjunction(std::move(parts));
  }

  BoolExpr parse_unary() {
    if (accept('!')) return BoolExpr::negate(parse_unary());
    if (accept('(')) {
      BoolExpr e = parse_or();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) throw ParseError("expected identifier", pos_);
    std::string word(text_.substr(start, pos_ - start));
    if (word == "true") return BoolExpr::constant(true);
    if (word == "false") return BoolExpr::constant(false);
    return BoolExpr::var(std::move(word));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// Cubes are sorted literal vectors; merging fails on a contradiction.
bool merge_cubes(const Cube& a, const Cube& b, Cube& out) {
  out.clear();
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].var == out[i - 1].var) return false;
  }
  return true;
}

bool cube_subsumes(const Cube& weaker, const Cube& stronger) {
  return std::includes(stronger.begin(), stronger.end(), weaker.begin(), weaker.end());
}

std::vector<Cube> minimize(std::vector<Cube> cubes) {
  std::sort(cubes.begin(), cubes.end(),
            [](const Cube& a, const Cube& b) {
              return a.size() != b.size() ? a.size() < b.size() : a < b;
            });
  cubes.erase(std::unique(cubes.begin(), cubes.end()), cubes.end());
  std::vector<Cube> kept;
  for (auto& c : cubes) {
    bool redundant = std::any_of(kept.begin(), kept.end(),
                                 [&](const Cube& k) { return cube_subsumes(k, c); });
    if (!redundant) kept.push_back(std::move(c));
  }
  return kept;
}

std::vector<Cube> dnf(const BoolExpr& e, bool negated) {
  using K = BoolExpr::Kind;
  switch (e.kind()) {
    case K::True:
      return negated ? std::vector<Cube>{} : std::vector<Cube>{Cube{}};
    case K::False:
      return negated ? std::vector<Cube>{Cube{}} : std::vector<Cube>{};
    case K::Var:
      return {Cube{Literal{e.name(), !negated}}};
    case K::Not:
      return dnf(e.operands().front(), !negated);
    case K::And:
    case K::Or: {
      bool conjunctive = (e.kind() == K::And) != negated;
      if (!conjunctive) {
        std::vector<Cube> out;
        for (const auto& child : e.operands()) {
          auto part = dnf(child, negated);
          out.insert(out.end(), part.begin(), part.end());
        }
        return minimize(std::move(out));
      }
      std::vector<Cube> acc{Cube{}};
      Cube merged;
      for (const auto& child : e.operands()) {
        auto part = dnf(child, negated);
        std::vector<Cube> next;
        for (const auto& a : acc) {
          for (const auto& b : part) {
            if (merge_cubes(a, b, merged)) next.push_back(merged);
          }
        }
        acc = minimize(std::move(next));
        if (acc.empty()) break;
      }
      return acc;
    }
  }
  return {};
}

}  // namespace

BoolExpr BoolExpr::parse(std::string_view text) { return BoolParser(text).parse_all(); }

std::vector<Cube> to_dnf(const BoolExpr& expr) {
  auto cubes = dnf(expr, false);
  // a | !a and the like: merge cubes that differ in one literal's sign
  for (bool changed = true; changed && cubes.size() > 1;) {
    changed = false;
    for (std::size_t i = 0; i < cubes.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < cubes.size() && !changed; ++j) {
        const Cube& a = cubes[i];
        const Cube& b = cubes[j];
        if (a.size() != b.size()) continue;
        std::size_t diff = 0, at = 0;
        for (std::size_t k = 0; k < a.size() && diff < 2; ++k) {
          if (a[k] == b[k]) continue;
          if (a[k].var != b[k].var) diff = 2;
          ++diff, at = k;
        }
        if (diff != 1) continue;
        Cube merged = a;
        merged.erase(merged.begin() + static_cast<std::ptrdiff_t>(at));
        cubes.push_back(std::move(merged));
        cubes = minimize(std::move(cubes));
        changed = true;
      }
    }
  }
  if (cubes.size() < 2) return cubes;
  auto vars = expr.vars();
  if (vars.size() > 16) return cubes;
  for (std::uint32_t m = 0; m < (1u << vars.size()); ++m) {
    std::set<std::string> on;
    for (std::size_t k = 0; k < vars.size(); ++k) {
      if (m >> k & 1) on.insert(vars[k]);
    }
    if (!expr.eval(on)) return cubes;
  }
  return {Cube{}};
}

BoolExpr from_dnf(const std::vector<Cube>& cubes) {
  std::vector<BoolExpr> terms;
  for (const auto& cube : cubes) {
    std::vector<BoolExpr> lits;
    for (const auto& lit : cube) {
      auto v = BoolExpr::var(lit.var);
      lits.push_back(lit.positive ? v : BoolExpr::negate(v));
    }
    terms.push_back(BoolExpr::conjunction(std::move(lits)));
  }
  return BoolExpr::disjunction(std::move(terms));
}

}  // namespace evstl
