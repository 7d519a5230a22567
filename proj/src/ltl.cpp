#include "evstl/ltl.hpp"

#include <cctype>
#include <set>

#include "evstl/bool_expr.hpp"

namespace evstl {

LtlFormula LtlFormula::constant(bool value) {
  LtlFormula f;
  f.kind = value ? LtlKind::True : LtlKind::False;
  return f;
}

LtlFormula LtlFormula::prop(std::string name) {
  LtlFormula f;
  f.kind = LtlKind::Prop;
  f.name = std::move(name);
  return f;
}

namespace {

LtlFormula make(LtlKind kind, std::vector<LtlFormula> args) {
  LtlFormula f;
  f.kind = kind;
  f.args = std::move(args);
  return f;
}

}  // namespace

LtlFormula LtlFormula::negate(LtlFormula f) { return make(LtlKind::Not, {std::move(f)}); }

LtlFormula LtlFormula::conjunction(std::vector<LtlFormula> fs) {
  if (fs.empty()) return constant(true);
  if (fs.size() == 1) return std::move(fs.front());
  return make(LtlKind::And, std::move(fs));
}

LtlFormula LtlFormula::disjunction(std::vector<LtlFormula> fs) {
  if (fs.empty()) return constant(false);
  if (fs.size() == 1) return std::move(fs.front());
  return make(LtlKind::Or, std::move(fs));
}

LtlFormula LtlFormula::implies(LtlFormula lhs, LtlFormula rhs) {
  return make(LtlKind::Implies, {std::move(lhs), std::move(rhs)});
}
LtlFormula LtlFormula::next(LtlFormula f) { return make(LtlKind::Next, {std::move(f)}); }
LtlFormula LtlFormula::until(LtlFormula lhs, LtlFormula rhs) {
  return make(LtlKind::Until, {std::move(lhs), std::move(rhs)});
}
LtlFormula LtlFormula::release(LtlFormula lhs, LtlFormula rhs) {
  return make(LtlKind::Release, {std::move(lhs), std::move(rhs)});
}
LtlFormula LtlFormula::eventually(LtlFormula f) { return make(LtlKind::Eventually, {std::move(f)}); }
LtlFormula LtlFormula::always(LtlFormula f) { return make(LtlKind::Always, {std::move(f)}); }

namespace {

void collect_props(const LtlFormula& f, std::set<std::string>& out) {
  if (f.kind == LtlKind::Prop) out.insert(f.name);
  for (const auto& a : f.args) collect_props(a, out);
}

bool is_temporal(LtlKind k) {
  return k == LtlKind::Next || k == LtlKind::Until || k == LtlKind::Release ||
         k == LtlKind::Eventually || k == LtlKind::Always;
}

}  // namespace

std::vector<std::string> LtlFormula::props() const {
  std::set<std::string> names;
  collect_props(*this, names);
  return {names.begin(), names.end()};
}

std::size_t LtlFormula::temporal_depth_count() const {
  std::size_t n = is_temporal(kind) ? 1 : 0;
  for (const auto& a : args) n += a.temporal_depth_count();
  return n;
}

namespace {

int precedence(LtlKind k) {
  switch (k) {
    case LtlKind::Implies:
      return 1;
    case LtlKind::Or:
      return 2;
    case LtlKind::And:
      return 3;
    case LtlKind::Until:
    case LtlKind::Release:
      return 4;
    default:
      return 5;
  }
}

std::string print(const LtlFormula& f) {
  auto child = [&](const LtlFormula& c, bool strict) {
    std::string s = print(c);
    int pc = precedence(c.kind), pf = precedence(f.kind);
    bool wrap = pc < pf || (strict && pc == pf && pc < 5);
    return wrap ? "(" + s + ")" : s;
  };
  switch (f.kind) {
    case LtlKind::True:
      return "true";
    case LtlKind::False:
      return "false";
    case LtlKind::Prop:
      return f.name;
    case LtlKind::Not:
      return "!" + child(f.args[0], false);
    case LtlKind::Next:
      return "X " + child(f.args[0], false);
    case LtlKind::Eventually:
      return "F " + child(f.args[0], false);
    case LtlKind::Always:
      return "G " + child(f.args[0], false);
    case LtlKind::And:
    case LtlKind::Or: {
      std::string sep = f.kind == LtlKind::And ? " & " : " | ";
      std::string out;
      for (std::size_t i = 0; i < f.args.size(); ++i) {
        if (i) out += sep;
        out += child(f.args[i], true);
      }
      return out;
    }
    case LtlKind::Implies:
      return child(f.args[0], true) + " -> " + child(f.args[1], false);
    case LtlKind::Until:
    case LtlKind::Release:
      return child(f.args[0], true) + (f.kind == LtlKind::Until ? " U " : " R ") +
             child(f.args[1], true);
  }
  return {};
}

class LtlParser {
 public:
  explicit LtlParser(std::string_view text) : text_(text) {}

  LtlFormula parse_all() {
    LtlFormula f = parse_implies();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
    return f;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) != tok) return false;
    // single-letter operators must not swallow the start of an identifier
    if (std::isalpha(static_cast<unsigned char>(tok[0])) && pos_ + tok.size() < text_.size()) {
      char c = text_[pos_ + tok.size()];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') return false;
    }
    pos_ += tok.size();
    return true;
  }

  LtlFormula parse_implies() {
    LtlFormula lhs = parse_or();
    if (accept("->")) return LtlFormula::implies(std::move(lhs), parse_implies());
    return lhs;
  }

  LtlFormula parse_or() {
    std::vector<LtlFormula> parts{parse_and()};
    while (accept("||") || accept("|")) parts.push_back(parse_and());
    return LtlFormula::disjunction(std::move(parts));
  }

  LtlFormula parse_and() {
    std::vector<LtlFormula> parts{parse_binary()};
    while (accept("&&") || accept("&")) parts.push_back(parse_binary());
    return LtlFormula::conjunction(std::move(parts));
  }

  LtlFormula parse_binary() {
    LtlFormula lhs = parse_unary();
    if (accept("U")) return LtlFormula::until(std::move(lhs), parse_binary());
    if (accept("R")) return LtlFormula::release(std::move(lhs), parse_binary());
    return lhs;
  }

  LtlFormula parse_unary() {
    if (accept("!")) return LtlFormula::negate(parse_unary());
    if (accept("X")) return LtlFormula::next(parse_unary());
    if (accept("F")) return LtlFormula::eventually(parse_unary());
    if (accept("G")) return LtlFormula::always(parse_unary());
    if (accept("(")) {
      LtlFormula f = parse_implies();
      if (!accept(")")) throw ParseError("expected ')'", pos_);
      return f;
    }
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) throw ParseError("expected proposition", pos_);
    std::string word(text_.substr(start, pos_ - start));
    if (word == "true") return LtlFormula::constant(true);
    if (word == "false") return LtlFormula::constant(false);
    return LtlFormula::prop(std::move(word));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

LtlFormula parse_ltl(std::string_view text) { return LtlParser(text).parse_all(); }

std::string to_string(const LtlFormula& f) { return print(f); }

}  // namespace evstl
