#include <cctype>
#include <charconv>

#include "evstl/formula.hpp"

namespace evstl {

namespace {

enum class Tok { Ident, Number, LBracket, RBracket, LParen, RParen, Comma, And, Or, Not, Arrow, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  std::size_t pos = 0;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.pos = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(s.substr(i, j - i));
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s.data() + i;
      auto [end, ec] = std::from_chars(begin, s.data() + s.size(), t.number);
      if (ec != std::errc()) throw ParseError("malformed number", i);
      t.kind = Tok::Number;
      i += static_cast<std::size_t>(end - begin);
    } else if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
      t.kind = Tok::Arrow;
      i += 2;
    } else if (c == '&' || c == '|') {
      t.kind = c == '&' ? Tok::And : Tok::Or;
      i += (i + 1 < s.size() && s[i + 1] == c) ? 2 : 1;
    } else {
      switch (c) {
        case '[': t.kind = Tok::LBracket; break;
        case ']': t.kind = Tok::RBracket; break;
        case '(': t.kind = Tok::LParen; break;
        case ')': t.kind = Tok::RParen; break;
        case ',': t.kind = Tok::Comma; break;
        case '!': t.kind = Tok::Not; break;
        default:
          throw ParseError(std::string("unexpected character '") + c + "'", i);
      }
      ++i;
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::End;
  end.pos = s.size();
  out.push_back(end);
  return out;
}

bool is_keyword(const std::string& word) { return word == "G" || word == "F" || word == "U"; }

class FormulaParser {
 public:
  FormulaParser(std::string_view text, const Declarations& decls)
      : tokens_(tokenize(text)), decls_(decls) {}

  StlFormula parse() {
    StlFormula f = parse_spec();
    if (peek().kind != Tok::End) fail("unexpected trailing input");
    return f;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, peek().pos);
  }

  bool accept(Tok kind) {
    if (peek().kind != kind) return false;
    ++pos_;
    return true;
  }

  void expect(Tok kind, const char* what) {
    if (!accept(kind)) fail(std::string("expected ") + what);
  }

  bool at_keyword(const char* word) const {
    return peek().kind == Tok::Ident && peek().text == word;
  }

  StlFormula parse_spec() {
    std::vector<StlFormula> parts{parse_conjunct()};
    while (accept(Tok::And)) parts.push_back(parse_conjunct());
    if (parts.size() == 1) return std::move(parts.front());
    return StlFormula::conjunction(std::move(parts));
  }

  StlFormula parse_conjunct() {
    if (at_keyword("G")) {
      next();
      if (peek().kind == Tok::LBracket) {
        TimeInterval iv = parse_interval();
        expect(Tok::LParen, "'('");
        PredicateConj body = parse_predconj();
        expect(Tok::RParen, "')'");
        return StlFormula::always(iv, std::move(body));
      }
      expect(Tok::LParen, "'(' or '[' after G");
      StlFormula f = parse_guarded();
      expect(Tok::RParen, "')'");
      return f;
    }
    if (at_keyword("F")) {
      next();
      if (peek().kind != Tok::LBracket) fail("F requires a time interval");
      TimeInterval iv = parse_interval();
      expect(Tok::LParen, "'('");
      PredicateConj body = parse_predconj();
      expect(Tok::RParen, "')'");
      return StlFormula::eventually(iv, std::move(body));
    }
    if (at_keyword("U")) fail("U needs a left operand");
    if (peek().kind == Tok::LParen) {
      std::size_t saved = pos_;
      try {
        PredicateConj left = parse_operand();
        if (at_keyword("U")) return parse_until_rest(std::move(left));
      } catch (const ParseError&) {
      }
      pos_ = saved;
      next();
      StlFormula inner = parse_spec();
      expect(Tok::RParen, "')'");
      return inner;
    }
    if (peek().kind == Tok::Ident || peek().kind == Tok::Not) {
      std::size_t at = peek().pos;
      PredicateConj left = parse_operand();
      if (at_keyword("U")) return parse_until_rest(std::move(left));
      throw ParseError("predicate literal outside a temporal operator", at);
    }
    fail("expected G, F, U or '('");
  }

  StlFormula parse_until_rest(PredicateConj left) {
    next();  // U
    if (peek().kind != Tok::LBracket) fail("U requires a time interval");
    TimeInterval iv = parse_interval();
    PredicateConj right = parse_operand();
    return StlFormula::until(iv, std::move(left), std::move(right));
  }

  TimeInterval parse_interval() {
    expect(Tok::LBracket, "'['");
    std::size_t at = peek().pos;
    TimeInterval iv;
    if (peek().kind != Tok::Number) fail("expected interval lower bound");
    iv.lower = next().number;
    expect(Tok::Comma, "','");
    if (peek().kind == Tok::Number) {
      iv.upper = next().number;
    } else if (at_keyword("inf")) {
      next();
      iv.upper = kInfinity;
    } else {
      fail("expected interval upper bound");
    }
    expect(Tok::RBracket, "']'");
    if (iv.lower > iv.upper) throw ParseError("interval lower bound exceeds upper bound", at);
    return iv;
  }

  PredicateLiteral parse_literal() {
    bool negated = false;
    while (accept(Tok::Not)) negated = !negated;
    if (peek().kind != Tok::Ident || is_keyword(peek().text)) fail("expected predicate name");
    const Token& t = next();
    if (decls_.is_event(t.text)) {
      throw ParseError("event '" + t.text + "' used where a predicate is required", t.pos);
    }
    if (!decls_.is_predicate(t.text)) throw ParseError("unknown identifier '" + t.text + "'", t.pos);
    return {t.text, negated};
  }

  // literal | '(' predconj ')'
  PredicateConj parse_operand() {
    if (accept(Tok::LParen)) {
      PredicateConj c = parse_predconj();
      expect(Tok::RParen, "')'");
      return c;
    }
    return PredicateConj{{parse_literal()}};
  }

  PredicateConj parse_predconj() {
    PredicateConj c;
    auto append = [&] {
      if (accept(Tok::LParen)) {
        PredicateConj inner = parse_predconj();
        expect(Tok::RParen, "')'");
        c.literals.insert(c.literals.end(), inner.literals.begin(), inner.literals.end());
      } else {
        c.literals.push_back(parse_literal());
      }
    };
    append();
    while (accept(Tok::And)) append();
    if (peek().kind == Tok::Or) fail("disjunction of predicates is not allowed");
    return c;
  }

  // Content of G( ... ): either `antecedent -> spec` or a predicate conjunction.
  StlFormula parse_guarded() {
    std::size_t start = peek().pos;
    classes_ = {};
    BoolExpr expr = parse_bool_or();
    if (accept(Tok::Arrow)) {
      Antecedent ant;
      if (classes_.events && classes_.predicates) {
        throw ParseError("antecedent mixes environment events and predicates", start);
      }
      if (classes_.events) {
        ant.events = expr;
      } else {
        ant.predicates = literals_of(expr, start);
      }
      StlFormula body = parse_spec();
      return StlFormula::implies(std::move(ant), std::move(body));
    }
    if (classes_.events) {
      throw ParseError("G over environment events needs an implication body", start);
    }
    return StlFormula::always(TimeInterval{}, literals_of(expr, start));
  }

  PredicateConj literals_of(const BoolExpr& e, std::size_t at) const {
    PredicateConj c;
    auto literal = [&](const BoolExpr& x) {
      if (x.kind() == BoolExpr::Kind::Var) {
        c.literals.push_back({x.name(), false});
      } else if (x.kind() == BoolExpr::Kind::Not &&
                 x.operands().front().kind() == BoolExpr::Kind::Var) {
        c.literals.push_back({x.operands().front().name(), true});
      } else {
        throw ParseError("predicates may only be combined by conjunction", at);
      }
    };
    if (e.kind() == BoolExpr::Kind::And) {
      for (const auto& x : e.operands()) literal(x);
    } else {
      literal(e);
    }
    return c;
  }

  BoolExpr parse_bool_or() {
    std::vector<BoolExpr> parts{parse_bool_and()};
    while (accept(Tok::Or)) parts.push_back(parse_bool_and());
    return BoolExpr::disjunction(std::move(parts));
  }

  BoolExpr parse_bool_and() {
    std::vector<BoolExpr> parts{parse_bool_unary()};
    while (accept(Tok::And)) parts.push_back(parse_bool_unary());
    return BoolExpr::conjunction(std::move(parts));
  }

  BoolExpr parse_bool_unary() {
    if (accept(Tok::Not)) return BoolExpr::negate(parse_bool_unary());
    if (accept(Tok::LParen)) {
      BoolExpr e = parse_bool_or();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (peek().kind != Tok::Ident || is_keyword(peek().text)) {
      fail("temporal operators may only appear after '->' inside G(...)");
    }
    const Token& t = next();
    if (decls_.is_event(t.text)) {
      classes_.events = true;
    } else if (decls_.is_predicate(t.text)) {
      classes_.predicates = true;
    } else {
      throw ParseError("unknown identifier '" + t.text + "'", t.pos);
    }
    return BoolExpr::var(t.text);
  }

  struct Classes {
    bool events = false;
    bool predicates = false;
  };

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const Declarations& decls_;
  Classes classes_;
};

std::string number_text(double v) {
  if (v == kInfinity) return "inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace

std::string to_string(const TimeInterval& iv) {
  return "[" + number_text(iv.lower) + "," + number_text(iv.upper) + "]";
}

std::string to_string(const PredicateConj& conj) {
  std::string out;
  for (std::size_t i = 0; i < conj.literals.size(); ++i) {
    if (i) out += " & ";
    if (conj.literals[i].negated) out += "!";
    out += conj.literals[i].predicate;
  }
  return out;
}

std::string to_string(const StlFormula& f) {
  switch (f.kind) {
    case FormulaKind::Always:
      if (f.interval == TimeInterval{}) return "G(" + to_string(f.body) + ")";
      return "G" + to_string(f.interval) + "(" + to_string(f.body) + ")";
    case FormulaKind::Eventually:
      return "F" + to_string(f.interval) + "(" + to_string(f.body) + ")";
    case FormulaKind::Until:
      return "(" + to_string(f.body) + ") U" + to_string(f.interval) + " (" + to_string(f.goal) +
             ")";
    case FormulaKind::Implies: {
      std::string ant = f.antecedent.over_events() ? f.antecedent.events->to_string()
                                                   : to_string(f.antecedent.predicates);
      return "G(" + ant + " -> " + to_string(f.children.front()) + ")";
    }
    case FormulaKind::Conjunction: {
      std::string out;
      for (std::size_t i = 0; i < f.children.size(); ++i) {
        if (i) out += " & ";
        const auto& c = f.children[i];
        out += c.kind == FormulaKind::Conjunction ? "(" + to_string(c) + ")" : to_string(c);
      }
      return out;
    }
  }
  return {};
}

StlFormula parse_formula(std::string_view text, const Declarations& decls) {
  for (const auto& [name, pred] : decls.predicates) {
    if (decls.is_event(name)) throw SpecError("'" + name + "' declared as predicate and event");
  }
  return FormulaParser(text, decls).parse();
}

}  // namespace evstl
