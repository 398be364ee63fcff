#include "foml/parser.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

namespace foml {

namespace {

enum class Tok { Ident, LParen, RParen, Comma, Dot, Not, And, Or, Implies, Iff, Box, Diamond, Forall, Exists, End };

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::Not: return "'~'";
    case Tok::And: return "'&'";
    case Tok::Or: return "'|'";
    case Tok::Implies: return "'->'";
    case Tok::Iff: return "'<->'";
    case Tok::Box: return "'[]'";
    case Tok::Diamond: return "'<>'";
    case Tok::Forall: return "'forall'";
    case Tok::Exists: return "'exists'";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::vector<Token> lex(std::string_view s) {
  struct Alias {
    std::string_view text;
    Tok kind;
  };
  static const Alias aliases[] = {
      {"<->", Tok::Iff},      {"->", Tok::Implies},  {"[]", Tok::Box},        {"<>", Tok::Diamond},
      {"↔", Tok::Iff},   {"→", Tok::Implies}, {"□", Tok::Box}, {"◇", Tok::Diamond},
      {"∀", Tok::Forall}, {"∃", Tok::Exists}, {"¬", Tok::Not}, {"∧", Tok::And},
      {"∨", Tok::Or},    {"~", Tok::Not},       {"&", Tok::And},         {"|", Tok::Or},
      {"(", Tok::LParen},     {")", Tok::RParen},    {",", Tok::Comma},       {".", Tok::Dot},
  };
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < s.size() && s[i] != '\n') ++i;
      continue;
    }
    if (std::isalpha(c) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '\'')) ++j;
      std::string word(s.substr(i, j - i));
      Tok k = word == "forall" ? Tok::Forall : word == "exists" ? Tok::Exists : Tok::Ident;
      out.push_back({k, word, {i, j}});
      i = j;
      continue;
    }
    bool matched = false;
    for (const auto& a : aliases) {
      if (s.substr(i, a.text.size()) == a.text) {
        out.push_back({a.kind, std::string(a.text), {i, i + a.text.size()}});
        i += a.text.size();
        matched = true;
        break;
      }
    }
    if (!matched) {
      std::size_t j = i + 1;
      while (j < s.size() && (static_cast<unsigned char>(s[j]) & 0xC0) == 0x80) ++j;
      throw ParseError("unexpected character '" + std::string(s.substr(i, j - i)) + "'", {i, j});
    }
  }
  out.push_back({Tok::End, "", {s.size(), s.size()}});
  return out;
}

class Parser {
public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  Formula parse() {
    Formula f = iff();
    expect(Tok::End);
    return f;
  }

private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::map<std::string, std::pair<std::size_t, SourceSpan>> arity_;

  const Token& peek() const { return toks_[pos_]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }
  const Token& expect(Tok k) {
    if (peek().kind != k) {
      throw ParseError(std::string("expected ") + tok_name(k) + ", found " + tok_name(peek().kind), peek().span);
    }
    return toks_[pos_++];
  }

  Formula iff() {
    Formula f = imp();
    while (accept(Tok::Iff)) f = Formula::iff(f, imp());
    return f;
  }
  Formula imp() {
    Formula f = disj();
    if (accept(Tok::Implies)) return Formula::implies(f, imp());
    return f;
  }
  Formula disj() {
    Formula f = conj();
    while (accept(Tok::Or)) f = Formula::disj(f, conj());
    return f;
  }
  Formula conj() {
    Formula f = unary();
    while (accept(Tok::And)) f = Formula::conj(f, unary());
    return f;
  }
  Var variable() {
    const Token& t = expect(Tok::Ident);
    if (!std::islower(static_cast<unsigned char>(t.text[0]))) {
      throw ParseError("expected a variable (lowercase identifier), found '" + t.text + "'", t.span);
    }
    return t.text;
  }
  Formula unary() {
    if (accept(Tok::Not)) return Formula::negation(unary());
    if (accept(Tok::Box)) return Formula::box(unary());
    if (accept(Tok::Diamond)) return Formula::diamond(unary());
    if (peek().kind == Tok::Forall || peek().kind == Tok::Exists) {
      bool uni = toks_[pos_++].kind == Tok::Forall;
      Var v = variable();
      accept(Tok::Dot);
      Formula body = iff();
      return uni ? Formula::forall(v, body) : Formula::exists(v, body);
    }
    return primary();
  }
  Formula primary() {
    if (accept(Tok::LParen)) {
      Formula f = iff();
      expect(Tok::RParen);
      return f;
    }
    const Token& t = peek();
    if (t.kind != Tok::Ident) {
      throw ParseError(std::string("expected a formula, found ") + tok_name(t.kind), t.span);
    }
    if (!std::isupper(static_cast<unsigned char>(t.text[0]))) {
      throw ParseError("expected a predicate (uppercase identifier), found '" + t.text + "'", t.span);
    }
    ++pos_;
    std::vector<Var> args;
    SourceSpan span = t.span;
    std::string name = t.text;
    if (accept(Tok::LParen)) {
      if (peek().kind != Tok::RParen) {
        args.push_back(variable());
        while (accept(Tok::Comma)) args.push_back(variable());
      }
      span.end = expect(Tok::RParen).span.end;
    }
    auto [it, inserted] = arity_.emplace(name, std::make_pair(args.size(), span));
    if (!inserted && it->second.first != args.size()) {
      throw ParseError("arity clash: predicate " + name + " used with " + std::to_string(it->second.first) +
                           " and " + std::to_string(args.size()) + " arguments",
                       span);
    }
    return Formula::pred(name, std::move(args));
  }
};

int prec(Op op) {
  switch (op) {
    case Op::Iff: return 1;
    case Op::Implies: return 2;
    case Op::Or: return 3;
    case Op::And: return 4;
    default: return 5;
  }
}

// `tail`: nothing follows f at this nesting level, so a quantifier may run to the end.
void print(const Formula& f, bool tail, std::ostream& os) {
  switch (f.op()) {
    case Op::Pred:
      os << f.symbol();
      if (!f.args().empty()) {
        os << '(';
        for (std::size_t i = 0; i < f.args().size(); ++i) os << (i ? "," : "") << f.args()[i];
        os << ')';
      }
      return;
    case Op::Not: case Op::Box: case Op::Diamond: {
      os << (f.op() == Op::Not ? "~" : f.op() == Op::Box ? "[]" : "<>");
      bool paren = f.body().is_binary();
      if (paren) os << '(';
      print(f.body(), tail || paren, os);
      if (paren) os << ')';
      return;
    }
    case Op::Exists: case Op::Forall:
      if (!tail) os << '(';
      os << (f.op() == Op::Exists ? "exists " : "forall ") << f.symbol() << ". ";
      print(f.body(), true, os);
      if (!tail) os << ')';
      return;
    default: {
      int p = prec(f.op());
      bool right_assoc = f.op() == Op::Implies;
      int lp = prec(f.lhs().op()), rp = prec(f.rhs().op());
      bool lparen = right_assoc ? lp <= p : lp < p;
      bool rparen = right_assoc ? rp < p : rp <= p;
      if (lparen) os << '(';
      print(f.lhs(), lparen, os);
      if (lparen) os << ')';
      const char* sym = f.op() == Op::And ? " & " : f.op() == Op::Or ? " | " : f.op() == Op::Implies ? " -> " : " <-> ";
      os << sym;
      if (rparen) os << '(';
      print(f.rhs(), rparen || tail, os);
      if (rparen) os << ')';
    }
  }
}

} // namespace

Formula parse_formula(std::string_view text) { return Parser(text).parse(); }

std::string print_formula(const Formula& f) {
  std::ostringstream os;
  print(f, true, os);
  return os.str();
}

Formula read_formula_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open formula file " + path, {0, 0});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_formula(ss.str());
}

std::string to_string(const Formula& f) { return print_formula(f); }

std::ostream& operator<<(std::ostream& os, const Formula& f) { return os << print_formula(f); }

std::string to_string(const FormulaSet& fs) {
  std::string out = "{";
  bool first = true;
  for (const auto& f : fs) {
    if (!first) out += ", ";
    first = false;
    out += print_formula(f);
  }
  return out + "}";
}

} // namespace foml
