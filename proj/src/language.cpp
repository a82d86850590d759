#include "pqm/language.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <set>
#include <sstream>

namespace pqm {

// ---------------------------------------------------------------------------
// AST

TermPtr Term::var(std::string name) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Var;
  t->name = std::move(name);
  return t;
}

TermPtr Term::proj(std::string subspace, TermPtr arg) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Proj;
  t->name = std::move(subspace);
  t->arg = std::move(arg);
  return t;
}

TermPtr Term::apply(std::string unitary, TermPtr arg) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Apply;
  t->name = std::move(unitary);
  t->arg = std::move(arg);
  return t;
}

const std::string& Term::variable() const {
  const Term* t = this;
  while (t->kind != Kind::Var) t = t->arg.get();
  return t->name;
}

bool operator==(const Term& a, const Term& b) {
  if (a.kind != b.kind || a.name != b.name) return false;
  if (a.kind == Term::Kind::Var) return true;
  return *a.arg == *b.arg;
}

namespace {

FormulaPtr make(Formula::Kind kind, FormulaPtr lhs, FormulaPtr rhs = nullptr) {
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  f->lhs = std::move(lhs);
  f->rhs = std::move(rhs);
  return f;
}

}  // namespace

FormulaPtr Formula::atom(TermPtr term, std::string symbol) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Atom;
  f->term = std::move(term);
  f->symbol = std::move(symbol);
  return f;
}

FormulaPtr Formula::negation(FormulaPtr f) { return make(Kind::Not, std::move(f)); }
FormulaPtr Formula::conj(FormulaPtr a, FormulaPtr b) { return make(Kind::And, std::move(a), std::move(b)); }
FormulaPtr Formula::disj(FormulaPtr a, FormulaPtr b) { return make(Kind::Or, std::move(a), std::move(b)); }
FormulaPtr Formula::implies(FormulaPtr a, FormulaPtr b) { return make(Kind::Implies, std::move(a), std::move(b)); }
FormulaPtr Formula::iff(FormulaPtr a, FormulaPtr b) { return make(Kind::Iff, std::move(a), std::move(b)); }

FormulaPtr Formula::exists(std::string var, FormulaPtr body) {
  auto f = make(Kind::Exists, std::move(body));
  std::const_pointer_cast<Formula>(f)->var = std::move(var);
  return f;
}

FormulaPtr Formula::forall(std::string var, FormulaPtr body) {
  auto f = make(Kind::Forall, std::move(body));
  std::const_pointer_cast<Formula>(f)->var = std::move(var);
  return f;
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Formula::Kind::Atom:
      return a.symbol == b.symbol && *a.term == *b.term;
    case Formula::Kind::Not:
      return *a.lhs == *b.lhs;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      return a.var == b.var && *a.lhs == *b.lhs;
    default:
      return *a.lhs == *b.lhs && *a.rhs == *b.rhs;
  }
}

namespace {

void collect_free(const Formula& f, std::vector<std::string>& bound, std::vector<std::string>& out) {
  switch (f.kind) {
    case Formula::Kind::Atom: {
      const auto& v = f.term->variable();
      if (std::find(bound.begin(), bound.end(), v) == bound.end() &&
          std::find(out.begin(), out.end(), v) == out.end()) {
        out.push_back(v);
      }
      return;
    }
    case Formula::Kind::Not:
      collect_free(*f.lhs, bound, out);
      return;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      bound.push_back(f.var);
      collect_free(*f.lhs, bound, out);
      bound.pop_back();
      return;
    default:
      collect_free(*f.lhs, bound, out);
      collect_free(*f.rhs, bound, out);
  }
}

}  // namespace

std::vector<std::string> free_variables(const Formula& f) {
  std::vector<std::string> bound;
  std::vector<std::string> out;
  collect_free(f, bound, out);
  return out;
}

Definitions::Definitions(int d) : dim(d) {
  if (d > 0) {
    subspaces.emplace("top", Subspace::top(d));
    subspaces.emplace("bot", Subspace::bottom(d));
  }
}

const Subspace& Definitions::subspace(const std::string& name) const {
  auto it = subspaces.find(name);
  if (it == subspaces.end()) throw Error("undefined subspace symbol '" + name + "'");
  return it->second;
}

const UnitaryOp& Definitions::unitary(const std::string& name) const {
  auto it = unitaries.find(name);
  if (it == unitaries.end()) throw Error("undefined unitary symbol '" + name + "'");
  return it->second;
}

// ---------------------------------------------------------------------------
// Errors

namespace {

const char* kind_name(ParseError::Kind k) {
  switch (k) {
    case ParseError::Kind::Lex:
      return "lex error";
    case ParseError::Kind::Parse:
      return "parse error";
    case ParseError::Kind::Semantic:
      return "semantic error";
  }
  return "error";
}

}  // namespace

ParseError::ParseError(Kind kind, int line, int column, const std::string& message)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + kind_name(kind) + ": " + message),
      kind_(kind),
      line_(line),
      column_(column),
      message_(message) {}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok {
  Ident,
  Number,
  Imag,  // number immediately followed by 'i'
  LBrace,
  RBrace,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Colon,
  Dot,
  Equals,
  Amp,
  Bar,
  Tilde,
  Arrow,
  DoubleArrow,
  Plus,
  Minus,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  double value = 0.0;
  int line = 1;
  int column = 1;
};

const std::set<std::string, std::less<>> kKeywords = {"dim",   "let",    "span",  "matrix", "assert",
                                                      "exists", "forall", "top",   "bot",    "proj",
                                                      "circuit", "input"};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  int column = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token tok{Tok::End, "", 0.0, line, column};
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && is_ident_char(text[j])) ++j;
      tok.kind = Tok::Ident;
      tok.text = std::string(text.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(tok));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j < text.size() && text[j] == '.') {
        ++j;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      }
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
          while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) ++k;
          j = k;
        }
      }
      tok.text = std::string(text.substr(i, j - i));
      tok.value = std::strtod(tok.text.c_str(), nullptr);
      tok.kind = Tok::Number;
      if (j < text.size() && text[j] == 'i' && (j + 1 >= text.size() || !is_ident_char(text[j + 1]))) {
        tok.kind = Tok::Imag;
        ++j;
        tok.text = std::string(text.substr(i, j - i));
      } else if (j < text.size() && is_ident_char(text[j])) {
        throw ParseError(ParseError::Kind::Lex, line, column + static_cast<int>(j - i),
                         std::string("unexpected character '") + text[j] + "' after number");
      }
      advance(j - i);
      out.push_back(std::move(tok));
      continue;
    }
    auto single = [&](Tok k, std::size_t n) {
      tok.kind = k;
      tok.text = std::string(text.substr(i, n));
      advance(n);
      out.push_back(tok);
    };
    switch (c) {
      case '{': single(Tok::LBrace, 1); continue;
      case '}': single(Tok::RBrace, 1); continue;
      case '(': single(Tok::LParen, 1); continue;
      case ')': single(Tok::RParen, 1); continue;
      case '[': single(Tok::LBracket, 1); continue;
      case ']': single(Tok::RBracket, 1); continue;
      case ',': single(Tok::Comma, 1); continue;
      case ':': single(Tok::Colon, 1); continue;
      case '.': single(Tok::Dot, 1); continue;
      case '=': single(Tok::Equals, 1); continue;
      case '&': single(Tok::Amp, 1); continue;
      case '|': single(Tok::Bar, 1); continue;
      case '~': single(Tok::Tilde, 1); continue;
      case '+': single(Tok::Plus, 1); continue;
      case '-':
        if (i + 1 < text.size() && text[i + 1] == '>') {
          single(Tok::Arrow, 2);
        } else {
          single(Tok::Minus, 1);
        }
        continue;
      case '<':
        if (text.substr(i, 3) == "<->") {
          single(Tok::DoubleArrow, 3);
          continue;
        }
        break;
      default:
        break;
    }
    std::string shown;
    if (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x7f) {
      std::ostringstream os;
      os << "\\x" << std::hex << static_cast<int>(static_cast<unsigned char>(c));
      shown = os.str();
    } else {
      shown = std::string(1, c);
    }
    throw ParseError(ParseError::Kind::Lex, line, column, "unexpected character '" + shown + "'");
  }
  out.push_back(Token{Tok::End, "", 0.0, line, column});
  return out;
}

const char* describe(Tok k) {
  switch (k) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::Imag: return "imaginary number";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Dot: return "'.'";
    case Tok::Equals: return "'='";
    case Tok::Amp: return "'&'";
    case Tok::Bar: return "'|'";
    case Tok::Tilde: return "'~'";
    case Tok::Arrow: return "'->'";
    case Tok::DoubleArrow: return "'<->'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::End: return "end of input";
  }
  return "token";
}

// ---------------------------------------------------------------------------
// Parser

struct SymbolUse {
  std::string name;
  int line;
  int column;
};

class Parser {
 public:
  Parser(std::string_view text, const Tolerance& tol) : toks_(lex(text)), tol_(tol) {}

  enum class Mode { Problem, Circuit, DefinitionsOnly };

  void parse_document(Mode mode) {
    bool saw_dim = false;
    while (peek().kind != Tok::End) {
      const Token& t = peek();
      if (is_keyword(t, "dim")) {
        if (saw_dim) semantic(t, "duplicate 'dim' statement");
        next();
        const Token& n = expect(Tok::Number, "dimension");
        if (n.value < 1 || n.value != static_cast<double>(static_cast<long>(n.value)) || n.value > 4096) {
          semantic(n, "dimension must be a positive integer");
        }
        defs_ = Definitions(static_cast<int>(n.value));
        saw_dim = true;
      } else if (is_keyword(t, "let")) {
        if (!saw_dim) semantic(t, "'dim' must precede definitions");
        next();
        parse_let();
      } else if (is_keyword(t, "assert")) {
        if (!saw_dim) semantic(t, "'dim' must precede 'assert'");
        if (mode == Mode::Circuit) semantic(t, "'assert' is not allowed in a circuit file");
        if (sentence_) semantic(t, "only one 'assert' statement is allowed");
        next();
        sentence_ = parse_closed_sentence();
      } else if (is_keyword(t, "circuit")) {
        if (!saw_dim) semantic(t, "'dim' must precede 'circuit'");
        if (mode == Mode::Problem) semantic(t, "'circuit' is not allowed in a problem file");
        if (circuit_seen_) semantic(t, "only one 'circuit' statement is allowed");
        next();
        parse_circuit();
      } else if (is_keyword(t, "input")) {
        if (!saw_dim) semantic(t, "'dim' must precede 'input'");
        if (mode == Mode::Problem) semantic(t, "'input' is not allowed in a problem file");
        next();
        expect(Tok::Equals, "'='");
        const Token& s = expect_symbol("input subspace symbol");
        require_subspace(s);
        input_ = s.text;
      } else {
        fail_expected("'dim', 'let', 'assert', 'circuit' or 'input'");
      }
    }
    if (!saw_dim) {
      throw ParseError(ParseError::Kind::Semantic, peek().line, peek().column, "missing 'dim' statement");
    }
    if (mode == Mode::Problem && !sentence_) {
      throw ParseError(ParseError::Kind::Semantic, peek().line, peek().column, "missing 'assert' statement");
    }
    if (mode == Mode::Circuit && !circuit_seen_) {
      throw ParseError(ParseError::Kind::Semantic, peek().line, peek().column, "missing 'circuit' statement");
    }
  }

  FormulaPtr parse_standalone_formula(const Definitions* defs) {
    check_symbols_ = defs != nullptr;
    if (defs) defs_ = *defs;
    FormulaPtr f = check_symbols_ ? parse_closed_sentence() : parse_formula();
    if (peek().kind != Tok::End) fail_expected("end of input");
    return f;
  }

  Definitions& defs() { return defs_; }
  FormulaPtr sentence() const { return sentence_; }
  std::vector<CircuitStepRef>& steps() { return steps_; }
  const std::string& input() const { return input_; }

 private:
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  static bool is_keyword(const Token& t, std::string_view kw) { return t.kind == Tok::Ident && t.text == kw; }

  [[noreturn]] void fail_expected(const std::string& what) const {
    const Token& t = peek();
    std::string found = t.text.empty() ? std::string(describe(t.kind)) : "'" + t.text + "'";
    throw ParseError(ParseError::Kind::Parse, t.line, t.column, "expected " + what + ", found " + found);
  }

  [[noreturn]] static void semantic(const Token& t, const std::string& msg) {
    throw ParseError(ParseError::Kind::Semantic, t.line, t.column, msg);
  }

  const Token& expect(Tok kind, const std::string& what) {
    if (peek().kind != kind) fail_expected(what);
    return next();
  }

  void expect_keyword(std::string_view kw) {
    if (!is_keyword(peek(), kw)) fail_expected("'" + std::string(kw) + "'");
    next();
  }

  // An identifier that names a symbol; `top` and `bot` are allowed here.
  const Token& expect_symbol(const std::string& what) {
    const Token& t = peek();
    if (t.kind != Tok::Ident || (kKeywords.count(t.text) && t.text != "top" && t.text != "bot")) {
      fail_expected(what);
    }
    return next();
  }

  const Token& expect_name(const std::string& what) {
    const Token& t = peek();
    if (t.kind != Tok::Ident || kKeywords.count(t.text)) fail_expected(what);
    return next();
  }

  void require_subspace(const Token& t) const {
    if (!check_symbols_) return;
    if (defs_.subspaces.count(t.text)) return;
    if (defs_.unitaries.count(t.text)) semantic(t, "symbol '" + t.text + "' is a unitary, not a subspace");
    semantic(t, "undefined subspace symbol '" + t.text + "'");
  }

  void require_unitary(const Token& t) const {
    if (!check_symbols_) return;
    if (defs_.unitaries.count(t.text)) return;
    if (defs_.subspaces.count(t.text)) semantic(t, "symbol '" + t.text + "' is a subspace, not a unitary");
    semantic(t, "undefined unitary symbol '" + t.text + "'");
  }

  // --- definitions -------------------------------------------------------

  void parse_let() {
    const Token& name = expect_name("symbol name");
    if (defs_.subspaces.count(name.text) || defs_.unitaries.count(name.text)) {
      semantic(name, "symbol '" + name.text + "' is already defined");
    }
    expect(Tok::Equals, "'='");
    const Token& kw = peek();
    if (is_keyword(kw, "span")) {
      next();
      expect(Tok::LBrace, "'{'");
      std::vector<Vector> vectors;
      if (peek().kind != Tok::RBrace) {
        vectors.push_back(parse_vector());
        while (peek().kind == Tok::Comma) {
          next();
          vectors.push_back(parse_vector());
        }
      }
      expect(Tok::RBrace, "'}' or ','");
      defs_.subspaces.emplace(name.text, span_of(vectors, defs_.dim, tol_));
    } else if (is_keyword(kw, "matrix")) {
      next();
      const Token& open = expect(Tok::LBrace, "'{'");
      std::vector<Vector> rows;
      rows.push_back(parse_vector());
      while (peek().kind == Tok::Comma) {
        next();
        rows.push_back(parse_vector());
      }
      expect(Tok::RBrace, "'}' or ','");
      if (static_cast<int>(rows.size()) != defs_.dim) {
        semantic(open, "dimension mismatch: matrix has " + std::to_string(rows.size()) + " rows, expected " +
                           std::to_string(defs_.dim));
      }
      Matrix m(defs_.dim, defs_.dim);
      for (int r = 0; r < defs_.dim; ++r) m.row(r) = rows[static_cast<std::size_t>(r)].transpose();
      const double defect = UnitaryOp::unitarity_defect(m);
      if (!(defect < UnitaryOp::kUnitarityTol)) {
        std::ostringstream os;
        os << "matrix '" << name.text << "' is not unitary: max |U^H U - I| = " << defect;
        semantic(open, os.str());
      }
      defs_.unitaries.emplace(name.text, UnitaryOp(m));
    } else {
      fail_expected("'span' or 'matrix'");
    }
  }

  Vector parse_vector() {
    const Token& open = expect(Tok::LParen, "'('");
    std::vector<Complex> entries;
    entries.push_back(parse_complex());
    while (peek().kind == Tok::Comma) {
      next();
      entries.push_back(parse_complex());
    }
    expect(Tok::RParen, "')' or ','");
    if (static_cast<int>(entries.size()) != defs_.dim) {
      semantic(open, "dimension mismatch: vector has " + std::to_string(entries.size()) + " entries, expected " +
                         std::to_string(defs_.dim));
    }
    Vector v(defs_.dim);
    for (int i = 0; i < defs_.dim; ++i) v(i) = entries[static_cast<std::size_t>(i)];
    return v;
  }

  bool at_imag_unit() const { return peek().kind == Tok::Ident && peek().text == "i"; }

  // complex := [sign] (NUMBER [(+|-) imag] | imag);  imag := IMAG | 'i'
  Complex parse_complex() {
    double sign = 1.0;
    if (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      sign = next().kind == Tok::Minus ? -1.0 : 1.0;
    }
    if (peek().kind == Tok::Imag) return Complex(0.0, sign * next().value);
    if (at_imag_unit()) {
      next();
      return Complex(0.0, sign);
    }
    const Token& re = expect(Tok::Number, "number");
    Complex z(sign * re.value, 0.0);
    if (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const double isign = next().kind == Tok::Minus ? -1.0 : 1.0;
      if (peek().kind == Tok::Imag) {
        z.imag(isign * next().value);
      } else if (at_imag_unit()) {
        next();
        z.imag(isign);
      } else {
        fail_expected("imaginary part");
      }
    }
    return z;
  }

  void parse_circuit() {
    circuit_seen_ = true;
    expect(Tok::Equals, "'='");
    expect(Tok::LBracket, "'['");
    if (peek().kind != Tok::RBracket) {
      parse_step();
      while (peek().kind == Tok::Comma) {
        next();
        parse_step();
      }
    }
    expect(Tok::RBracket, "']' or ','");
  }

  void parse_step() {
    if (is_keyword(peek(), "proj")) {
      next();
      expect(Tok::LBracket, "'['");
      const Token& s = expect_symbol("subspace symbol");
      require_subspace(s);
      expect(Tok::RBracket, "']'");
      steps_.push_back({CircuitStepRef::Kind::Project, s.text});
    } else {
      const Token& s = expect_name("'proj[...]' or unitary symbol");
      require_unitary(s);
      steps_.push_back({CircuitStepRef::Kind::Unitary, s.text});
    }
  }

  // --- formulas ------------------------------------------------------------

  FormulaPtr parse_closed_sentence() {
    check_symbols_ = true;
    const Token& start = peek();
    FormulaPtr f = parse_formula();
    auto free = free_variables(*f);
    if (!free.empty()) {
      // Report at the first free occurrence.
      auto it = first_use_.find(free.front());
      const int line = it != first_use_.end() ? it->second.line : start.line;
      const int col = it != first_use_.end() ? it->second.column : start.column;
      throw ParseError(ParseError::Kind::Semantic, line, col, "free variable '" + free.front() + "' in sentence");
    }
    return f;
  }

  FormulaPtr parse_formula() { return parse_iff(); }

  FormulaPtr parse_iff() {
    FormulaPtr lhs = parse_implies();
    if (peek().kind == Tok::DoubleArrow) {
      next();
      return Formula::iff(lhs, parse_iff());
    }
    return lhs;
  }

  FormulaPtr parse_implies() {
    FormulaPtr lhs = parse_or();
    if (peek().kind == Tok::Arrow) {
      next();
      return Formula::implies(lhs, parse_implies());
    }
    return lhs;
  }

  FormulaPtr parse_or() {
    FormulaPtr lhs = parse_and();
    while (peek().kind == Tok::Bar) {
      next();
      lhs = Formula::disj(lhs, parse_and());
    }
    return lhs;
  }

  FormulaPtr parse_and() {
    FormulaPtr lhs = parse_unary();
    while (peek().kind == Tok::Amp) {
      next();
      lhs = Formula::conj(lhs, parse_unary());
    }
    return lhs;
  }

  FormulaPtr parse_unary() {
    if (++depth_ > kMaxDepth) fail_expected("shallower formula (nesting limit exceeded)");
    FormulaPtr f = parse_unary_inner();
    --depth_;
    return f;
  }

  FormulaPtr parse_unary_inner() {
    const Token& t = peek();
    if (t.kind == Tok::Tilde) {
      next();
      return Formula::negation(parse_unary());
    }
    if (is_keyword(t, "exists") || is_keyword(t, "forall")) {
      const bool ex = t.text == "exists";
      next();
      const Token& v = expect_name("variable name");
      expect(Tok::Dot, "'.'");
      bound_.push_back(v.text);
      FormulaPtr body = parse_unary();
      bound_.pop_back();
      return ex ? Formula::exists(v.text, body) : Formula::forall(v.text, body);
    }
    if (t.kind == Tok::LBracket) return parse_atom();
    if (t.kind == Tok::LParen) {
      next();
      FormulaPtr f = parse_formula();
      expect(Tok::RParen, "')'");
      return f;
    }
    fail_expected("'[', '(', '~', 'exists' or 'forall'");
  }

  FormulaPtr parse_atom() {
    expect(Tok::LBracket, "'['");
    TermPtr term = parse_term();
    expect(Tok::Colon, "':'");
    const Token& sym = expect_symbol("subspace symbol");
    require_subspace(sym);
    expect(Tok::RBracket, "']'");
    return Formula::atom(std::move(term), sym.text);
  }

  TermPtr parse_term() {
    if (++depth_ > kMaxDepth) fail_expected("shallower term (nesting limit exceeded)");
    TermPtr out;
    if (is_keyword(peek(), "proj")) {
      next();
      expect(Tok::LBracket, "'['");
      const Token& s = expect_symbol("subspace symbol");
      require_subspace(s);
      expect(Tok::RBracket, "']'");
      expect(Tok::LParen, "'('");
      TermPtr arg = parse_term();
      expect(Tok::RParen, "')'");
      out = Term::proj(s.text, std::move(arg));
    } else {
      const Token& name = expect_name("variable, unitary application or 'proj[...]'");
      if (peek().kind == Tok::LParen) {
        require_unitary(name);
        next();
        TermPtr arg = parse_term();
        expect(Tok::RParen, "')'");
        out = Term::apply(name.text, std::move(arg));
      } else {
        if (std::find(bound_.begin(), bound_.end(), name.text) == bound_.end())
          first_use_.emplace(name.text, SymbolUse{name.text, name.line, name.column});
        out = Term::var(name.text);
      }
    }
    --depth_;
    return out;
  }

  static constexpr int kMaxDepth = 2000;

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Tolerance tol_;
  Definitions defs_;
  FormulaPtr sentence_;
  std::vector<CircuitStepRef> steps_;
  std::string input_ = "top";
  bool circuit_seen_ = false;
  bool check_symbols_ = true;
  int depth_ = 0;
  std::map<std::string, SymbolUse> first_use_;
  std::vector<std::string> bound_;
};

}  // namespace

Problem parse_problem(std::string_view text, const Tolerance& tol) {
  Parser p(text, tol);
  p.parse_document(Parser::Mode::Problem);
  return Problem{std::move(p.defs()), p.sentence()};
}

CircuitDocument parse_circuit_document(std::string_view text, const Tolerance& tol) {
  Parser p(text, tol);
  p.parse_document(Parser::Mode::Circuit);
  CircuitDocument doc{std::move(p.defs()), std::move(p.steps()), p.input()};
  return doc;
}

Definitions parse_definitions(std::string_view text, const Tolerance& tol) {
  Parser p(text, tol);
  p.parse_document(Parser::Mode::DefinitionsOnly);
  return std::move(p.defs());
}

FormulaPtr parse_formula(std::string_view text, const Definitions* defs) {
  Parser p(text, {});
  return p.parse_standalone_formula(defs);
}

// ---------------------------------------------------------------------------
// Printing

std::string pretty_print(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Var:
      return t.name;
    case Term::Kind::Proj:
      return "proj[" + t.name + "](" + pretty_print(*t.arg) + ")";
    case Term::Kind::Apply:
      return t.name + "(" + pretty_print(*t.arg) + ")";
  }
  return {};
}

namespace {

// Binding strength; larger binds tighter.
int precedence(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::Iff: return 1;
    case Formula::Kind::Implies: return 2;
    case Formula::Kind::Or: return 3;
    case Formula::Kind::And: return 4;
    case Formula::Kind::Not:
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: return 5;
    case Formula::Kind::Atom: return 6;
  }
  return 0;
}

void print(const Formula& f, int context, std::string& out) {
  const int own = precedence(f.kind);
  const bool parens = own < context;
  if (parens) out += '(';
  switch (f.kind) {
    case Formula::Kind::Atom:
      out += "[" + pretty_print(*f.term) + " : " + f.symbol + "]";
      break;
    case Formula::Kind::Not:
      out += "~";
      print(*f.lhs, 5, out);
      break;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      out += f.kind == Formula::Kind::Exists ? "exists " : "forall ";
      out += f.var + " . ";
      print(*f.lhs, 5, out);
      break;
    case Formula::Kind::And:
      print(*f.lhs, 4, out);
      out += " & ";
      print(*f.rhs, 5, out);
      break;
    case Formula::Kind::Or:
      print(*f.lhs, 3, out);
      out += " | ";
      print(*f.rhs, 4, out);
      break;
    case Formula::Kind::Implies:
      print(*f.lhs, 3, out);
      out += " -> ";
      print(*f.rhs, 2, out);
      break;
    case Formula::Kind::Iff:
      print(*f.lhs, 2, out);
      out += " <-> ";
      print(*f.rhs, 1, out);
      break;
  }
  if (parens) out += ')';
}

}  // namespace

std::string pretty_print(const Formula& f) {
  std::string out;
  print(f, 0, out);
  return out;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void check_term(const Term& t, const Definitions& defs, std::vector<Diagnostic>& out) {
  if (t.kind == Term::Kind::Var) return;
  if (t.kind == Term::Kind::Proj) {
    auto it = defs.subspaces.find(t.name);
    if (it == defs.subspaces.end()) {
      out.push_back({Diagnostic::Severity::Error, "undefined subspace symbol '" + t.name + "'"});
    }
  } else if (!defs.unitaries.count(t.name)) {
    out.push_back({Diagnostic::Severity::Error, "undefined unitary symbol '" + t.name + "'"});
  }
  check_term(*t.arg, defs, out);
}

void check_formula(const Formula& f, const Definitions& defs, std::vector<Diagnostic>& out) {
  switch (f.kind) {
    case Formula::Kind::Atom:
      check_term(*f.term, defs, out);
      if (!defs.subspaces.count(f.symbol)) {
        out.push_back({Diagnostic::Severity::Error, "undefined subspace symbol '" + f.symbol + "'"});
      }
      return;
    case Formula::Kind::Not:
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      check_formula(*f.lhs, defs, out);
      return;
    default:
      check_formula(*f.lhs, defs, out);
      check_formula(*f.rhs, defs, out);
  }
}

}  // namespace

std::vector<Diagnostic> validate(const Problem& p) {
  std::vector<Diagnostic> out;
  const int d = p.defs.dim;
  if (d < 1) {
    out.push_back({Diagnostic::Severity::Error, "dimension must be positive"});
    return out;
  }
  for (const auto& [name, s] : p.defs.subspaces) {
    if (s.dim() != d) {
      out.push_back({Diagnostic::Severity::Error, "dimension mismatch: subspace '" + name + "' lives in C^" +
                                                      std::to_string(s.dim()) + ", expected C^" + std::to_string(d)});
    }
  }
  for (const auto& [name, u] : p.defs.unitaries) {
    if (u.dim() != d) {
      out.push_back({Diagnostic::Severity::Error, "dimension mismatch: unitary '" + name + "' is " +
                                                      std::to_string(u.dim()) + "x" + std::to_string(u.dim()) +
                                                      ", expected " + std::to_string(d) + "x" + std::to_string(d)});
    }
  }
  if (!p.sentence) {
    out.push_back({Diagnostic::Severity::Error, "problem has no sentence"});
    return out;
  }
  check_formula(*p.sentence, p.defs, out);
  for (const auto& v : free_variables(*p.sentence)) {
    out.push_back({Diagnostic::Severity::Error, "free variable '" + v + "' in sentence"});
  }
  if (d < 3) {
    out.push_back({Diagnostic::Severity::Warning,
                   "completeness not guaranteed below dimension 3: the verdict is truth in the Hilbert model "
                   "only, not theoremhood"});
  }
  return out;
}

std::string to_string(Diagnostic::Severity s) {
  switch (s) {
    case Diagnostic::Severity::Error: return "error";
    case Diagnostic::Severity::Warning: return "warning";
    case Diagnostic::Severity::Info: return "info";
  }
  return "error";
}

}  // namespace pqm
