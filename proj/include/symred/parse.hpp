// Expression grammar (UTF-8 text):
//   identifiers   [A-Za-z][A-Za-z0-9]*
//   jet coords    by underscore suffix: w_x, w_xy, E_x
//   applications  mu(w); derivatives of unspecified functions D(mu, w, 2)
//                 (multi-slot: D(A, x, 1, y, 1); explicit args: D(S, u, 1)(k*x + y, w))
//   operators     + - * / ^ with standard precedence, ^ takes an integer
//   rationals     exact integers; p/q is the quotient node
//   comments      # to end of line
//
// Parsing needs a symbol table: independents, dependents (parsed as jet
// coordinates), and declared unspecified functions with their signatures.
// A declared function used bare is applied to its signature arguments.

#pragma once

#include "symred/expr.hpp"

#include <cctype>
#include <optional>

namespace symred {

struct ParseError : std::runtime_error {
  size_t offset;
  ParseError(const std::string& msg, size_t off)
      : std::runtime_error(msg + " (at byte " + std::to_string(off) + ")"), offset(off) {}
};

struct FunctionDecl {
  std::string name;
  std::vector<std::string> params;
};

class SymbolTable {
 public:
  SymbolTable() = default;

  void add_independent(const std::string& n) { indep_.push_back(n); }
  void add_dependent(const std::string& n) { dep_.push_back(n); }
  void add_function(const std::string& n, std::vector<std::string> params) {
    funcs_[n] = FunctionDecl{n, std::move(params)};
  }

  const std::vector<std::string>& independents() const { return indep_; }
  const std::vector<std::string>& dependents() const { return dep_; }

  bool is_independent(const std::string& n) const {
    for (const auto& v : indep_)
      if (v == n) return true;
    return false;
  }
  bool is_dependent(const std::string& n) const {
    for (const auto& v : dep_)
      if (v == n) return true;
    return false;
  }
  const FunctionDecl* function(const std::string& n) const {
    auto it = funcs_.find(n);
    return it == funcs_.end() ? nullptr : &it->second;
  }

  // The (x, y, w, E) table used throughout, with the usual unspecified
  // functions of this problem pre-declared.
  static SymbolTable heat_default() {
    SymbolTable t;
    t.add_independent("x");
    t.add_independent("y");
    t.add_dependent("w");
    t.add_dependent("E");
    t.add_function("mu", {"w"});
    t.add_function("nu", {"w"});
    t.add_function("A", {"x", "y"});
    t.add_function("G", {"x", "y", "w"});
    t.add_function("F", {"x", "y", "w"});
    t.add_function("W", {"x"});
    t.add_function("E0", {"x"});
    return t;
  }

 private:
  std::vector<std::string> indep_;
  std::vector<std::string> dep_;
  std::map<std::string, FunctionDecl> funcs_;
};

inline std::optional<Primitive> primitive_by_name(const std::string& n) {
  if (n == "sqrt") return Primitive::Sqrt;
  if (n == "exp") return Primitive::Exp;
  if (n == "ln") return Primitive::Ln;
  if (n == "arctan") return Primitive::Arctan;
  if (n == "artanh") return Primitive::Artanh;
  if (n == "erf") return Primitive::Erf;
  return std::nullopt;
}

namespace detail {

struct Token {
  enum Type { Ident, Int, Op, End } type;
  std::string text;
  size_t pos;
};

class Lexer {
 public:
  Lexer(const std::string& src) : src_(src) { advance(); }
  const Token& peek() const { return tok_; }
  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < src_.size()) {
      if (std::isspace(static_cast<unsigned char>(src_[i_]))) {
        ++i_;
      } else if (src_[i_] == '#') {
        while (i_ < src_.size() && src_[i_] != '\n') ++i_;
      } else {
        break;
      }
    }
    if (i_ >= src_.size()) {
      tok_ = {Token::End, "", i_};
      return;
    }
    size_t start = i_;
    char c = src_[i_];
    if (std::isalpha(static_cast<unsigned char>(c))) {
      while (i_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[i_]))) ++i_;
      tok_ = {Token::Ident, src_.substr(start, i_ - start), start};
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
      tok_ = {Token::Int, src_.substr(start, i_ - start), start};
    } else if (std::string("+-*/^()_,").find(c) != std::string::npos) {
      ++i_;
      tok_ = {Token::Op, std::string(1, c), start};
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
  }

  const std::string& src_;
  size_t i_ = 0;
  Token tok_{Token::End, "", 0};
};

class Parser {
 public:
  Parser(const std::string& src, const SymbolTable& table) : lex_(src), table_(table) {}

  Expr parse() {
    Expr e = parse_sum();
    if (lex_.peek().type != Token::End)
      throw ParseError("trailing input '" + lex_.peek().text + "'", lex_.peek().pos);
    return e;
  }

 private:
  bool accept_op(const char* op) {
    if (lex_.peek().type == Token::Op && lex_.peek().text == op) {
      lex_.next();
      return true;
    }
    return false;
  }
  void expect_op(const char* op) {
    if (!accept_op(op))
      throw ParseError(std::string("expected '") + op + "'", lex_.peek().pos);
  }

  Expr parse_sum() {
    std::vector<Expr> terms{parse_term()};
    for (;;) {
      if (accept_op("+")) {
        terms.push_back(parse_term());
      } else if (accept_op("-")) {
        terms.push_back(neg(parse_term()));
      } else {
        break;
      }
    }
    return terms.size() == 1 ? terms[0] : addv(terms);
  }

  Expr parse_term() {
    Expr e = parse_unary();
    for (;;) {
      if (accept_op("*")) {
        e = mul(e, parse_unary());
      } else if (accept_op("/")) {
        e = Expr::quotient(e, parse_unary());
      } else {
        break;
      }
    }
    return e;
  }

  Expr parse_unary() {
    if (accept_op("-")) return neg(parse_unary());
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (accept_op("^")) {
      bool negexp = accept_op("-");
      const Token& t = lex_.peek();
      if (t.type != Token::Int)
        throw ParseError("exponent must be an integer literal", t.pos);
      long long e = std::stoll(lex_.next().text);
      return Expr::power(base, negexp ? -e : e);
    }
    return base;
  }

  std::vector<Expr> parse_args() {
    std::vector<Expr> args;
    expect_op("(");
    if (!accept_op(")")) {
      args.push_back(parse_sum());
      while (accept_op(",")) args.push_back(parse_sum());
      expect_op(")");
    }
    return args;
  }

  Expr parse_D() {
    expect_op("(");
    Token nt = lex_.next();
    std::string fname;
    std::vector<std::string> params;
    std::vector<int> deriv;
    if (nt.type == Token::Ident && nt.text == "D" && lex_.peek().type == Token::Op &&
        lex_.peek().text == "(") {
      // nested derivative
      Expr inner = parse_D();
      const ExprNode& n = inner.node();
      fname = n.name;
      params = n.params;
      deriv = n.deriv;
    } else if (nt.type == Token::Ident) {
      const FunctionDecl* fd = table_.function(nt.text);
      if (!fd) throw ParseError("D of undeclared function '" + nt.text + "'", nt.pos);
      fname = fd->name;
      params = fd->params;
      deriv.assign(params.size(), 0);
    } else {
      throw ParseError("expected function name in D(...)", nt.pos);
    }
    while (accept_op(",")) {
      Token st = lex_.next();
      if (st.type != Token::Ident) throw ParseError("expected slot name in D(...)", st.pos);
      size_t slot = params.size();
      for (size_t i = 0; i < params.size(); ++i)
        if (params[i] == st.text) slot = i;
      if (slot == params.size())
        throw ParseError("'" + st.text + "' is not an argument of " + fname, st.pos);
      expect_op(",");
      Token ot = lex_.next();
      if (ot.type != Token::Int) throw ParseError("expected derivative order", ot.pos);
      deriv[slot] += std::stoi(ot.text);
    }
    expect_op(")");
    // optional explicit application, else formal arguments
    std::vector<Expr> args;
    if (lex_.peek().type == Token::Op && lex_.peek().text == "(") {
      args = parse_args();
      if (args.size() != params.size())
        throw ParseError("wrong argument count for " + fname, lex_.peek().pos);
    } else {
      for (const auto& p : params) args.push_back(formal_as_expr(p));
    }
    return Expr::func(fname, params, std::move(args), std::move(deriv));
  }

  Expr formal_as_expr(const std::string& p) const {
    if (table_.is_dependent(p)) return Expr::jet(p, {});
    return Expr::symbol(p);
  }

  Expr parse_primary() {
    const Token t = lex_.next();
    if (t.type == Token::Int) return Expr::rational(Rational(t.text));
    if (t.type == Token::Op && t.text == "(") {
      Expr e = parse_sum();
      expect_op(")");
      return e;
    }
    if (t.type != Token::Ident)
      throw ParseError("expected expression, got '" + t.text + "'", t.pos);

    if (t.text == "D" && lex_.peek().type == Token::Op && lex_.peek().text == "(")
      return parse_D();

    // jet coordinate: dep '_' suffix
    if (lex_.peek().type == Token::Op && lex_.peek().text == "_") {
      if (!table_.is_dependent(t.text))
        throw ParseError("'" + t.text + "' is not a dependent variable", t.pos);
      lex_.next();
      Token st = lex_.next();
      if (st.type != Token::Ident) throw ParseError("expected jet index after '_'", st.pos);
      std::map<std::string, int> idx;
      for (char c : st.text) {
        std::string v(1, c);
        if (!table_.is_independent(v))
          throw ParseError("'" + v + "' is not an independent variable", st.pos);
        idx[v] += 1;
      }
      return Expr::jet(t.text, std::move(idx));
    }

    // application
    if (lex_.peek().type == Token::Op && lex_.peek().text == "(") {
      if (auto p = primitive_by_name(t.text)) {
        auto args = parse_args();
        if (args.size() != 1) throw ParseError(t.text + " takes one argument", t.pos);
        return Expr::prim(*p, std::move(args[0]));
      }
      const FunctionDecl* fd = table_.function(t.text);
      if (!fd) throw ParseError("unknown function or primitive name '" + t.text + "'", t.pos);
      auto args = parse_args();
      if (args.size() != fd->params.size())
        throw ParseError("wrong argument count for " + t.text, t.pos);
      return Expr::func(fd->name, fd->params, std::move(args));
    }

    // bare identifier
    if (table_.is_dependent(t.text)) return Expr::jet(t.text, {});
    if (const FunctionDecl* fd = table_.function(t.text)) {
      std::vector<Expr> args;
      for (const auto& p : fd->params) args.push_back(formal_as_expr(p));
      return Expr::func(fd->name, fd->params, std::move(args));
    }
    return Expr::symbol(t.text);
  }

  Lexer lex_;
  const SymbolTable& table_;
};

}  // namespace detail

inline Expr parse(const std::string& text, const SymbolTable& table) {
  return detail::Parser(text, table).parse();
}

inline Expr parse(const std::string& text) {
  static const SymbolTable t = SymbolTable::heat_default();
  return parse(text, t);
}

}  // namespace symred
