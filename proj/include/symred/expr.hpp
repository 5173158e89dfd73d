// Immutable symbolic expression trees over exact rational coefficients.
//
// Node kinds: exact-rational constant, named indeterminate, jet coordinate,
// unspecified-function application (with a per-argument derivative
// multi-index), opaque primitive application, n-ary sum/product, integer
// power, quotient.  Construction through the static factories is total and
// performs no normalization; the arithmetic operators fold constants and
// flatten, which is what the algorithmic layers want.

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace symred {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

enum class NodeKind : std::uint8_t {
  Constant,
  Symbol,
  Jet,
  FuncApp,
  PrimApp,
  Sum,
  Product,
  Power,
  Quotient,
};

enum class Primitive : std::uint8_t { Sqrt, Exp, Ln, Arctan, Artanh, Erf };

inline const char* primitive_name(Primitive p) {
  switch (p) {
    case Primitive::Sqrt: return "sqrt";
    case Primitive::Exp: return "exp";
    case Primitive::Ln: return "ln";
    case Primitive::Arctan: return "arctan";
    case Primitive::Artanh: return "artanh";
    case Primitive::Erf: return "erf";
  }
  return "?";
}

// Jet coordinate identity: dependent-variable name plus a multi-index over
// independent variables, keyed by name (so w_xy and w_yx coincide).
struct JetKey {
  std::string dep;
  std::map<std::string, int> index;  // indep name -> order, entries > 0

  int order() const {
    int n = 0;
    for (const auto& [_, k] : index) n += k;
    return n;
  }
  bool operator==(const JetKey& o) const { return dep == o.dep && index == o.index; }
  bool operator<(const JetKey& o) const {
    if (dep != o.dep) return dep < o.dep;
    return index < o.index;
  }
  std::string name() const {
    if (index.empty()) return dep;
    std::string s = dep + "_";
    for (const auto& [v, k] : index)
      for (int i = 0; i < k; ++i) s += v;
    return s;
  }
};

class Expr;
struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  NodeKind kind;
  Rational value;                    // Constant
  std::string name;                  // Symbol, FuncApp
  JetKey jet;                        // Jet
  std::vector<std::string> params;   // FuncApp: formal parameter names
  std::vector<int> deriv;            // FuncApp: derivative order per slot
  std::vector<Expr> children;        // composite nodes / FuncApp args / PrimApp arg
  long long exponent = 0;            // Power
  Primitive prim = Primitive::Sqrt;  // PrimApp
};

class Expr {
 public:
  Expr() : p_(zero_node()) {}

  // --- raw factories (no normalization) ---
  static Expr rational(Rational v);
  static Expr integer(long long v) { return rational(Rational(v)); }
  static Expr symbol(std::string name);
  static Expr jet(JetKey key);
  static Expr jet(std::string dep, std::map<std::string, int> index) {
    return jet(JetKey{std::move(dep), std::move(index)});
  }
  static Expr func(std::string name, std::vector<std::string> params, std::vector<Expr> args,
                   std::vector<int> deriv = {});
  static Expr prim(Primitive p, Expr arg);
  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  static Expr power(Expr base, long long exponent);
  static Expr quotient(Expr num, Expr den);

  const ExprNode& node() const { return *p_; }
  NodeKind kind() const { return p_->kind; }
  bool is_constant() const { return p_->kind == NodeKind::Constant; }
  bool is_zero_constant() const { return is_constant() && p_->value == 0; }
  bool is_one_constant() const { return is_constant() && p_->value == 1; }

 private:
  explicit Expr(ExprPtr p) : p_(std::move(p)) {}
  static ExprPtr zero_node();
  static Expr wrap(ExprNode n) { return Expr(std::make_shared<const ExprNode>(std::move(n))); }
  ExprPtr p_;
};

inline ExprPtr Expr::zero_node() {
  static const ExprPtr z = [] {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Constant;
    n->value = 0;
    return ExprPtr(n);
  }();
  return z;
}

inline Expr Expr::rational(Rational v) {
  ExprNode n;
  n.kind = NodeKind::Constant;
  n.value = std::move(v);
  return wrap(std::move(n));
}

inline Expr Expr::symbol(std::string name) {
  ExprNode n;
  n.kind = NodeKind::Symbol;
  n.name = std::move(name);
  return wrap(std::move(n));
}

inline Expr Expr::jet(JetKey key) {
  ExprNode n;
  n.kind = NodeKind::Jet;
  n.jet = std::move(key);
  return wrap(std::move(n));
}

inline Expr Expr::func(std::string name, std::vector<std::string> params, std::vector<Expr> args,
                       std::vector<int> deriv) {
  if (deriv.empty()) deriv.assign(args.size(), 0);
  if (params.size() != args.size() || deriv.size() != args.size())
    throw std::invalid_argument("func: params/args/deriv arity mismatch for " + name);
  ExprNode n;
  n.kind = NodeKind::FuncApp;
  n.name = std::move(name);
  n.params = std::move(params);
  n.children = std::move(args);
  n.deriv = std::move(deriv);
  return wrap(std::move(n));
}

inline Expr Expr::prim(Primitive p, Expr arg) {
  ExprNode n;
  n.kind = NodeKind::PrimApp;
  n.prim = p;
  n.children = {std::move(arg)};
  return wrap(std::move(n));
}

inline Expr Expr::sum(std::vector<Expr> terms) {
  ExprNode n;
  n.kind = NodeKind::Sum;
  n.children = std::move(terms);
  return wrap(std::move(n));
}

inline Expr Expr::product(std::vector<Expr> factors) {
  ExprNode n;
  n.kind = NodeKind::Product;
  n.children = std::move(factors);
  return wrap(std::move(n));
}

inline Expr Expr::power(Expr base, long long exponent) {
  ExprNode n;
  n.kind = NodeKind::Power;
  n.children = {std::move(base)};
  n.exponent = exponent;
  return wrap(std::move(n));
}

inline Expr Expr::quotient(Expr num, Expr den) {
  ExprNode n;
  n.kind = NodeKind::Quotient;
  n.children = {std::move(num), std::move(den)};
  return wrap(std::move(n));
}

// --- structural equality ---

inline bool structural_equal(const Expr& a, const Expr& b) {
  const ExprNode& x = a.node();
  const ExprNode& y = b.node();
  if (&x == &y) return true;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case NodeKind::Constant: return x.value == y.value;
    case NodeKind::Symbol: return x.name == y.name;
    case NodeKind::Jet: return x.jet == y.jet;
    case NodeKind::Power:
      if (x.exponent != y.exponent) return false;
      break;
    case NodeKind::PrimApp:
      if (x.prim != y.prim) return false;
      break;
    case NodeKind::FuncApp:
      if (x.name != y.name || x.deriv != y.deriv || x.params != y.params) return false;
      break;
    default: break;
  }
  if (x.children.size() != y.children.size()) return false;
  for (size_t i = 0; i < x.children.size(); ++i)
    if (!structural_equal(x.children[i], y.children[i])) return false;
  return true;
}

// --- folding arithmetic (used by all algorithmic layers) ---
//
// These flatten nested sums/products and fold rational constants; they never
// change the value of the expression.

inline Expr add(const Expr& a, const Expr& b);
inline Expr mul(const Expr& a, const Expr& b);

inline Expr addv(const std::vector<Expr>& terms) {
  std::vector<Expr> out;
  Rational c = 0;
  auto absorb = [&](const Expr& t, auto&& self) -> void {
    if (t.node().kind == NodeKind::Sum) {
      for (const auto& ch : t.node().children) self(ch, self);
    } else if (t.is_constant()) {
      c += t.node().value;
    } else {
      out.push_back(t);
    }
  };
  for (const auto& t : terms) absorb(t, absorb);
  if (c != 0 || out.empty()) out.insert(out.begin(), Expr::rational(c));
  if (out.size() == 1) return out[0];
  return Expr::sum(std::move(out));
}

inline Expr mulv(const std::vector<Expr>& factors) {
  std::vector<Expr> out;
  Rational c = 1;
  bool zero = false;
  auto absorb = [&](const Expr& f, auto&& self) -> void {
    if (f.node().kind == NodeKind::Product) {
      for (const auto& ch : f.node().children) self(ch, self);
    } else if (f.is_constant()) {
      c *= f.node().value;
      if (f.node().value == 0) zero = true;
    } else {
      out.push_back(f);
    }
  };
  for (const auto& f : factors) absorb(f, absorb);
  if (zero || c == 0) return Expr::integer(0);
  if (c != 1 || out.empty()) out.insert(out.begin(), Expr::rational(c));
  if (out.size() == 1) return out[0];
  return Expr::product(std::move(out));
}

inline Expr add(const Expr& a, const Expr& b) { return addv({a, b}); }
inline Expr sub(const Expr& a, const Expr& b) { return addv({a, mulv({Expr::integer(-1), b})}); }
inline Expr mul(const Expr& a, const Expr& b) { return mulv({a, b}); }
inline Expr neg(const Expr& a) { return mulv({Expr::integer(-1), a}); }

inline Expr powi(const Expr& base, long long n) {
  if (n == 0) return Expr::integer(1);
  if (n == 1) return base;
  if (base.is_constant()) {
    const Rational& v = base.node().value;
    if (n > 0) {
      Rational r = 1;
      for (long long i = 0; i < n; ++i) r *= v;
      return Expr::rational(r);
    }
    if (v != 0) {
      Rational r = 1;
      for (long long i = 0; i < -n; ++i) r *= v;
      return Expr::rational(Rational(1) / r);
    }
  }
  return Expr::power(base, n);
}

inline Expr div(const Expr& num, const Expr& den) {
  if (den.is_one_constant()) return num;
  if (den.is_constant() && den.node().value != 0)
    return mulv({Expr::rational(Rational(1) / den.node().value), num});
  if (num.is_zero_constant()) return num;
  return Expr::quotient(num, den);
}

inline Expr operator+(const Expr& a, const Expr& b) { return add(a, b); }
inline Expr operator-(const Expr& a, const Expr& b) { return sub(a, b); }
inline Expr operator*(const Expr& a, const Expr& b) { return mul(a, b); }
inline Expr operator/(const Expr& a, const Expr& b) { return div(a, b); }
inline Expr operator-(const Expr& a) { return neg(a); }
inline Expr operator+(const Expr& a, long long b) { return add(a, Expr::integer(b)); }
inline Expr operator+(long long a, const Expr& b) { return add(Expr::integer(a), b); }
inline Expr operator-(const Expr& a, long long b) { return sub(a, Expr::integer(b)); }
inline Expr operator-(long long a, const Expr& b) { return sub(Expr::integer(a), b); }
inline Expr operator*(const Expr& a, long long b) { return mul(a, Expr::integer(b)); }
inline Expr operator*(long long a, const Expr& b) { return mul(Expr::integer(a), b); }
inline Expr operator/(const Expr& a, long long b) { return div(a, Expr::integer(b)); }
inline Expr operator/(long long a, const Expr& b) { return div(Expr::integer(a), b); }

// --- tree queries ---

template <typename F>
void visit(const Expr& e, F&& f) {
  f(e);
  for (const auto& ch : e.node().children) visit(ch, f);
}

inline bool contains_symbol(const Expr& e, const std::string& name) {
  bool found = false;
  visit(e, [&](const Expr& n) {
    if (n.kind() == NodeKind::Symbol && n.node().name == name) found = true;
  });
  return found;
}

inline bool contains_jet(const Expr& e, const JetKey& key) {
  bool found = false;
  visit(e, [&](const Expr& n) {
    if (n.kind() == NodeKind::Jet && n.node().jet == key) found = true;
  });
  return found;
}

inline bool contains_function(const Expr& e, const std::string& name) {
  bool found = false;
  visit(e, [&](const Expr& n) {
    if (n.kind() == NodeKind::FuncApp && n.node().name == name) found = true;
  });
  return found;
}

// All jet coordinates occurring in e.
inline std::vector<JetKey> jets_of(const Expr& e) {
  std::map<JetKey, bool> seen;
  visit(e, [&](const Expr& n) {
    if (n.kind() == NodeKind::Jet) seen[n.node().jet] = true;
  });
  std::vector<JetKey> out;
  out.reserve(seen.size());
  for (const auto& [k, _] : seen) out.push_back(k);
  return out;
}

}  // namespace symred
