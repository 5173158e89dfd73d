// Canonical rational-function form over an interned atom set.
//
// Atoms are indeterminates, jet coordinates, unspecified-function
// applications (keyed by name, derivative multi-index, and the rendered
// argument list), and — when enabled — opaque primitive applications treated
// as fresh indeterminates.  An expression expands to numerator/denominator
// polynomial maps with exact rational coefficients under a graded-lex
// monomial order; the zero test is "numerator map empty" after clearing
// denominators, no gcd computation involved.

#pragma once

#include "symred/calculus.hpp"
#include "symred/render.hpp"

#include <algorithm>

namespace symred {

struct ZeroTestOptions {
  // Strict mode rejects opaque primitives; with this flag they become atoms
  // (sound only because the identities in scope are polynomial in them).
  bool primitive_atoms = false;
};

namespace canon {

// Monomial: sorted (atom id, exponent>0) pairs.
struct Monomial {
  std::vector<std::pair<int, int>> f;

  int degree() const {
    int d = 0;
    for (auto& [_, e] : f) d += e;
    return d;
  }
  bool operator==(const Monomial& o) const { return f == o.f; }
};

// Graded lexicographic: higher total degree first; ties broken by exponent
// vectors compared atom-by-atom in id order.
struct MonoLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    int da = a.degree(), db = b.degree();
    if (da != db) return da > db;
    size_t i = 0, j = 0;
    while (i < a.f.size() && j < b.f.size()) {
      // a positive exponent on an earlier atom wins the lex comparison
      if (a.f[i].first != b.f[j].first) return a.f[i].first < b.f[j].first;
      if (a.f[i].second != b.f[j].second) return a.f[i].second > b.f[j].second;
      ++i;
      ++j;
    }
    return a.f.size() > b.f.size();
  }
};

inline Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.f.reserve(a.f.size() + b.f.size());
  size_t i = 0, j = 0;
  while (i < a.f.size() || j < b.f.size()) {
    if (j == b.f.size() || (i < a.f.size() && a.f[i].first < b.f[j].first)) {
      out.f.push_back(a.f[i++]);
    } else if (i == a.f.size() || b.f[j].first < a.f[i].first) {
      out.f.push_back(b.f[j++]);
    } else {
      out.f.emplace_back(a.f[i].first, a.f[i].second + b.f[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

struct Poly {
  std::map<Monomial, Rational, MonoLess> t;

  bool is_zero() const { return t.empty(); }
  bool is_constant() const {
    return t.empty() || (t.size() == 1 && t.begin()->first.f.empty());
  }
  Rational constant_value() const { return t.empty() ? Rational(0) : t.begin()->second; }

  static Poly constant(Rational c) {
    Poly p;
    if (c != 0) p.t.emplace(Monomial{}, std::move(c));
    return p;
  }
  static Poly atom(int id) {
    Poly p;
    Monomial m;
    m.f.emplace_back(id, 1);
    p.t.emplace(std::move(m), Rational(1));
    return p;
  }

  void add_term(const Monomial& m, const Rational& c) {
    auto [it, ins] = t.emplace(m, c);
    if (!ins) {
      it->second += c;
      if (it->second == 0) t.erase(it);
    }
  }
};

inline Poly add(const Poly& a, const Poly& b) {
  Poly out = a;
  for (const auto& [m, c] : b.t) out.add_term(m, c);
  return out;
}

inline Poly negate(const Poly& a) {
  Poly out = a;
  for (auto& [_, c] : out.t) c = -c;
  return out;
}

inline Poly mul(const Poly& a, const Poly& b) {
  Poly out;
  if (a.t.empty() || b.t.empty()) return out;
  for (const auto& [ma, ca] : a.t)
    for (const auto& [mb, cb] : b.t) out.add_term(mono_mul(ma, mb), ca * cb);
  return out;
}

inline Poly scale(const Poly& a, const Rational& c) {
  Poly out;
  if (c == 0) return out;
  out.t = a.t;
  for (auto& [_, v] : out.t) v *= c;
  return out;
}

inline Poly pow(const Poly& a, long long n) {
  Poly out = Poly::constant(1);
  Poly base = a;
  for (long long k = n; k > 0; k >>= 1) {
    if (k & 1) out = mul(out, base);
    if (k > 1) base = mul(base, base);
  }
  return out;
}

// A deterministic serialization of a polynomial, used as the identity of
// denominator factors so repeated divisions by the same expression cancel
// without any gcd computation.
inline std::string poly_key(const Poly& p) {
  std::string s;
  for (const auto& [m, c] : p.t) {
    for (const auto& [id, e] : m.f) s += std::to_string(id) + "^" + std::to_string(e) + ".";
    s += c.str() + ";";
  }
  return s;
}

// Denominator kept as a product of factors with multiplicities.  Sums take
// the factor-wise lcm of denominators, so folding a long sum of terms over a
// shared denominator no longer raises its power once per term.
struct Den {
  std::map<std::string, std::pair<Poly, int>> f;

  bool is_one() const { return f.empty(); }
  void push(const Poly& p, int mult) {
    if (mult == 0) return;
    auto [it, ins] = f.emplace(poly_key(p), std::make_pair(p, mult));
    if (!ins) it->second.second += mult;
    if (it->second.second == 0) f.erase(it);
  }
  Poly expanded() const {
    Poly out = Poly::constant(1);
    for (const auto& [_, pe] : f) out = mul(out, pow(pe.first, pe.second));
    return out;
  }
};

struct RatForm {
  Poly num;
  Den den;
};

inline RatForm make_rat(Poly n, Den d) {
  // fold constant factors into the numerator
  for (auto it = d.f.begin(); it != d.f.end();) {
    if (it->second.first.is_constant()) {
      Rational c = it->second.first.constant_value();
      if (c == 0) throw std::domain_error("canonical form: division by identically zero expression");
      Rational m = 1;
      for (int i = 0; i < it->second.second; ++i) m *= c;
      n = scale(n, Rational(1) / m);
      it = d.f.erase(it);
    } else {
      ++it;
    }
  }
  if (n.is_zero()) return RatForm{std::move(n), Den{}};
  return RatForm{std::move(n), std::move(d)};
}

inline RatForm add(const RatForm& a, const RatForm& b) {
  // lcm of the factored denominators
  Den lcm = a.den;
  for (const auto& [k, pe] : b.den.f) {
    auto it = lcm.f.find(k);
    if (it == lcm.f.end())
      lcm.f.emplace(k, pe);
    else
      it->second.second = std::max(it->second.second, pe.second);
  }
  auto lift = [&](const RatForm& r) {
    Poly out = r.num;
    for (const auto& [k, pe] : lcm.f) {
      auto it = r.den.f.find(k);
      int have = it == r.den.f.end() ? 0 : it->second.second;
      if (pe.second > have) out = mul(out, pow(pe.first, pe.second - have));
    }
    return out;
  };
  Poly n = add(lift(a), lift(b));  // must run before lcm is moved from
  return make_rat(std::move(n), std::move(lcm));
}

inline RatForm mul(const RatForm& a, const RatForm& b) {
  Den d = a.den;
  for (const auto& [k, pe] : b.den.f) d.push(pe.first, pe.second);
  return make_rat(mul(a.num, b.num), std::move(d));
}

inline RatForm div(const RatForm& a, const RatForm& b) {
  if (b.num.is_zero())
    throw std::domain_error("canonical form: division by identically zero expression");
  Den d = a.den;
  if (!b.num.is_constant()) d.push(b.num, 1);
  Poly n = a.num;
  if (b.num.is_constant()) n = scale(n, Rational(1) / b.num.constant_value());
  for (const auto& [k, pe] : b.den.f) {
    (void)k;
    // factors of b's denominator move to the numerator
    n = mul(n, pow(pe.first, pe.second));
  }
  return make_rat(std::move(n), std::move(d));
}

inline RatForm pow(const RatForm& a, long long n) {
  if (n >= 0) {
    Den d;
    for (const auto& [k, pe] : a.den.f) d.f.emplace(k, std::make_pair(pe.first, pe.second * static_cast<int>(n)));
    return make_rat(pow(a.num, n), std::move(d));
  }
  if (a.num.is_zero())
    throw std::domain_error("canonical form: negative power of identically zero expression");
  Den d;
  if (!a.num.is_constant()) d.push(a.num, static_cast<int>(-n));
  Poly num = Poly::constant(1);
  if (a.num.is_constant()) {
    Rational c = a.num.constant_value();
    Rational m = 1;
    for (long long i = 0; i < -n; ++i) m *= c;
    num = Poly::constant(Rational(1) / m);
  }
  for (const auto& [k, pe] : a.den.f) {
    (void)k;
    num = mul(num, pow(pe.first, pe.second * static_cast<int>(-n)));
  }
  return make_rat(std::move(num), std::move(d));
}

}  // namespace canon

struct UnsupportedNode : std::domain_error {
  using std::domain_error::domain_error;
};

// Interns atoms in first-encounter order (deterministic for a fixed
// traversal), exposing representative expressions for rebuilding output.
class Canonicalizer {
 public:
  explicit Canonicalizer(ZeroTestOptions opts = {}) : opts_(opts) {}

  canon::RatForm run(const Expr& e) {
    using namespace canon;
    const ExprNode& n = e.node();
    switch (n.kind) {
      case NodeKind::Constant:
        return RatForm{Poly::constant(n.value), Den{}};
      case NodeKind::Symbol:
      case NodeKind::Jet:
      case NodeKind::FuncApp:
        return RatForm{Poly::atom(intern(e)), Den{}};
      case NodeKind::PrimApp:
        if (!opts_.primitive_atoms)
          throw UnsupportedNode(std::string("opaque primitive '") + primitive_name(n.prim) +
                                "' in strict zero-test mode");
        return RatForm{Poly::atom(intern(e)), Den{}};
      case NodeKind::Sum: {
        RatForm acc{Poly{}, Den{}};
        for (const auto& ch : n.children) acc = add(acc, run(ch));
        return acc;
      }
      case NodeKind::Product: {
        RatForm acc{Poly::constant(1), Den{}};
        for (const auto& ch : n.children) acc = mul(acc, run(ch));
        return acc;
      }
      case NodeKind::Power:
        return pow(run(n.children[0]), n.exponent);
      case NodeKind::Quotient:
        return div(run(n.children[0]), run(n.children[1]));
    }
    throw std::logic_error("canonicalize: unhandled node kind");
  }

  int intern(const Expr& atom) {
    std::string sig = signature(atom);
    auto it = ids_.find(sig);
    if (it != ids_.end()) return it->second;
    int id = static_cast<int>(reps_.size());
    ids_.emplace(std::move(sig), id);
    reps_.push_back(atom);
    return id;
  }

  const Expr& representative(int id) const { return reps_.at(static_cast<size_t>(id)); }
  size_t atom_count() const { return reps_.size(); }

  // Rebuild a polynomial as an expression, terms in canonical (descending
  // graded-lex) order.
  Expr to_expr(const canon::Poly& p) const {
    if (p.t.empty()) return Expr::integer(0);
    std::vector<Expr> terms;
    for (const auto& [m, c] : p.t) {
      std::vector<Expr> fs;
      if (c != 1 || m.f.empty()) fs.push_back(Expr::rational(c));
      for (const auto& [id, e] : m.f) fs.push_back(powi(representative(id), e));
      terms.push_back(mulv(fs));
    }
    return addv(terms);
  }

  Expr to_expr(const canon::Den& d) const {
    std::vector<Expr> fs;
    for (const auto& [_, pe] : d.f) fs.push_back(powi(to_expr(pe.first), pe.second));
    return fs.empty() ? Expr::integer(1) : mulv(fs);
  }

  Expr to_expr(const canon::RatForm& r) const {
    Expr num = to_expr(r.num);
    if (r.den.is_one()) return num;
    return div(num, to_expr(r.den));
  }

 private:
  std::string signature(const Expr& e) const {
    const ExprNode& n = e.node();
    switch (n.kind) {
      case NodeKind::Symbol:
        return "s:" + n.name;
      case NodeKind::Jet:
        return "j:" + n.jet.name();
      case NodeKind::FuncApp: {
        std::string s = "f:" + n.name + ";";
        for (int d : n.deriv) s += std::to_string(d) + ",";
        s += ";";
        for (const auto& a : n.children) s += render(a) + "|";
        return s;
      }
      case NodeKind::PrimApp:
        return std::string("p:") + primitive_name(n.prim) + ";" + render(n.children[0]);
      default:
        throw std::logic_error("signature: not an atom");
    }
  }

  ZeroTestOptions opts_;
  std::map<std::string, int> ids_;
  std::vector<Expr> reps_;
};

// Expand to canonical form and rebuild; exact cancellations actually cancel.
inline Expr expand_canonical(const Expr& e) {
  Canonicalizer c(ZeroTestOptions{true});
  return c.to_expr(c.run(e));
}

// True iff e is identically zero as a rational function of its atoms.
inline bool is_zero(const Expr& e, ZeroTestOptions opts = {}) {
  Canonicalizer c(opts);
  return c.run(e).num.is_zero();
}

inline bool equal_as_rational(const Expr& a, const Expr& b, ZeroTestOptions opts = {}) {
  return is_zero(sub(a, b), opts);
}

// --- coefficient collection ---

struct CollectError : std::domain_error {
  using std::domain_error::domain_error;
};

struct CollectedTerm {
  Expr monomial;     // product of collect variables (1 for the constant term)
  Expr coefficient;  // free of the collect variables
};

// Collect e as a polynomial in `vars` (atoms).  The denominator of e's
// canonical form must be free of the collect variables; each returned
// coefficient is numerator-part / denominator.  Terms are ordered by
// descending graded-lex monomial.
inline std::vector<CollectedTerm> collect(const Expr& e, const std::vector<Expr>& vars,
                                          ZeroTestOptions opts = {}) {
  using namespace canon;
  Canonicalizer c(opts);
  std::vector<int> var_ids;
  var_ids.reserve(vars.size());
  for (const auto& v : vars) var_ids.push_back(c.intern(v));
  auto is_var = [&](int id) {
    return std::find(var_ids.begin(), var_ids.end(), id) != var_ids.end();
  };

  RatForm r = c.run(e);
  for (const auto& [k, pe] : r.den.f) {
    (void)k;
    for (const auto& [m, _] : pe.first.t)
      for (const auto& [id, __] : m.f)
        if (is_var(id))
          throw CollectError("collect: non-polynomial dependence on collect variable " +
                             render(c.representative(id)));
  }

  std::map<Monomial, Poly, MonoLess> groups;
  for (const auto& [m, coef] : r.num.t) {
    Monomial key, rest;
    for (const auto& [id, exp] : m.f)
      (is_var(id) ? key : rest).f.emplace_back(id, exp);
    groups[key].add_term(rest, coef);
  }

  bool unit_den = r.den.is_one();
  Expr den_expr = unit_den ? Expr::integer(1) : c.to_expr(r.den);
  std::vector<CollectedTerm> out;
  out.reserve(groups.size());
  for (const auto& [key, poly] : groups) {
    std::vector<Expr> fs;
    for (const auto& [id, exp] : key.f) fs.push_back(powi(c.representative(id), exp));
    Expr mono = fs.empty() ? Expr::integer(1) : mulv(fs);
    Expr coeff = c.to_expr(poly);
    if (!unit_den) coeff = div(coeff, den_expr);
    out.push_back(CollectedTerm{mono, coeff});
  }
  return out;
}

}  // namespace symred
