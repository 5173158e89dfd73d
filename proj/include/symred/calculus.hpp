// Partial differentiation, simultaneous substitution, and the one-pass
// structural normalization used by the parser round-trip.
//
// diff() differentiates with respect to a named indeterminate or a jet
// coordinate treated as an independent symbol; derivatives of
// unspecified-function applications raise the per-slot derivative order and
// chain through the arguments.

#pragma once

#include "symred/expr.hpp"

#include <set>

namespace symred {

// Derivative variables are Symbol or Jet expressions.
struct DiffVar {
  bool is_jet = false;
  std::string sym;
  JetKey jet;

  static DiffVar of(const Expr& v) {
    DiffVar d;
    if (v.kind() == NodeKind::Symbol) {
      d.sym = v.node().name;
    } else if (v.kind() == NodeKind::Jet) {
      d.is_jet = true;
      d.jet = v.node().jet;
    } else {
      throw std::invalid_argument("diff: variable must be an indeterminate or jet coordinate");
    }
    return d;
  }
};

inline Expr diff(const Expr& e, const DiffVar& v);

inline Expr diff(const Expr& e, const Expr& v) { return diff(e, DiffVar::of(v)); }

inline Expr diff(const Expr& e, const DiffVar& v) {
  const ExprNode& n = e.node();
  switch (n.kind) {
    case NodeKind::Constant:
      return Expr::integer(0);
    case NodeKind::Symbol:
      return (!v.is_jet && n.name == v.sym) ? Expr::integer(1) : Expr::integer(0);
    case NodeKind::Jet:
      return (v.is_jet && n.jet == v.jet) ? Expr::integer(1) : Expr::integer(0);
    case NodeKind::Sum: {
      std::vector<Expr> parts;
      parts.reserve(n.children.size());
      for (const auto& ch : n.children) parts.push_back(diff(ch, v));
      return addv(parts);
    }
    case NodeKind::Product: {
      std::vector<Expr> parts;
      for (size_t i = 0; i < n.children.size(); ++i) {
        Expr d = diff(n.children[i], v);
        if (d.is_zero_constant()) continue;
        std::vector<Expr> fs;
        fs.reserve(n.children.size());
        for (size_t j = 0; j < n.children.size(); ++j) fs.push_back(j == i ? d : n.children[j]);
        parts.push_back(mulv(fs));
      }
      return addv(parts);
    }
    case NodeKind::Power: {
      Expr d = diff(n.children[0], v);
      if (d.is_zero_constant()) return d;
      return mulv({Expr::integer(n.exponent), powi(n.children[0], n.exponent - 1), d});
    }
    case NodeKind::Quotient: {
      const Expr& num = n.children[0];
      const Expr& den = n.children[1];
      Expr dn = diff(num, v);
      Expr dd = diff(den, v);
      if (dd.is_zero_constant()) return div(dn, den);
      return div(sub(mul(dn, den), mul(num, dd)), powi(den, 2));
    }
    case NodeKind::FuncApp: {
      std::vector<Expr> parts;
      for (size_t i = 0; i < n.children.size(); ++i) {
        Expr d = diff(n.children[i], v);
        if (d.is_zero_constant()) continue;
        std::vector<int> deriv = n.deriv;
        deriv[i] += 1;
        parts.push_back(mul(Expr::func(n.name, n.params, n.children, std::move(deriv)), d));
      }
      return addv(parts);
    }
    case NodeKind::PrimApp: {
      const Expr& u = n.children[0];
      Expr du = diff(u, v);
      if (du.is_zero_constant()) return du;
      switch (n.prim) {
        case Primitive::Sqrt:
          return div(du, mul(Expr::integer(2), Expr::prim(Primitive::Sqrt, u)));
        case Primitive::Exp:
          return mul(Expr::prim(Primitive::Exp, u), du);
        case Primitive::Ln:
          return div(du, u);
        case Primitive::Arctan:
          return div(du, add(Expr::integer(1), powi(u, 2)));
        case Primitive::Artanh:
          return div(du, sub(Expr::integer(1), powi(u, 2)));
        case Primitive::Erf:
          // d erf(u) = 2/sqrt(pi) * exp(-u^2) * du, with `pi` a reserved
          // indeterminate (transcendental, so zero tests remain sound).
          return mulv({div(Expr::integer(2), Expr::prim(Primitive::Sqrt, Expr::symbol("pi"))),
                       Expr::prim(Primitive::Exp, neg(powi(u, 2))), du});
      }
      break;
    }
  }
  throw std::logic_error("diff: unhandled node kind");
}

// --- substitution ---

// A function binding is a lambda: formal parameters plus a body; derivative
// orders on the bound function are realized by differentiating the body with
// respect to the formals before the formals are replaced by the (already
// substituted) arguments.
struct FunctionBinding {
  std::vector<std::string> params;
  Expr body;
};

namespace detail {
// Inside a binding body a formal parameter may have been written as an
// order-0 jet coordinate (the parser produces jets for dependents); rewrite
// those to plain symbols so differentiation by the formal sees them.
inline Expr formals_to_symbols(const Expr& e, const std::vector<std::string>& params) {
  const ExprNode& n = e.node();
  if (n.kind == NodeKind::Jet && n.jet.index.empty()) {
    for (const auto& p : params)
      if (p == n.jet.dep) return Expr::symbol(p);
    return e;
  }
  if (n.kind == NodeKind::Jet) {
    for (const auto& p : params)
      if (p == n.jet.dep)
        throw std::invalid_argument("function binding body contains jet of formal " + n.jet.name());
    return e;
  }
  if (n.children.empty()) return e;
  std::vector<Expr> ch;
  ch.reserve(n.children.size());
  for (const auto& c : n.children) ch.push_back(formals_to_symbols(c, params));
  switch (n.kind) {
    case NodeKind::FuncApp: return Expr::func(n.name, n.params, std::move(ch), n.deriv);
    case NodeKind::PrimApp: return Expr::prim(n.prim, std::move(ch[0]));
    case NodeKind::Sum: return Expr::sum(std::move(ch));
    case NodeKind::Product: return Expr::product(std::move(ch));
    case NodeKind::Power: return Expr::power(std::move(ch[0]), n.exponent);
    case NodeKind::Quotient: return Expr::quotient(std::move(ch[0]), std::move(ch[1]));
    default: return e;
  }
}
}  // namespace detail

// Builds a function binding, normalizing formal occurrences in the body.
inline FunctionBinding fn(std::vector<std::string> params, const Expr& body) {
  Expr b = detail::formals_to_symbols(body, params);
  return FunctionBinding{std::move(params), std::move(b)};
}

struct Bindings {
  std::map<std::string, Expr> symbols;
  std::map<JetKey, Expr> jets;
  std::map<std::string, FunctionBinding> functions;

  bool empty() const { return symbols.empty() && jets.empty() && functions.empty(); }
};

namespace detail {

inline void collect_referenced_names(const Expr& e, std::set<std::string>& out) {
  visit(e, [&](const Expr& n) {
    if (n.kind() == NodeKind::Symbol) out.insert(n.node().name);
    if (n.kind() == NodeKind::FuncApp) out.insert(n.node().name);
    if (n.kind() == NodeKind::Jet) out.insert(n.node().jet.name());
  });
}

// Cycle detection over the binding dependency graph: key -> keys referenced
// by its replacement.  The spec requires acyclic bindings.
inline void check_acyclic(const Bindings& b) {
  std::map<std::string, std::set<std::string>> edges;
  std::set<std::string> keys;
  auto add = [&](const std::string& key, const Expr& repl) {
    // identity bindings are harmless and carry no dependency
    const ExprNode& r = repl.node();
    if ((r.kind == NodeKind::Symbol && r.name == key) ||
        (r.kind == NodeKind::Jet && r.jet.name() == key))
      return;
    keys.insert(key);
    collect_referenced_names(repl, edges[key]);
  };
  for (const auto& [k, v] : b.symbols) add(k, v);
  for (const auto& [k, v] : b.jets) add(k.name(), v);
  for (const auto& [k, v] : b.functions) {
    keys.insert(k);
    std::set<std::string> refs;
    collect_referenced_names(v.body, refs);
    for (const auto& p : v.params) refs.erase(p);  // formals are not references
    edges[k] = std::move(refs);
  }
  // DFS for a cycle restricted to binding keys.
  std::map<std::string, int> state;  // 0 unseen, 1 in stack, 2 done
  auto dfs = [&](const std::string& k, auto&& self) -> void {
    state[k] = 1;
    for (const auto& r : edges[k]) {
      if (!keys.count(r)) continue;
      if (state[r] == 1) throw std::invalid_argument("substitute: cyclic binding detected at " + r);
      if (state[r] == 0) self(r, self);
    }
    state[k] = 2;
  };
  for (const auto& k : keys)
    if (state[k] == 0) dfs(k, dfs);
}

struct SubstCtx {
  const Bindings& b;
  // memo of differentiated bodies per (function, deriv multi-index)
  std::map<std::pair<std::string, std::vector<int>>, Expr> body_memo;
};

inline Expr substitute_impl(const Expr& e, SubstCtx& ctx);

inline Expr realized_body(const std::string& name, const FunctionBinding& fb,
                          const std::vector<int>& deriv, SubstCtx& ctx) {
  auto key = std::make_pair(name, deriv);
  auto it = ctx.body_memo.find(key);
  if (it != ctx.body_memo.end()) return it->second;
  Expr body = fb.body;
  for (size_t i = 0; i < deriv.size(); ++i)
    for (int k = 0; k < deriv[i]; ++k) body = diff(body, Expr::symbol(fb.params[i]));
  ctx.body_memo.emplace(key, body);
  return body;
}

inline Expr substitute_impl(const Expr& e, SubstCtx& ctx) {
  const ExprNode& n = e.node();
  switch (n.kind) {
    case NodeKind::Constant:
      return e;
    case NodeKind::Symbol: {
      auto it = ctx.b.symbols.find(n.name);
      return it == ctx.b.symbols.end() ? e : it->second;
    }
    case NodeKind::Jet: {
      auto it = ctx.b.jets.find(n.jet);
      return it == ctx.b.jets.end() ? e : it->second;
    }
    case NodeKind::FuncApp: {
      std::vector<Expr> args;
      args.reserve(n.children.size());
      for (const auto& a : n.children) args.push_back(substitute_impl(a, ctx));
      auto it = ctx.b.functions.find(n.name);
      if (it == ctx.b.functions.end())
        return Expr::func(n.name, n.params, std::move(args), n.deriv);
      const FunctionBinding& fb = it->second;
      if (fb.params.size() != args.size())
        throw std::invalid_argument("substitute: arity mismatch for function " + n.name);
      Expr body = realized_body(n.name, fb, n.deriv, ctx);
      Bindings pb;
      for (size_t i = 0; i < args.size(); ++i) pb.symbols[fb.params[i]] = args[i];
      SubstCtx inner{pb, {}};
      return substitute_impl(body, inner);
    }
    case NodeKind::PrimApp:
      return Expr::prim(n.prim, substitute_impl(n.children[0], ctx));
    case NodeKind::Sum: {
      std::vector<Expr> parts;
      parts.reserve(n.children.size());
      for (const auto& ch : n.children) parts.push_back(substitute_impl(ch, ctx));
      return addv(parts);
    }
    case NodeKind::Product: {
      std::vector<Expr> parts;
      parts.reserve(n.children.size());
      for (const auto& ch : n.children) parts.push_back(substitute_impl(ch, ctx));
      return mulv(parts);
    }
    case NodeKind::Power:
      return powi(substitute_impl(n.children[0], ctx), n.exponent);
    case NodeKind::Quotient:
      return div(substitute_impl(n.children[0], ctx), substitute_impl(n.children[1], ctx));
  }
  throw std::logic_error("substitute: unhandled node kind");
}

}  // namespace detail

inline Expr substitute(const Expr& e, const Bindings& b) {
  if (b.empty()) return e;
  detail::check_acyclic(b);
  detail::SubstCtx ctx{b, {}};
  return detail::substitute_impl(e, ctx);
}

// Replace every subtree structurally equal to `pat` by `rep`.
inline Expr replace_structural(const Expr& e, const Expr& pat, const Expr& rep) {
  if (structural_equal(e, pat)) return rep;
  const ExprNode& n = e.node();
  if (n.children.empty()) return e;
  std::vector<Expr> ch;
  ch.reserve(n.children.size());
  for (const auto& c : n.children) ch.push_back(replace_structural(c, pat, rep));
  switch (n.kind) {
    case NodeKind::FuncApp: return Expr::func(n.name, n.params, std::move(ch), n.deriv);
    case NodeKind::PrimApp: return Expr::prim(n.prim, std::move(ch[0]));
    case NodeKind::Sum: return Expr::sum(std::move(ch));
    case NodeKind::Product: return Expr::product(std::move(ch));
    case NodeKind::Power: return Expr::power(std::move(ch[0]), n.exponent);
    case NodeKind::Quotient: return Expr::quotient(std::move(ch[0]), std::move(ch[1]));
    default: return e;
  }
}

// --- normalization (flatten + constant merge), for round-trip equality ---

inline Expr normalize(const Expr& e) {
  const ExprNode& n = e.node();
  switch (n.kind) {
    case NodeKind::Constant:
    case NodeKind::Symbol:
    case NodeKind::Jet:
      return e;
    case NodeKind::FuncApp: {
      std::vector<Expr> args;
      args.reserve(n.children.size());
      for (const auto& a : n.children) args.push_back(normalize(a));
      return Expr::func(n.name, n.params, std::move(args), n.deriv);
    }
    case NodeKind::PrimApp:
      return Expr::prim(n.prim, normalize(n.children[0]));
    case NodeKind::Sum: {
      std::vector<Expr> parts;
      parts.reserve(n.children.size());
      for (const auto& ch : n.children) parts.push_back(normalize(ch));
      return addv(parts);
    }
    case NodeKind::Product: {
      std::vector<Expr> parts;
      parts.reserve(n.children.size());
      for (const auto& ch : n.children) parts.push_back(normalize(ch));
      return mulv(parts);
    }
    case NodeKind::Power: {
      Expr b = normalize(n.children[0]);
      return powi(b, n.exponent);
    }
    case NodeKind::Quotient: {
      Expr num = normalize(n.children[0]);
      Expr den = normalize(n.children[1]);
      if (num.is_constant() && den.is_constant() && den.node().value != 0)
        return Expr::rational(num.node().value / den.node().value);
      return div(num, den);
    }
  }
  throw std::logic_error("normalize: unhandled node kind");
}

}  // namespace symred
