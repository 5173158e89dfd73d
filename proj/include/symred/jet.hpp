// Jet-space bookkeeping: total derivatives, second-order prolongation of
// vector fields in characteristic form, Lie brackets, and application of a
// prolonged field to an expression.

#pragma once

#include "symred/calculus.hpp"
#include "symred/canonical.hpp"

namespace symred {

struct OrderOverflow : std::domain_error {
  using std::domain_error::domain_error;
};

struct JetContext {
  std::vector<std::string> indep;  // e.g. {x, y}
  std::vector<std::string> dep;    // e.g. {w, E}
  int max_order = 2;

  static JetContext heat() { return JetContext{{"x", "y"}, {"w", "E"}, 2}; }

  // All multi-indices over indep with |J| == k, graded-lex by variable order.
  std::vector<std::map<std::string, int>> indices_of_order(int k) const {
    std::vector<std::map<std::string, int>> out;
    std::map<std::string, int> cur;
    auto rec = [&](size_t vi, int left, auto&& self) -> void {
      if (vi + 1 == indep.size()) {
        if (left > 0) cur[indep[vi]] = left;
        out.push_back(cur);
        cur.erase(indep[vi]);
        return;
      }
      for (int take = left; take >= 0; --take) {
        if (take > 0) cur[indep[vi]] = take;
        self(vi + 1, left - take, self);
        cur.erase(indep[vi]);
      }
    };
    rec(0, k, rec);
    return out;
  }

  // Live jet coordinates for all dependents, orders lo..hi.
  std::vector<JetKey> jets(int lo, int hi) const {
    std::vector<JetKey> out;
    for (int k = lo; k <= hi; ++k)
      for (const auto& d : dep)
        for (auto& idx : indices_of_order(k)) out.push_back(JetKey{d, idx});
    return out;
  }
};

namespace detail {

inline JetKey bump(const JetKey& k, const std::string& v) {
  JetKey out = k;
  out.index[v] += 1;
  return out;
}

inline Expr total_derivative_impl(const Expr& e, const std::string& v, const JetContext& ctx,
                                  int order_cap) {
  std::vector<Expr> parts;
  Expr dv = diff(e, Expr::symbol(v));
  if (!dv.is_zero_constant()) parts.push_back(dv);
  for (const JetKey& j : jets_of(e)) {
    if (ctx.dep.end() == std::find(ctx.dep.begin(), ctx.dep.end(), j.dep)) continue;
    Expr dj = diff(e, Expr::jet(j));
    if (dj.is_zero_constant()) continue;
    if (j.order() + 1 > order_cap)
      throw OrderOverflow("total derivative: order overflow past " + std::to_string(order_cap) +
                          " at " + j.name());
    parts.push_back(mul(Expr::jet(bump(j, v)), dj));
  }
  return addv(parts);
}

}  // namespace detail

inline Expr total_derivative(const Expr& e, const std::string& v, const JetContext& ctx) {
  return detail::total_derivative_impl(e, v, ctx, ctx.max_order);
}

// Infinitesimal generator on base variables: one coefficient per independent
// and one per dependent variable, each an expression in (indep, dep).
struct VectorField {
  std::vector<Expr> xi;   // aligned with ctx.indep
  std::vector<Expr> phi;  // aligned with ctx.dep

  // Coefficients may not involve jet coordinates of order >= 1.
  void validate(const JetContext& ctx) const {
    if (xi.size() != ctx.indep.size() || phi.size() != ctx.dep.size())
      throw std::invalid_argument("vector field arity mismatch");
    auto check = [](const Expr& c) {
      for (const JetKey& j : jets_of(c))
        if (j.order() >= 1)
          throw std::invalid_argument("vector field coefficient contains jet " + j.name());
    };
    for (const auto& c : xi) check(c);
    for (const auto& c : phi) check(c);
  }
};

struct ProlongedField {
  VectorField base;
  int order = 0;
  std::map<JetKey, Expr> coeff;  // includes order-0 entries equal to base.phi
};

// Second-order (or first-order) prolongation in characteristic form:
//   eta^{u_J} = D_J(phi^u - sum_i xi^i u_i) + sum_i xi^i u_{J,i}.
// The intermediate total derivatives may touch jets one order above the
// context maximum; those cancel, and the result is checked to stay in range.
inline ProlongedField prolong(const VectorField& vf, int order, const JetContext& ctx) {
  vf.validate(ctx);
  if (order > ctx.max_order) throw OrderOverflow("prolongation order exceeds context maximum");
  ProlongedField out{vf, order, {}};
  for (size_t u = 0; u < ctx.dep.size(); ++u) {
    const std::string& dep = ctx.dep[u];
    out.coeff[JetKey{dep, {}}] = vf.phi[u];
    // characteristic Q^u
    std::vector<Expr> qs{vf.phi[u]};
    for (size_t i = 0; i < ctx.indep.size(); ++i)
      qs.push_back(neg(mul(vf.xi[i], Expr::jet(dep, {{ctx.indep[i], 1}}))));
    Expr q = addv(qs);
    for (int k = 1; k <= order; ++k) {
      for (auto& idx : ctx.indices_of_order(k)) {
        Expr dq = q;
        for (const auto& [v, c] : idx)
          for (int r = 0; r < c; ++r)
            dq = detail::total_derivative_impl(dq, v, ctx, ctx.max_order + 1);
        std::vector<Expr> parts{dq};
        for (size_t i = 0; i < ctx.indep.size(); ++i) {
          JetKey ji{dep, idx};
          ji.index[ctx.indep[i]] += 1;
          parts.push_back(mul(vf.xi[i], Expr::jet(ji)));
        }
        // The top-order jets introduced by D_J cancel against the
        // characteristic-correction term only after expansion.
        Expr eta = expand_canonical(addv(parts));
        for (const JetKey& j : jets_of(eta))
          if (j.order() > ctx.max_order)
            throw std::logic_error("prolongation left an out-of-range jet " + j.name());
        out.coeff[JetKey{dep, idx}] = eta;
      }
    }
  }
  return out;
}

// Directional derivative of e along the prolonged field.
inline Expr apply(const ProlongedField& pf, const Expr& e, const JetContext& ctx) {
  std::vector<Expr> parts;
  for (size_t i = 0; i < ctx.indep.size(); ++i) {
    Expr d = diff(e, Expr::symbol(ctx.indep[i]));
    if (!d.is_zero_constant()) parts.push_back(mul(pf.base.xi[i], d));
  }
  for (const auto& [j, c] : pf.coeff) {
    Expr d = diff(e, Expr::jet(j));
    if (!d.is_zero_constant()) parts.push_back(mul(c, d));
  }
  return addv(parts);
}

// Action of a base vector field on a function of (indep, dep).
inline Expr base_action(const VectorField& vf, const Expr& f, const JetContext& ctx) {
  std::vector<Expr> parts;
  for (size_t i = 0; i < ctx.indep.size(); ++i)
    parts.push_back(mul(vf.xi[i], diff(f, Expr::symbol(ctx.indep[i]))));
  for (size_t u = 0; u < ctx.dep.size(); ++u)
    parts.push_back(mul(vf.phi[u], diff(f, Expr::jet(ctx.dep[u], {}))));
  return addv(parts);
}

inline VectorField lie_bracket(const VectorField& a, const VectorField& b, const JetContext& ctx) {
  a.validate(ctx);
  b.validate(ctx);
  VectorField out;
  for (size_t i = 0; i < ctx.indep.size(); ++i)
    out.xi.push_back(sub(base_action(a, b.xi[i], ctx), base_action(b, a.xi[i], ctx)));
  for (size_t u = 0; u < ctx.dep.size(); ++u)
    out.phi.push_back(sub(base_action(a, b.phi[u], ctx), base_action(b, a.phi[u], ctx)));
  return out;
}

}  // namespace symred
