// Rewriting of unspecified-function derivatives under differential
// constraints.  A rule states u_{J0} = rhs (rhs written in the function's
// formal parameters); every derivative atom u_K with K >= J0 componentwise
// is replaced by the appropriate derivative of rhs, recursively reduced, so
// expressions end up in a reduced form containing only unconstrained
// derivative atoms.

#pragma once

#include "symred/calculus.hpp"

#include <optional>

namespace symred {

struct DerivativeRule {
  std::string func;
  std::vector<std::string> params;
  std::vector<int> at;  // threshold multi-index J0 (at least one positive entry)
  Expr rhs;             // value of u_{J0}, in the formals
};

inline DerivativeRule make_rule(std::string func, std::vector<std::string> params,
                                std::vector<int> at, const Expr& rhs) {
  Expr body = detail::formals_to_symbols(rhs, params);
  return DerivativeRule{std::move(func), std::move(params), std::move(at), std::move(body)};
}

namespace detail {

class RuleEngine {
 public:
  explicit RuleEngine(const std::vector<DerivativeRule>& rules) : rules_(rules) {}

  Expr reduce(const Expr& e) {
    const ExprNode& n = e.node();
    std::vector<Expr> ch;
    ch.reserve(n.children.size());
    for (const auto& c : n.children) ch.push_back(reduce(c));
    switch (n.kind) {
      case NodeKind::Constant:
      case NodeKind::Symbol:
      case NodeKind::Jet:
        return e;
      case NodeKind::FuncApp: {
        for (size_t ri = 0; ri < rules_.size(); ++ri) {
          const DerivativeRule& r = rules_[ri];
          if (r.func != n.name || r.at.size() != n.deriv.size()) continue;
          bool ge = true;
          for (size_t i = 0; i < r.at.size(); ++i)
            if (n.deriv[i] < r.at[i]) ge = false;
          if (!ge) continue;
          Expr formal = reduced_derivative(ri, n.deriv);
          Bindings args;
          for (size_t i = 0; i < r.params.size(); ++i) args.symbols[r.params[i]] = ch[i];
          return substitute(formal, args);
        }
        return Expr::func(n.name, n.params, std::move(ch), n.deriv);
      }
      case NodeKind::PrimApp:
        return Expr::prim(n.prim, std::move(ch[0]));
      case NodeKind::Sum:
        return addv(ch);
      case NodeKind::Product:
        return mulv(ch);
      case NodeKind::Power:
        return powi(ch[0], n.exponent);
      case NodeKind::Quotient:
        return div(ch[0], ch[1]);
    }
    throw std::logic_error("rule reduce: unhandled node kind");
  }

 private:
  // Reduced value of u_K (K >= J0), expressed in the rule's formals.
  Expr reduced_derivative(size_t ri, const std::vector<int>& K) {
    auto key = std::make_pair(ri, K);
    auto it = memo_.find(key);
    if (it != memo_.end()) {
      if (!it->second.has_value())
        throw std::logic_error("derivative rule for " + rules_[ri].func + " is self-referential");
      return *it->second;
    }
    memo_[key] = std::nullopt;  // in-progress marker
    const DerivativeRule& r = rules_[ri];
    Expr value = Expr::integer(0);
    if (K == r.at) {
      value = reduce(r.rhs);
    } else {
      size_t slot = r.params.size();
      for (size_t i = 0; i < K.size(); ++i)
        if (K[i] > r.at[i]) slot = i;
      std::vector<int> prev = K;
      prev[slot] -= 1;
      Expr base = reduced_derivative(ri, prev);
      value = reduce(diff(base, Expr::symbol(r.params[slot])));
    }
    memo_[key] = value;
    return value;
  }

  const std::vector<DerivativeRule>& rules_;
  std::map<std::pair<size_t, std::vector<int>>, std::optional<Expr>> memo_;
};

}  // namespace detail

inline Expr reduce_derivatives(const Expr& e, const std::vector<DerivativeRule>& rules) {
  if (rules.empty()) return e;
  detail::RuleEngine eng(rules);
  return eng.reduce(e);
}

}  // namespace symred
