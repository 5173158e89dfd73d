// Deterministic plain-text rendering of expressions in the grammar accepted
// by the parser; parse(render(e)) recovers e up to one normalization pass.

#pragma once

#include "symred/expr.hpp"

#include <optional>
#include <sstream>

namespace symred {

namespace detail {

inline int precedence(const ExprNode& n) {
  switch (n.kind) {
    case NodeKind::Sum: return 1;
    case NodeKind::Product:
    case NodeKind::Quotient: return 2;
    case NodeKind::Power: return 3;
    default: return 4;
  }
}

inline std::string rat_str(const Rational& v) {
  std::ostringstream os;
  os << v;  // boost prints p/q in lowest terms, or p when integral
  return os.str();
}

// If `e` is a negative constant or a product with a leading negative
// constant, return the negated (positive-leading) expression so sums can
// render "a - b" instead of "a + -1*b".
inline std::optional<Expr> split_negative(const Expr& e) {
  const ExprNode& n = e.node();
  if (n.kind == NodeKind::Constant && n.value < 0) return Expr::rational(-n.value);
  if (n.kind == NodeKind::Product && !n.children.empty() && n.children[0].is_constant() &&
      n.children[0].node().value < 0) {
    Rational c = -n.children[0].node().value;
    std::vector<Expr> fs(n.children.begin() + 1, n.children.end());
    if (c != 1) fs.insert(fs.begin(), Expr::rational(c));
    if (fs.empty()) return Expr::integer(1);
    if (fs.size() == 1) return fs[0];
    return Expr::product(std::move(fs));
  }
  return std::nullopt;
}

inline void render_into(const Expr& e, std::ostream& os, int parent_prec);

inline void render_child(const Expr& e, std::ostream& os, int parent_prec, bool force_parens) {
  if (force_parens || precedence(e.node()) < parent_prec) {
    os << '(';
    render_into(e, os, 0);
    os << ')';
  } else {
    render_into(e, os, parent_prec);
  }
}

inline void render_into(const Expr& e, std::ostream& os, int parent_prec) {
  (void)parent_prec;
  const ExprNode& n = e.node();
  switch (n.kind) {
    case NodeKind::Constant: {
      os << rat_str(n.value);
      return;
    }
    case NodeKind::Symbol:
      os << n.name;
      return;
    case NodeKind::Jet:
      os << n.jet.name();
      return;
    case NodeKind::Sum: {
      bool first = true;
      for (const auto& t : n.children) {
        if (first) {
          render_child(t, os, 1, false);
          first = false;
          continue;
        }
        if (auto pos = split_negative(t)) {
          os << " - ";
          render_child(*pos, os, 2, false);
        } else {
          os << " + ";
          render_child(t, os, 2, false);
        }
      }
      if (first) os << '0';
      return;
    }
    case NodeKind::Product: {
      size_t start = 0;
      if (!n.children.empty() && n.children[0].is_constant() && n.children[0].node().value == -1 &&
          n.children.size() > 1) {
        os << '-';
        start = 1;
      }
      bool first = true;
      for (size_t i = start; i < n.children.size(); ++i) {
        const Expr& f = n.children[i];
        if (!first) os << '*';
        // A quotient in non-leading position must be parenthesized:
        // a*b/c would re-associate as (a*b)/c.
        bool force = !first && f.kind() == NodeKind::Quotient;
        // Constants after the first factor: negative ones need parens.
        if (f.is_constant() && f.node().value < 0 && !first) force = true;
        render_child(f, os, 2, force);
        first = false;
      }
      if (first) os << '1';
      return;
    }
    case NodeKind::Quotient: {
      const Expr& num = n.children[0];
      const Expr& den = n.children[1];
      render_child(num, os, 2, false);
      os << '/';
      bool force = den.kind() == NodeKind::Product || den.kind() == NodeKind::Quotient ||
                   (den.is_constant() &&
                    (den.node().value < 0 || denominator(den.node().value) != 1));
      render_child(den, os, 3, force);
      return;
    }
    case NodeKind::Power: {
      const Expr& b = n.children[0];
      bool atom_base = (b.kind() == NodeKind::Symbol || b.kind() == NodeKind::Jet ||
                        b.kind() == NodeKind::FuncApp || b.kind() == NodeKind::PrimApp ||
                        (b.is_constant() && b.node().value >= 0 &&
                         denominator(b.node().value) == 1));
      render_child(b, os, 4, !atom_base);
      os << '^' << n.exponent;
      return;
    }
    case NodeKind::PrimApp: {
      os << primitive_name(n.prim) << '(';
      render_into(n.children[0], os, 0);
      os << ')';
      return;
    }
    case NodeKind::FuncApp: {
      bool has_deriv = false;
      for (int d : n.deriv)
        if (d > 0) has_deriv = true;
      if (has_deriv) {
        // D(name, slot, order[, slot, order ...])
        os << "D(" << n.name;
        for (size_t i = 0; i < n.deriv.size(); ++i)
          if (n.deriv[i] > 0) os << ", " << n.params[i] << ", " << n.deriv[i];
        os << ')';
        // Append explicit arguments unless they are exactly the formals.
        bool formal_args = true;
        for (size_t i = 0; i < n.children.size(); ++i) {
          const ExprNode& a = n.children[i].node();
          bool match = (a.kind == NodeKind::Symbol && a.name == n.params[i]) ||
                       (a.kind == NodeKind::Jet && a.jet.index.empty() && a.jet.dep == n.params[i]);
          if (!match) formal_args = false;
        }
        if (!formal_args) {
          os << '(';
          for (size_t i = 0; i < n.children.size(); ++i) {
            if (i) os << ", ";
            render_into(n.children[i], os, 0);
          }
          os << ')';
        }
      } else {
        os << n.name << '(';
        for (size_t i = 0; i < n.children.size(); ++i) {
          if (i) os << ", ";
          render_into(n.children[i], os, 0);
        }
        os << ')';
      }
      return;
    }
  }
  throw std::logic_error("render: unhandled node kind");
}

}  // namespace detail

inline std::string render(const Expr& e) {
  std::ostringstream os;
  detail::render_into(e, os, 0);
  return os.str();
}

}  // namespace symred
