// Numeric (IEEE double) and exact-rational evaluation.  Points bind
// indeterminates and jet coordinates by name; `pi` is pre-bound on the
// numeric path.

#pragma once

#include "symred/expr.hpp"
#include "symred/specfun.hpp"

#include <cmath>
#include <cstdlib>

namespace symred {

using NumericPoint = std::map<std::string, double>;
using RationalPoint = std::map<std::string, Rational>;

inline double eval_numeric(const Expr& e, const NumericPoint& point) {
  const ExprNode& n = e.node();
  switch (n.kind) {
    case NodeKind::Constant:
      return static_cast<double>(n.value);
    case NodeKind::Symbol: {
      auto it = point.find(n.name);
      if (it != point.end()) return it->second;
      if (n.name == "pi") return M_PI;
      throw NumericError("eval: unbound indeterminate " + n.name);
    }
    case NodeKind::Jet: {
      auto it = point.find(n.jet.name());
      if (it == point.end()) throw NumericError("eval: unbound jet coordinate " + n.jet.name());
      return it->second;
    }
    case NodeKind::FuncApp:
      throw NumericError("eval: unspecified function " + n.name + " has no numeric value");
    case NodeKind::Sum: {
      double s = 0;
      for (const auto& ch : n.children) s += eval_numeric(ch, point);
      return s;
    }
    case NodeKind::Product: {
      double p = 1;
      for (const auto& ch : n.children) p *= eval_numeric(ch, point);
      return p;
    }
    case NodeKind::Power: {
      double b = eval_numeric(n.children[0], point);
      if (n.exponent < 0 && std::fabs(b) < 1e-300)
        throw NumericError("eval: numeric singularity (negative power of ~0)");
      return std::pow(b, static_cast<double>(n.exponent));
    }
    case NodeKind::Quotient: {
      double num = eval_numeric(n.children[0], point);
      double den = eval_numeric(n.children[1], point);
      if (std::fabs(den) < 1e-300) throw NumericError("eval: numeric singularity (division by ~0)");
      return num / den;
    }
    case NodeKind::PrimApp: {
      double u = eval_numeric(n.children[0], point);
      switch (n.prim) {
        case Primitive::Sqrt:
          if (u < 0) throw NumericError("eval: sqrt of negative value");
          return std::sqrt(u);
        case Primitive::Exp: return std::exp(u);
        case Primitive::Ln:
          if (u <= 0) throw NumericError("eval: ln of non-positive value");
          return std::log(u);
        case Primitive::Arctan: return std::atan(u);
        case Primitive::Artanh: return artanh(u);
        case Primitive::Erf: return erf(u);
      }
      break;
    }
  }
  throw std::logic_error("eval: unhandled node kind");
}

// Exact evaluation over the rationals; opaque primitives are rejected.
inline Rational eval_rational(const Expr& e, const RationalPoint& point) {
  const ExprNode& n = e.node();
  switch (n.kind) {
    case NodeKind::Constant:
      return n.value;
    case NodeKind::Symbol: {
      auto it = point.find(n.name);
      if (it == point.end()) throw NumericError("eval_rational: unbound indeterminate " + n.name);
      return it->second;
    }
    case NodeKind::Jet: {
      auto it = point.find(n.jet.name());
      if (it == point.end())
        throw NumericError("eval_rational: unbound jet coordinate " + n.jet.name());
      return it->second;
    }
    case NodeKind::Sum: {
      Rational s = 0;
      for (const auto& ch : n.children) s += eval_rational(ch, point);
      return s;
    }
    case NodeKind::Product: {
      Rational p = 1;
      for (const auto& ch : n.children) p *= eval_rational(ch, point);
      return p;
    }
    case NodeKind::Power: {
      Rational b = eval_rational(n.children[0], point);
      if (n.exponent < 0 && b == 0) throw NumericError("eval_rational: division by zero");
      Rational r = 1;
      for (long long i = 0; i < std::llabs(n.exponent); ++i) r *= b;
      return n.exponent < 0 ? Rational(1) / r : r;
    }
    case NodeKind::Quotient: {
      Rational num = eval_rational(n.children[0], point);
      Rational den = eval_rational(n.children[1], point);
      if (den == 0) throw NumericError("eval_rational: division by zero");
      return num / den;
    }
    default:
      throw NumericError("eval_rational: unsupported node");
  }
}

}  // namespace symred
