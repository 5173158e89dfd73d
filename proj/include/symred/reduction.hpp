// Symmetry reduction of the heat-conduction equation: invariant data from a
// generator, the reduced ODE c1(x) E0' + c0(x) E0 = r(x) for the parameter,
// and the singular set where the leading coefficient vanishes.

#pragma once

#include "symred/detsys.hpp"
#include "symred/eval.hpp"

#include <cmath>
#include <optional>

namespace symred {

struct ReductionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Data profile invariant under a generator of the form d_y + phi(x,y) d_w
// (xi = 0, psi = 0 after eta-normalization): w = \int phi dy + W(x).
struct InvariantData {
  VectorField gen;
  Expr data_w;    // profile w(x,y); contains W(x) (unspecified or concrete)
  Expr phi1;      // invariant-surface certificate, identically zero
  bool Ey_zero = true;
};

namespace detail {

// Antiderivative in y of an expression polynomial in y.
inline Expr integrate_in_y(const Expr& e) {
  Expr y = Expr::symbol("y");
  std::vector<CollectedTerm> terms;
  try {
    terms = collect(e, {y}, ZeroTestOptions{true});
  } catch (const CollectError&) {
    throw ReductionError("characteristic ODE not solvable by implemented rules (non-polynomial in y)");
  }
  std::vector<Expr> parts;
  for (const auto& t : terms) {
    long long n = 0;
    if (t.monomial.is_constant()) {
      n = 0;
    } else if (t.monomial.kind() == NodeKind::Symbol) {
      n = 1;
    } else if (t.monomial.kind() == NodeKind::Power) {
      n = t.monomial.node().exponent;
    } else {
      throw ReductionError("unexpected monomial while integrating in y");
    }
    parts.push_back(div(mul(t.coefficient, powi(y, n + 1)), Expr::integer(n + 1)));
  }
  return addv(parts);
}

}  // namespace detail

// Supported generators: xi = 0, eta a nonzero constant, psi = 0, and phi
// free of w and E (so the characteristic dw/dy = phi is a quadrature).
// W may be unspecified (W(x)) or a concrete expression in x.
inline InvariantData invariant_data(const VectorField& gen, std::optional<Expr> W_body,
                                    const JetContext& ctx = JetContext::heat()) {
  gen.validate(ctx);
  if (!is_zero(gen.xi[0], ZeroTestOptions{true}))
    throw ReductionError("generator must have no d_x component");
  if (!gen.xi[1].is_constant() || gen.xi[1].node().value == 0)
    throw ReductionError("generator must have constant nonzero eta");
  if (!is_zero(gen.phi[1], ZeroTestOptions{true}))
    throw ReductionError("generator must have psi = 0 (E-profile beyond E0(x) unsupported)");
  Expr phi = div(gen.phi[0], gen.xi[1]);  // normalize eta to 1
  if (contains_jet(phi, JetKey{"w", {}}) || contains_jet(phi, JetKey{"E", {}}))
    throw ReductionError("characteristic ODE not solvable by implemented rules (phi depends on w or E)");

  Expr Wx = W_body ? *W_body : Expr::func("W", {"x"}, {Expr::symbol("x")});
  Expr data = add(detail::integrate_in_y(phi), Wx);

  InvariantData out;
  out.gen = gen;
  out.data_w = data;
  // phi1 = xi w_x + eta w_y - phi, evaluated on the profile with eta = 1
  out.phi1 = sub(diff(data, Expr::symbol("y")), phi);
  if (!is_zero(out.phi1, ZeroTestOptions{true}))
    throw ReductionError("invariant-surface certificate failed for constructed data");
  return out;
}

struct SingularPoint {
  double value = 0;
  std::optional<Rational> exact;
};

struct ReducedODE {
  Expr c1, c0, r;  // c1 E0' + c0 E0 = r
  std::string source;

  Expr lhs_minus_rhs() const {
    Expr e0 = Expr::func("E0", {"x"}, {Expr::symbol("x")});
    Expr e0p = Expr::func("E0", {"x"}, {Expr::symbol("x")}, {1});
    return addv({mul(c1, e0p), mul(c0, e0), neg(r)});
  }
};

namespace detail {

// Primitive normalization of the cleared numerator: strip the common power
// of x, scale to integer coefficients with content 1, and make the leading
// coefficient of c1 positive.
inline void normalize_ode(canon::Poly& c1, canon::Poly& c0, canon::Poly& rr, int x_id) {
  using namespace canon;
  // common x-power
  int minx = -1;
  auto scan = [&](const Poly& p) {
    for (const auto& [m, _] : p.t) {
      int e = 0;
      for (const auto& [id, ee] : m.f)
        if (id == x_id) e = ee;
      minx = minx < 0 ? e : std::min(minx, e);
    }
  };
  scan(c1);
  scan(c0);
  scan(rr);
  if (minx > 0) {
    auto strip = [&](Poly& p) {
      std::map<Monomial, Rational, MonoLess> out;
      for (const auto& [m, c] : p.t) {
        Monomial r2;
        for (const auto& [id, e] : m.f) {
          int drop = id == x_id ? minx : 0;
          if (e > drop) r2.f.emplace_back(id, e - drop);
        }
        out.emplace(std::move(r2), c);
      }
      p.t = std::move(out);
    };
    strip(c1);
    strip(c0);
    strip(rr);
  }
  // rational content
  Integer num_gcd = 0, den_lcm = 1;
  auto content = [&](const Poly& p) {
    for (const auto& [_, c] : p.t) {
      num_gcd = boost::multiprecision::gcd(num_gcd, boost::multiprecision::abs(numerator(c)));
      den_lcm = boost::multiprecision::lcm(den_lcm, denominator(c));
    }
  };
  content(c1);
  content(c0);
  content(rr);
  if (num_gcd == 0) num_gcd = 1;
  Rational scale0(den_lcm, num_gcd);
  // sign: leading (graded-lex first) coefficient of c1 positive
  if (!c1.t.empty() && c1.t.begin()->second < 0) scale0 = -scale0;
  c1 = scale(c1, scale0);
  c0 = scale(c0, scale0);
  rr = scale(rr, scale0);
}

}  // namespace detail

// Substitute the invariant data into the PDE and organize the result as
// c1 E0' + c0 E0 = r; the y-dependence must cancel identically.
inline ReducedODE reduce_to_ode(const InvariantData& data, const HeatPDE& pde = HeatPDE::standard()) {
  Expr x = Expr::symbol("x");
  Expr e0 = Expr::func("E0", {"x"}, {x});
  Expr e0p = Expr::func("E0", {"x"}, {x}, {1});

  Bindings onto;
  onto.jets[JetKey{"w", {{"x", 1}}}] = diff(data.data_w, x);
  onto.jets[JetKey{"w", {{"y", 1}}}] = diff(data.data_w, Expr::symbol("y"));
  onto.jets[JetKey{"w", {{"x", 2}}}] = diff(diff(data.data_w, x), x);
  onto.jets[JetKey{"w", {{"x", 1}, {"y", 1}}}] =
      diff(diff(data.data_w, x), Expr::symbol("y"));
  onto.jets[JetKey{"w", {{"y", 2}}}] = diff(diff(data.data_w, Expr::symbol("y")), Expr::symbol("y"));
  onto.jets[JetKey{"E", {}}] = e0;
  onto.jets[JetKey{"E", {{"x", 1}}}] = e0p;
  onto.jets[JetKey{"E", {{"y", 1}}}] = Expr::integer(0);
  Expr residual = substitute(pde.F, onto);

  if (!is_zero(diff(residual, Expr::symbol("y")), ZeroTestOptions{true}))
    throw ReductionError("y failed to cancel: invalid invariant ansatz");

  // organize the cleared numerator by the E0 atoms
  Canonicalizer canon(ZeroTestOptions{true});
  int id_e0p = canon.intern(e0p);
  int id_e0 = canon.intern(e0);
  int id_x = canon.intern(x);
  auto rf = canon.run(residual);
  canon::Poly pc1, pc0, pr;
  for (const auto& [m, c] : rf.num.t) {
    canon::Monomial rest;
    int which = 0;  // 0: constant part, 1: E0', 2: E0
    for (const auto& [id, e] : m.f) {
      if (id == id_e0p && e == 1) {
        which = 1;
      } else if (id == id_e0 && e == 1) {
        which = 2;
      } else if (id == id_e0p || id == id_e0) {
        throw ReductionError("reduction is not linear in E0");
      } else {
        rest.f.emplace_back(id, e);
      }
    }
    if (which == 1)
      pc1.add_term(rest, c);
    else if (which == 2)
      pc0.add_term(rest, c);
    else
      pr.add_term(rest, -c);  // move to the right-hand side
  }
  detail::normalize_ode(pc1, pc0, pr, id_x);

  ReducedODE out;
  out.c1 = canon.to_expr(pc1);
  out.c0 = canon.to_expr(pc0);
  out.r = canon.to_expr(pr);
  return out;
}

// --- singular points: real roots of c1 in an interval ---

namespace detail {

// univariate integer coefficient vector (ascending powers) of an Expr in x
inline std::vector<Integer> int_coeffs_in_x(const Expr& e) {
  Canonicalizer canon(ZeroTestOptions{true});
  int id_x = canon.intern(Expr::symbol("x"));
  auto rf = canon.run(e);
  if (!rf.den.is_one()) throw ReductionError("singular_points: c1 is not polynomial");
  int deg = 0;
  for (const auto& [m, _] : rf.num.t) {
    int e2 = 0;
    for (const auto& [id, ee] : m.f) {
      if (id != id_x) throw ReductionError("singular_points: c1 is not univariate in x");
      e2 = ee;
    }
    deg = std::max(deg, e2);
  }
  Integer lcm = 1;
  for (const auto& [_, c] : rf.num.t) lcm = boost::multiprecision::lcm(lcm, denominator(c));
  std::vector<Integer> a(static_cast<size_t>(deg) + 1, Integer(0));
  for (const auto& [m, c] : rf.num.t) {
    int e2 = 0;
    for (const auto& [id, ee] : m.f)
      if (id == id_x) e2 = ee;
    Rational v = c * Rational(lcm);
    a[static_cast<size_t>(e2)] = numerator(v);
  }
  return a;
}

inline double eval_poly(const std::vector<Integer>& a, double x) {
  double v = 0;
  for (size_t i = a.size(); i-- > 0;) v = v * x + static_cast<double>(a[i]);
  return v;
}

inline Rational eval_poly_exact(const std::vector<Integer>& a, const Rational& x) {
  Rational v = 0;
  for (size_t i = a.size(); i-- > 0;) v = v * x + Rational(a[i]);
  return v;
}

inline std::vector<Integer> divisors(const Integer& n) {
  std::vector<Integer> out;
  Integer m = boost::multiprecision::abs(n);
  if (m > 1000000) return out;  // exact-root search only for small coefficients
  for (Integer d = 1; d * d <= m; ++d)
    if (m % d == 0) {
      out.push_back(d);
      out.push_back(m / d);
    }
  return out;
}

}  // namespace detail

inline std::vector<SingularPoint> singular_points(const ReducedODE& ode, double lo, double hi,
                                                  double tol = 1e-12) {
  using namespace detail;
  std::vector<Integer> a = int_coeffs_in_x(ode.c1);
  std::vector<SingularPoint> out;
  if (a.empty()) return out;

  // factor out x^m
  size_t m = 0;
  while (m < a.size() && a[m] == 0) ++m;
  if (m == a.size()) throw ReductionError("singular_points: c1 is identically zero");
  if (m > 0 && lo <= 0.0 && 0.0 <= hi) out.push_back(SingularPoint{0.0, Rational(0)});
  std::vector<Integer> b(a.begin() + static_cast<long>(m), a.end());

  // exact rational roots p/q with p | b0, q | b_deg
  if (b.size() > 1 && b[0] != 0) {
    for (const Integer& p : divisors(b[0]))
      for (const Integer& q : divisors(b.back())) {
        for (int s : {1, -1}) {
          Rational cand(s * p, q);
          if (eval_poly_exact(b, cand) == 0) {
            double v = static_cast<double>(cand);
            if (v >= lo - 1e-15 && v <= hi + 1e-15) {
              bool dup = false;
              for (const auto& sp : out)
                if (std::fabs(sp.value - v) < 1e-9) dup = true;
              if (!dup) out.push_back(SingularPoint{v, cand});
            }
          }
        }
      }
  }

  // bisection on sign changes over a dense grid
  const int N = 4096;
  auto record = [&](double root) {
    for (const auto& sp : out)
      if (std::fabs(sp.value - root) < 1e-9) return;
    out.push_back(SingularPoint{root, std::nullopt});
  };
  double prev_x = lo, prev_f = eval_poly(b, lo);
  for (int i = 1; i <= N; ++i) {
    double xx = lo + (hi - lo) * i / N;
    double ff = eval_poly(b, xx);
    if (prev_f == 0.0) {
      record(prev_x);
    } else if ((prev_f < 0) != (ff < 0) && ff != 0.0) {
      double aa = prev_x, bb = xx, fa = prev_f;
      for (int it = 0; it < 200 && bb - aa > tol; ++it) {
        double mid = 0.5 * (aa + bb);
        double fm = eval_poly(b, mid);
        if (fm == 0.0) {
          aa = bb = mid;
          break;
        }
        if ((fa < 0) != (fm < 0))
          bb = mid;
        else {
          aa = mid;
          fa = fm;
        }
      }
      record(0.5 * (aa + bb));
    }
    prev_x = xx;
    prev_f = ff;
  }
  if (prev_f == 0.0) record(prev_x);
  std::sort(out.begin(), out.end(),
            [](const SingularPoint& p, const SingularPoint& q) { return p.value < q.value; });
  return out;
}

}  // namespace symred
