// Determining systems for the stationary heat-conduction parameter
// identification equation
//
//     F = w_x E_x + w_y E_y + E (w_xx + w_yy) + 1 = 0,
//
// treating both the data w and the parameter E as dependent variables.
// The classical system comes from pr^(2)V(F)|_{F=0} = 0 with a fully general
// generator; the nonclassical one from the two-step reduction: eliminate all
// y-derivatives through the invariant surface conditions (eta normalized to
// 1), organize the result as A1 w_xx + A2 w_x^2 + A3 w_x E_x + A4 w_x +
// A5 E_x + A6 = 0, apply the prolonged field to that equation, eliminate
// again, solve for w_xx (A1 = E(xi^2+1) is structurally nonzero), and
// collect coefficients of the remaining jet monomials.

#pragma once

#include "symred/jet.hpp"

#include <array>

namespace symred {

struct EtaZeroError : std::domain_error {
  EtaZeroError() : std::domain_error("eta == 0: branch not supported (normalization requires eta != 0)") {}
};

struct HeatPDE {
  JetContext ctx;
  Expr F;

  static HeatPDE standard() {
    JetContext ctx = JetContext::heat();
    Expr w_x = Expr::jet("w", {{"x", 1}});
    Expr w_y = Expr::jet("w", {{"y", 1}});
    Expr w_xx = Expr::jet("w", {{"x", 2}});
    Expr w_yy = Expr::jet("w", {{"y", 2}});
    Expr E_x = Expr::jet("E", {{"x", 1}});
    Expr E_y = Expr::jet("E", {{"y", 1}});
    Expr E = Expr::jet("E", {});
    Expr F = Expr::sum({mul(w_x, E_x), mul(w_y, E_y), mul(E, add(w_xx, w_yy)), Expr::integer(1)});
    return HeatPDE{ctx, F};
  }

  // F solved for its leading derivative: w_xx = -(1 + w_x E_x + w_y E_y + E w_yy)/E.
  Expr solved_wxx() const {
    Expr w_x = Expr::jet("w", {{"x", 1}});
    Expr w_y = Expr::jet("w", {{"y", 1}});
    Expr w_yy = Expr::jet("w", {{"y", 2}});
    Expr E_x = Expr::jet("E", {{"x", 1}});
    Expr E_y = Expr::jet("E", {{"y", 1}});
    Expr E = Expr::jet("E", {});
    return div(neg(addv({Expr::integer(1), mul(w_x, E_x), mul(w_y, E_y), mul(E, w_yy)})), E);
  }
};

// Invariant surface conditions in solved form (eta normalized to 1):
//   w_y = phi - xi w_x,   E_y = psi - xi E_x.
struct InvariantSurfaceConditions {
  Expr xi, phi, psi;

  static InvariantSurfaceConditions from_general(const Expr& xi, const Expr& eta, const Expr& phi,
                                                 const Expr& psi) {
    if (is_zero(eta, ZeroTestOptions{true})) throw EtaZeroError();
    return InvariantSurfaceConditions{div(xi, eta), div(phi, eta), div(psi, eta)};
  }

  Expr solved_wy() const {
    return sub(phi, mul(xi, Expr::jet("w", {{"x", 1}})));
  }
  Expr solved_Ey() const {
    return sub(psi, mul(xi, Expr::jet("E", {{"x", 1}})));
  }
};

// Generic unspecified infinitesimals xi(x,y,w,E), phi(..), psi(..).
inline Expr generic_coeff(const std::string& name) {
  return Expr::func(name, {"x", "y", "w", "E"},
                    {Expr::symbol("x"), Expr::symbol("y"), Expr::jet("w", {}), Expr::jet("E", {})});
}

inline InvariantSurfaceConditions generic_nonclassical_isc() {
  return InvariantSurfaceConditions{generic_coeff("xi"), generic_coeff("phi"),
                                    generic_coeff("psi")};
}

// Jet substitutions eliminating every y-derivative of w and E up to second
// order, built from the solved conditions and their total x/y derivatives.
inline Bindings isc_elimination_map(const InvariantSurfaceConditions& isc, const JetContext& ctx) {
  Expr r_wy = isc.solved_wy();
  Expr r_ey = isc.solved_Ey();

  Bindings first;
  first.jets[JetKey{"w", {{"y", 1}}}] = r_wy;
  first.jets[JetKey{"E", {{"y", 1}}}] = r_ey;

  Expr r_wxy = substitute(total_derivative(r_wy, "x", ctx), first);
  Expr r_exy = substitute(total_derivative(r_ey, "x", ctx), first);

  Bindings second = first;
  second.jets[JetKey{"w", {{"x", 1}, {"y", 1}}}] = r_wxy;
  second.jets[JetKey{"E", {{"x", 1}, {"y", 1}}}] = r_exy;

  Expr r_wyy = substitute(total_derivative(r_wy, "y", ctx), second);
  Expr r_eyy = substitute(total_derivative(r_ey, "y", ctx), second);

  Bindings all = second;
  all.jets[JetKey{"w", {{"y", 2}}}] = r_wyy;
  all.jets[JetKey{"E", {{"y", 2}}}] = r_eyy;
  return all;
}

// The reduced second-step equation A1 w_xx + A2 w_x^2 + A3 w_x E_x +
// A4 w_x + A5 E_x + A6 = 0 with its coefficients.
struct ReducedEquation {
  std::array<Expr, 6> A;
  Expr assembled;
  InvariantSurfaceConditions isc;

  Expr solved_wxx() const {
    Expr w_x = Expr::jet("w", {{"x", 1}});
    Expr E_x = Expr::jet("E", {{"x", 1}});
    Expr num = addv({mul(A[1], powi(w_x, 2)), mulv({A[2], w_x, E_x}), mul(A[3], w_x),
                     mul(A[4], E_x), A[5]});
    return div(neg(num), A[0]);
  }
};

struct EliminationError : std::logic_error {
  using std::logic_error::logic_error;
};

inline ReducedEquation isc_eliminate(const HeatPDE& pde, const InvariantSurfaceConditions& isc) {
  Bindings elim = isc_elimination_map(isc, pde.ctx);
  Expr reduced = substitute(pde.F, elim);
  for (const JetKey& j : jets_of(reduced))
    if (j.index.count("y")) throw EliminationError("isc_eliminate: y-jet survived: " + j.name());

  Expr w_xx = Expr::jet("w", {{"x", 2}});
  Expr w_x = Expr::jet("w", {{"x", 1}});
  Expr E_x = Expr::jet("E", {{"x", 1}});
  auto terms = collect(reduced, {w_xx, w_x, E_x}, ZeroTestOptions{true});

  ReducedEquation out;
  out.isc = isc;
  for (auto& a : out.A) a = Expr::integer(0);
  const std::array<Expr, 6> monos = {w_xx, powi(w_x, 2), mul(w_x, E_x), w_x, E_x,
                                     Expr::integer(1)};
  for (const auto& t : terms) {
    bool matched = false;
    for (size_t i = 0; i < monos.size(); ++i) {
      if (structural_equal(t.monomial, monos[i])) {
        out.A[i] = t.coefficient;
        matched = true;
        break;
      }
    }
    if (!matched)
      throw EliminationError("isc_eliminate: unexpected monomial " + render(t.monomial));
  }
  out.assembled = addv({mul(out.A[0], w_xx), mul(out.A[1], powi(w_x, 2)),
                        mulv({out.A[2], w_x, E_x}), mul(out.A[3], w_x), mul(out.A[4], E_x),
                        out.A[5]});
  return out;
}

// One generated determining system: ordered (jet monomial, coefficient)
// pairs; coefficients are cleared numerators (denominators are powers of E
// and of A1, both structurally nonzero).
struct DeterminingSystem {
  enum class Kind { Classical, Nonclassical };
  Kind kind;
  std::vector<std::pair<Expr, Expr>> equations;
  std::vector<std::string> unknowns;  // function names a candidate must bind
};

namespace detail {

inline Expr cleared_numerator(const Expr& e) {
  Canonicalizer c(ZeroTestOptions{true});
  return c.to_expr(c.run(e).num);
}

inline std::vector<std::pair<Expr, Expr>> collect_system(const Expr& e,
                                                         const std::vector<JetKey>& allowed) {
  std::vector<Expr> vars;
  for (const JetKey& j : jets_of(e)) {
    if (j.order() < 1) continue;
    bool ok = false;
    for (const auto& a : allowed)
      if (a == j) ok = true;
    if (!ok) throw EliminationError("unexpected jet in determining expression: " + j.name());
    vars.push_back(Expr::jet(j));
  }
  auto terms = collect(e, vars, ZeroTestOptions{true});
  std::vector<std::pair<Expr, Expr>> out;
  out.reserve(terms.size());
  for (const auto& t : terms) out.emplace_back(t.monomial, cleared_numerator(t.coefficient));
  return out;
}

}  // namespace detail

// pr^(2)V(F)|_{F=0} = 0 with V = Gamma d_x + Lambda d_y + Phi d_w + Psi d_E,
// the coefficients fully general functions of (x, y, w, E).
inline DeterminingSystem classical_determining(const HeatPDE& pde) {
  VectorField V{{generic_coeff("Gamma"), generic_coeff("Lambda")},
                {generic_coeff("Phi"), generic_coeff("Psi")}};
  ProlongedField pf = prolong(V, 2, pde.ctx);
  Expr applied = apply(pf, pde.F, pde.ctx);
  Bindings onto;
  onto.jets[JetKey{"w", {{"x", 2}}}] = pde.solved_wxx();
  Expr restricted = substitute(applied, onto);

  std::vector<JetKey> allowed = pde.ctx.jets(1, 2);
  allowed.erase(std::remove(allowed.begin(), allowed.end(), JetKey{"w", {{"x", 2}}}),
                allowed.end());
  DeterminingSystem sys;
  sys.kind = DeterminingSystem::Kind::Classical;
  sys.unknowns = {"Gamma", "Lambda", "Phi", "Psi"};
  sys.equations = detail::collect_system(restricted, allowed);
  return sys;
}

// Two-step nonclassical generation for a given (possibly generic) ISC.
inline DeterminingSystem nonclassical_determining(const HeatPDE& pde,
                                                  const InvariantSurfaceConditions& isc) {
  ReducedEquation red = isc_eliminate(pde, isc);
  VectorField U{{red.isc.xi, Expr::integer(1)}, {red.isc.phi, red.isc.psi}};
  ProlongedField pf = prolong(U, 2, pde.ctx);
  Expr applied = apply(pf, red.assembled, pde.ctx);

  // Re-eliminate any y-derivatives reintroduced by the prolongation, then
  // remove w_xx by solving the reduced equation itself.
  Expr no_y = substitute(applied, isc_elimination_map(red.isc, pde.ctx));
  Bindings onto;
  onto.jets[JetKey{"w", {{"x", 2}}}] = red.solved_wxx();
  Expr restricted = substitute(no_y, onto);

  std::vector<JetKey> allowed = {JetKey{"w", {{"x", 1}}}, JetKey{"E", {{"x", 1}}},
                                 JetKey{"E", {{"x", 2}}}};
  DeterminingSystem sys;
  sys.kind = DeterminingSystem::Kind::Nonclassical;
  sys.unknowns = {"xi", "phi", "psi"};
  sys.equations = detail::collect_system(restricted, allowed);
  return sys;
}

inline DeterminingSystem nonclassical_determining(const HeatPDE& pde) {
  return nonclassical_determining(pde, generic_nonclassical_isc());
}

// Cached generic systems (generation is deterministic and pure).
inline const DeterminingSystem& classical_system() {
  static const DeterminingSystem sys = classical_determining(HeatPDE::standard());
  return sys;
}

inline const DeterminingSystem& nonclassical_system() {
  static const DeterminingSystem sys = nonclassical_determining(HeatPDE::standard());
  return sys;
}

// Substitute a candidate into every coefficient.  Unbound infinitesimals
// stay symbolic, so partial substitutions (e.g. xi alone) are meaningful.
// The candidate solves the system iff every residual is zero.
inline std::vector<Expr> residual(const DeterminingSystem& sys, const Bindings& candidate) {
  std::vector<Expr> out;
  out.reserve(sys.equations.size());
  for (const auto& [mono, coeff] : sys.equations) out.push_back(substitute(coeff, candidate));
  return out;
}

}  // namespace symred
