#include "support.hpp"

#include "symred/detsys.hpp"
#include "symred/pipeline.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace symred;
using testsupport::Rng;

namespace {

SymbolTable full_table() {
  SymbolTable t = SymbolTable::heat_default();
  t.add_function("xi", {"x", "y", "w", "E"});
  t.add_function("phi", {"x", "y", "w", "E"});
  t.add_function("psi", {"x", "y", "w", "E"});
  return t;
}

Expr P(const char* s) {
  static SymbolTable t = full_table();
  return parse(s, t);
}

Bindings classical_family(const char* G, const char* L, const char* Ph, const char* Ps) {
  Bindings b;
  b.functions["Gamma"] = fn({"x", "y", "w", "E"}, P(G));
  b.functions["Lambda"] = fn({"x", "y", "w", "E"}, P(L));
  b.functions["Phi"] = fn({"x", "y", "w", "E"}, P(Ph));
  b.functions["Psi"] = fn({"x", "y", "w", "E"}, P(Ps));
  return b;
}

Bindings nonclassical_family(const char* xi, const char* phi, const char* psi) {
  Bindings b;
  b.functions["xi"] = fn({"x", "y", "w", "E"}, P(xi));
  b.functions["phi"] = fn({"x", "y", "w", "E"}, P(phi));
  b.functions["psi"] = fn({"x", "y", "w", "E"}, P(psi));
  return b;
}

int nonzero_count(const std::vector<Expr>& res) {
  int n = 0;
  for (const auto& r : res)
    if (!is_zero(r, ZeroTestOptions{true})) ++n;
  return n;
}

}  // namespace

TEST_CASE("isc_eliminate reproduces the published A1..A6 exactly") {
  auto pde = HeatPDE::standard();
  auto red = isc_eliminate(pde, generic_nonclassical_isc());
  const char* expected[6] = {
      "E*(xi^2+1)",
      "2*E*xi*D(xi,w,1)",
      "xi^2 + 2*E*xi*D(xi,E,1) + 1",
      "-xi*psi + E*(xi*D(xi,x,1) - D(xi,y,1) - phi*D(xi,w,1) - psi*D(xi,E,1) - 2*xi*D(phi,w,1))",
      "-xi*(phi + 2*E*D(phi,E,1))",
      "phi*psi + 1 - E*(xi*D(phi,x,1) - D(phi,y,1) - phi*D(phi,w,1) - psi*D(phi,E,1))"};
  for (int i = 0; i < 6; ++i) CHECK(is_zero(sub(red.A[i], P(expected[i]))));
}

TEST_CASE("isc_eliminate degenerate instances") {
  auto pde = HeatPDE::standard();
  {
    InvariantSurfaceConditions isc{Expr::integer(0), Expr::integer(0), Expr::integer(0)};
    auto red = isc_eliminate(pde, isc);
    CHECK(is_zero(sub(red.assembled, parse("E*w_xx + w_x*E_x + 1"))));
  }
  {
    InvariantSurfaceConditions isc{Expr::symbol("k"), Expr::integer(0), Expr::integer(0)};
    auto red = isc_eliminate(pde, isc);
    CHECK(is_zero(sub(red.A[0], parse("E*(k^2+1)"))));
    CHECK(is_zero(red.A[1]));
    CHECK(is_zero(sub(red.A[2], parse("k^2+1"))));
    CHECK(is_zero(red.A[3]));
    CHECK(is_zero(red.A[4]));
    CHECK(is_zero(sub(red.A[5], parse("1"))));
  }
}

TEST_CASE("the eta = 0 branch is rejected with a dedicated error") {
  CHECK_THROWS_AS(InvariantSurfaceConditions::from_general(
                      Expr::integer(1), Expr::integer(0), Expr::integer(0), Expr::integer(0)),
                  EtaZeroError);
  // eta != 0 normalizes
  auto isc = InvariantSurfaceConditions::from_general(
      Expr::integer(2), Expr::integer(2), Expr::integer(4), Expr::integer(0));
  CHECK(is_zero(sub(isc.xi, Expr::integer(1))));
  CHECK(is_zero(sub(isc.phi, Expr::integer(2))));
}

TEST_CASE("classical determining system: the published family solves it") {
  const auto& sys = classical_system();
  CHECK(sys.equations.size() > 10);
  // structural sanity: coefficients are free of the collected jets
  for (const auto& [mono, coeff] : sys.equations)
    for (const JetKey& j : jets_of(coeff)) CHECK(j.order() == 0);

  Bindings fam = classical_family("k1 - k3*y + k4*x", "k2 + k3*x + k4*y", "mu(w)",
                                  "E*(2*k4 - D(mu,w,1))");
  CHECK(nonzero_count(residual(sys, fam)) == 0);
}

TEST_CASE("classical determining system: translations pass, Gamma = w fails") {
  const auto& sys = classical_system();
  CHECK(nonzero_count(residual(sys, classical_family("0", "1", "0", "0"))) == 0);
  CHECK(nonzero_count(residual(sys, classical_family("w", "1", "0", "0"))) > 0);
}

TEST_CASE("nonclassical determining system: translation in y") {
  const auto& sys = nonclassical_system();
  CHECK(nonzero_count(residual(sys, nonclassical_family("0", "0", "0"))) == 0);
}

TEST_CASE("nonclassical system: xi in {w, E, w*x} leaves nonzero residuals") {
  const auto& sys = nonclassical_system();
  for (const char* xi : {"w", "E", "w*x"}) {
    Bindings b;
    b.functions["xi"] = fn({"x", "y", "w", "E"}, P(xi));
    CHECK(nonzero_count(residual(sys, b)) > 0);
  }
}

TEST_CASE("structural forcing: xi = w alone breaks the system") {
  // mechanically confirms that xi_w = 0 is forced
  const auto& sys = nonclassical_system();
  Bindings b = nonclassical_family("w", "0", "0");
  CHECK(nonzero_count(residual(sys, b)) > 0);
}

TEST_CASE("common solution (3.13): classical subset of nonclassical") {
  const auto& sys = nonclassical_system();
  Rng rng(314);
  const char* mus[] = {"0", "1", "w", "w^2"};
  for (int trial = 0; trial < 20; ++trial) {
    Rational k1 = rng.rational(), k2 = rng.nonzero_rational(), k3 = rng.rational(),
             k4 = rng.rational();
    std::string L = "(" + k2.str() + " + (" + k3.str() + ")*x + (" + k4.str() + ")*y)";
    std::string xi =
        "((" + k1.str() + ") - (" + k3.str() + ")*y + (" + k4.str() + ")*x)/" + L;
    std::string mu = mus[trial % 4];
    Bindings b;
    b.functions["xi"] = fn({"x", "y", "w", "E"}, P(xi.c_str()));
    if (trial % 5 == 0) {
      // leave mu unspecified
      b.functions["phi"] = fn({"x", "y", "w", "E"}, P(("mu(w)/" + L).c_str()));
      b.functions["psi"] = fn({"x", "y", "w", "E"},
                              P(("E*(2*(" + k4.str() + ") - D(mu,w,1))/" + L).c_str()));
    } else {
      Bindings mub;
      mub.functions["mu"] = fn({"w"}, parse(mu));
      b.functions["phi"] = fn({"x", "y", "w", "E"},
                              substitute(P(("mu(w)/" + L).c_str()), mub));
      b.functions["psi"] =
          fn({"x", "y", "w", "E"},
             substitute(P(("E*(2*(" + k4.str() + ") - D(mu,w,1))/" + L).c_str()), mub));
    }
    CHECK(nonzero_count(residual(sys, b)) == 0);
  }
}

TEST_CASE("nonclassical coefficients are polynomial, degree <= 3 in the infinitesimal derivatives") {
  // The cleared numerators carry powers of xi itself from the structurally
  // nonzero (xi^2+1) factors; the nonlinearity degree is counted over the
  // derivative atoms of xi, phi, psi.
  const auto& sys = nonclassical_system();
  for (const auto& [mono, coeff] : sys.equations) {
    Canonicalizer c(ZeroTestOptions{true});
    auto rf = c.run(coeff);
    CHECK(rf.den.is_one());
    for (const auto& [m, _] : rf.num.t) {
      int deriv_deg = 0;
      for (const auto& [id, e] : m.f) {
        const ExprNode& rep = c.representative(id).node();
        if (rep.kind == NodeKind::FuncApp) {
          bool derivative = false;
          for (int d : rep.deriv)
            if (d > 0) derivative = true;
          if (derivative) deriv_deg += e;
        }
      }
      CHECK(deriv_deg <= 3);
    }
  }
}

TEST_CASE("eta-normalization restatement: scaled classical fields give the same ratios") {
  // (c Gamma)/(c Lambda) etc. is independent of c; residuals stay zero
  const auto& sys = nonclassical_system();
  for (const char* c : {"2", "-1/3", "7"}) {
    std::string L = "(k2 + k3*x + k4*y)";
    std::string cs = std::string("(") + c + ")";
    std::string xi = cs + "*(k1 - k3*y + k4*x)/(" + cs + "*" + L + ")";
    std::string phi = cs + "*mu(w)/(" + cs + "*" + L + ")";
    std::string psi = cs + "*E*(2*k4 - D(mu,w,1))/(" + cs + "*" + L + ")";
    CHECK(nonzero_count(residual(sys, nonclassical_family(xi.c_str(), phi.c_str(),
                                                          psi.c_str()))) == 0);
  }
}

TEST_CASE("determining-system emission is deterministic") {
  std::string a = determining_system_text(nonclassical_determining(HeatPDE::standard()));
  std::string b = determining_system_text(nonclassical_determining(HeatPDE::standard()));
  CHECK(a == b);
  CHECK(a.find("# coefficient of") != std::string::npos);
}
