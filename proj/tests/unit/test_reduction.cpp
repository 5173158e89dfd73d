#include "support.hpp"

#include "symred/pipeline.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace symred;
using testsupport::Rng;

namespace {

InvariantData data_for(const char* W) {
  return invariant_data(example_generator(), parse(W));
}

}  // namespace

TEST_CASE("invariant data for the worked generator family") {
  auto d = invariant_data(example_generator(), std::nullopt);
  CHECK(render(d.data_w) == "-y^2 + W(x)");
  CHECK(is_zero(d.phi1, ZeroTestOptions{true}));

  VectorField dy{{Expr::integer(0), Expr::integer(1)}, {Expr::integer(0), Expr::integer(0)}};
  CHECK(render(invariant_data(dy, std::nullopt).data_w) == "W(x)");

  VectorField mu2{{Expr::integer(0), Expr::integer(1)}, {Expr::integer(-2), Expr::integer(0)}};
  CHECK(render(invariant_data(mu2, std::nullopt).data_w) == "-2*y + W(x)");
}

TEST_CASE("unsupported generators are rejected") {
  // phi depending on w: characteristic not a quadrature
  VectorField f{{Expr::integer(0), Expr::integer(1)},
                {Expr::func("mu", {"w"}, {Expr::jet("w", {})}), Expr::integer(0)}};
  CHECK_THROWS_AS(invariant_data(f, std::nullopt), ReductionError);
  // nonzero psi
  VectorField g{{Expr::integer(0), Expr::integer(1)}, {Expr::integer(0), Expr::integer(1)}};
  CHECK_THROWS_AS(invariant_data(g, std::nullopt), ReductionError);
  // nonzero d_x part
  VectorField h{{Expr::integer(1), Expr::integer(1)}, {Expr::integer(0), Expr::integer(0)}};
  CHECK_THROWS_AS(invariant_data(h, std::nullopt), ReductionError);
}

TEST_CASE("generic reduction: c1 = W', c0 = W'' - 2, r = -1") {
  auto ode = reduce_to_ode(invariant_data(example_generator(), std::nullopt));
  SymbolTable t = SymbolTable::heat_default();
  CHECK(is_zero(sub(ode.c1, parse("D(W,x,1)", t))));
  CHECK(is_zero(sub(ode.c0, parse("D(W,x,2) - 2", t))));
  CHECK(is_zero(sub(ode.r, parse("-1"))));
}

TEST_CASE("randomized polynomial profiles: coefficients follow the generic formula") {
  Rng rng(2718);
  for (int trial = 0; trial < 20; ++trial) {
    int deg = rng.uniform(1, 6);
    std::vector<Expr> terms;
    for (int d = 0; d <= deg; ++d)
      terms.push_back(mul(Expr::rational(rng.rational()), powi(Expr::symbol("x"), d)));
    Expr W = addv(terms);
    auto ode = reduce_to_ode(invariant_data(example_generator(), W));
    Expr x = Expr::symbol("x");
    // the stored form is scale-normalized; compare as ratios against W', W''-2
    Expr c1ref = diff(W, x);
    Expr c0ref = sub(diff(diff(W, x), x), Expr::integer(2));
    // c1 * c0ref == c0 * c1ref and c1 * (-1) == r * c1ref
    CHECK(is_zero(sub(mul(ode.c1, c0ref), mul(ode.c0, c1ref))));
    CHECK(is_zero(sub(mul(ode.c1, Expr::integer(-1)), mul(ode.r, c1ref))));
  }
}

TEST_CASE("the four examples reduce to the published ODEs exactly") {
  struct Case {
    int id;
    const char* c1;
    const char* c0;
    const char* r;
  };
  const Case cases[] = {
      {1, "3*x^2 - 6*x - 1", "6*x - 8", "-1"},
      {2, "2*x*(2*x-3)", "2*(x^4 - 4*x + 9)", "x^4"},
      {3, "4*x^3", "2*(6*x^2+1)", "1"},
      {4, "2*x*(16*x^2-1)", "96*x^2", "1"},
  };
  for (const auto& c : cases) {
    auto ode = reduce_to_ode(invariant_data(example_generator(), example_preset(c.id).profile_W));
    CHECK(is_zero(sub(ode.c1, parse(c.c1))));
    CHECK(is_zero(sub(ode.c0, parse(c.c0))));
    CHECK(is_zero(sub(ode.r, parse(c.r))));
  }
}

TEST_CASE("W = x control") {
  auto ode = reduce_to_ode(data_for("x"));
  CHECK(is_zero(sub(ode.c1, Expr::integer(1))));
  CHECK(is_zero(sub(ode.c0, Expr::integer(-2))));
  CHECK(is_zero(sub(ode.r, Expr::integer(-1))));
}

TEST_CASE("an invalid ansatz fails the y-cancellation assertion") {
  InvariantData bad;
  bad.gen = example_generator();
  bad.data_w = parse("y^3 + x");  // not invariant
  bad.phi1 = Expr::integer(0);
  CHECK_THROWS_AS(reduce_to_ode(bad), ReductionError);
}

TEST_CASE("exactness of the reduction, numerically and symbolically") {
  Rng rng(555);
  auto data = data_for("(x^2-1)*(x-3)");
  auto ode = reduce_to_ode(data);
  // symbolic: residual of the substituted PDE equals c1 E0' + c0 E0 - r
  Expr assembled = ode.lhs_minus_rhs();
  // numeric spot checks
  LinearODE num = LinearODE::from(ode);
  for (int i = 0; i < 30; ++i) {
    double x = rng.uniform(-90, 90) / 100.0;
    double y = rng.uniform(-90, 90) / 100.0;
    double E0 = rng.uniform(1, 100) / 25.0;
    double E0p = rng.uniform(-100, 100) / 25.0;
    // evaluate F at the invariant data directly
    double wx = eval_numeric(diff(data.data_w, Expr::symbol("x")), {{"x", x}, {"y", y}});
    double wy = -2 * y;
    double wxx =
        eval_numeric(diff(diff(data.data_w, Expr::symbol("x")), Expr::symbol("x")), {{"x", x}});
    double F = wx * E0p + wy * 0.0 + E0 * (wxx - 2) + 1;
    double R = num.c1(x) * E0p + num.c0(x) * E0 - num.r(x);
    CHECK(std::fabs(F - R) < 1e-10 * (1 + std::fabs(F)));
  }
}

TEST_CASE("singular points of the four examples") {
  {
    auto ode = reduce_to_ode(data_for("(x^2-1)*(x-3)"));
    auto s = singular_points(ode, -1, 1);
    REQUIRE(s.size() == 1);
    CHECK_FALSE(s[0].exact.has_value());
    CHECK(std::fabs(s[0].value - (1.0 - 2.0 / std::sqrt(3.0))) < 1e-10);
  }
  {
    auto ode = reduce_to_ode(data_for("(x-3)*(1-x)/x^2"));
    auto s = singular_points(ode, 1, 3);  // 0 excluded by the domain
    REQUIRE(s.size() == 1);
    REQUIRE(s[0].exact.has_value());
    CHECK(*s[0].exact == Rational(3, 2));
  }
  {
    auto ode = reduce_to_ode(data_for("1 - x^4"));
    auto s = singular_points(ode, -1, 1);
    REQUIRE(s.size() == 1);
    REQUIRE(s[0].exact.has_value());
    CHECK(*s[0].exact == 0);
  }
  {
    auto ode = reduce_to_ode(data_for("2 + x^2 - 8*x^4"));
    double a = preset_bound_a4();
    auto s = singular_points(ode, -a, a);
    REQUIRE(s.size() == 3);
    CHECK(*s[0].exact == Rational(-1, 4));
    CHECK(*s[1].exact == 0);
    CHECK(*s[2].exact == Rational(1, 4));
  }
}

TEST_CASE("boundary compatibility: data vanishes on each boundary curve") {
  for (const auto& p : example_presets()) {
    Expr identity = add(mul(p.data, p.dirichlet_scale), p.boundary);
    CHECK(is_zero(identity, ZeroTestOptions{true}));
  }
}

TEST_CASE("non-polynomial leading coefficient is rejected by singular_points") {
  auto ode = reduce_to_ode(invariant_data(example_generator(), std::nullopt));  // c1 = W'(x)
  CHECK_THROWS_AS(singular_points(ode, -1, 1), ReductionError);
}
