#include "support.hpp"

#include "symred/pipeline.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace symred;

namespace {

LinearODE example_ode(int id) {
  return LinearODE::from(reduce_to_ode(invariant_data(example_generator(),
                                                      example_preset(id).profile_W)));
}

double closed_form_ode_residual(const ClosedForm& cf, const LinearODE& ode, double C, double lo,
                                double hi) {
  double worst = 0;
  for (int i = 0; i <= 200; ++i) {
    double x = lo + (hi - lo) * i / 200;
    double v = cf.value(x, C), d = cf.deriv(x, C);
    worst = std::max(worst,
                     std::fabs(ode.c1(x) * d + ode.c0(x) * v - ode.r(x)) / (1 + std::fabs(ode.r(x))));
  }
  return worst;
}

double derivative_fd_error(const ClosedForm& cf, double C, double lo, double hi) {
  double worst = 0;
  for (int i = 1; i < 40; ++i) {
    double x = lo + (hi - lo) * i / 40;
    double h = 1e-5 * std::max(1.0, std::fabs(x));
    double fd = (-cf.value(x + 2 * h, C) + 8 * cf.value(x + h, C) - 8 * cf.value(x - h, C) +
                 cf.value(x - 2 * h, C)) /
                (12 * h);
    worst = std::max(worst, std::fabs(fd - cf.deriv(x, C)) / std::max(1.0, std::fabs(fd)));
  }
  return worst;
}

}  // namespace

TEST_CASE("special functions: erf") {
  CHECK(symred::erf(0.0) == 0.0);
  CHECK(std::fabs(symred::erf(0.5) - 0.5204998778130465) < 1e-14);    // series oracle
  CHECK(std::fabs(symred::erf(1.0) - 0.8427007929497149) < 1e-14);
  CHECK(std::fabs(symred::erf(2.5) - 0.999593047982555) < 1e-14);
  CHECK(std::fabs(symred::erf(-0.5) + symred::erf(0.5)) < 1e-16);
  CHECK(std::fabs(symred::erfc(3.5) - 7.4309837234141e-07) < 1e-18);
  CHECK(std::fabs(symred::erf(4.0) + symred::erfc(4.0) - 1.0) < 1e-15);
}

TEST_CASE("special functions: artanh") {
  CHECK(std::fabs(artanh(0.5) - 0.5 * std::log(3.0)) < 1e-15);
  CHECK_THROWS_AS(artanh(1.0), NumericError);
  CHECK_THROWS_AS(artanh(-1.2), NumericError);
  // the example-1 argument sqrt(3)(x-1)/2 leaves the artanh domain for
  // |x - 1| >= 2/sqrt(3); the extended form stays finite there
  double u = std::sqrt(3.0) * (-1.0 - 1.0) / 2.0;
  CHECK(std::fabs(u) > 1.0);
  CHECK(std::isfinite(artanh_ext(u)));
}

TEST_CASE("adaptive Simpson") {
  CHECK(std::fabs(integrate([](double t) { return t * t; }, 0.0, 1.0) - 1.0 / 3) < 1e-13);
  CHECK(std::fabs(integrate([](double t) { return std::exp(t); }, 0.0, 2.0) -
                  (std::exp(2.0) - 1.0)) < 1e-11);
  Antiderivative F([](double t) { return std::cos(t); }, 0.0);
  CHECK(std::fabs(F(1.0) - std::sin(1.0)) < 1e-12);
  CHECK(std::fabs(F(0.5) - std::sin(0.5)) < 1e-12);  // cached segment reuse
}

TEST_CASE("solver: trivial and affine controls") {
  LinearODE c{[](double) { return 1.0; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
  IVP ivp{c, 0.0, 1.0, 1e-10, 1e-12, 1e-3, {}};
  auto curve = solve_ivp(ivp, 1.0);
  for (double v : curve.E) CHECK(std::fabs(v - 1.0) < 1e-12);

  LinearODE w{[](double) { return 1.0; }, [](double) { return -2.0; }, [](double) { return -1.0; }};
  IVP ivp2{w, 0.0, 0.5, 1e-10, 1e-12, 1e-3, {}};
  auto c2 = solve_ivp(ivp2, 1.0);
  CHECK(std::fabs(c2.E.back() - 0.5) < 1e-12);  // E0 = 1/2 is the exact particular solution
}

TEST_CASE("solver: anchor inside an exclusion radius is rejected") {
  LinearODE c{[](double x) { return x; }, [](double) { return 1.0; }, [](double) { return 0.0; }};
  IVP ivp{c, 5e-4, 1.0, 1e-10, 1e-12, 1e-3, {0.0}};
  CHECK_THROWS_AS(solve_ivp(ivp, 1.0), NumericError);
}

TEST_CASE("solver: integration halts at the exclusion boundary") {
  auto ode = example_ode(3);  // singular at x = 0
  IVP ivp{ode, 1.0, 0.25, 1e-10, 1e-12, 0.2, {0.0}};
  auto curve = solve_ivp(ivp, -1.0);  // would cross the singularity
  CHECK(std::fabs(curve.x.back() - 0.2) < 1e-12);
}

TEST_CASE("solver: a blowing-up branch truncates at the value cap") {
  // example 3 behaves like exp(1/(4x^2)) near 0; stopping short of the
  // exclusion boundary with a truncated curve is the expected outcome
  auto ode = example_ode(3);
  IVP ivp{ode, 1.0, 0.25, 1e-10, 1e-12, 1e-3, {0.0}};
  ivp.value_cap = 1e30;
  auto curve = solve_ivp(ivp, 1e-3);
  CHECK(curve.truncated);
  CHECK(curve.x.back() > 1e-3);
  for (double v : curve.E) CHECK(std::fabs(v) <= 1e30);
}

TEST_CASE("solver: two-sided consistency") {
  auto ode = example_ode(1);
  double x0s = 1.0 - 2.0 / std::sqrt(3.0);
  IVP fwd{ode, -1.0, 0.2, 1e-10, 1e-12, 1e-3, {x0s}};
  auto there = solve_ivp(fwd, -0.3);
  IVP back{ode, -0.3, there.E.back(), 1e-10, 1e-12, 1e-3, {x0s}};
  auto home = solve_ivp(back, -1.0);
  CHECK(std::fabs(home.E.back() - 0.2) < 1e-8);
}

TEST_CASE("solver: superposition of anchor values") {
  auto ode = example_ode(1);
  auto solve_from = [&](double v) {
    IVP ivp{ode, -1.0, v, 1e-10, 1e-12, 1e-3, {}};
    return solve_ivp(ivp, -0.4);
  };
  auto s0 = solve_from(0.0);
  auto s1 = solve_from(0.3);
  auto s2 = solve_from(0.5);
  auto s12 = solve_from(0.8);
  for (size_t i = 0; i < s0.x.size(); ++i)
    CHECK(std::fabs(s1.E[i] + s2.E[i] - s12.E[i] - s0.E[i]) < 1e-8);
}

TEST_CASE("solver: tolerance refinement improves closed-form agreement") {
  auto ode = example_ode(1);
  auto cf = closed_form_example1(-1.0);
  double errs[2];
  int k = 0;
  for (double tol : {1e-6, 1e-10}) {
    IVP ivp{ode, -1.0, 0.2, tol, tol * 1e-2, 1e-3, {}};
    auto st = compare(solve_ivp(ivp, -0.4), cf, -1.0, 0.2);
    errs[k++] = st.max_rel_error;
  }
  CHECK(errs[1] <= errs[0] + 1e-12);
}

TEST_CASE("closed form 1: derivative and ODE residual") {
  auto cf = closed_form_example1(-1.0);
  double C = cf.fit(-1.0, 0.2);
  CHECK(derivative_fd_error(cf, C, -1.0, -0.2) < 1e-7);
  CHECK(closed_form_ode_residual(cf, example_ode(1), C, -1.0, -0.2) < 1e-9);
}

TEST_CASE("closed form 2: integrating-factor structure validated by the residual oracle") {
  auto cf = closed_form_example2(3.0);
  double C = cf.fit(3.0, 0.6);
  CHECK(derivative_fd_error(cf, C, 1.6, 3.0) < 1e-7);
  CHECK(closed_form_ode_residual(cf, example_ode(2), C, 1.6, 3.0) < 1e-9);
}

TEST_CASE("closed form 3: the corrected display satisfies its ODE") {
  auto cf = closed_form_example3();
  double C = cf.fit(1.0, 0.25);
  CHECK(derivative_fd_error(cf, C, 0.2, 1.0) < 1e-7);
  CHECK(closed_form_ode_residual(cf, example_ode(3), C, 0.2, 1.0) < 1e-9);
}

TEST_CASE("closed form 4: both branches satisfy the ODE; the printed inner form does not") {
  auto ode = example_ode(4);
  double a = preset_bound_a4();
  auto outer = closed_form_example4_outer();
  CHECK(derivative_fd_error(outer, 0.0, 0.26, a) < 1e-7);
  CHECK(closed_form_ode_residual(outer, ode, 0.0, 0.26, a) < 1e-9);
  auto inner = closed_form_example4_inner();
  CHECK(derivative_fd_error(inner, 0.0, 0.02, 0.24) < 1e-7);
  CHECK(closed_form_ode_residual(inner, ode, 0.0, 0.02, 0.24) < 1e-9);

  // negative control: reading the printed inner display literally
  ClosedForm printed;
  printed.base = [](double x) {
    double t = std::sqrt(1 - 16 * x * x);
    return (t + std::atan(1.0 / std::sqrt(t))) / (2 * t * t * t);
  };
  printed.hom = inner.hom;
  printed.dbase = [&](double x) {
    double h = 1e-6;
    return (printed.base(x + h) - printed.base(x - h)) / (2 * h);
  };
  printed.dhom = inner.dhom;
  CHECK(closed_form_ode_residual(printed, ode, 0.0, 0.05, 0.2) > 1e-3);
}

TEST_CASE("numeric curves match the closed forms on the published intervals") {
  {
    auto ode = example_ode(1);
    double x0s = 1.0 - 2.0 / std::sqrt(3.0);
    auto cf = closed_form_example1(-1.0);
    IVP ivp{ode, -1.0, 0.2, 1e-10, 1e-12, 1e-2, {x0s}};
    auto curve = solve_ivp(ivp, x0s - 1e-2);
    CHECK(curve.max_residual < 1e-8);
    auto st = compare(curve, cf, -1.0, 0.2);
    CHECK(st.max_rel_error < 1e-6);
  }
  {
    auto ode = example_ode(3);
    auto cf = closed_form_example3();
    for (double anchor : {-1.0, 1.0}) {
      IVP ivp{ode, anchor, 0.25, 1e-10, 1e-12, 1e-3, {0.0}};
      auto st = compare(solve_ivp(ivp, anchor > 0 ? 0.2 : -0.2), cf, anchor, 0.25);
      CHECK(st.max_rel_error < 1e-6);
    }
  }
  {
    auto ode = example_ode(4);
    double a = preset_bound_a4();
    auto outer = closed_form_example4_outer();
    IVP ivp{ode, 0.3, outer.value(0.3, 0.0), 1e-10, 1e-12, 1e-3, {-0.25, 0.0, 0.25}};
    auto st = compare(solve_ivp(ivp, a), outer, 0.3, outer.value(0.3, 0.0));
    CHECK(st.max_rel_error < 1e-6);
    auto inner = closed_form_example4_inner();
    IVP ivp2{ode, 0.12, inner.value(0.12, 0.0), 1e-10, 1e-12, 1e-3, {-0.25, 0.0, 0.25}};
    auto st2 = compare(solve_ivp(ivp2, 0.25 - 2e-3), inner, 0.12, inner.value(0.12, 0.0));
    CHECK(st2.max_rel_error < 1e-6);
  }
}

TEST_CASE("comparison of a constant control is exact") {
  LinearODE c{[](double) { return 1.0; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
  IVP ivp{c, 0.0, 1.0, 1e-10, 1e-12, 1e-3, {}};
  auto curve = solve_ivp(ivp, 1.0);
  ClosedForm cf;
  cf.base = [](double) { return 0.0; };
  cf.hom = [](double) { return 1.0; };
  cf.dbase = [](double) { return 0.0; };
  cf.dhom = [](double) { return 0.0; };
  auto st = compare(curve, cf, 0.0, 1.0);
  CHECK(st.max_rel_error == 0.0);
}
