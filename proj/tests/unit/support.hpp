// Shared test utilities: deterministic RNG and random expression generation.

#pragma once

#include "symred/canonical.hpp"
#include "symred/eval.hpp"
#include "symred/parse.hpp"

#include <random>

namespace testsupport {

using namespace symred;

class Rng {
 public:
  explicit Rng(unsigned seed) : eng_(seed) {}
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  Rational rational(int mag = 6) {
    int num = uniform(-mag, mag);
    int den = uniform(1, mag);
    return Rational(num, den);
  }
  Rational nonzero_rational(int mag = 6) {
    Rational r = rational(mag);
    return r == 0 ? Rational(1, uniform(1, mag)) : r;
  }

 private:
  std::mt19937 eng_;
};

// Random expression over the given leaf pool: sums, products, small integer
// powers, and quotients by nonzero rational constants.  Division by
// subexpressions is avoided so exact-rational evaluation stays total.
inline Expr random_expr(Rng& rng, const std::vector<Expr>& leaves, int depth) {
  if (depth <= 0) {
    int pick = rng.uniform(0, static_cast<int>(leaves.size()));
    if (pick == static_cast<int>(leaves.size())) return Expr::rational(rng.rational());
    return leaves[static_cast<size_t>(pick)];
  }
  switch (rng.uniform(0, 4)) {
    case 0: {
      std::vector<Expr> ts;
      int n = rng.uniform(2, 3);
      for (int i = 0; i < n; ++i) ts.push_back(random_expr(rng, leaves, depth - 1));
      return addv(ts);
    }
    case 1: {
      std::vector<Expr> fs;
      int n = rng.uniform(2, 3);
      for (int i = 0; i < n; ++i) fs.push_back(random_expr(rng, leaves, depth - 1));
      return mulv(fs);
    }
    case 2:
      return powi(random_expr(rng, leaves, depth - 1), rng.uniform(1, 3));
    case 3:
      return div(random_expr(rng, leaves, depth - 1), Expr::rational(rng.nonzero_rational()));
    default:
      return sub(random_expr(rng, leaves, depth - 1), random_expr(rng, leaves, depth - 1));
  }
}

inline std::vector<Expr> symbol_leaves() {
  return {Expr::symbol("x"), Expr::symbol("y"), Expr::symbol("z")};
}

inline std::vector<Expr> jet_leaves() {
  return {Expr::symbol("x"),          Expr::symbol("y"),
          Expr::jet("w", {}),         Expr::jet("E", {}),
          Expr::jet("w", {{"x", 1}}), Expr::jet("E", {{"y", 1}}),
          Expr::func("mu", {"w"}, {Expr::jet("w", {})})};
}

}  // namespace testsupport
