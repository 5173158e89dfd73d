// The four worked examples: boundary curves, data, intervals, anchors.
// Each data function is invariant under d_y - 2y d_w and vanishes on its
// boundary curve (homogeneous Dirichlet condition).

#pragma once

#include "symred/odesolve.hpp"
#include "symred/parse.hpp"

namespace symred {

struct AnchorCondition {
  double x = 0;
  double value = 0;
};

struct ExamplePreset {
  int id = 0;
  std::string name;
  // boundary polynomial b(x,y) with the curve b = 0, and the scale factor s(x)
  // in the Dirichlet identity  w * s + b == 0
  Expr boundary;
  Expr dirichlet_scale;
  Expr data;          // w(x,y)
  Expr profile_W;     // W(x) with w = -y^2 + W(x)
  Expr y_squared;     // boundary solved for y^2 as a function of x
  double x_lo = 0, x_hi = 0;
  std::vector<AnchorCondition> anchors;  // empty: free constants fixed to 0
  ClosedForm closed_form(double quadrature_anchor) const;
  bool two_branch_closed_form = false;  // example 4
};

inline double preset_bound_a4() { return std::sqrt(1.0 + std::sqrt(65.0)) / 4.0; }

inline const std::vector<ExamplePreset>& example_presets() {
  static const std::vector<ExamplePreset> presets = [] {
    std::vector<ExamplePreset> v;
    {
      ExamplePreset p;
      p.id = 1;
      p.name = "Newton's egg";
      p.boundary = parse("y^2 - (x^2-1)*(x-3)");
      p.dirichlet_scale = parse("1");
      p.data = parse("-y^2 + (x^2-1)*(x-3)");
      p.profile_W = parse("(x^2-1)*(x-3)");
      p.y_squared = parse("(x^2-1)*(x-3)");
      p.x_lo = -1;
      p.x_hi = 1;
      p.anchors = {{-1.0, 0.2}, {1.0, 0.2}};
      v.push_back(std::move(p));
    }
    {
      ExamplePreset p;
      p.id = 2;
      p.name = "Granville's egg";
      p.boundary = parse("x^2*y^2 - (x-3)*(1-x)");
      p.dirichlet_scale = parse("x^2");
      p.data = parse("-y^2 + (x-3)*(1-x)/x^2");
      p.profile_W = parse("(x-3)*(1-x)/x^2");
      p.y_squared = parse("(x-3)*(1-x)/x^2");
      p.x_lo = 1;
      p.x_hi = 3;
      p.anchors = {{1.0, 0.2}, {3.0, 0.6}};
      v.push_back(std::move(p));
    }
    {
      ExamplePreset p;
      p.id = 3;
      p.name = "generalized Lame curve";
      p.boundary = parse("x^4 + y^2 - 1");
      p.dirichlet_scale = parse("1");
      p.data = parse("1 - x^4 - y^2");
      p.profile_W = parse("1 - x^4");
      p.y_squared = parse("1 - x^4");
      p.x_lo = -1;
      p.x_hi = 1;
      p.anchors = {{-1.0, 0.25}, {1.0, 0.25}};
      v.push_back(std::move(p));
    }
    {
      ExamplePreset p;
      p.id = 4;
      p.name = "rounded-corner rectangle";
      p.boundary = parse("y^2 + 8*x^4 - x^2 - 2");
      p.dirichlet_scale = parse("1");
      p.data = parse("2 + x^2 - 8*x^4 - y^2");
      p.profile_W = parse("2 + x^2 - 8*x^4");
      p.y_squared = parse("2 + x^2 - 8*x^4");
      p.x_lo = -preset_bound_a4();
      p.x_hi = preset_bound_a4();
      p.anchors = {};  // C1 = C2 = 0
      p.two_branch_closed_form = true;
      v.push_back(std::move(p));
    }
    return v;
  }();
  return presets;
}

inline const ExamplePreset& example_preset(int id) {
  for (const auto& p : example_presets())
    if (p.id == id) return p;
  throw std::invalid_argument("example id must be 1..4");
}

inline ClosedForm ExamplePreset::closed_form(double quadrature_anchor) const {
  switch (id) {
    case 1: return closed_form_example1(quadrature_anchor);
    case 2: return closed_form_example2(quadrature_anchor);
    case 3: return closed_form_example3();
    case 4:
      // outer branch; the inner branch is closed_form_example4_inner()
      return closed_form_example4_outer();
  }
  throw std::invalid_argument("example id must be 1..4");
}

// Boundary samples (x, +-sqrt(g(x))) where g = y_squared >= 0, with the
// Dirichlet check |w| evaluated at every sample.
struct BoundarySample {
  double x, y, abs_w;
};

inline std::vector<BoundarySample> sample_boundary(const ExamplePreset& p, int n) {
  if (n < 2) throw std::invalid_argument("sample_boundary: n must be >= 2");
  std::vector<BoundarySample> out;
  for (int i = 0; i < n; ++i) {
    double x = p.x_lo + (p.x_hi - p.x_lo) * i / (n - 1);
    double g;
    try {
      g = eval_numeric(p.y_squared, {{"x", x}});
    } catch (const NumericError&) {
      continue;  // e.g. x = 0 for example 2's 1/x^2 (outside its interval anyway)
    }
    if (g < 0) continue;
    double y = std::sqrt(g);
    for (double yy : {y, -y}) {
      double w = eval_numeric(p.data, {{"x", x}, {"y", yy}});
      out.push_back(BoundarySample{x, yy, std::fabs(w)});
      if (y == 0.0) break;
    }
  }
  if (out.empty()) throw NumericError("sample_boundary: empty curve on interval");
  return out;
}

}  // namespace symred
