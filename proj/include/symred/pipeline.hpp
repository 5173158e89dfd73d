// End-to-end example driver and report/file emission shared by the CLI and
// the test suites: preset -> invariant data -> reduced ODE (compared against
// the published displays) -> singular points -> branch solves from the
// anchors -> closed-form comparison -> CSV/SVG/JSON artifacts.

#pragma once

#include "symred/catalog.hpp"
#include "symred/presets.hpp"
#include "symred/svg.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>

namespace symred {

using json = nlohmann::json;

// --- determining-system emission (golden-file format) ---

inline void emit_determining_system(const DeterminingSystem& sys, std::ostream& os) {
  os << "# " << (sys.kind == DeterminingSystem::Kind::Classical ? "classical" : "nonclassical")
     << " determining system: " << sys.equations.size() << " equations\n";
  os << "# unknowns:";
  for (const auto& u : sys.unknowns) os << " " << u << "(x,y,w,E)";
  os << "\n";
  for (const auto& [mono, coeff] : sys.equations) {
    os << "# coefficient of " << render(mono) << "\n";
    os << render(coeff) << "\n";
  }
}

inline std::string determining_system_text(const DeterminingSystem& sys) {
  std::ostringstream os;
  emit_determining_system(sys, os);
  return os.str();
}

// --- the section-4 generator and the paper's reduced-ODE displays ---

inline VectorField example_generator() {
  // d_y - 2y d_w, the family-F3 generator with mu = -2
  return VectorField{{Expr::integer(0), Expr::integer(1)},
                     {mul(Expr::integer(-2), Expr::symbol("y")), Expr::integer(0)}};
}

struct PaperODE {
  Expr c1, c0, r;
};

inline PaperODE paper_reduced_ode(int id) {
  switch (id) {
    case 1: return {parse("3*x^2 - 6*x - 1"), parse("6*x - 8"), parse("-1")};
    case 2: return {parse("2*x*(2*x-3)"), parse("2*(x^4 - 4*x + 9)"), parse("x^4")};
    // example 3 printed without the E0 factor on the second term; the form
    // below is what the generic reduction forces and what the published
    // closed form satisfies
    case 3: return {parse("4*x^3"), parse("2*(6*x^2+1)"), parse("1")};
    case 4: return {parse("2*x*(16*x^2-1)"), parse("96*x^2"), parse("1")};
  }
  throw std::invalid_argument("example id must be 1..4");
}

// --- branch solving ---

struct BranchResult {
  double seg_lo = 0, seg_hi = 0;  // segment before exclusion clipping
  double anchor_x = 0, anchor_value = 0;
  SolutionCurve curve;            // merged, ascending in x
  double fitted_constant = 0;
  double max_rel_error = 0;
};

struct ExampleRun {
  int id = 0;
  std::string name;
  ReducedODE ode;
  bool ode_matches_paper = false;
  std::vector<SingularPoint> singular;
  std::vector<BranchResult> branches;
  bool dirichlet_symbolic = false;
  double dirichlet_max_abs = 0;
  bool pass = false;
  double elapsed_seconds = 0;
  std::vector<std::string> outputs;  // file paths
  std::vector<std::string> failures;
};

namespace detail {

inline SolutionCurve merge_ascending(const SolutionCurve& left, const SolutionCurve& right) {
  // left: integrated downward (x descending); right: upward
  SolutionCurve out;
  for (size_t i = left.x.size(); i-- > 1;) {  // skip duplicate anchor point
    out.x.push_back(left.x[i]);
    out.E.push_back(left.E[i]);
    out.residual.push_back(left.residual[i]);
  }
  for (size_t i = 0; i < right.x.size(); ++i) {
    out.x.push_back(right.x[i]);
    out.E.push_back(right.E[i]);
    out.residual.push_back(right.residual[i]);
  }
  out.max_residual = std::max(left.max_residual, right.max_residual);
  return out;
}

}  // namespace detail

struct RunOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double exclusion = 1e-3;
  int grid = 512;
  int boundary_samples = 1000;
};

inline ExampleRun run_example_pipeline(int id, const RunOptions& opt = {}) {
  auto t0 = std::chrono::steady_clock::now();
  const ExamplePreset& preset = example_preset(id);
  ExampleRun run;
  run.id = id;
  run.name = preset.name;

  // symbolic stage
  auto data = invariant_data(example_generator(), preset.profile_W);
  run.ode = reduce_to_ode(data);
  run.ode.source = "example " + std::to_string(id);
  PaperODE ref = paper_reduced_ode(id);
  run.ode_matches_paper = is_zero(sub(run.ode.c1, ref.c1)) && is_zero(sub(run.ode.c0, ref.c0)) &&
                          is_zero(sub(run.ode.r, ref.r));
  if (!run.ode_matches_paper) run.failures.push_back("reduced ODE does not match the published display");

  // Dirichlet property
  Expr dirichlet = add(mul(preset.data, preset.dirichlet_scale), preset.boundary);
  run.dirichlet_symbolic = is_zero(dirichlet, ZeroTestOptions{true});
  if (!run.dirichlet_symbolic) run.failures.push_back("data does not vanish on the boundary symbolically");
  for (const auto& s : sample_boundary(preset, opt.boundary_samples))
    run.dirichlet_max_abs = std::max(run.dirichlet_max_abs, s.abs_w);
  if (run.dirichlet_max_abs > 1e-12)
    run.failures.push_back("sampled boundary |w| exceeds 1e-12");

  // singular points and branch segments
  run.singular = singular_points(run.ode, preset.x_lo, preset.x_hi);
  std::vector<double> cuts;
  for (const auto& s : run.singular) cuts.push_back(s.value);
  std::vector<std::pair<double, double>> segments;
  double lo = preset.x_lo;
  for (double c : cuts) {
    if (c > lo + 2 * opt.exclusion) segments.emplace_back(lo, c);
    lo = c;
  }
  if (preset.x_hi > lo + 2 * opt.exclusion) segments.emplace_back(lo, preset.x_hi);

  LinearODE num = LinearODE::from(run.ode);
  for (auto [a, b] : segments) {
    BranchResult br;
    br.seg_lo = a;
    br.seg_hi = b;
    // an anchor condition whose x lies in this segment, else closed form at
    // the midpoint with the free constant(s) zero
    bool anchored = false;
    for (const auto& an : preset.anchors)
      if (an.x >= a - 1e-12 && an.x <= b + 1e-12) {
        br.anchor_x = an.x;
        br.anchor_value = an.value;
        anchored = true;
        break;
      }
    double mid = 0.5 * (a + b);
    bool inner4 = preset.two_branch_closed_form && std::fabs(mid) < 0.25;
    ClosedForm cf = inner4 ? closed_form_example4_inner() : preset.closed_form(anchored ? br.anchor_x : mid);
    if (!anchored) {
      br.anchor_x = mid;
      br.anchor_value = cf.value(mid, 0.0);
    }
    IVP ivp{num, br.anchor_x, br.anchor_value, opt.rtol, opt.atol, opt.exclusion, cuts};
    SolutionCurve down = solve_ivp(ivp, a, opt.grid);
    SolutionCurve up = solve_ivp(ivp, b, opt.grid);
    br.curve = detail::merge_ascending(down, up);
    ComparisonStats st = compare(br.curve, cf, br.anchor_x, br.anchor_value);
    br.fitted_constant = st.fitted_constant;
    br.max_rel_error = st.max_rel_error;
    if (br.max_rel_error > 1e-6)
      run.failures.push_back("closed-form deviation above 1e-6 on a branch");
    run.branches.push_back(std::move(br));
  }

  run.pass = run.failures.empty();
  run.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

// --- artifact emission ---

inline void write_curve_csv(const SolutionCurve& c, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "x,E0,residual\n";
  char buf[120];
  for (size_t i = 0; i < c.x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.3e\n", c.x[i], c.E[i], c.residual[i]);
    os << buf;
  }
}

inline json singular_json(const std::vector<SingularPoint>& sps) {
  json arr = json::array();
  for (const auto& s : sps) {
    json j;
    j["value"] = s.value;
    if (s.exact) j["exact"] = s.exact->str();
    arr.push_back(j);
  }
  return arr;
}

inline json example_report_json(const ExampleRun& run) {
  json j;
  j["example"] = run.id;
  j["name"] = run.name;
  j["ode"] = {{"c1", render(run.ode.c1)}, {"c0", render(run.ode.c0)}, {"r", render(run.ode.r)}};
  j["ode_matches_paper"] = run.ode_matches_paper;
  j["singular_points"] = singular_json(run.singular);
  j["dirichlet"] = {{"symbolic", run.dirichlet_symbolic},
                    {"max_abs_boundary_w", run.dirichlet_max_abs}};
  json branches = json::array();
  for (const auto& b : run.branches) {
    branches.push_back({{"interval", {b.seg_lo, b.seg_hi}},
                        {"anchor", {{"x", b.anchor_x}, {"E0", b.anchor_value}}},
                        {"fitted_constant", b.fitted_constant},
                        {"max_residual", b.curve.max_residual},
                        {"truncated_at_value_cap", b.curve.truncated},
                        {"max_rel_error_vs_closed_form", b.max_rel_error}});
  }
  j["branches"] = branches;
  j["outputs"] = run.outputs;
  j["failures"] = run.failures;
  j["pass"] = run.pass;
  j["elapsed_seconds"] = run.elapsed_seconds;
  return j;
}

// Runs the pipeline and writes report.json, branch CSVs, boundary CSV and an
// SVG plot under out_dir.
inline ExampleRun run_example(int id, const std::string& out_dir, const RunOptions& opt = {}) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  ExampleRun run = run_example_pipeline(id, opt);
  const ExamplePreset& preset = example_preset(id);

  // boundary CSV + polyline (upper branch then lower branch reversed)
  auto bsamples = sample_boundary(preset, 400);
  {
    std::string path = out_dir + "/boundary.csv";
    std::ofstream os(path, std::ios::binary);
    os << "x,y\n";
    char buf[80];
    for (const auto& s : bsamples) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", s.x, s.y);
      os << buf;
    }
    run.outputs.push_back(path);
  }
  std::vector<Polyline> boundary_lines;
  {
    Polyline up, down;
    up.label = "boundary";
    up.color = "#444444";
    down.color = "#444444";
    for (const auto& s : bsamples)
      (s.y >= 0 ? up : down).pts.emplace_back(s.x, s.y);
    std::sort(up.pts.begin(), up.pts.end());
    std::sort(down.pts.begin(), down.pts.end());
    boundary_lines.push_back(std::move(up));
    boundary_lines.push_back(std::move(down));
  }
  emit_svg(boundary_lines, out_dir + "/boundary.svg", "example " + std::to_string(id) + " boundary");
  run.outputs.push_back(out_dir + "/boundary.svg");

  std::vector<Polyline> curves;
  const char* palette[] = {"#1f6feb", "#d73a49", "#2da44e", "#bf8700"};
  for (size_t i = 0; i < run.branches.size(); ++i) {
    const auto& b = run.branches[i];
    std::string path = out_dir + "/branch" + std::to_string(i + 1) + ".csv";
    write_curve_csv(b.curve, path);
    run.outputs.push_back(path);
    Polyline pl;
    pl.color = palette[i % 4];
    char lab[80];
    std::snprintf(lab, sizeof lab, "E0 on [%.4g, %.4g]", b.seg_lo, b.seg_hi);
    pl.label = lab;
    for (size_t k = 0; k < b.curve.x.size(); ++k) pl.pts.emplace_back(b.curve.x[k], b.curve.E[k]);
    curves.push_back(std::move(pl));
  }
  emit_svg(curves, out_dir + "/parameter.svg", "example " + std::to_string(id) + " parameter E0(x)");
  run.outputs.push_back(out_dir + "/parameter.svg");

  std::ofstream rp(out_dir + "/report.json", std::ios::binary);
  rp << example_report_json(run).dump(2) << "\n";
  run.outputs.push_back(out_dir + "/report.json");
  return run;
}

// --- declarations file (JSON) ---

inline SymbolTable load_declarations(std::istream& in) {
  json j;
  in >> j;
  SymbolTable t;
  for (const auto& v : j.value("independent", json::array())) t.add_independent(v.get<std::string>());
  for (const auto& v : j.value("dependent", json::array())) t.add_dependent(v.get<std::string>());
  for (const auto& f : j.value("functions", json::array())) {
    std::vector<std::string> params;
    for (const auto& a : f.at("args")) params.push_back(a.get<std::string>());
    t.add_function(f.at("name").get<std::string>(), std::move(params));
  }
  return t;
}

}  // namespace symred
