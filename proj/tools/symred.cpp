// Command-line surface: determining-system emission, family verification,
// symmetry reduction, numerical solving, boundary sampling, and the
// end-to-end example driver.
//
// Exit codes: 0 all-pass, 1 verification failure, 2 usage error, 3 numeric
// failure.  SYMRED_TOL overrides the default relative tolerance.

#include "symred/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

using namespace symred;

namespace {

double env_rtol() {
  if (const char* s = std::getenv("SYMRED_TOL")) {
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end != s && v > 0) return v;
  }
  return 1e-10;
}

json report_json(const catalog::VerificationReport& rep) {
  json j;
  j["family"] = rep.family;
  j["instantiation"] = rep.instantiation;
  j["residual_count"] = rep.residual_count;
  j["nonvanishing_residuals"] = rep.nonvanishing;
  j["violated_constraints"] = rep.violated_constraints;
  j["pass"] = rep.pass;
  return j;
}

int cmd_detsys(const std::string& kind, const std::string& out) {
  const DeterminingSystem& sys =
      kind == "classical" ? classical_system() : nonclassical_system();
  std::string text = determining_system_text(sys);
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream os(out, std::ios::binary);
    os << text;
    std::cout << "wrote " << out << "\n";
  }
  return 0;
}

int cmd_verify(const std::string& family, const catalog::FamilyParams& params) {
  if (family == "identities") {
    auto ma = catalog::check_monge_ampere_chain();
    auto cons = catalog::check_conservation_forms();
    json j;
    j["monge_ampere"] = {{"t_equation_equivalence", ma.t_equation_equivalence},
                         {"shift_identity", ma.shift_identity},
                         {"wrong_shift_fails", ma.wrong_shift_fails}};
    j["abel_case_2_2_2"] = catalog::check_abel_reduction(catalog::AbelCase::Case222);
    j["abel_case_4_1_2_b"] = catalog::check_abel_reduction(catalog::AbelCase::Case412b);
    j["separation"] = catalog::check_separation();
    j["conservation_forms"] = {{"G_equation", cons.G_equation},
                               {"H_equation", cons.H_equation},
                               {"S_equation", cons.S_equation}};
    j["q_derivation"] = catalog::check_q_derivation();
    j["G_structure_solves_G_equation"] = catalog::check_G_structure_solves_G1();
    bool pass = ma.ok() && cons.ok() && j["abel_case_2_2_2"].get<bool>() &&
                j["abel_case_4_1_2_b"].get<bool>() && j["separation"].get<bool>() &&
                j["q_derivation"].get<bool>() && j["G_structure_solves_G_equation"].get<bool>();
    j["pass"] = pass;
    std::cout << j.dump(2) << "\n";
    return pass ? 0 : 1;
  }
  auto rep = catalog::verify_family(catalog::build_family(family, params));
  std::cout << report_json(rep).dump(2) << "\n";
  return rep.pass ? 0 : 1;
}

int cmd_reduce(int example, const std::string& W, double lo, double hi, bool have_interval) {
  ReducedODE ode;
  double a = lo, b = hi;
  if (example != 0) {
    const ExamplePreset& p = example_preset(example);
    ode = reduce_to_ode(invariant_data(example_generator(), p.profile_W));
    ode.source = "example " + std::to_string(example);
    if (!have_interval) {
      a = p.x_lo;
      b = p.x_hi;
    }
  } else {
    ode = reduce_to_ode(invariant_data(example_generator(), parse(W)));
    ode.source = "W = " + W;
    if (!have_interval) {
      a = -1;
      b = 1;
    }
  }
  json j;
  j["source"] = ode.source;
  j["ode"] = {{"c1", render(ode.c1)}, {"c0", render(ode.c0)}, {"r", render(ode.r)}};
  j["interval"] = {a, b};
  j["singular_points"] = singular_json(singular_points(ode, a, b));
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_solve(int example, const std::vector<std::string>& anchor, double lo, double hi,
              const std::string& out) {
  const ExamplePreset& p = example_preset(example);
  ReducedODE ode = reduce_to_ode(invariant_data(example_generator(), p.profile_W));
  double ax = 0, av = 0;
  bool have_x = false, have_v = false;
  for (const auto& tok : anchor) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--anchor expects x=<val> E=<val>");
    std::string key = tok.substr(0, eq);
    double val = std::stod(tok.substr(eq + 1));
    if (key == "x") {
      ax = val;
      have_x = true;
    } else if (key == "E") {
      av = val;
      have_v = true;
    } else {
      throw CLI::ValidationError("--anchor keys are x and E");
    }
  }
  if (!have_x || !have_v) throw CLI::ValidationError("--anchor requires both x= and E=");
  std::vector<double> cuts;
  for (const auto& s : singular_points(ode, std::min({lo, hi, ax}), std::max({lo, hi, ax})))
    cuts.push_back(s.value);
  IVP ivp{LinearODE::from(ode), ax, av, env_rtol(), 1e-12, 1e-3, cuts};
  SolutionCurve c1 = solve_ivp(ivp, lo);
  SolutionCurve c2 = solve_ivp(ivp, hi);
  SolutionCurve curve = detail::merge_ascending(lo <= hi ? c1 : c2, lo <= hi ? c2 : c1);
  if (out.empty()) {
    std::cout << "x,E0,residual\n";
    char buf[120];
    for (size_t i = 0; i < curve.x.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.3e\n", curve.x[i], curve.E[i],
                    curve.residual[i]);
      std::cout << buf;
    }
  } else {
    write_curve_csv(curve, out);
    std::cout << "wrote " << out << " (max residual " << curve.max_residual << ")\n";
  }
  return 0;
}

int cmd_example(int id, const std::string& out_dir) {
  RunOptions opt;
  opt.rtol = env_rtol();
  ExampleRun run = run_example(id, out_dir, opt);
  std::cout << example_report_json(run).dump(2) << "\n";
  return run.pass ? 0 : 1;
}

int cmd_boundary(int id, int n, const std::string& out) {
  const ExamplePreset& p = example_preset(id);
  auto samples = sample_boundary(p, n);
  std::ostringstream os;
  os << "x,y,abs_w\n";
  char buf[120];
  double worst = 0;
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.3e\n", s.x, s.y, s.abs_w);
    os << buf;
    worst = std::max(worst, s.abs_w);
  }
  if (out.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(out, std::ios::binary);
    f << os.str();
    std::cout << "wrote " << out << " (" << samples.size() << " samples, max |w| = " << worst
              << ")\n";
  }
  return worst < 1e-12 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symred: equivalence and nonclassical symmetry toolkit for the "
               "stationary heat-conduction parameter identification problem"};
  app.require_subcommand(1);

  auto* adetsys = app.add_subcommand("detsys", "emit a generated determining system");
  std::string kind;
  std::string detsys_out;
  adetsys->add_option("kind", kind, "classical | nonclassical")
      ->required()
      ->check(CLI::IsMember({"classical", "nonclassical"}));
  adetsys->add_option("--out", detsys_out, "output file (default stdout)");

  auto* averify = app.add_subcommand("verify", "verify a generator family or the identity set");
  std::string family;
  averify->add_option("--family", family, "F1..F9 | CL | CMP | identities")->required();
  catalog::FamilyParams fparams;
  for (const char* key : {"mu", "k", "A", "nu", "alpha", "gamma", "variant",
                          "k1", "k2", "k3", "k4"}) {
    averify->add_option_function<std::string>(
        std::string("--") + key,
        [&fparams, key](const std::string& v) { fparams[key] = v; },
        std::string("family parameter ") + key + " (expression or 'unspecified')");
  }
  // "--h" would collide with the built-in help flag
  averify->add_option_function<std::string>(
      "--hfun", [&fparams](const std::string& v) { fparams["h"] = v; },
      "family parameter h (expression in w or 'unspecified')");

  auto* areduce = app.add_subcommand("reduce", "derive the reduced ODE for the parameter");
  int reduce_example = 0;
  std::string reduce_W;
  std::vector<double> reduce_interval;
  areduce->add_option("--example", reduce_example, "example id 1..4")->check(CLI::Range(1, 4));
  areduce->add_option("--W", reduce_W, "profile W(x) with data w = -y^2 + W(x)");
  areduce->add_option("--interval", reduce_interval, "interval for the singular-point scan")
      ->expected(2);

  auto* asolve = app.add_subcommand("solve", "integrate a reduced ODE numerically");
  int solve_example = 1;
  std::vector<std::string> anchor;
  std::vector<double> solve_interval;
  std::string solve_out;
  asolve->add_option("--example", solve_example, "example id 1..4")
      ->required()
      ->check(CLI::Range(1, 4));
  asolve->add_option("--anchor", anchor, "anchor condition: x=<val> E=<val>")
      ->expected(2)
      ->required();
  asolve->add_option("--interval", solve_interval, "integration interval")->expected(2)->required();
  asolve->add_option("--out", solve_out, "CSV output path (default stdout)");

  auto* aexample = app.add_subcommand("example", "run the full pipeline for one example");
  int example_id = 1;
  std::string example_out = "out";
  aexample->add_option("id", example_id, "example id 1..4")->required()->check(CLI::Range(1, 4));
  aexample->add_option("--out", example_out, "output directory (default ./out)");

  auto* aboundary = app.add_subcommand("boundary", "sample a preset boundary curve");
  int boundary_id = 1;
  int boundary_n = 400;
  std::string boundary_out;
  aboundary->add_option("id", boundary_id, "example id 1..4")->required()->check(CLI::Range(1, 4));
  aboundary->add_option("--n", boundary_n, "grid size (default 400)")->check(CLI::PositiveNumber);
  aboundary->add_option("--out", boundary_out, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (adetsys->parsed()) return cmd_detsys(kind, detsys_out);
    if (averify->parsed()) return cmd_verify(family, fparams);
    if (areduce->parsed()) {
      if ((reduce_example == 0) == reduce_W.empty()) {
        std::cerr << "reduce: provide exactly one of --example or --W\n";
        return 2;
      }
      bool have = reduce_interval.size() == 2;
      return cmd_reduce(reduce_example, reduce_W, have ? reduce_interval[0] : 0,
                        have ? reduce_interval[1] : 0, have);
    }
    if (asolve->parsed())
      return cmd_solve(solve_example, anchor, solve_interval[0], solve_interval[1], solve_out);
    if (aexample->parsed())
      return cmd_example(example_id, example_out + "/example" + std::to_string(example_id));
    if (aboundary->parsed()) return cmd_boundary(boundary_id, boundary_n, boundary_out);
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
