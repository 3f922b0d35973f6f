// Command-line front end: problem ingestion, per-stage subcommands, report
// and plot-data emission.
//
// Exit codes: 0 = analysis completed (including "x0 not admissible"),
//             1 = I/O, parse or validation error,
//             2 = solvability hypotheses not satisfied (no dichotomy,
//                 nonzero rotation number, or failed cross-check).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lqh/json_io.hpp"

namespace {

int g_verbose = 0;

void log_info(const std::string& msg) {
  if (g_verbose > 0) std::cerr << "[lqh] " << msg << "\n";
}

lqh::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  lqh::json j;
  in >> j;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

lqh::Vector parse_vector_flag(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
  lqh::Vector v(static_cast<Eigen::Index>(vals.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = vals[static_cast<std::size_t>(i)];
  return v;
}

lqh::HamiltonianFamily family_of(const lqh::ProblemSpec& spec) {
  if (spec.problem) return lqh::HamiltonianFamily(*spec.problem);
  return lqh::HamiltonianFamily::from_matrix(*spec.hamiltonian);
}

int run_solve(const std::string& spec_path, const std::string& x0_flag, bool eps_check,
              double horizon, const std::string& out_path, const std::string& csv_path) {
  auto spec = lqh::parse_problem_spec(load_json(spec_path));
  if (!spec.problem)
    throw std::runtime_error("solve needs full control data, not a bare Hamiltonian");
  lqh::Vector x0;
  if (!x0_flag.empty())
    x0 = parse_vector_flag(x0_flag);
  else if (spec.x0)
    x0 = *spec.x0;
  else
    throw std::runtime_error("no initial state: pass --x0 or add x0 to the spec file");

  lqh::SolverOptions opts = spec.options;
  if (eps_check) opts.eps_check = true;
  if (horizon > 0) opts.trajectory_horizon = horizon;

  log_info("running solve pipeline");
  const auto rep = lqh::solve(*spec.problem, x0, opts);

  std::cout << "theorem applicable: " << (rep.theorem_applicable ? "yes" : "no") << "\n";
  if (rep.theorem_applicable) {
    std::cout << "admissible initial state: " << (rep.admissible ? "yes" : "no") << "\n";
    if (rep.min_value) std::cout << "minimum value: " << *rep.min_value << "\n";
    if (rep.epsilon_limit)
      std::cout << "eps-path classification: " << lqh::to_string(rep.epsilon_limit->kind)
                << "\n";
  } else {
    std::cout << "dichotomy diagnostics: " << rep.dichotomy.diagnostic << "\n";
  }
  for (const auto& h : rep.hypotheses)
    std::cout << "  [" << lqh::to_string(h.status) << "] " << h.name
              << (h.detail.empty() ? "" : ": " + h.detail) << "\n";

  if (!out_path.empty()) write_text(out_path, lqh::to_json(rep).dump(2) + "\n");
  if (!csv_path.empty() && rep.trajectory) {
    std::ostringstream csv;
    lqh::write_trajectory_csv(csv, *rep.trajectory);
    write_text(csv_path, csv.str());
  }

  if (!rep.theorem_applicable) return 2;
  if (rep.epsilon_consistent && !*rep.epsilon_consistent) {
    std::cerr << "eps-regularization cross-check disagrees with the direct answer\n";
    return 2;
  }
  return 0;
}

int run_dichotomy(const std::string& spec_path, const std::string& method, double t_max,
                  double period_flag, const std::string& out_path) {
  auto spec = lqh::parse_problem_spec(load_json(spec_path));
  const auto fam = family_of(spec);
  lqh::DichotomyConfig cfg = spec.options.dichotomy;
  if (t_max > 0) cfg.t_max = t_max;

  lqh::DichotomyReport rep;
  if (method == "auto") {
    rep = lqh::detect_dichotomy(fam, cfg);
  } else if (method == "autonomous") {
    rep = lqh::stable_plane_autonomous(fam(0.0), cfg);
  } else if (method == "floquet") {
    double period = period_flag;
    if (period <= 0) {
      auto p = fam.common_period();
      if (!p) throw std::runtime_error("no common period; pass --period");
      period = *p;
    }
    rep = lqh::stable_plane_periodic(fam, period, cfg);
  } else if (method == "general") {
    rep = lqh::stable_plane_general(fam, cfg.t_max, cfg);
  } else {
    throw std::runtime_error("unknown method '" + method + "'");
  }

  std::cout << "method: " << lqh::to_string(rep.method) << "\n";
  std::cout << "has dichotomy: " << (rep.has_dichotomy ? "yes" : "no")
            << (rep.undetermined ? " (undetermined)" : "") << "\n";
  if (rep.has_dichotomy)
    std::cout << "beta: " << rep.beta_est << ", eta: " << rep.eta_est << "\n";
  if (!rep.diagnostic.empty()) std::cout << "diagnostic: " << rep.diagnostic << "\n";
  if (!out_path.empty()) write_text(out_path, lqh::to_json(rep).dump(2) + "\n");
  return 0;  // a negative finding is still a finding
}

int run_rotation(const std::string& spec_path, double horizon, const std::string& out_path,
                 const std::string& csv_path) {
  auto spec = lqh::parse_problem_spec(load_json(spec_path));
  const auto fam = family_of(spec);
  lqh::RotationConfig cfg = spec.options.rotation;
  if (horizon > 0) {
    cfg.horizon = horizon;
    cfg.auto_extend = false;
  }
  const auto est = lqh::rotation_number(fam, cfg);
  std::cout << "alpha: " << est.alpha << " (horizon " << est.horizon << ")\n";
  std::cout << "converged: " << (est.converged ? "yes" : "no")
            << ", convergence indicator: " << est.convergence_indicator << "\n";
  if (!out_path.empty()) write_text(out_path, lqh::to_json(est).dump(2) + "\n");
  if (!csv_path.empty()) {
    std::ostringstream csv;
    lqh::write_rotation_csv(csv, est);
    write_text(csv_path, csv.str());
  }
  return 0;
}

int run_validate(const std::string& spec_path, int grid_points, double t_end) {
  auto spec = lqh::parse_problem_spec(load_json(spec_path));
  if (!spec.problem)
    throw std::runtime_error("validate needs full control data, not a bare Hamiltonian");
  const double span = t_end > 0
                          ? t_end
                          : std::max(10.0, spec.problem->common_period().value_or(10.0));
  const auto grid = lqh::linspace(0.0, span, static_cast<std::size_t>(grid_points));
  const auto violations = lqh::validate(*spec.problem, grid, spec.options.validation);
  if (violations.empty()) {
    std::cout << "ok: " << grid_points << " grid points on [0, " << span << "]\n";
    return 0;
  }
  for (const auto& v : violations) std::cout << "violation: " << v.message << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("LQH_VERBOSE")) g_verbose = std::atoi(env);

  CLI::App app{"Solvability analysis of infinite-horizon linear-quadratic problems"};
  app.require_subcommand(1);

  std::string spec_path, out_path, csv_path, x0_flag;
  std::string method = "auto";
  bool eps_check = false;
  double horizon = 0.0, t_max = 0.0, period = 0.0, t_end = 0.0;
  int grid_points = 33;

  auto* solve = app.add_subcommand("solve", "classify x0 and compute the minimum");
  solve->add_option("spec", spec_path, "problem spec JSON file")->required();
  solve->add_option("--x0", x0_flag, "initial state, comma separated");
  solve->add_flag("--eps-check", eps_check, "run the eps-regularization cross-check");
  solve->add_option("--horizon", horizon, "trajectory emission horizon");
  solve->add_option("--out", out_path, "write the JSON report here");
  solve->add_option("--trajectory-csv", csv_path, "write the minimizing pair as CSV");

  auto* dich = app.add_subcommand("dichotomy", "stable/unstable plane analysis");
  dich->add_option("spec", spec_path, "problem spec JSON file")->required();
  dich->add_option("--method", method, "auto|autonomous|floquet|general");
  dich->add_option("--t-max", t_max, "horizon for the general method");
  dich->add_option("--period", period, "period override for the Floquet method");
  dich->add_option("--out", out_path, "write the JSON report here");

  auto* rot = app.add_subcommand("rotation", "rotation number estimate");
  rot->add_option("spec", spec_path, "problem spec JSON file")->required();
  rot->add_option("--horizon", horizon, "fixed horizon (disables auto extension)");
  rot->add_option("--out", out_path, "write the JSON report here");
  rot->add_option("--samples-csv", csv_path, "write (t, unwrapped argument) samples");

  auto* val = app.add_subcommand("validate", "check problem data invariants");
  val->add_option("spec", spec_path, "problem spec JSON file")->required();
  val->add_option("--grid", grid_points, "number of grid points");
  val->add_option("--t-end", t_end, "end of the validation window");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return run_solve(spec_path, x0_flag, eps_check, horizon, out_path, csv_path);
    if (dich->parsed()) return run_dichotomy(spec_path, method, t_max, period, out_path);
    if (rot->parsed()) return run_rotation(spec_path, horizon, out_path, csv_path);
    if (val->parsed()) return run_validate(spec_path, grid_points, t_end);
  } catch (const lqh::ValidationError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  } catch (const lqh::SpecParseError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  } catch (const lqh::json::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
