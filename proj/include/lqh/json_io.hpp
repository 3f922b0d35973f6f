#pragma once

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "lqh/solver.hpp"

namespace lqh {

using json = nlohmann::json;

inline constexpr int kReportSchemaVersion = 1;

struct SpecParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Matrices and vectors: nested arrays, row-major.

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j, const std::string& path,
                               Eigen::Index rows = -1, Eigen::Index cols = -1) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw SpecParseError(path + ": expected a matrix (array of rows)");
  const Eigen::Index r = static_cast<Eigen::Index>(j.size());
  const Eigen::Index c = static_cast<Eigen::Index>(j[0].size());
  if ((rows >= 0 && r != rows) || (cols >= 0 && c != cols))
    throw SpecParseError(path + ": expected a " + std::to_string(rows) + "x" +
                         std::to_string(cols) + " matrix, got " + std::to_string(r) + "x" +
                         std::to_string(c));
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (!j[i].is_array() || static_cast<Eigen::Index>(j[i].size()) != c)
      throw SpecParseError(path + "[" + std::to_string(i) + "]: row has wrong length");
    for (Eigen::Index k = 0; k < c; ++k) {
      if (!j[i][k].is_number())
        throw SpecParseError(path + "[" + std::to_string(i) + "][" + std::to_string(k) +
                             "]: expected a number");
      m(i, k) = j[i][k].get<double>();
    }
  }
  return m;
}

inline json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline Vector vector_from_json(const json& j, const std::string& path, Eigen::Index size = -1) {
  if (!j.is_array()) throw SpecParseError(path + ": expected an array of numbers");
  if (size >= 0 && static_cast<Eigen::Index>(j.size()) != size)
    throw SpecParseError(path + ": expected " + std::to_string(size) + " entries");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!j[static_cast<std::size_t>(i)].is_number())
      throw SpecParseError(path + "[" + std::to_string(i) + "]: expected a number");
    v(i) = j[static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

namespace detail {

inline const json& require_key(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key))
    throw SpecParseError(path + ": missing required key '" + key + "'");
  return j.at(key);
}

inline double require_number(const json& j, const char* key, const std::string& path) {
  const json& v = require_key(j, key, path);
  if (!v.is_number()) throw SpecParseError(path + "." + key + ": expected a number");
  return v.get<double>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Coefficient functions.

inline json coefficient_to_json(const CoefficientFn& c) {
  json out;
  switch (c.kind()) {
    case CoefficientKind::Constant:
      out["kind"] = "constant";
      out["data"] = matrix_to_json(c.mean());
      break;
    case CoefficientKind::Periodic: {
      out["kind"] = "periodic";
      json data;
      data["period"] = *c.period();
      json fourier = json::array();
      if (c.mean().norm() > 0 || c.terms().empty()) {
        json term;
        term["freq_index"] = 0;
        term["cos_matrix"] = matrix_to_json(c.mean());
        term["sin_matrix"] = matrix_to_json(Matrix::Zero(c.rows(), c.cols()));
        fourier.push_back(std::move(term));
      }
      for (const auto& t : c.terms()) {
        json term;
        term["freq_index"] = t.multi_index[0];
        term["cos_matrix"] = matrix_to_json(t.cos_coef);
        term["sin_matrix"] = matrix_to_json(t.sin_coef);
        fourier.push_back(std::move(term));
      }
      data["fourier"] = std::move(fourier);
      out["data"] = std::move(data);
      break;
    }
    case CoefficientKind::Quasiperiodic: {
      out["kind"] = "quasiperiodic";
      json data;
      data["frequencies"] = c.frequencies();
      json terms = json::array();
      if (c.mean().norm() > 0 || c.terms().empty()) {
        json term;
        term["multi_index"] = std::vector<int>(c.frequencies().size(), 0);
        term["cos_matrix"] = matrix_to_json(c.mean());
        term["sin_matrix"] = matrix_to_json(Matrix::Zero(c.rows(), c.cols()));
        terms.push_back(std::move(term));
      }
      for (const auto& t : c.terms()) {
        json term;
        term["multi_index"] = t.multi_index;
        term["cos_matrix"] = matrix_to_json(t.cos_coef);
        term["sin_matrix"] = matrix_to_json(t.sin_coef);
        terms.push_back(std::move(term));
      }
      data["terms"] = std::move(terms);
      out["data"] = std::move(data);
      break;
    }
  }
  return out;
}

inline CoefficientFn coefficient_from_json(const json& j, const std::string& path,
                                           Eigen::Index rows, Eigen::Index cols) {
  const json& kind_j = detail::require_key(j, "kind", path);
  const std::string kind = kind_j.get<std::string>();
  const json& data = detail::require_key(j, "data", path);

  if (kind == "constant") return CoefficientFn::constant(matrix_from_json(data, path + ".data", rows, cols));

  if (kind == "periodic") {
    const double period = detail::require_number(data, "period", path + ".data");
    if (!(period > 0)) throw SpecParseError(path + ".data.period: must be positive");
    const json& fourier = detail::require_key(data, "fourier", path + ".data");
    if (!fourier.is_array()) throw SpecParseError(path + ".data.fourier: expected an array");
    Matrix mean = Matrix::Zero(rows, cols);
    std::vector<TrigTerm> terms;
    for (std::size_t i = 0; i < fourier.size(); ++i) {
      const std::string tpath = path + ".data.fourier[" + std::to_string(i) + "]";
      const json& term = fourier[i];
      const int k = static_cast<int>(detail::require_number(term, "freq_index", tpath));
      if (k < 0) throw SpecParseError(tpath + ".freq_index: must be nonnegative");
      const Matrix cosm =
          matrix_from_json(detail::require_key(term, "cos_matrix", tpath), tpath + ".cos_matrix",
                           rows, cols);
      const Matrix sinm =
          matrix_from_json(detail::require_key(term, "sin_matrix", tpath), tpath + ".sin_matrix",
                           rows, cols);
      if (k == 0)
        mean += cosm;  // the sine part of the zero harmonic vanishes identically
      else
        terms.push_back({{k}, cosm, sinm});
    }
    return CoefficientFn::periodic(period, std::move(mean), std::move(terms));
  }

  if (kind == "quasiperiodic") {
    const json& freqs_j = detail::require_key(data, "frequencies", path + ".data");
    if (!freqs_j.is_array() || freqs_j.empty())
      throw SpecParseError(path + ".data.frequencies: expected a nonempty array");
    std::vector<double> freqs;
    for (const auto& f : freqs_j) freqs.push_back(f.get<double>());
    const json& terms_j = detail::require_key(data, "terms", path + ".data");
    if (!terms_j.is_array()) throw SpecParseError(path + ".data.terms: expected an array");
    Matrix mean = Matrix::Zero(rows, cols);
    std::vector<TrigTerm> terms;
    for (std::size_t i = 0; i < terms_j.size(); ++i) {
      const std::string tpath = path + ".data.terms[" + std::to_string(i) + "]";
      const json& term = terms_j[i];
      const json& idx_j = detail::require_key(term, "multi_index", tpath);
      if (!idx_j.is_array() || idx_j.size() != freqs.size())
        throw SpecParseError(tpath + ".multi_index: expected " + std::to_string(freqs.size()) +
                             " integers");
      std::vector<int> idx;
      bool all_zero = true;
      for (const auto& v : idx_j) {
        idx.push_back(v.get<int>());
        all_zero = all_zero && idx.back() == 0;
      }
      const Matrix cosm =
          matrix_from_json(detail::require_key(term, "cos_matrix", tpath), tpath + ".cos_matrix",
                           rows, cols);
      const Matrix sinm =
          matrix_from_json(detail::require_key(term, "sin_matrix", tpath), tpath + ".sin_matrix",
                           rows, cols);
      if (all_zero)
        mean += cosm;
      else
        terms.push_back({std::move(idx), cosm, sinm});
    }
    return CoefficientFn::quasiperiodic(std::move(freqs), std::move(mean), std::move(terms));
  }

  throw SpecParseError(path + ".kind: unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Problem specification files.

struct ProblemSpec {
  std::optional<ProblemData> problem;        // standard control-data form
  std::optional<CoefficientFn> hamiltonian;  // direct 2n x 2n Hamiltonian form
  std::optional<Vector> x0;
  SolverOptions options;
};

inline ProblemSpec parse_problem_spec(const json& j) {
  ProblemSpec spec;
  const json& dims = detail::require_key(j, "dims", "spec");
  const int n = static_cast<int>(detail::require_number(dims, "n", "spec.dims"));
  if (n <= 0) throw SpecParseError("spec.dims.n: must be positive");

  if (j.contains("hamiltonian")) {
    spec.hamiltonian =
        coefficient_from_json(j.at("hamiltonian"), "spec.hamiltonian", 2 * n, 2 * n);
  } else {
    const int m = static_cast<int>(detail::require_number(dims, "m", "spec.dims"));
    if (m <= 0) throw SpecParseError("spec.dims.m: must be positive");
    const json& coeffs = detail::require_key(j, "coefficients", "spec");
    ProblemData p;
    p.n = n;
    p.m = m;
    p.A = coefficient_from_json(detail::require_key(coeffs, "A", "spec.coefficients"),
                                "spec.coefficients.A", n, n);
    p.B = coefficient_from_json(detail::require_key(coeffs, "B", "spec.coefficients"),
                                "spec.coefficients.B", n, m);
    p.G = coefficient_from_json(detail::require_key(coeffs, "G", "spec.coefficients"),
                                "spec.coefficients.G", n, n);
    p.g = coefficient_from_json(detail::require_key(coeffs, "g", "spec.coefficients"),
                                "spec.coefficients.g", n, m);
    p.R = coefficient_from_json(detail::require_key(coeffs, "R", "spec.coefficients"),
                                "spec.coefficients.R", m, m);
    p.rho = detail::require_number(j, "rho", "spec");
    if (!(p.rho > 0)) throw SpecParseError("spec.rho: must be positive");
    spec.problem = std::move(p);
  }

  if (j.contains("x0")) spec.x0 = vector_from_json(j.at("x0"), "spec.x0", n);

  if (j.contains("options")) {
    const json& o = j.at("options");
    auto& opts = spec.options;
    if (o.contains("assume_dichotomy")) opts.assume_dichotomy = o.at("assume_dichotomy").get<bool>();
    if (o.contains("eps_grid")) {
      opts.eps_grid.clear();
      for (const auto& e : o.at("eps_grid")) opts.eps_grid.push_back(e.get<double>());
    }
    if (o.contains("seed")) opts.dichotomy.seed = o.at("seed").get<std::uint64_t>();
    if (o.contains("tolerances")) {
      const json& t = o.at("tolerances");
      if (t.contains("tau_adm")) opts.tau_adm = t.at("tau_adm").get<double>();
      if (t.contains("tau_mono")) opts.tau_mono = t.at("tau_mono").get<double>();
      if (t.contains("tau_gram")) opts.tau_gram = t.at("tau_gram").get<double>();
      if (t.contains("tau_sym")) opts.validation.tau_sym = t.at("tau_sym").get<double>();
      if (t.contains("tau_psd")) opts.validation.tau_psd = t.at("tau_psd").get<double>();
      if (t.contains("tau_spec")) opts.dichotomy.tau_spec = t.at("tau_spec").get<double>();
      if (t.contains("tau_floq")) opts.dichotomy.tau_floq = t.at("tau_floq").get<double>();
      if (t.contains("tau_gap")) opts.dichotomy.tau_gap = t.at("tau_gap").get<double>();
      if (t.contains("rotation_tol")) opts.rotation_tol = t.at("rotation_tol").get<double>();
      if (t.contains("rel_tol")) {
        const double v = t.at("rel_tol").get<double>();
        opts.dichotomy.ode.rel_tol = v;
        opts.rotation.ode.rel_tol = v;
      }
    }
    if (o.contains("horizons")) {
      const json& h = o.at("horizons");
      if (h.contains("rotation")) opts.rotation.horizon = h.at("rotation").get<double>();
      if (h.contains("rotation_max")) opts.rotation.max_horizon = h.at("rotation_max").get<double>();
      if (h.contains("dichotomy_t_max")) opts.dichotomy.t_max = h.at("dichotomy_t_max").get<double>();
      if (h.contains("trajectory")) opts.trajectory_horizon = h.at("trajectory").get<double>();
    }
  }
  return spec;
}

inline json problem_spec_to_json(const ProblemSpec& spec) {
  json j;
  if (spec.problem) {
    const auto& p = *spec.problem;
    j["dims"] = {{"n", p.n}, {"m", p.m}};
    json coeffs;
    coeffs["A"] = coefficient_to_json(p.A);
    coeffs["B"] = coefficient_to_json(p.B);
    coeffs["G"] = coefficient_to_json(p.G);
    coeffs["g"] = coefficient_to_json(p.g);
    coeffs["R"] = coefficient_to_json(p.R);
    j["coefficients"] = std::move(coeffs);
    j["rho"] = p.rho;
  } else if (spec.hamiltonian) {
    j["dims"] = {{"n", spec.hamiltonian->rows() / 2}};
    j["hamiltonian"] = coefficient_to_json(*spec.hamiltonian);
  }
  if (spec.x0) j["x0"] = vector_to_json(*spec.x0);
  return j;
}

// ---------------------------------------------------------------------------
// Reports.

inline json to_json(const LagrangeFrame& l) { return matrix_to_json(l.L); }

inline json to_json(const DichotomyReport& rep) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = "dichotomy_report";
  j["has_dichotomy"] = rep.has_dichotomy;
  j["undetermined"] = rep.undetermined;
  j["beta_est"] = rep.beta_est;
  j["eta_est"] = rep.eta_est;
  j["method"] = to_string(rep.method);
  if (rep.l_plus) j["l_plus"] = to_json(*rep.l_plus);
  if (rep.l_minus) j["l_minus"] = to_json(*rep.l_minus);
  if (rep.M_plus) j["M_plus"] = matrix_to_json(*rep.M_plus);
  if (rep.M_minus) j["M_minus"] = matrix_to_json(*rep.M_minus);
  json spec = json::array();
  for (const auto& lambda : rep.spectrum) spec.push_back({lambda.real(), lambda.imag()});
  j["spectrum"] = std::move(spec);
  if (!rep.growth_exponents.empty()) j["growth_exponents"] = rep.growth_exponents;
  if (rep.method == DichotomyMethod::GeneralQr) j["seed"] = rep.seed;
  if (!rep.diagnostic.empty()) j["diagnostic"] = rep.diagnostic;
  return j;
}

inline DichotomyReport dichotomy_report_from_json(const json& j) {
  DichotomyReport rep;
  rep.has_dichotomy = j.at("has_dichotomy").get<bool>();
  rep.undetermined = j.at("undetermined").get<bool>();
  rep.beta_est = j.at("beta_est").get<double>();
  rep.eta_est = j.at("eta_est").get<double>();
  const std::string method = j.at("method").get<std::string>();
  if (method == "autonomous-eigen") rep.method = DichotomyMethod::AutonomousEigen;
  else if (method == "periodic-floquet") rep.method = DichotomyMethod::PeriodicFloquet;
  else rep.method = DichotomyMethod::GeneralQr;
  if (j.contains("l_plus")) rep.l_plus = LagrangeFrame(matrix_from_json(j.at("l_plus"), "l_plus"));
  if (j.contains("l_minus"))
    rep.l_minus = LagrangeFrame(matrix_from_json(j.at("l_minus"), "l_minus"));
  if (j.contains("M_plus")) rep.M_plus = matrix_from_json(j.at("M_plus"), "M_plus");
  if (j.contains("M_minus")) rep.M_minus = matrix_from_json(j.at("M_minus"), "M_minus");
  for (const auto& lambda : j.at("spectrum"))
    rep.spectrum.emplace_back(lambda[0].get<double>(), lambda[1].get<double>());
  if (j.contains("growth_exponents"))
    rep.growth_exponents = j.at("growth_exponents").get<std::vector<double>>();
  if (j.contains("seed")) rep.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("diagnostic")) rep.diagnostic = j.at("diagnostic").get<std::string>();
  return rep;
}

inline json to_json(const RotationEstimate& est) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = "rotation_estimate";
  j["alpha"] = est.alpha;
  j["alpha_full_window"] = est.alpha_full_window;
  j["horizon"] = est.horizon;
  j["convergence_indicator"] = est.convergence_indicator;
  j["converged"] = est.converged;
  json samples = json::array();
  for (const auto& [t, theta] : est.samples) samples.push_back({t, theta});
  j["samples"] = std::move(samples);
  return j;
}

inline RotationEstimate rotation_estimate_from_json(const json& j) {
  RotationEstimate est;
  est.alpha = j.at("alpha").get<double>();
  est.alpha_full_window = j.at("alpha_full_window").get<double>();
  est.horizon = j.at("horizon").get<double>();
  est.convergence_indicator = j.at("convergence_indicator").get<double>();
  est.converged = j.at("converged").get<bool>();
  for (const auto& s : j.at("samples"))
    est.samples.emplace_back(s[0].get<double>(), s[1].get<double>());
  return est;
}

inline json to_json(const PairTrajectory& traj) {
  json j;
  j["times"] = traj.times;
  json xs = json::array(), ys = json::array(), us = json::array();
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    xs.push_back(vector_to_json(traj.x.col(static_cast<Eigen::Index>(i))));
    ys.push_back(vector_to_json(traj.y.col(static_cast<Eigen::Index>(i))));
    us.push_back(vector_to_json(traj.u.col(static_cast<Eigen::Index>(i))));
  }
  j["x"] = std::move(xs);
  j["y"] = std::move(ys);
  j["u"] = std::move(us);
  return j;
}

inline PairTrajectory pair_trajectory_from_json(const json& j) {
  PairTrajectory traj;
  traj.times = j.at("times").get<std::vector<double>>();
  const auto count = static_cast<Eigen::Index>(traj.times.size());
  const auto& xs = j.at("x");
  const auto& ys = j.at("y");
  const auto& us = j.at("u");
  if (xs.size() != traj.times.size() || ys.size() != traj.times.size() ||
      us.size() != traj.times.size())
    throw SpecParseError("trajectory: sample count mismatch");
  const Eigen::Index n = count > 0 ? static_cast<Eigen::Index>(xs[0].size()) : 0;
  const Eigen::Index m = count > 0 ? static_cast<Eigen::Index>(us[0].size()) : 0;
  traj.x.resize(n, count);
  traj.y.resize(n, count);
  traj.u.resize(m, count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto s = static_cast<std::size_t>(i);
    traj.x.col(i) = vector_from_json(xs[s], "trajectory.x", n);
    traj.y.col(i) = vector_from_json(ys[s], "trajectory.y", n);
    traj.u.col(i) = vector_from_json(us[s], "trajectory.u", m);
  }
  return traj;
}

inline json to_json(const EpsilonPath& path) {
  json j;
  j["monotone"] = path.monotone;
  j["worst_violation"] = path.worst_violation;
  json entries = json::array();
  for (const auto& e : path.entries) {
    json entry;
    entry["epsilon"] = e.epsilon;
    entry["M_plus"] = matrix_to_json(e.M_plus);
    entry["quad"] = e.quad;
    entry["value"] = e.value;
    entries.push_back(std::move(entry));
  }
  j["entries"] = std::move(entries);
  return j;
}

inline EpsilonPath epsilon_path_from_json(const json& j) {
  EpsilonPath path;
  path.monotone = j.at("monotone").get<bool>();
  path.worst_violation = j.at("worst_violation").get<double>();
  for (const auto& ej : j.at("entries")) {
    EpsilonPathEntry e;
    e.epsilon = ej.at("epsilon").get<double>();
    e.M_plus = matrix_from_json(ej.at("M_plus"), "entries.M_plus");
    e.quad = ej.at("quad").get<double>();
    e.value = ej.at("value").get<double>();
    path.entries.push_back(std::move(e));
  }
  return path;
}

inline json to_json(const SolveReport& rep) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = "solve_report";
  j["x0"] = vector_to_json(rep.x0);
  j["theorem_applicable"] = rep.theorem_applicable;
  j["admissible"] = rep.admissible;
  if (rep.c) j["c"] = vector_to_json(*rep.c);
  if (rep.y0) j["y0"] = vector_to_json(*rep.y0);
  if (rep.min_value) j["min_value"] = *rep.min_value;
  if (rep.trajectory) j["trajectory"] = to_json(*rep.trajectory);
  if (!rep.functional_truncations.empty()) {
    json ft = json::array();
    for (const auto& [t, v] : rep.functional_truncations) ft.push_back({t, v});
    j["functional_truncations"] = std::move(ft);
  }
  if (rep.epsilon_path) j["epsilon_path"] = to_json(*rep.epsilon_path);
  if (rep.epsilon_limit) {
    json k;
    k["kind"] = to_string(rep.epsilon_limit->kind);
    if (rep.epsilon_limit->kind == LimitKind::FiniteLimit) k["limit"] = rep.epsilon_limit->limit;
    if (!rep.epsilon_limit->diagnostic.empty()) k["diagnostic"] = rep.epsilon_limit->diagnostic;
    j["epsilon_limit"] = std::move(k);
  }
  if (rep.epsilon_consistent) j["epsilon_consistent"] = *rep.epsilon_consistent;
  j["dichotomy"] = to_json(rep.dichotomy);
  if (rep.rotation) j["rotation"] = to_json(*rep.rotation);
  json hyps = json::array();
  for (const auto& h : rep.hypotheses) {
    json hj;
    hj["name"] = h.name;
    hj["status"] = to_string(h.status);
    hj["detail"] = h.detail;
    hyps.push_back(std::move(hj));
  }
  j["hypotheses"] = std::move(hyps);
  return j;
}

inline SolveReport solve_report_from_json(const json& j) {
  SolveReport rep;
  rep.x0 = vector_from_json(j.at("x0"), "x0");
  rep.theorem_applicable = j.at("theorem_applicable").get<bool>();
  rep.admissible = j.at("admissible").get<bool>();
  if (j.contains("c")) rep.c = vector_from_json(j.at("c"), "c");
  if (j.contains("y0")) rep.y0 = vector_from_json(j.at("y0"), "y0");
  if (j.contains("min_value")) rep.min_value = j.at("min_value").get<double>();
  if (j.contains("trajectory")) rep.trajectory = pair_trajectory_from_json(j.at("trajectory"));
  if (j.contains("functional_truncations"))
    for (const auto& ft : j.at("functional_truncations"))
      rep.functional_truncations.emplace_back(ft[0].get<double>(), ft[1].get<double>());
  if (j.contains("epsilon_path")) rep.epsilon_path = epsilon_path_from_json(j.at("epsilon_path"));
  if (j.contains("epsilon_limit")) {
    LimitClassification lim;
    const std::string kind = j.at("epsilon_limit").at("kind").get<std::string>();
    if (kind == "finite_limit") lim.kind = LimitKind::FiniteLimit;
    else if (kind == "minus_infinity") lim.kind = LimitKind::MinusInfinity;
    else lim.kind = LimitKind::Undetermined;
    if (j.at("epsilon_limit").contains("limit"))
      lim.limit = j.at("epsilon_limit").at("limit").get<double>();
    if (j.at("epsilon_limit").contains("diagnostic"))
      lim.diagnostic = j.at("epsilon_limit").at("diagnostic").get<std::string>();
    rep.epsilon_limit = lim;
  }
  if (j.contains("epsilon_consistent"))
    rep.epsilon_consistent = j.at("epsilon_consistent").get<bool>();
  rep.dichotomy = dichotomy_report_from_json(j.at("dichotomy"));
  if (j.contains("rotation")) rep.rotation = rotation_estimate_from_json(j.at("rotation"));
  for (const auto& hj : j.at("hypotheses")) {
    HypothesisCheck h;
    h.name = hj.at("name").get<std::string>();
    const std::string status = hj.at("status").get<std::string>();
    if (status == "pass") h.status = HypothesisCheck::Status::Pass;
    else if (status == "warn") h.status = HypothesisCheck::Status::Warn;
    else if (status == "fail") h.status = HypothesisCheck::Status::Fail;
    else h.status = HypothesisCheck::Status::Assumed;
    h.detail = hj.at("detail").get<std::string>();
    rep.hypotheses.push_back(std::move(h));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// CSV emission.

inline void write_trajectory_csv(std::ostream& os, const PairTrajectory& traj) {
  const Eigen::Index n = traj.x.rows();
  const Eigen::Index m = traj.u.rows();
  os << "t";
  for (Eigen::Index i = 1; i <= n; ++i) os << ",x_" << i;
  for (Eigen::Index i = 1; i <= n; ++i) os << ",y_" << i;
  for (Eigen::Index i = 1; i <= m; ++i) os << ",u_" << i;
  os << "\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
  };
  for (std::size_t s = 0; s < traj.times.size(); ++s) {
    const auto i = static_cast<Eigen::Index>(s);
    put(traj.times[s]);
    for (Eigen::Index r = 0; r < n; ++r) { os << ","; put(traj.x(r, i)); }
    for (Eigen::Index r = 0; r < n; ++r) { os << ","; put(traj.y(r, i)); }
    for (Eigen::Index r = 0; r < m; ++r) { os << ","; put(traj.u(r, i)); }
    os << "\n";
  }
}

inline void write_rotation_csv(std::ostream& os, const RotationEstimate& est) {
  os << "t,unwrapped_arg\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
  };
  for (const auto& [t, theta] : est.samples) {
    put(t);
    os << ",";
    put(theta);
    os << "\n";
  }
}

}  // namespace lqh
