#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "cavfb/cavfb.hpp"

namespace cavfb::cli {

using nlohmann::json;

std::string format_double(double v) {
  if (!std::isfinite(v)) throw InvariantError("non-finite value in output");
  if (v == 0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

constexpr double kPi = std::numbers::pi;

// ---- config access -------------------------------------------------------

double num(const json& c, const char* key) {
  const auto& v = c.at(key);
  if (!v.is_number()) throw ConfigError(std::string("parameter '") + key + "' must be a number");
  return v.get<double>();
}

int integer(const json& c, const char* key) {
  const auto& v = c.at(key);
  if (!v.is_number_integer()) throw ConfigError(std::string("parameter '") + key + "' must be an integer");
  return v.get<int>();
}

std::string str(const json& c, const char* key) {
  const auto& v = c.at(key);
  if (!v.is_string()) throw ConfigError(std::string("parameter '") + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> num_list(const json& c, const char* key) {
  const auto& v = c.at(key);
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array() || v.empty()) throw ConfigError(std::string("parameter '") + key + "' must be a number or a non-empty list");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(std::string("parameter '") + key + "' must contain numbers only");
    out.push_back(x.get<double>());
  }
  return out;
}

void require(bool ok, const char* key, const std::string& what) {
  if (!ok) throw ConfigError(std::string("parameter '") + key + "' " + what);
}

double single_eta(const json& c) {
  const auto etas = num_list(c, "eta");
  require(etas.size() == 1, "eta", "takes a single value for this command");
  require(etas[0] >= 0 && etas[0] <= 1, "eta", "must lie in [0, 1]");
  return etas[0];
}

std::vector<double> eta_list(const json& c) {
  const auto etas = num_list(c, "eta");
  for (double e : etas) require(e >= 0 && e <= 1, "eta", "must lie in [0, 1]");
  return etas;
}

FockDim fock_dim(const json& c) {
  const int d = integer(c, "dim");
  require(d >= 1, "dim", "(largest Fock index) must be >= 1");
  return FockDim(d);
}

std::vector<double> time_grid(const json& c) {
  const double t_max = num(c, "t_max");
  const int points = integer(c, "t_points");
  require(t_max >= 0, "t_max", "must be >= 0");
  require(points >= 1, "t_points", "must be >= 1");
  if (points == 1) return {t_max};
  std::vector<double> t(points);
  for (int i = 0; i < points; ++i) t[i] = t_max * double(i) / double(points - 1);
  return t;
}

std::string eta_label(double eta) { return "eta=" + format_double(eta); }

// ---- outputs -------------------------------------------------------------

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) { row_strings(header); }
  void row(const std::vector<double>& values) {
    std::vector<std::string> s;
    s.reserve(values.size());
    for (double v : values) s.push_back(format_double(v));
    row_strings(s);
  }
  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

struct Checks {
  json list = json::array();
  bool all_passed = true;

  void add(const std::string& name, double value, double tolerance, bool passed) {
    list.push_back({{"name", name}, {"value", value}, {"tolerance", tolerance}, {"passed", passed}});
    all_passed = all_passed && passed;
  }
  /// Passes when value <= tolerance.
  void at_most(const std::string& name, double value, double tolerance) { add(name, value, tolerance, value <= tolerance); }
};

struct Outcome {
  std::vector<Artifact> files;  // data files; the sidecar is added by run_command
  json metrics = json::object();
  Checks checks;
};

// ---- shared physics helpers ------------------------------------------------

DensityMatrix<double> build_state(const json& c, FockDim dim) {
  const std::string state = str(c, "state");
  if (state == "odd-cat" || state == "even-cat" || state == "coherent") {
    const double a2 = num(c, "alpha2");
    require(a2 > 0, "alpha2", "must be > 0");
    const Complex<double> alpha(std::sqrt(a2), 0);
    if (state == "coherent") return DensityMatrix<double>::from_pure(coherent_state<double>(alpha, dim));
    const auto parity = state == "odd-cat" ? CatParity::Odd : CatParity::Even;
    return DensityMatrix<double>::from_pure(cat_state<double>(alpha, parity, dim));
  }
  if (state == "fock") {
    const int n = integer(c, "n");
    require(n >= 0 && n <= dim.n_max(), "n", "must lie in 0..dim");
    return DensityMatrix<double>::from_pure(fock_state<double>(n, dim));
  }
  if (state == "vacuum") return DensityMatrix<double>::from_pure(fock_state<double>(0, dim));
  if (state == "fock-pair") {
    const int n = integer(c, "n"), m = integer(c, "m");
    const double w = num(c, "weight");
    require(n >= 0 && m > n && m <= dim.n_max(), "m", "must satisfy 0 <= n < m <= dim");
    require(w > 0 && w < 1, "weight", "must lie in (0, 1)");
    return DensityMatrix<double>::from_pure(
        fock_superposition<double>({{n, std::sqrt(w)}, {m, std::sqrt(1 - w)}}, dim));
  }
  throw ConfigError("parameter 'state' must be one of odd-cat, even-cat, coherent, fock, fock-pair, vacuum");
}

StroboParams<double> strobo_params(double eta, double mu, double gamma_T) {
  require(mu >= 0, "mu", "must be >= 0");
  require(gamma_T >= 0, "gamma_T", "must be >= 0");
  return {eta, mu, gamma_T};
}

void check_state(Checks& checks, const std::string& tag, const DensityMatrix<double>& rho) {
  const auto d = density_defects<double>(rho.matrix());
  checks.at_most(tag + ": |trace - 1|", d.trace_error, tolerance::kTrace);
  checks.at_most(tag + ": hermiticity defect", d.hermiticity, tolerance::kHermitian);
  checks.at_most(tag + ": negative eigenvalue", std::max(0.0, -d.min_eigenvalue), tolerance::kPositivity);
}

// ---- commands ------------------------------------------------------------

Outcome cmd_fidelity_cat(const json& c) {
  const FockDim dim = fock_dim(c);
  const double a2 = num(c, "alpha2");
  require(a2 > 0, "alpha2", "must be > 0");
  const std::string parity_name = str(c, "parity");
  require(parity_name == "odd" || parity_name == "even", "parity", "must be odd or even");
  const auto parity = parity_name == "odd" ? CatParity::Odd : CatParity::Even;
  const auto etas = eta_list(c);
  const auto times = time_grid(c);
  const auto rho0 = DensityMatrix<double>::from_pure(cat_state<double>({std::sqrt(a2), 0}, parity, dim));

  std::vector<std::vector<double>> cols;
  Outcome o;
  for (double eta : etas) {
    std::vector<double> f;
    for (double t : times) {
      const auto rho = evolve_continuous(rho0, ContinuousParams<double>{1, eta}, t);
      check_state(o.checks, eta_label(eta) + " gamma_t=" + format_double(t), rho);
      f.push_back(fidelity(rho0, rho));
    }
    cols.push_back(std::move(f));
  }
  std::vector<double> analytic;
  for (double t : times) analytic.push_back(cat_fidelity_analytic(a2, parity, 1.0, t));

  std::vector<std::string> header{"gamma_t"};
  for (double eta : etas) header.push_back("F_" + eta_label(eta));
  header.push_back("F_analytic_no_feedback");
  Csv csv(header);
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::vector<double> row{times[i]};
    for (const auto& col : cols) row.push_back(col[i]);
    row.push_back(analytic[i]);
    csv.row(row);
  }
  for (std::size_t k = 0; k < etas.size(); ++k)
    if (etas[k] == 0) {
      double gap = 0;
      for (std::size_t i = 0; i < times.size(); ++i) gap = std::max(gap, std::abs(cols[k][i] - analytic[i]));
      o.checks.at_most("eta=0 column vs closed form", gap, 1e-6);
      o.metrics["max_abs_gap_no_feedback"] = gap;
    }
  o.files.push_back({str(c, "out"), csv.str()});
  return o;
}

Outcome cmd_fidelity_fock(const json& c) {
  const FockDim dim = fock_dim(c);
  const int n = integer(c, "n"), m = integer(c, "m");
  const double w = num(c, "weight");
  require(n >= 0 && m > n && m < dim.n_max(), "m", "must satisfy 0 <= n < m < dim");
  require(w > 0 && w < 1, "weight", "must lie in (0, 1)");
  const auto etas = eta_list(c);
  const auto times = time_grid(c);
  const auto rho0 = DensityMatrix<double>::from_pure(fock_superposition<double>({{n, std::sqrt(w)}, {m, std::sqrt(1 - w)}}, dim));

  std::vector<std::string> header{"gamma_t"};
  for (double eta : etas) {
    header.push_back("F_numeric_" + eta_label(eta));
    header.push_back("F_analytic_" + eta_label(eta));
  }
  Csv csv(header);
  Outcome o;
  double gap = 0;
  for (double t : times) {
    std::vector<double> row{t};
    for (double eta : etas) {
      const ContinuousParams<double> p{1, eta};
      const auto rho = evolve_continuous(rho0, p, t);
      check_state(o.checks, eta_label(eta) + " gamma_t=" + format_double(t), rho);
      const double fn = fidelity(rho0, rho);
      const double fa = fock_fidelity_analytic(w, 1 - w, n, m, p, t);
      gap = std::max(gap, std::abs(fn - fa));
      row.push_back(fn);
      row.push_back(fa);
    }
    csv.row(row);
  }
  o.checks.at_most("numeric vs closed form", gap, 1e-6);
  o.metrics["max_abs_gap"] = gap;
  o.files.push_back({str(c, "out"), csv.str()});
  return o;
}

Outcome cmd_wigner(const json& c) {
  const FockDim dim = fock_dim(c);
  const auto rho0 = build_state(c, dim);
  const std::string evolution = str(c, "evolution");
  DensityMatrix<double> rho = rho0;
  if (evolution == "continuous") {
    const double t = num(c, "time");
    require(t >= 0, "time", "must be >= 0");
    rho = evolve_continuous(rho0, ContinuousParams<double>{1, single_eta(c)}, t);
  } else if (evolution == "strobo") {
    const int steps = integer(c, "steps");
    require(steps >= 0, "steps", "must be >= 0");
    const auto p = strobo_params(single_eta(c), num(c, "mu"), num(c, "gamma_T"));
    for (int k = 0; k < steps; ++k) rho = strobo_step(rho, p);
  } else {
    require(evolution == "none", "evolution", "must be none, continuous or strobo");
  }

  const double extent = num(c, "grid_extent");
  const int points = integer(c, "grid_points");
  require(extent > 0, "grid_extent", "must be > 0");
  require(points >= 2, "grid_points", "must be >= 2");
  const auto spec = GridSpec<double>::cartesian(extent, points);
  const auto grid = wigner_function(rho, spec);

  Outcome o;
  check_state(o.checks, "evolved state", rho);
  o.checks.at_most("max imaginary residue", grid.max_imag_residue, 1e-10);
  const double w0 = WignerKernel<double>(rho.matrix()).at_polar(0, 0).real();
  const double parity_gap = std::abs(w0 - 2 / kPi * parity_expectation(rho));
  o.checks.at_most("W(0) vs parity", parity_gap, 1e-8);
  o.checks.at_most("|integral - 1|", std::abs(grid.integral - 1), 1e-2);

  const double vis = fringe_visibility(grid);
  const double vis0 = evolution == "none" ? vis : fringe_visibility(wigner_function(rho0, spec));
  o.metrics["fringe_visibility"] = vis;
  o.metrics["fringe_visibility_initial"] = vis0;
  o.metrics["fringe_visibility_ratio"] = vis0 > 0 ? vis / vis0 : 0.0;
  o.metrics["W_origin"] = w0;
  o.metrics["integral"] = grid.integral;
  o.metrics["max_imag_residue"] = grid.max_imag_residue;
  o.metrics["source_digest"] = grid.source_digest;

  Csv csv({"x", "y", "W"});
  for (std::size_t i = 0; i < spec.axis0.size(); ++i)
    for (std::size_t j = 0; j < spec.axis1.size(); ++j) csv.row({spec.axis0[i], spec.axis1[j], grid.values(i, j)});
  o.files.push_back({str(c, "out"), csv.str()});
  return o;
}

std::vector<std::pair<double, double>> strobo_sets(const json& c) {
  const auto& v = c.at("sets");
  require(v.is_array() && !v.empty(), "sets", "must be a non-empty list of {mu, gamma_T}");
  std::vector<std::pair<double, double>> out;
  for (const auto& s : v) {
    require(s.is_object() && s.contains("mu") && s.contains("gamma_T"), "sets", "entries need mu and gamma_T");
    const double mu = num(s, "mu"), gt = num(s, "gamma_T");
    require(mu >= 0, "sets", "mu must be >= 0");
    require(gt > 0, "sets", "gamma_T must be > 0");
    out.emplace_back(mu, gt);
  }
  return out;
}

Outcome cmd_strobo_pe(const json& c) {
  const FockDim dim = fock_dim(c);
  const double a2 = num(c, "alpha2");
  require(a2 > 0, "alpha2", "must be > 0");
  const double eta = single_eta(c);
  const double t_max = num(c, "t_max");
  require(t_max > 0, "t_max", "must be > 0");
  const int fixed_steps = integer(c, "steps");
  require(fixed_steps >= 0, "steps", "must be >= 0 (0 derives steps from t_max)");
  const auto sets = strobo_sets(c);
  const auto rho0 = DensityMatrix<double>::from_pure(cat_state<double>({std::sqrt(a2), 0}, CatParity::Odd, dim));

  Outcome o;
  Csv csv({"set", "mu", "gamma_T", "step", "gamma_t", "P_e", "P_g", "P_ee_no_feedback"});
  json per_set = json::array();
  for (std::size_t s = 0; s < sets.size(); ++s) {
    const auto [mu, gT] = sets[s];
    const int steps = fixed_steps > 0 ? fixed_steps : std::max(1, int(std::lround(t_max / gT)));
    const auto params = strobo_params(eta, mu, gT);
    const auto trace = run_sequence(rho0, params, steps);
    const std::string tag = "set " + std::to_string(s);
    double worst_trace = 0, worst_neg = 0, no_fb_gap = 0;
    for (const auto& e : trace.entries) {
      const double gt = gT * e.step;
      const double pee = p_ee_analytic(a2, gt);
      csv.row_strings({std::to_string(s), format_double(mu), format_double(gT), std::to_string(e.step), format_double(gt),
                       format_double(e.P_e), format_double(e.P_g), format_double(pee)});
      worst_trace = std::max(worst_trace, std::abs(e.digest.trace - 1));
      worst_neg = std::max(worst_neg, -e.digest.min_eigenvalue);
      if (mu == 0) no_fb_gap = std::max(no_fb_gap, std::abs(e.P_e - pee));
    }
    o.checks.at_most(tag + ": |trace - 1|", worst_trace, tolerance::kTrace);
    o.checks.at_most(tag + ": negative eigenvalue", std::max(0.0, worst_neg), tolerance::kPositivity);
    if (mu == 0) o.checks.at_most(tag + ": mu=0 vs closed-form P_ee", no_fb_gap, 1e-8);
    const double stationary = stationary_excited_probability(params);
    per_set.push_back({{"set", s},
                       {"mu", mu},
                       {"gamma_T", gT},
                       {"steps", steps},
                       {"P_e_final", trace.entries.back().P_e},
                       {"P_e_stationary", stationary},
                       {"tail_gap", std::abs(trace.entries.back().P_e - stationary)}});
  }
  o.metrics["sets"] = per_set;
  o.files.push_back({str(c, "out"), csv.str()});
  return o;
}

std::string sibling_path(const std::string& out, const std::string& suffix) {
  const auto slash = out.find_last_of('/');
  const auto dot = out.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return out + suffix + ".csv";
  return out.substr(0, dot) + suffix + out.substr(dot);
}

Outcome cmd_qubit_protect(const json& c) {
  const double eta = single_eta(c);
  const auto times = time_grid(c);
  QubitSpec spec;
  const int n_cfg = integer(c, "n"), m_cfg = integer(c, "m");
  if (n_cfg < 0 && m_cfg < 0) {
    const int n_opt = optimal_n(eta);
    spec = {n_opt, n_opt + 1};
  } else {
    require(n_cfg >= 0 && m_cfg >= 0, "n", "and m must both be set (or both -1 for the optimum)");
    spec = {n_cfg, m_cfg};
  }
  require(spec.n != spec.m, "m", "must differ from n");

  Outcome o;
  Csv csv({"gamma_t", "F_min", "F_min_scan"});
  double gap = 0;
  for (double t : times) {
    const double fa = min_fidelity(spec, eta, t);
    const double fs = numeric_two_mode_check(spec, eta, t);
    gap = std::max(gap, std::abs(fa - fs));
    csv.row({t, fa, fs});
  }
  o.checks.at_most("closed-form F_min vs Bloch-sphere scan", gap, 1e-9);

  Csv table({"eta", "n_opt", "n_opt_continuous"});
  const int sweep = integer(c, "eta_sweep_points");
  require(sweep >= 2, "eta_sweep_points", "must be >= 2");
  const double sweep_max = num(c, "eta_sweep_max");
  require(sweep_max >= 0 && sweep_max < 1, "eta_sweep_max", "must lie in [0, 1)");
  for (int i = 0; i < sweep; ++i) {
    const double e = sweep_max * double(i) / double(sweep - 1);
    table.row({e, double(optimal_n(e)), approx_n_opt(e)});
  }
  const double thr = threshold_eta<double>();
  o.metrics["qubit"] = {{"n", spec.n}, {"m", spec.m}};
  o.metrics["threshold_eta"] = thr;
  o.metrics["threshold_eta_closed_form"] = 2 * (std::sqrt(2.0) - 1);
  o.metrics["max_abs_gap"] = gap;
  const std::string out = str(c, "out");
  o.files.push_back({out, csv.str()});
  o.files.push_back({sibling_path(out, "_nopt"), table.str()});
  return o;
}

Outcome cmd_adiabatic(const json& c) {
  const FockDim dim = fock_dim(c);
  const auto rho0 = build_state(c, dim);
  const auto areas = num_list(c, "areas");
  for (double a : areas) require(a > 0, "areas", "must be > 0");
  const int steps = integer(c, "steps");
  require(steps >= 1, "steps", "must be >= 1");
  const double gamma = num(c, "gamma"), gamma_e = num(c, "gamma_e");
  require(gamma > 0, "gamma", "must be > 0");
  require(gamma_e > 0, "gamma_e", "must be > 0");
  const double n_bar = std::max(mean_photon_number(rho0), 1.0);

  Outcome o;
  Csv csv({"omega_max_t_cross", "transfer_fidelity", "max_excited_population", "max_norm_drift"});
  json reports = json::array();
  for (double a : areas) {
    const auto pulses = PulsePair<double>::with_area(a);
    const auto r = integrate_crossing(rho0, pulses, steps);
    csv.row({a, r.transfer_fidelity, r.max_excited_population, r.max_norm_drift});
    o.checks.at_most("area " + format_double(a) + ": norm drift", r.max_norm_drift, 1e-9);
    check_state(o.checks, "area " + format_double(a) + ": final field", r.final_field);
    const auto rep = adiabaticity_report(pulses, n_bar, gamma, gamma_e);
    json checks = json::array();
    for (const auto& chk : rep.checks)
      checks.push_back({{"name", chk.name}, {"ratio", chk.ratio}, {"verdict", to_string(chk.verdict)}});
    reports.push_back({{"omega_max_t_cross", a}, {"factor", rep.factor}, {"inequalities", checks}});
  }
  o.metrics["n_bar"] = n_bar;
  o.metrics["adiabaticity"] = reports;
  o.files.push_back({str(c, "out"), csv.str()});
  return o;
}

// ---- registry --------------------------------------------------------------

struct Command {
  std::function<json()> defaults;
  std::function<Outcome(const json&)> run;
};

json default_sets() {
  return json::array({{{"mu", kPi / 6}, {"gamma_T", 0.02}},
                      {{"mu", kPi / 2}, {"gamma_T", 0.02}},
                      {{"mu", kPi / 2}, {"gamma_T", 0.2}},
                      {{"mu", kPi / 6}, {"gamma_T", 0.2}},
                      {{"mu", 0.0}, {"gamma_T", 0.02}}});
}

const std::map<std::string, Command>& registry() {
  static const std::map<std::string, Command> r{
      {"fidelity-cat",
       {[] {
          return json{{"alpha2", 5.0}, {"parity", "odd"}, {"eta", {0.0, 0.25, 0.5, 0.75, 1.0}}, {"t_max", 2.0},
                      {"t_points", 41}, {"dim", 63}, {"out", "fidelity_cat.csv"}};
        },
        cmd_fidelity_cat}},
      {"fidelity-fock",
       {[] {
          return json{{"n", 2}, {"m", 4}, {"weight", 1.0 / 3.0}, {"eta", {0.0, 0.25, 0.5, 0.75, 1.0}}, {"t_max", 2.0},
                      {"t_points", 41}, {"dim", 63}, {"out", "fidelity_fock.csv"}};
        },
        cmd_fidelity_fock}},
      {"wigner",
       {[] {
          return json{{"state", "odd-cat"}, {"alpha2", 5.0}, {"n", 0},       {"m", 1},          {"weight", 0.5},
                      {"evolution", "none"}, {"eta", 1.0},   {"time", 0.0},  {"mu", 0.0},       {"gamma_T", 0.0},
                      {"steps", 0},          {"dim", 63},    {"grid_extent", 4.5}, {"grid_points", 121},
                      {"out", "wigner.csv"}};
        },
        cmd_wigner}},
      {"strobo-pe",
       {[] {
          return json{{"alpha2", 3.3}, {"eta", 1.0},  {"sets", default_sets()},
                      {"t_max", 30.0}, {"steps", 0}, {"dim", 63}, {"out", "strobo_pe.csv"}};
        },
        cmd_strobo_pe}},
      {"qubit-protect",
       {[] {
          return json{{"eta", 0.9},  {"n", -1}, {"m", -1}, {"t_max", 2.0}, {"t_points", 41}, {"eta_sweep_max", 0.99},
                      {"eta_sweep_points", 100}, {"out", "qubit_protect.csv"}};
        },
        cmd_qubit_protect}},
      {"adiabatic",
       {[] {
          return json{{"state", "coherent"}, {"alpha2", 3.3},   {"n", 0},       {"m", 1},
                      {"weight", 0.5},       {"areas", {2.0, 20.0, 50.0, 100.0, 200.0}},
                      {"steps", 2000},       {"gamma", 1e-3},   {"gamma_e", 1e-3}, {"dim", 40},
                      {"out", "adiabatic.csv"}};
        },
        cmd_adiabatic}},
  };
  return r;
}

const Command& lookup(const std::string& name) {
  const auto& r = registry();
  const auto it = r.find(name);
  if (it == r.end()) throw ConfigError("unknown command '" + name + "'");
  return it->second;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : registry()) v.push_back(k);
    return v;
  }();
  return names;
}

json default_config(const std::string& command) { return lookup(command).defaults(); }

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file '" + path + "' must hold a JSON object");
  if (j.contains("config") && j["config"].is_object()) return j["config"];
  return j;
}

json resolve_config(const std::string& command, const json& file, const json& overrides) {
  json cfg = default_config(command);
  for (const json* layer : {&file, &overrides})
    for (const auto& [k, v] : layer->items()) {
      if (!cfg.contains(k)) throw ConfigError("parameter '" + k + "' is not used by " + command);
      cfg[k] = v;
    }
  return cfg;
}

RunResult run_command(const std::string& command, const json& config) {
  RunResult r;
  try {
    Outcome o = lookup(command).run(config);
    json sidecar{{"command", command},
                 {"version", kVersion},
                 {"config", config},
                 {"invariants", {{"all_passed", o.checks.all_passed}, {"checks", o.checks.list}}},
                 {"metrics", o.metrics}};
    r.artifacts = std::move(o.files);
    r.artifacts.push_back({config.at("out").get<std::string>() + ".json", sidecar.dump(2) + "\n"});
    if (!o.checks.all_passed) {
      r.exit_code = kNumerical;
      r.message = "one or more invariant checks failed; see the sidecar";
    }
  } catch (const ConfigError& e) {
    r = {kConfig, e.what(), {}};
  } catch (const json::exception& e) {
    r = {kConfig, std::string("config: ") + e.what(), {}};
  } catch (const TruncationError& e) {
    r = {kTruncation, e.what(), {}};
  } catch (const PreconditionError& e) {
    r = {kConfig, e.what(), {}};
  } catch (const Error& e) {
    r = {kNumerical, e.what(), {}};
  }
  return r;
}

void write_artifacts(const RunResult& result) {
  for (const auto& a : result.artifacts) {
    std::ofstream out(a.path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + a.path + "'");
    out << a.content;
  }
}

}  // namespace cavfb::cli
