// cavfb: batch front end producing curve and grid files with JSON sidecars.

#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli/commands.hpp"

namespace {

using nlohmann::json;
namespace cli = cavfb::cli;

// Parses "mu:gT;mu:gT" into [{mu, gamma_T}, ...].
json parse_sets(const std::string& text) {
  json sets = json::array();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw cli::ConfigError("parameter 'sets' entries must look like mu:gamma_T");
    try {
      sets.push_back({{"mu", std::stod(item.substr(0, colon))}, {"gamma_T", std::stod(item.substr(colon + 1))}});
    } catch (const std::logic_error&) {
      throw cli::ConfigError("parameter 'sets' has a non-numeric entry '" + item + "'");
    }
  }
  return sets;
}

struct Flags {
  std::string config;
  double alpha2 = 0, mu = 0, gamma_t = 0, t_max = 0, time = 0, grid_extent = 0, weight = 0;
  std::vector<double> eta, areas;
  int steps = 0, dim = 0, grid_points = 0, t_points = 0, n = 0, m = 0;
  std::string out, sets, state, evolution, parity;
};

void add_flags(CLI::App* sub, Flags& f, const std::vector<std::string>& keys) {
  auto has = [&](const char* k) { return std::find(keys.begin(), keys.end(), k) != keys.end(); };
  sub->add_option("--config", f.config, "JSON config file or a sidecar from an earlier run");
  sub->add_option("--out", f.out, "Output CSV path (sidecar is <out>.json)");
  if (has("alpha2")) sub->add_option("--alpha2", f.alpha2, "Mean photon number |alpha|^2");
  if (has("eta")) sub->add_option("--eta", f.eta, "Detector efficiency (list where supported)")->delimiter(',');
  if (has("mu")) sub->add_option("--mu", f.mu, "Feedback Rabi angle");
  if (has("gamma_T")) sub->add_option("--gamma-t", f.gamma_t, "Probe interval gamma*T");
  if (has("steps")) sub->add_option("--steps", f.steps, "Number of steps");
  if (has("dim")) sub->add_option("--dim", f.dim, "Largest Fock index n_max");
  if (has("grid_extent")) sub->add_option("--grid-extent", f.grid_extent, "Half-width of the square grid");
  if (has("grid_points")) sub->add_option("--grid-points", f.grid_points, "Points per grid axis");
  if (has("t_max")) sub->add_option("--t-max", f.t_max, "Largest gamma*t");
  if (has("t_points")) sub->add_option("--t-points", f.t_points, "Number of times in [0, t_max]");
  if (has("time")) sub->add_option("--time", f.time, "Evolution time gamma*t");
  if (has("sets")) sub->add_option("--sets", f.sets, "Parameter sets as mu:gamma_T;mu:gamma_T");
  if (has("state")) sub->add_option("--state", f.state, "odd-cat, even-cat, coherent, fock, fock-pair or vacuum");
  if (has("evolution")) sub->add_option("--evolution", f.evolution, "none, continuous or strobo");
  if (has("parity")) sub->add_option("--parity", f.parity, "Cat parity: odd or even");
  if (has("n")) sub->add_option("--n", f.n, "Photon number n");
  if (has("m")) sub->add_option("--m", f.m, "Photon number m");
  if (has("weight")) sub->add_option("--weight", f.weight, "Population of |n> in a two-level Fock superposition");
  if (has("areas")) sub->add_option("--areas", f.areas, "Values of Omega_max*t_cross")->delimiter(',');
}

json collect_overrides(CLI::App* sub, const Flags& f) {
  json o = json::object();
  auto set = [&](const char* flag, const char* key, const json& v) {
    const auto* opt = sub->get_option_no_throw(flag);
    if (opt && opt->count() > 0) o[key] = v;
  };
  set("--out", "out", f.out);
  set("--alpha2", "alpha2", f.alpha2);
  set("--eta", "eta", f.eta.size() == 1 ? json(f.eta[0]) : json(f.eta));
  set("--mu", "mu", f.mu);
  set("--gamma-t", "gamma_T", f.gamma_t);
  set("--steps", "steps", f.steps);
  set("--dim", "dim", f.dim);
  set("--grid-extent", "grid_extent", f.grid_extent);
  set("--grid-points", "grid_points", f.grid_points);
  set("--t-max", "t_max", f.t_max);
  set("--t-points", "t_points", f.t_points);
  set("--time", "time", f.time);
  if (const auto* opt = sub->get_option_no_throw("--sets"); opt && opt->count() > 0) o["sets"] = parse_sets(f.sets);
  set("--state", "state", f.state);
  set("--evolution", "evolution", f.evolution);
  set("--parity", "parity", f.parity);
  set("--n", "n", f.n);
  set("--m", "m", f.m);
  set("--weight", "weight", f.weight);
  set("--areas", "areas", f.areas);
  return o;
}

const std::map<std::string, std::string> kDescriptions{
    {"fidelity-cat", "Cat-state fidelity under continuous feedback, one column per eta"},
    {"fidelity-fock", "Fidelity of a two-Fock superposition, numeric and closed form"},
    {"wigner", "Wigner function grid of a state, optionally after evolution"},
    {"strobo-pe", "Probe-atom excitation probability under stroboscopic feedback"},
    {"qubit-protect", "Worst-case qubit fidelity and the optimal photon-number table"},
    {"adiabatic", "Adiabatic photon transfer by a Lambda atom versus pulse area"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cavity feedback simulations: curve and grid files with JSON sidecars"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(CAVFB_VERSION));
  Flags flags;
  std::vector<std::pair<std::string, CLI::App*>> subs;
  for (const auto& name : cli::command_names()) {
    auto* sub = app.add_subcommand(name, kDescriptions.at(name));
    std::vector<std::string> keys;
    const json defaults = cli::default_config(name);
    for (const auto& [k, _] : defaults.items()) keys.push_back(k);
    add_flags(sub, flags, keys);
    subs.emplace_back(name, sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kConfig;
  }

  for (const auto& [name, sub] : subs) {
    if (!sub->parsed()) continue;
    cli::RunResult result;
    try {
      const json file = flags.config.empty() ? json::object() : cli::load_config_file(flags.config);
      const json cfg = cli::resolve_config(name, file, collect_overrides(sub, flags));
      result = cli::run_command(name, cfg);
    } catch (const cli::ConfigError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return cli::kConfig;
    }
    try {
      cli::write_artifacts(result);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return cli::kConfig;
    }
    if (result.exit_code != cli::kOk) std::cerr << "error: " << result.message << "\n";
    for (const auto& a : result.artifacts) std::cout << "wrote " << a.path << "\n";
    return result.exit_code;
  }
  return cli::kConfig;
}
