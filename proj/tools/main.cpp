// dnwave command line: one subcommand per experiment. Each run writes
// <out>/<experiment>.json plus <out>/verdict.json and exits 0 iff every check passes.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dnwave/error.hpp"
#include "dnwave/experiments.hpp"
#include "dnwave/field_io.hpp"

using namespace dnwave;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::vector<std::string> overrides;
};

ExperimentResult run_params(const ExperimentConfig& c) {
  const ModelParams P = c.params();
  ExperimentResult r;
  r.experiment = "params";
  r.report = {{"m", P.m()},
              {"p", P.p()},
              {"kappa", P.kappa()},
              {"q", P.q_exp()},
              {"sigma", P.sigma()},
              {"wave_speed", P.wave_speed()},
              {"flux_factor", P.flux_factor()},
              {"time_scale_total", TransformMeta::from(P).time_scale_total},
              {"tangential_scale", TransformMeta::from(P).tangential_scale}};
  r.verdicts.push_back(check_ge("sigma > -1", P.sigma(), -1.0 + 1e-300));
  std::cout << P.describe() << "\n";
  return r;
}

int execute(const std::string& name, const Options& opt,
            const std::function<ExperimentResult(const ExperimentConfig&)>& run) {
  try {
    ConfigMap map = opt.config.empty() ? ConfigMap() : ConfigMap::load(opt.config);
    map.set("experiment", name);
    for (const auto& o : opt.overrides) map.apply_override(o);
    if (!opt.out.empty()) map.set("out_dir", opt.out);
    if (opt.seed_given) map.set("seed", std::to_string(opt.seed));
    const ExperimentConfig config = ExperimentConfig::from_map(map);

    const ExperimentResult result = run(config);
    write_result(result, config.out_dir);
    const nlohmann::json verdict = {{"pass", result.passed()}, {"experiments", {result.verdict_json()}}};
    write_json(config.out_dir / "verdict.json", verdict);

    for (const auto& v : result.verdicts) {
      std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << v.name << ": " << v.value << " " << v.relation << " "
                << v.threshold << "\n";
    }
    std::cout << name << ": " << (result.passed() ? "pass" : "FAIL") << " -> " << config.out_dir.string() << "\n";
    return result.passed() ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Doubly nonlinear diffusion: traveling-wave stability experiments"};
  app.require_subcommand(1);
  Options opt;

  const std::map<std::string, std::pair<std::string, std::function<ExperimentResult(const ExperimentConfig&)>>>
      commands = {
          {"params", {"print derived constants for (m, p)", run_params}},
          {"simulate-direct", {"solve the density equation in the lab frame", run_simulate_direct}},
          {"simulate-perturbation", {"solve the perturbation equation on the half-space", run_simulate_perturbation}},
          {"stability", {"perturbed traveling wave: sup |grad g - e_n| against eps", run_stability}},
          {"decay", {"t^{k+|b|} |d_t^k d^b grad w| bounds, refinement and linearity", run_decay}},
          {"nonlin-ratio", {"Y(N[w]) / X(w)^2 over an eps family, plus random jets", run_nonlinearity_ratio}},
          {"cross-check", {"hodograph of the direct solve against the transformed solve", run_cross_check}},
          {"norms", {"X and Y norms of a perturbation run, with oracles", run_norms}},
          {"convergence", {"refinement ladders and conservation", run_convergence}},
      };

  std::string chosen;
  for (const auto& [name, entry] : commands) {
    auto* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", opt.config, "config file (key = value, [section] prefixes)")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory (overrides out_dir)");
    sub->add_option("--seed", opt.seed, "random seed (overrides seed)");
    sub->add_option("--override", opt.overrides, "key=value, applied after the config file")->expected(1)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    sub->callback([&chosen, name = name] { chosen = name; });
  }

  CLI11_PARSE(app, argc, argv);
  for (auto* sub : app.get_subcommands()) {
    if (sub->get_option("--seed")->count() > 0) opt.seed_given = true;
  }
  return execute(chosen, opt, commands.at(chosen).second);
}
