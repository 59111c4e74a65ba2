// Command-line front end: fit, econ, sens, simulate, summary.

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hurdle/error.hpp"
#include "hurdle/io.hpp"

namespace {

using namespace hurdle;

struct Overrides {
  std::string config;
  std::string data;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> chains;
  std::optional<int> threads;
  std::optional<int> iter;
  std::optional<int> burnin;
  std::optional<int> thin;
  std::vector<std::string> cost_families;
  std::string null_likelihood;
  std::optional<double> W;
  std::vector<double> W_grid;
  bool no_svg = false;
};

void add_common(CLI::App* cmd, Overrides& o, bool with_data) {
  cmd->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
  if (with_data) cmd->add_option("--data", o.data, "trial data CSV (arm,eff,cost[,x1..xJ])");
  cmd->add_option("--out", o.out, "output directory");
}

void add_mcmc(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--chains", o.chains, "number of chains");
  cmd->add_option("--threads", o.threads, "worker threads (output does not depend on this)");
  cmd->add_option("--iter", o.iter, "iterations per chain, including burn-in");
  cmd->add_option("--burnin", o.burnin, "burn-in iterations");
  cmd->add_option("--thin", o.thin, "thinning interval");
  cmd->add_option("--cost-family", o.cost_families, "gamma, lognormal or normal; repeat for a second model");
  cmd->add_option("--null-likelihood", o.null_likelihood, "point-mass or degenerate-density");
}

RunConfig resolve(const Overrides& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  if (!o.data.empty()) cfg.data = o.data;
  if (!o.out.empty()) cfg.out = o.out;
  if (o.seed) cfg.mcmc.seed = *o.seed;
  if (o.chains) cfg.mcmc.n_chains = *o.chains;
  if (o.threads) cfg.mcmc.n_threads = *o.threads;
  if (o.iter) cfg.mcmc.n_iter = *o.iter;
  if (o.burnin) cfg.mcmc.n_burnin = *o.burnin;
  if (o.thin) cfg.mcmc.thin = *o.thin;
  if (!o.cost_families.empty()) {
    cfg.cost_families.clear();
    for (const auto& f : o.cost_families) cfg.cost_families.push_back(parse_cost_family(f));
  }
  if (!o.null_likelihood.empty()) cfg.spec.null_likelihood = parse_null_likelihood(o.null_likelihood);
  if (o.W) {
    cfg.spec.W = *o.W;
    cfg.W_explicit = true;
  }
  if (!o.W_grid.empty()) cfg.W_grid = o.W_grid;
  if (o.no_svg) cfg.svg = false;
  return cfg;
}

void print_report(const RunReport& r) {
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& a : r.artifacts) std::cout << "wrote " << a.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian hurdle models for cost-effectiveness data with structural zero costs", "hurdlecea"};
  app.require_subcommand(1);

  Overrides o;
  std::string draws_path;
  std::string truth_path;
  std::string sim_out = "simulated.csv";
  std::size_t n_per_arm = 1000;
  std::uint64_t sim_seed = 1;

  auto* fit_cmd = app.add_subcommand("fit", "fit the hurdle model and write draws, summaries and diagnostics");
  add_common(fit_cmd, o, true);
  add_mcmc(fit_cmd, o);
  fit_cmd->add_option("--W", o.W, "upper bound W of the null-cost component");

  auto* econ_cmd = app.add_subcommand("econ", "cost-effectiveness post-processing of a draws file");
  add_common(econ_cmd, o, false);
  econ_cmd->add_option("--draws", draws_path, "draws.csv (default: <out>/draws.csv)");
  econ_cmd->add_flag("--no-svg", o.no_svg, "skip the SVG renderings");

  auto* sens_cmd = app.add_subcommand("sens", "refit across a grid of W values");
  add_common(sens_cmd, o, true);
  add_mcmc(sens_cmd, o);
  sens_cmd->add_option("--W-grid", o.W_grid, "W values (default 10 100 1000 10000 100000)");

  auto* sim_cmd = app.add_subcommand("simulate", "draw a synthetic trial from the generative model");
  sim_cmd->add_option("--truth", truth_path, "JSON truth parameters (default: case-study values)")
      ->check(CLI::ExistingFile);
  sim_cmd->add_option("--n", n_per_arm, "subjects per arm");
  sim_cmd->add_option("--seed", sim_seed, "random seed");
  sim_cmd->add_option("--out", sim_out, "output CSV file");

  auto* sum_cmd = app.add_subcommand("summary", "tabulate an existing draws file");
  sum_cmd->add_option("--draws", draws_path, "draws.csv")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const CLI::App* failing = &app;
    for (auto* sub : app.get_subcommands()) failing = sub;
    std::cerr << failing->help();
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  }

  try {
    if (*fit_cmd) {
      print_report(run_fit(resolve(o)));
    } else if (*econ_cmd) {
      const RunConfig cfg = resolve(o);
      const fs::path dp = draws_path.empty() ? cfg.out / "draws.csv" : fs::path(draws_path);
      print_report(run_econ(cfg, dp));
    } else if (*sens_cmd) {
      print_report(run_sens(resolve(o)));
    } else if (*sim_cmd) {
      const TruthParams truth = truth_path.empty() ? TruthParams::case_study() : load_truth(truth_path);
      print_report(run_simulate(truth, n_per_arm, sim_seed, sim_out));
    } else if (*sum_cmd) {
      std::cout << summarize_draws_file(draws_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
