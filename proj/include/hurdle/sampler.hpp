#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hurdle/model.hpp"

namespace hurdle {

struct McmcConfig {
  int n_iter = 10000;
  int n_burnin = 5000;
  int thin = 10;
  int n_chains = 2;
  std::uint64_t seed = 20140601;
  int adapt_window = 50;
  double target_accept = 0.44;
  // Worker threads for chain-level parallelism. Output does not depend on it.
  int n_threads = 1;

  int retained_per_chain() const { return (n_iter - n_burnin) / thin; }
  // Throws ConfigError on violated invariants; returns advisory warnings.
  std::vector<std::string> validate() const;
};

// What the sampler targets. PriorOnly drops the likelihood and exists to
// check the kernel against known marginals.
enum class Target { Posterior, PriorOnly };

struct Draw {
  int iteration = 0;  // 1-based iteration number within the chain
  ParamState state;
  std::array<DerivedQuantities, kArms> derived{};
};

struct PosteriorDraws {
  ModelSpec spec;
  McmcConfig config;
  std::size_t n_covariates = 0;
  std::vector<std::vector<Draw>> chains;
  // Post-burn-in acceptance rate per chain and per coordinate (coordinate_names order).
  std::vector<std::vector<double>> acceptance;
  std::vector<std::string> coordinate_names;
  std::vector<std::string> warnings;

  std::size_t n_chains() const { return chains.size(); }
  std::size_t total_draws() const;

  // Free parameters and derived quantities, one name per column:
  // beta{j}_{t}, psi0_{t}, zeta0_{t}, xi_{t}, gamma_{t}, tau_{t}, p_{t}, mu_c_{t}, mu_e_{t}.
  std::vector<std::string> parameter_names() const;
  // Names of the sampled (free) parameters only.
  std::vector<std::string> free_parameter_names() const;
  // Values of one named column in a chain. Throws ConfigError on unknown names.
  std::vector<double> column(const std::string& name, std::size_t chain) const;
  std::vector<double> pooled(const std::string& name) const;

  // Hex digest of (spec, config, covariate count), recorded as provenance.
  std::string config_digest() const;
};

// Overdispersed, seed-deterministic starting states.
std::vector<ParamState> initialize_chains(const TrialData& data, const ModelSpec& spec,
                                          int n_chains, std::uint64_t seed);

double log_posterior(const ParamState& state, const TrialData& data, const ModelSpec& spec);

// Single-site adaptive random-walk Metropolis over every free parameter.
PosteriorDraws fit(const TrialData& data, const ModelSpec& spec, const McmcConfig& cfg,
                   Target target = Target::Posterior);

// Deterministic 64-bit seed derivation (SplitMix64 finaliser over seed and stream).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace hurdle
