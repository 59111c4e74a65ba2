#pragma once

#include <span>
#include <string>
#include <vector>

#include "hurdle/model.hpp"
#include "hurdle/sampler.hpp"

namespace hurdle {

struct SummaryRow {
  std::string parameter;
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
};

struct DicResult {
  double d_bar = 0.0;  // posterior mean deviance
  double d_hat = 0.0;  // deviance at the posterior mean
  double p_d = 0.0;
  double dic = 0.0;
  std::string warning;  // set when pD is materially negative
};

struct ParameterDiagnostics {
  std::string parameter;
  double rhat = 0.0;
  double ess = 0.0;
};

// Classic Gelman-Rubin potential scale reduction over >= 2 equal-length chains.
double rhat(std::span<const std::vector<double>> chains);
// Same statistic after splitting every chain into two halves.
double split_rhat(std::span<const std::vector<double>> chains);

// Effective sample size with Geyer's initial monotone positive sequence.
double ess(std::span<const double> chain);
// Sum of per-chain effective sample sizes.
double ess_multi(std::span<const std::vector<double>> chains);

// Sample quantile by linear interpolation between order statistics
// (h = (n-1) p). `sorted` must be ascending.
double quantile_sorted(std::span<const double> sorted, double p);
double mean(std::span<const double> v);
double sample_sd(std::span<const double> v);

// Plug-in state at the posterior mean; bounded parameters are averaged on
// their unconstrained scale.
ParamState posterior_mean_state(const PosteriorDraws& draws);

DicResult dic(const PosteriorDraws& draws, const TrialData& data);

// Default rows, in reporting order: p, psi0, mu_c, mu_e for arm 0 then arm 1.
std::vector<std::string> default_summary_parameters();

std::vector<SummaryRow> summarize(const PosteriorDraws& draws,
                                  const std::vector<std::string>& parameters);
SummaryRow summarize_values(const std::string& name, std::vector<double> values);

// R-hat (classic, or split when requested) and ESS for every free parameter.
std::vector<ParameterDiagnostics> convergence_report(const PosteriorDraws& draws,
                                                     bool split = false);

}  // namespace hurdle
