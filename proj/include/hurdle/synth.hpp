#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hurdle/model.hpp"

namespace hurdle {

struct TruthArm {
  double p = 0.1;       // probability of a structural zero cost
  double psi0 = 200.0;  // mean positive cost
  double zeta0 = 100.0; // sd of positive cost
  double xi = 0.0;      // link-scale marginal effectiveness
  double gamma = 0.0;   // link-scale cost-effect slope
  double tau = 20.0;    // effect dispersion/precision
};

struct TruthParams {
  std::array<TruthArm, kArms> arm{};
  CostFamily cost_family = CostFamily::Gamma;
  EffectFamily effect_family = EffectFamily::Beta;

  // Population mean cost (1 - p) psi0: simulated null costs are exactly 0.
  double mu_c(int t) const;
  double mu_e(int t) const;
  // Throws ConfigError on values outside the model's support.
  void validate() const;

  // Beta/Gamma values close to the reference case-study estimates.
  static TruthParams case_study();
};

// Draws n_per_arm subjects per arm from the generative hurdle model. Normal
// costs are redrawn until positive.
std::vector<TrialRecord> simulate_records(const TruthParams& truth, std::size_t n_per_arm,
                                          std::uint64_t seed);
TrialData simulate_dataset(const TruthParams& truth, std::size_t n_per_arm, std::uint64_t seed);

// Beta(y, n - y) posterior of the zero probability implied by a flat prior on
// the logit intercept of an intercept-only selection model.
class ConjugateZeroPosterior {
 public:
  ConjugateZeroPosterior(std::size_t zeros, std::size_t n);
  double mean() const;
  double sd() const;
  double cdf(double p) const;
  double quantile(double prob) const;
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

 private:
  double alpha_;
  double beta_;
};

ConjugateZeroPosterior conjugate_zero_posterior(std::size_t zeros, std::size_t n);

inline constexpr std::size_t kCostGridResolution = 400;

struct GridPosteriorMeans {
  double psi0;
  double zeta0;
};

// Midpoint quadrature of likelihood x Uniform(0,H_psi) x Uniform(0,H_zeta) for
// the positive costs alone, in log space with max subtraction.
GridPosteriorMeans grid_posterior_cost(std::span<const double> positive_costs,
                                       const ModelSpec& spec,
                                       std::size_t resolution = kCostGridResolution);

}  // namespace hurdle
