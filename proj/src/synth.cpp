#include "hurdle/synth.hpp"

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/lognormal.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>
#include <random>

#include "hurdle/error.hpp"

namespace hurdle {

namespace {

// Boost densities with inline moment inversion; independent of the model's
// likelihood code.
double oracle_cost_log_density(CostFamily f, double psi, double zeta, double c) {
  using namespace boost::math;
  double pdf_value = 0.0;
  try {
  switch (f) {
    case CostFamily::Gamma: {
      const double shape = (psi * psi) / (zeta * zeta);
      const double scale = (zeta * zeta) / psi;
      pdf_value = pdf(gamma_distribution<double>(shape, scale), c);
      break;
    }
    case CostFamily::LogNormal: {
      const double s2 = std::log(1.0 + (zeta / psi) * (zeta / psi));
      pdf_value = pdf(lognormal_distribution<double>(std::log(psi) - 0.5 * s2, std::sqrt(s2)), c);
      break;
    }
    case CostFamily::Normal: pdf_value = pdf(normal_distribution<double>(psi, zeta), c); break;
  }
  } catch (const std::exception&) {
    return -std::numeric_limits<double>::infinity();
  }
  return std::log(pdf_value);
}

}  // namespace

double TruthParams::mu_c(int t) const { return mixture_mean(arm[t].p, arm[t].psi0, 0.0); }

double TruthParams::mu_e(int t) const { return inverse_link(arm[t].xi, canonical_link(effect_family)); }

void TruthParams::validate() const {
  for (int t = 0; t < kArms; ++t) {
    const auto& a = arm[t];
    const std::string where = "truth arm " + std::to_string(t) + ": ";
    if (!(a.p >= 0.0 && a.p < 1.0)) throw ConfigError(where + "p must lie in [0,1)");
    if (!(a.psi0 > 0.0) || !(a.zeta0 > 0.0)) throw ConfigError(where + "psi0 and zeta0 must be positive");
    if (!std::isfinite(a.xi) || !std::isfinite(a.gamma)) throw ConfigError(where + "xi and gamma must be finite");
    if (uses_tau(effect_family) && !(a.tau > 0.0)) throw ConfigError(where + "tau must be positive");
  }
}

TruthParams TruthParams::case_study() {
  TruthParams t;
  t.cost_family = CostFamily::Gamma;
  t.effect_family = EffectFamily::Beta;
  t.arm[0] = {0.039, 227.0, 150.0, logit(0.710), -5e-4, 20.0};
  t.arm[1] = {0.011, 408.0, 200.0, logit(0.729), -3e-4, 20.0};
  return t;
}

std::vector<TrialRecord> simulate_records(const TruthParams& truth, std::size_t n_per_arm,
                                          std::uint64_t seed) {
  truth.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> std_normal(0.0, 1.0);
  const Link link = canonical_link(truth.effect_family);

  std::vector<TrialRecord> records;
  records.reserve(n_per_arm * kArms);
  for (int t = 0; t < kArms; ++t) {
    const auto& a = truth.arm[t];
    const NativeParams cp = cost_from_moments(truth.cost_family, a.psi0, a.zeta0);
    const double mu_c = truth.mu_c(t);
    std::gamma_distribution<double> cost_gamma(truth.cost_family == CostFamily::Gamma ? cp.eta : 1.0,
                                               truth.cost_family == CostFamily::Gamma ? 1.0 / cp.lambda : 1.0);
    for (std::size_t i = 0; i < n_per_arm; ++i) {
      TrialRecord r;
      r.arm = t;
      const bool zero = unif(rng) < a.p;
      if (zero) {
        r.cost = 0.0;
      } else {
        switch (truth.cost_family) {
          case CostFamily::Gamma:
            do r.cost = cost_gamma(rng); while (!(r.cost > 0.0));
            break;
          case CostFamily::LogNormal: r.cost = std::exp(cp.eta + cp.lambda * std_normal(rng)); break;
          case CostFamily::Normal:
            do r.cost = cp.eta + cp.lambda * std_normal(rng); while (!(r.cost > 0.0));
            break;
        }
      }
      const double mean = inverse_link(a.xi + a.gamma * (r.cost - mu_c), link);
      switch (truth.effect_family) {
        case EffectFamily::Beta: {
          std::gamma_distribution<double> ga(mean * a.tau, 1.0);
          std::gamma_distribution<double> gb((1.0 - mean) * a.tau, 1.0);
          const double x = ga(rng);
          const double y = gb(rng);
          r.eff = x / (x + y);
          if (!std::isfinite(r.eff)) r.eff = mean;
          break;
        }
        case EffectFamily::Bernoulli: r.eff = unif(rng) < mean ? 1.0 : 0.0; break;
        case EffectFamily::Gamma: {
          std::gamma_distribution<double> g(a.tau, mean / a.tau);
          do r.eff = g(rng); while (!(r.eff > 0.0));
          break;
        }
        case EffectFamily::Normal: r.eff = mean + std_normal(rng) / std::sqrt(a.tau); break;
      }
      records.push_back(std::move(r));
    }
  }
  return records;
}

TrialData simulate_dataset(const TruthParams& truth, std::size_t n_per_arm, std::uint64_t seed) {
  return make_trial_data(simulate_records(truth, n_per_arm, seed), truth.effect_family);
}

ConjugateZeroPosterior::ConjugateZeroPosterior(std::size_t zeros, std::size_t n)
    : alpha_(static_cast<double>(zeros)), beta_(static_cast<double>(n) - static_cast<double>(zeros)) {
  if (zeros == 0 || zeros >= n) {
    throw DomainError("conjugate_zero_posterior: need 0 < zeros < n (posterior is improper otherwise)");
  }
}

double ConjugateZeroPosterior::mean() const { return alpha_ / (alpha_ + beta_); }

double ConjugateZeroPosterior::sd() const {
  const double s = alpha_ + beta_;
  return std::sqrt(alpha_ * beta_ / (s * s * (s + 1.0)));
}

double ConjugateZeroPosterior::cdf(double p) const {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  return boost::math::cdf(boost::math::beta_distribution<double>(alpha_, beta_), p);
}

double ConjugateZeroPosterior::quantile(double prob) const {
  return boost::math::quantile(boost::math::beta_distribution<double>(alpha_, beta_), prob);
}

ConjugateZeroPosterior conjugate_zero_posterior(std::size_t zeros, std::size_t n) {
  return ConjugateZeroPosterior(zeros, n);
}

GridPosteriorMeans grid_posterior_cost(std::span<const double> positive_costs,
                                       const ModelSpec& spec, std::size_t resolution) {
  if (positive_costs.size() < 2) throw InputError("grid_posterior_cost needs at least two positive costs");
  for (double c : positive_costs) {
    if (!(c > 0.0)) throw InputError("grid_posterior_cost: costs must be positive");
  }
  if (resolution < 2) throw ConfigError("grid resolution must be >= 2");
  const double dpsi = spec.H_psi / static_cast<double>(resolution);
  const double dzeta = spec.H_zeta / static_cast<double>(resolution);

  std::vector<double> loglik(resolution * resolution);
  double max_ll = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < resolution; ++i) {
    const double psi = (static_cast<double>(i) + 0.5) * dpsi;
    for (std::size_t j = 0; j < resolution; ++j) {
      const double zeta = (static_cast<double>(j) + 0.5) * dzeta;
      double ll = 0.0;
      for (double c : positive_costs) ll += oracle_cost_log_density(spec.cost_family, psi, zeta, c);
      if (std::isnan(ll)) ll = -std::numeric_limits<double>::infinity();
      loglik[i * resolution + j] = ll;
      max_ll = std::max(max_ll, ll);
    }
  }
  if (!std::isfinite(max_ll)) {
    throw DiagnosticError("likelihood underflows on the whole grid; rescale the costs or the bounds");
  }
  double total = 0.0, sum_psi = 0.0, sum_zeta = 0.0;
  for (std::size_t i = 0; i < resolution; ++i) {
    const double psi = (static_cast<double>(i) + 0.5) * dpsi;
    for (std::size_t j = 0; j < resolution; ++j) {
      const double zeta = (static_cast<double>(j) + 0.5) * dzeta;
      const double wgt = std::exp(loglik[i * resolution + j] - max_ll);
      total += wgt;
      sum_psi += wgt * psi;
      sum_zeta += wgt * zeta;
    }
  }
  return {sum_psi / total, sum_zeta / total};
}

}  // namespace hurdle
