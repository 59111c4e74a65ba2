#pragma once

// Three-module hurdle model for cost-effectiveness data with structural zero
// costs: a logistic selection model for the zero indicator, a two-component
// cost model sharing one distributional family, and a regression of the
// effectiveness measure on the centred observed cost.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hurdle {

inline constexpr int kArms = 2;

enum class CostFamily { Gamma, LogNormal, Normal };
enum class EffectFamily { Beta, Bernoulli, Gamma, Normal };
enum class Link { Logit, Log, Identity };
enum class PriorFamily { Normal, Cauchy };
enum class NullLikelihood { PointMass, DegenerateDensity };

std::string_view to_string(CostFamily f);
std::string_view to_string(EffectFamily f);
std::string_view to_string(Link l);
std::string_view to_string(PriorFamily f);
std::string_view to_string(NullLikelihood m);

CostFamily parse_cost_family(std::string_view s);
EffectFamily parse_effect_family(std::string_view s);
Link parse_link(std::string_view s);
PriorFamily parse_prior_family(std::string_view s);
NullLikelihood parse_null_likelihood(std::string_view s);

// The only link each effect family supports.
Link canonical_link(EffectFamily f);
// Whether the effect family carries a dispersion/precision parameter tau.
bool uses_tau(EffectFamily f);

// Clamp applied to Beta-family effectiveness values equal to 0 or 1.
inline constexpr double kBetaClampEps = 1e-6;
// Evaluation point for exact-zero costs in degenerate-density mode.
inline constexpr double kNullCostEps = 1e-8;

struct TrialRecord {
  int arm = 0;
  double eff = 0.0;
  double cost = 0.0;
  std::vector<double> covariates;
};

// Per-arm view of the data, with the sufficient statistics the cost
// likelihood needs precomputed at ingestion.
struct ArmData {
  std::vector<double> eff;
  std::vector<double> cost;
  std::vector<std::uint8_t> zero;  // d_it
  std::vector<double> z;           // centred covariates, row-major n x J
  std::vector<double> covariate_means;
  std::size_t n_pos = 0;
  std::size_t n_null = 0;

  // Over positive costs only.
  double sum_cost = 0.0;
  double sum_log_cost = 0.0;
  double centred_ss_cost = 0.0;      // sum (c - mean c)^2
  double centred_ss_log_cost = 0.0;  // sum (log c - mean log c)^2

  // Cached log(e) and log(1 - e) for the Beta family; log(e) for Gamma.
  std::vector<double> log_eff;
  std::vector<double> log1m_eff;

  std::size_t n() const { return cost.size(); }
  double mean_pos_cost() const { return n_pos ? sum_cost / static_cast<double>(n_pos) : 0.0; }
  double mean_pos_log_cost() const {
    return n_pos ? sum_log_cost / static_cast<double>(n_pos) : 0.0;
  }
  std::span<const double> z_row(std::size_t i, std::size_t J) const {
    return std::span<const double>(z).subspan(i * J, J);
  }
};

struct TrialData {
  std::vector<TrialRecord> records;
  std::array<ArmData, kArms> arms;
  std::size_t n_covariates = 0;
  std::vector<std::string> covariate_names;
  EffectFamily effect_family = EffectFamily::Beta;
  // Non-fatal notes raised while building (clamping, constant covariates).
  std::vector<std::string> warnings;
};

// Validates records against the effect family's support (clamping Beta values
// at 0/1), derives zero indicators, centres covariates per arm and caches the
// sufficient statistics. Throws InputError on invalid records.
TrialData make_trial_data(std::vector<TrialRecord> records, EffectFamily effect_family,
                          std::vector<std::string> covariate_names = {});

struct SelectionPrior {
  PriorFamily family = PriorFamily::Normal;
  double scale = 100.0;  // sd for Normal, scale for Cauchy
};

struct ModelSpec {
  CostFamily cost_family = CostFamily::Gamma;
  EffectFamily effect_family = EffectFamily::Beta;
  Link link = Link::Logit;
  double w = 1.0;
  double W = 10000.0;
  double H_psi = 1000.0;
  double H_zeta = 300.0;
  SelectionPrior selection_prior{};
  double effect_prior_sd = 100.0;  // Normal(0, 10 000) read as variance
  NullLikelihood null_likelihood = NullLikelihood::PointMass;

  // Intercept-only case-study configuration: Cauchy(0, 2.5) selection prior,
  // H = (1000, 300), w = 1 with W = 10000 (Gamma) or W = 50 (log-Normal).
  static ModelSpec case_study(CostFamily cost = CostFamily::Gamma);

  // Throws ConfigError on an incompatible family/link pair or w >= W.
  void validate() const;
};

double default_W(CostFamily f);

struct ArmParams {
  std::vector<double> beta;  // beta_0t .. beta_Jt
  double psi0 = 1.0;
  double zeta0 = 1.0;
  double xi = 0.0;
  double gamma = 0.0;
  double tau = 1.0;
};

struct ParamState {
  std::array<ArmParams, kArms> arm;
};

struct DerivedQuantities {
  double p = 0.0;
  double mu_c = 0.0;
  double mu_e = 0.0;
};

struct MomentPair {
  double psi;   // mean on the natural scale
  double zeta;  // standard deviation on the natural scale
};

struct NativeParams {
  double eta;
  double lambda;
};

// Fixed parameters of the null-cost component implied by (w, W).
struct NullComponent {
  NativeParams native;
  MomentPair moments;
};

// Zero indicators d_i = 1 iff cost_i == 0 exactly.
std::vector<std::uint8_t> derive_zero_indicators(std::span<const double> costs);

struct CenteredCovariates {
  std::vector<double> z;  // row-major n x J
  std::array<std::vector<double>, kArms> means;
  std::vector<std::string> warnings;
};

// x is row-major n x J; every row is centred on its own arm's column means.
CenteredCovariates center_covariates(std::span<const double> x, std::size_t J,
                                     std::span<const int> arms);

MomentPair gamma_moments(double shape, double rate);
NativeParams gamma_from_moments(double psi, double zeta);
MomentPair lognormal_moments(double log_mean, double log_sd);
NativeParams lognormal_from_moments(double psi, double zeta);

// Native parameters of the configured cost family from natural-scale moments.
NativeParams cost_from_moments(CostFamily f, double psi, double zeta);
NullComponent null_component(const ModelSpec& spec);
// psi_t1 entering the mixture mean. Zero under the point-mass null model,
// the (w, W)-implied mean under degenerate-density.
double null_mean(const ModelSpec& spec);

double mixture_mean(double p, double psi0, double psi1);

double inverse_logit(double x);
// 1 - inverse_logit(x), accurate for large x.
double inverse_logit_complement(double x);
double logit(double p);
double inverse_link(double x, Link link);
double link_function(double mu, Link link);

double predict_zero_prob(std::span<const double> beta, std::span<const double> z);

DerivedQuantities derive(const ArmParams& arm, const ModelSpec& spec);

// Log prior densities. beta, xi and gamma are densities in their own scale;
// tau's term is the Normal density of log(tau). -inf outside the support.
double log_prior_arm(const ArmParams& arm, const ModelSpec& spec);
double log_prior(const ParamState& state, const ModelSpec& spec);

// Per-arm likelihood components.
double selection_loglik(const ArmParams& arm, const ArmData& data, std::size_t J);
double positive_cost_loglik(const ArmParams& arm, const ArmData& data, const ModelSpec& spec);
double null_cost_loglik(const ArmData& data, const ModelSpec& spec);
double effect_loglik(const ArmParams& arm, const ArmData& data, const ModelSpec& spec,
                     double mu_c);

struct LikelihoodTerms {
  std::array<double, kArms> selection{};
  std::array<double, kArms> positive_cost{};
  std::array<double, kArms> null_cost{};
  std::array<double, kArms> effect{};
  double total() const;
};

LikelihoodTerms log_likelihood_terms(const ParamState& state, const TrialData& data,
                                     const ModelSpec& spec);
double log_likelihood(const ParamState& state, const TrialData& data, const ModelSpec& spec);

// Scalar log densities shared by the likelihood and the synthetic-data tools.
double cost_log_density(CostFamily f, NativeParams p, double c);
double effect_log_density(EffectFamily f, double e, double mean, double tau);

}  // namespace hurdle
