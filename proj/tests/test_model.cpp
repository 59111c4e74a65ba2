#include <gtest/gtest.h>

#include <boost/math/distributions/cauchy.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <random>

#include "hurdle/error.hpp"
#include "hurdle/model.hpp"
#include "support.hpp"

using namespace hurdle;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

// Two arms, five records; costs include structural zeros in both arms.
TrialData five_record_fixture() {
  std::vector<TrialRecord> r = {
      {0, 0.6, 0.0, {}}, {0, 0.7, 150.0, {}}, {0, 0.8, 300.0, {}}, {1, 0.5, 0.0, {}}, {1, 0.9, 250.0, {}}};
  return make_trial_data(r, EffectFamily::Beta);
}

ParamState fixture_state() {
  ParamState s;
  s.arm[0] = {{-1.0}, 200.0, 100.0, 0.5, -0.001, 10.0};
  s.arm[1] = {{-0.5}, 260.0, 80.0, 0.8, 0.002, 15.0};
  return s;
}

}  // namespace

TEST(ZeroIndicators, ExactZerosOnly) {
  const std::vector<double> c{0.0, 12.5, 0.0};
  EXPECT_EQ(derive_zero_indicators(c), (std::vector<std::uint8_t>{1, 0, 1}));
  EXPECT_TRUE(derive_zero_indicators(std::vector<double>{}).empty());
  EXPECT_EQ(derive_zero_indicators(std::vector<double>{1e-12}), (std::vector<std::uint8_t>{0}));
}

TEST(ZeroIndicators, RejectsNegativeAndNonFinite) {
  EXPECT_THROW(derive_zero_indicators(std::vector<double>{1.0, -1.0}), InputError);
  EXPECT_THROW(derive_zero_indicators(std::vector<double>{NAN}), InputError);
  try {
    derive_zero_indicators(std::vector<double>{1.0, 2.0, -3.0});
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos);
  }
}

TEST(CenterCovariates, SingleColumn) {
  const std::vector<double> x{1, 2, 3};
  const std::vector<int> arms{0, 0, 0};
  const auto c = center_covariates(x, 1, arms);
  EXPECT_EQ(c.z, (std::vector<double>{-1, 0, 1}));
  EXPECT_EQ(c.means[0][0], 2.0);
}

TEST(CenterCovariates, NoCovariatesIsNoOp) {
  const std::vector<double> x;
  const std::vector<int> arms{0, 1, 1};
  const auto c = center_covariates(x, 0, arms);
  EXPECT_TRUE(c.z.empty());
  EXPECT_TRUE(c.warnings.empty());
}

TEST(CenterCovariates, EachArmUsesItsOwnMeans) {
  // Rows: (arm, x1, x2) = (0,1,10) (0,3,14) (1,5,0) (1,9,2).
  // Arm 0 means (2,12); arm 1 means (7,1).
  const std::vector<double> x{1, 10, 3, 14, 5, 0, 9, 2};
  const std::vector<int> arms{0, 0, 1, 1};
  const auto c = center_covariates(x, 2, arms);
  EXPECT_EQ(c.z, (std::vector<double>{-1, -2, 1, 2, -2, -1, 2, 1}));
  EXPECT_EQ(c.means[0], (std::vector<double>{2, 12}));
  EXPECT_EQ(c.means[1], (std::vector<double>{7, 1}));
}

TEST(CenterCovariates, ConstantColumnWarns) {
  const std::vector<double> x{4, 1, 4, 2};
  const std::vector<int> arms{0, 0};
  const auto c = center_covariates(x, 2, arms);
  EXPECT_FALSE(c.warnings.empty());
}

TEST(CenterCovariates, ArmMeansVanishOnRandomData) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd(50.0, 20.0);
  const std::size_t n = 501, J = 3;
  std::vector<double> x(n * J);
  std::vector<int> arms(n);
  for (auto& v : x) v = nd(rng);
  for (std::size_t i = 0; i < n; ++i) arms[i] = static_cast<int>(i % 3 == 0);
  const auto c = center_covariates(x, J, arms);
  for (int t = 0; t < 2; ++t) {
    for (std::size_t j = 0; j < J; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (arms[i] == t) s += c.z[i * J + j];
      }
      EXPECT_NEAR(s, 0.0, 1e-10);
    }
  }
}

TEST(GammaMoments, Examples) {
  const auto m = gamma_moments(4, 2);
  EXPECT_DOUBLE_EQ(m.psi, 2.0);
  EXPECT_DOUBLE_EQ(m.zeta, 1.0);
  const auto d = gamma_moments(1, 10000);
  EXPECT_DOUBLE_EQ(d.psi, 1e-4);
  EXPECT_DOUBLE_EQ(d.zeta, 1e-4);
  const auto p = gamma_from_moments(2, 1);
  EXPECT_DOUBLE_EQ(p.eta, 4.0);
  EXPECT_DOUBLE_EQ(p.lambda, 2.0);
  const auto e = gamma_from_moments(1, 1);
  EXPECT_DOUBLE_EQ(e.eta, 1.0);
  EXPECT_DOUBLE_EQ(e.lambda, 1.0);
  for (double zeta : {0.5, 17.0, 150.0, 1e4}) {
    const auto g = gamma_from_moments(226.958, zeta);
    EXPECT_LT(rel(g.eta / g.lambda, 226.958), 1e-12);
  }
}

TEST(GammaMoments, DomainErrors) {
  EXPECT_THROW(gamma_moments(0, 1), DomainError);
  EXPECT_THROW(gamma_moments(1, -1), DomainError);
  EXPECT_THROW(gamma_from_moments(-1, 1), DomainError);
  EXPECT_THROW(gamma_from_moments(1, 0), DomainError);
  EXPECT_THROW(gamma_moments(NAN, 1), DomainError);
}

TEST(LogNormalMoments, OracleValues) {
  // High-precision reference for exp(1/2) and sqrt((e - 1) e).
  const auto m = lognormal_moments(0, 1);
  EXPECT_LT(rel(m.psi, 1.6487212707001282), 1e-15);
  EXPECT_LT(rel(m.zeta, 2.1611974158950877), 1e-15);
  const auto back = lognormal_from_moments(1.648721, 2.161197);
  EXPECT_NEAR(back.eta, 0.0, 1e-6);
  EXPECT_NEAR(back.lambda, 1.0, 1e-6);
  const auto one = lognormal_from_moments(1, 1);
  EXPECT_LT(rel(one.eta, -0.34657359027997264), 1e-14);
  EXPECT_LT(rel(one.lambda, 0.83255461115769775), 1e-14);
}

TEST(LogNormalMoments, Limits) {
  const auto tiny = lognormal_moments(-50, 1);
  EXPECT_LT(tiny.psi, 1e-20);
  EXPECT_LT(tiny.zeta, 1e-20);
  const auto narrow = lognormal_from_moments(5.0, 1e-8);
  EXPECT_LT(narrow.lambda, 1e-8);
  EXPECT_NEAR(narrow.eta, std::log(5.0), 1e-12);
  EXPECT_THROW(lognormal_moments(800, 1), DomainError);
  EXPECT_THROW(lognormal_moments(0, 0), DomainError);
  EXPECT_THROW(lognormal_from_moments(0, 1), DomainError);
}

TEST(MomentRoundTrip, RandomInputs) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lpsi(-3.0, 8.0), ratio(-3.0, 1.5);
  for (int i = 0; i < 1000; ++i) {
    const double psi = std::exp(lpsi(rng));
    const double zeta = psi * std::exp(ratio(rng));
    const auto g = gamma_moments(gamma_from_moments(psi, zeta).eta, gamma_from_moments(psi, zeta).lambda);
    EXPECT_LT(rel(g.psi, psi), 1e-10);
    EXPECT_LT(rel(g.zeta, zeta), 1e-10);
    const auto ln = lognormal_from_moments(psi, zeta);
    const auto l = lognormal_moments(ln.eta, ln.lambda);
    EXPECT_LT(rel(l.psi, psi), 1e-10);
    EXPECT_LT(rel(l.zeta, zeta), 1e-10);
    const auto gm = gamma_from_moments(psi, zeta);
    const auto gn = gamma_from_moments(gamma_moments(gm.eta, gm.lambda).psi, gamma_moments(gm.eta, gm.lambda).zeta);
    EXPECT_LT(rel(gn.eta, gm.eta), 1e-10);
    EXPECT_LT(rel(gn.lambda, gm.lambda), 1e-10);
  }
}

TEST(MixtureMean, Examples) {
  EXPECT_NEAR(mixture_mean(0.039, 226.958, 0.0), 218.106638, 1e-9);
  EXPECT_EQ(mixture_mean(0.0, 3.5, 9.0), 3.5);
  EXPECT_EQ(mixture_mean(1.0, 3.5, 9.0), 9.0);
  EXPECT_THROW(mixture_mean(-0.1, 1, 1), DomainError);
  EXPECT_THROW(mixture_mean(1.1, 1, 1), DomainError);
}

TEST(MixtureMean, IdentityHoldsForDerivedQuantities) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto mode : {NullLikelihood::PointMass, NullLikelihood::DegenerateDensity}) {
    for (auto fam : {CostFamily::Gamma, CostFamily::LogNormal, CostFamily::Normal}) {
      ModelSpec spec = ModelSpec::case_study(fam);
      spec.null_likelihood = mode;
      const double psi1 = null_mean(spec);
      for (int i = 0; i < 200; ++i) {
        ArmParams a{{-6.0 + 8.0 * u(rng)}, 1000.0 * u(rng), 300.0 * u(rng), 0.0, 0.0, 1.0};
        const auto d = derive(a, spec);
        const double resid = d.mu_c - (1.0 - d.p) * a.psi0 - d.p * psi1;
        EXPECT_LE(std::fabs(resid), 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, d.mu_c));
      }
    }
  }
}

TEST(NullComponent, DegenerateAtDefaults) {
  for (auto fam : {CostFamily::Gamma, CostFamily::LogNormal, CostFamily::Normal}) {
    const auto n = null_component(ModelSpec::case_study(fam));
    EXPECT_LT(n.moments.psi, 1e-3) << to_string(fam);
    EXPECT_LT(n.moments.zeta, 1e-3) << to_string(fam);
  }
  const auto g = null_component(ModelSpec::case_study(CostFamily::Gamma));
  EXPECT_EQ(g.native.eta, 1.0);
  EXPECT_EQ(g.native.lambda, 10000.0);
  const auto l = null_component(ModelSpec::case_study(CostFamily::LogNormal));
  EXPECT_EQ(l.native.eta, -50.0);
  EXPECT_EQ(l.native.lambda, 1.0);
}

TEST(InverseLink, Examples) {
  EXPECT_EQ(inverse_link(0.0, Link::Logit), 0.5);
  EXPECT_NEAR(inverse_link(logit(0.710), Link::Logit), 0.710, 1e-12);
  const double tiny = inverse_link(-800.0, Link::Logit);
  EXPECT_GT(tiny, 0.0);
  EXPECT_LE(tiny, 1e-300);
  EXPECT_FALSE(std::isnan(inverse_link(800.0, Link::Logit)));
  EXPECT_LT(inverse_link(800.0, Link::Logit), 1.0);
  EXPECT_DOUBLE_EQ(inverse_link(1.0, Link::Log), std::exp(1.0));
  EXPECT_EQ(inverse_link(-2.5, Link::Identity), -2.5);
}

TEST(PredictZeroProb, Examples) {
  EXPECT_EQ(predict_zero_prob(std::vector<double>{0.0}, std::vector<double>{}), 0.5);
  EXPECT_NEAR(predict_zero_prob(std::vector<double>{logit(0.039)}, std::vector<double>{}), 0.039, 1e-12);
  EXPECT_NEAR(predict_zero_prob(std::vector<double>{0.0, 1.0}, std::vector<double>{-1.0}), 0.2689414213699951, 1e-15);
  EXPECT_THROW(predict_zero_prob(std::vector<double>{0.0, 1.0}, std::vector<double>{}), DomainError);
}

TEST(ModelSpec, Validation) {
  ModelSpec s;
  EXPECT_NO_THROW(s.validate());
  s.link = Link::Identity;
  EXPECT_THROW(s.validate(), ConfigError);
  s = ModelSpec{};
  s.w = 10;
  s.W = 10;
  EXPECT_THROW(s.validate(), ConfigError);
  EXPECT_EQ(canonical_link(EffectFamily::Gamma), Link::Log);
  EXPECT_EQ(canonical_link(EffectFamily::Normal), Link::Identity);
  EXPECT_EQ(parse_cost_family("LogNormal"), CostFamily::LogNormal);
  EXPECT_THROW(parse_cost_family("weibull"), ConfigError);
}

TEST(LogPrior, SupportViolation) {
  const ModelSpec spec = ModelSpec::case_study();
  ParamState s = fixture_state();
  s.arm[0].psi0 = spec.H_psi + 1.0;
  EXPECT_EQ(log_prior(s, spec), -std::numeric_limits<double>::infinity());
  s = fixture_state();
  s.arm[1].zeta0 = -1.0;
  EXPECT_EQ(log_prior(s, spec), -std::numeric_limits<double>::infinity());
  s = fixture_state();
  s.arm[1].tau = 0.0;
  EXPECT_EQ(log_prior(s, spec), -std::numeric_limits<double>::infinity());
}

TEST(LogPrior, MatchesIndependentDensities) {
  using namespace boost::math;
  for (auto fam : {PriorFamily::Normal, PriorFamily::Cauchy}) {
    ModelSpec spec = ModelSpec::case_study();
    spec.selection_prior = {fam, fam == PriorFamily::Cauchy ? 2.5 : 100.0};
    ParamState s;
    for (auto& a : s.arm) a = {{0.0}, 500.0, 150.0, 0.0, 0.0, 1.0};
    double expected = 0.0;
    for (int t = 0; t < 2; ++t) {
      expected += std::log(fam == PriorFamily::Cauchy ? pdf(cauchy_distribution<double>(0, 2.5), 0.0)
                                                      : pdf(normal_distribution<double>(0, 100), 0.0));
      expected += std::log(1.0 / 1000.0) + std::log(1.0 / 300.0);
      expected += 3.0 * std::log(pdf(normal_distribution<double>(0, 100), 0.0));
    }
    EXPECT_NEAR(log_prior(s, spec), expected, 1e-12);
  }
}

TEST(LogPrior, CauchyAtZero) {
  ModelSpec spec = ModelSpec::case_study();
  ArmParams a{{0.0}, 500.0, 150.0, 0.0, 0.0, 1.0};
  ArmParams b = a;
  b.beta[0] = 1.0;
  const double diff = log_prior_arm(a, spec) - log_prior_arm(b, spec);
  // log(1/(pi 2.5)) - log(1/(pi 2.5 (1 + 1/6.25)))
  EXPECT_NEAR(diff, std::log1p(1.0 / 6.25), 1e-14);
  ModelSpec only_beta = spec;
  const double rest = -std::log(1000.0) - std::log(300.0) - 3.0 * (std::log(100.0) + 0.5 * std::log(2 * M_PI));
  EXPECT_NEAR(log_prior_arm(a, only_beta) - rest, -2.0610206177235552393, 1e-12);
}

TEST(LogLikelihood, SelectionSaturation) {
  std::vector<TrialRecord> r;
  for (int t = 0; t < 2; ++t) {
    for (int i = 0; i < 50; ++i) r.push_back({t, 0.7, 100.0 + i, {}});
  }
  const TrialData d = make_trial_data(r, EffectFamily::Beta);
  ArmParams a{{-20.0}, 120.0, 20.0, 0.0, 0.0, 10.0};
  const double s = selection_loglik(a, d.arms[0], 0);
  EXPECT_LT(s, 0.0);
  EXPECT_NEAR(s, -50.0 * std::exp(-20.0), 1e-12);
}

TEST(LogLikelihood, ClosedFormGammaCost) {
  std::vector<TrialRecord> r = {{0, 0.5, 2.0, {}}, {1, 0.5, 2.0, {}}};
  const TrialData d = make_trial_data(r, EffectFamily::Beta);
  ArmParams a{{0.0}, 2.0, std::sqrt(2.0), 0.0, 0.0, 1.0};
  EXPECT_NEAR(positive_cost_loglik(a, d.arms[0], ModelSpec::case_study()), std::log(2.0) - 2.0, 1e-13);
}

TEST(LogLikelihood, ComponentSummationOracle) {
  // Terms evaluated independently at 40 digits.
  const TrialData d = five_record_fixture();
  const ModelSpec spec = ModelSpec::case_study();
  const ParamState s = fixture_state();
  const auto terms = log_likelihood_terms(s, d, spec);
  EXPECT_NEAR(terms.selection[0] + terms.selection[1], -3.3879390309148818639, 1e-12);
  EXPECT_NEAR(terms.positive_cost[0] + terms.positive_cost[1], -17.014100108173480616, 1e-11);
  EXPECT_NEAR(terms.effect[0] + terms.effect[1], 2.7468285965552590306, 1e-11);
  EXPECT_EQ(terms.null_cost[0] + terms.null_cost[1], 0.0);
  EXPECT_NEAR(log_likelihood(s, d, spec), -17.655210542533103449, 1e-11);
  EXPECT_DOUBLE_EQ(terms.total(), log_likelihood(s, d, spec));
}

TEST(LogLikelihood, DegenerateDensityAddsNullTermOnly) {
  const TrialData d = five_record_fixture();
  ModelSpec spec = ModelSpec::case_study();
  const ParamState s = fixture_state();
  const auto point = log_likelihood_terms(s, d, spec);
  spec.null_likelihood = NullLikelihood::DegenerateDensity;
  const auto dens = log_likelihood_terms(s, d, spec);
  const double per_zero = cost_log_density(CostFamily::Gamma, {1.0, 10000.0}, kNullCostEps);
  for (int t = 0; t < 2; ++t) {
    EXPECT_DOUBLE_EQ(dens.null_cost[t], per_zero);
    EXPECT_DOUBLE_EQ(dens.selection[t], point.selection[t]);
    EXPECT_DOUBLE_EQ(dens.positive_cost[t], point.positive_cost[t]);
  }
}

TEST(LogLikelihood, PermutationInvariant) {
  auto recs = testsupport::arm_records(0, 40, 5, 1);
  auto more = testsupport::arm_records(1, 30, 3, 2);
  recs.insert(recs.end(), more.begin(), more.end());
  const ModelSpec spec = ModelSpec::case_study();
  ParamState s = fixture_state();
  const double base = log_likelihood(s, make_trial_data(recs, EffectFamily::Beta), spec);
  std::mt19937_64 rng(9);
  for (int k = 0; k < 5; ++k) {
    std::shuffle(recs.begin(), recs.end(), rng);
    EXPECT_NEAR(log_likelihood(s, make_trial_data(recs, EffectFamily::Beta), spec), base, 1e-9 * std::fabs(base));
  }
}

TEST(TrialData, IngestionRules) {
  std::vector<TrialRecord> r = {{0, 1.0, 0.0, {}}, {0, 0.0, 5.0, {}}, {1, 0.5, 3.0, {}}};
  const TrialData d = make_trial_data(r, EffectFamily::Beta);
  EXPECT_EQ(d.arms[0].n(), 2u);
  EXPECT_EQ(d.arms[1].n(), 1u);
  EXPECT_EQ(d.arms[0].n_null + d.arms[0].n_pos, d.arms[0].n());
  EXPECT_EQ(d.arms[0].eff[0], 1.0 - kBetaClampEps);
  EXPECT_EQ(d.arms[0].eff[1], kBetaClampEps);
  EXPECT_EQ(d.warnings.size(), 2u);
  EXPECT_THROW(make_trial_data({{0, 0.5, 1.0, {}}}, EffectFamily::Beta), InputError);
  EXPECT_THROW(make_trial_data({{0, 1.5, 1.0, {}}, {1, 0.5, 1.0, {}}}, EffectFamily::Beta), InputError);
  EXPECT_THROW(make_trial_data({{0, 0.5, 1.0, {}}, {1, 0.5, 1.0, {}}}, EffectFamily::Bernoulli), InputError);
  EXPECT_THROW(make_trial_data({{2, 0.5, 1.0, {}}, {1, 0.5, 1.0, {}}}, EffectFamily::Beta), InputError);
}

// Analytic score of the log posterior for Gamma costs, Beta effects and an
// intercept-only selection model under the point-mass null component.
// Coordinates per arm: beta0, psi0, zeta0, xi, gamma, log tau.
namespace {

std::array<double, 6> analytic_gradient(const ArmParams& a, const ArmData& d, const ModelSpec& spec) {
  using boost::math::digamma;
  std::array<double, 6> g{};
  const double p = inverse_logit(a.beta[0]);
  const double mu_c = (1.0 - p) * a.psi0;
  const double s = spec.selection_prior.scale;
  const double b0 = a.beta[0];
  g[0] = static_cast<double>(d.n_null) - static_cast<double>(d.n()) * p;
  g[0] += spec.selection_prior.family == PriorFamily::Normal ? -b0 / (s * s) : -2.0 * b0 / (s * s + b0 * b0);

  const double z2 = a.zeta0 * a.zeta0;
  const double shape = a.psi0 * a.psi0 / z2;
  const double rate = a.psi0 / z2;
  double d_shape = 0.0, d_rate = 0.0;
  for (std::size_t i = 0; i < d.n(); ++i) {
    if (d.zero[i]) continue;
    d_shape += std::log(rate) - digamma(shape) + std::log(d.cost[i]);
    d_rate += shape / rate - d.cost[i];
  }
  g[1] = d_shape * 2.0 * a.psi0 / z2 + d_rate / z2;
  g[2] = d_shape * (-2.0 * a.psi0 * a.psi0 / (z2 * a.zeta0)) + d_rate * (-2.0 * a.psi0 / (z2 * a.zeta0));

  const double tau = a.tau;
  const double v = spec.effect_prior_sd * spec.effect_prior_sd;
  double d_mu = 0.0;
  for (std::size_t i = 0; i < d.n(); ++i) {
    const double phi = inverse_logit(a.xi + a.gamma * (d.cost[i] - mu_c));
    const double le = std::log(d.eff[i]);
    const double l1e = std::log1p(-d.eff[i]);
    const double dphi = tau * (digamma((1.0 - phi) * tau) - digamma(phi * tau) + le - l1e);
    const double dlin = dphi * phi * (1.0 - phi);
    g[3] += dlin;
    g[4] += dlin * (d.cost[i] - mu_c);
    d_mu += dlin * (-a.gamma);
    g[5] += tau * (digamma(tau) - phi * digamma(phi * tau) - (1.0 - phi) * digamma((1.0 - phi) * tau) +
                   phi * le + (1.0 - phi) * l1e);
  }
  g[0] += d_mu * (-p * (1.0 - p) * a.psi0);
  g[1] += d_mu * (1.0 - p);
  g[3] += -a.xi / v;
  g[4] += -a.gamma / v;
  g[5] += -std::log(tau) / v;
  return g;
}

double& coord(ParamState& s, int t, int k) {
  auto& a = s.arm[t];
  switch (k) {
    case 0: return a.beta[0];
    case 1: return a.psi0;
    case 2: return a.zeta0;
    case 3: return a.xi;
    default: return a.gamma;
  }
}

}  // namespace

TEST(Gradient, CentralDifferencesMatchAnalyticScore) {
  auto recs = testsupport::arm_records(0, 60, 6, 21, 180.0);
  auto more = testsupport::arm_records(1, 50, 4, 22, 320.0);
  recs.insert(recs.end(), more.begin(), more.end());
  const TrialData data = make_trial_data(recs, EffectFamily::Beta);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  for (auto prior : {PriorFamily::Cauchy, PriorFamily::Normal}) {
    ModelSpec spec = ModelSpec::case_study();
    spec.selection_prior = {prior, prior == PriorFamily::Cauchy ? 2.5 : 100.0};
    for (int rep = 0; rep < 10; ++rep) {
      ParamState s;
      for (int t = 0; t < 2; ++t) {
        s.arm[t] = {{-3.5 + 2.0 * u(rng)}, 150.0 + 250.0 * u(rng), 60.0 + 120.0 * u(rng),
                    0.5 + 0.6 * u(rng), -2e-3 + 4e-3 * u(rng), 5.0 + 20.0 * u(rng)};
      }
      for (int t = 0; t < 2; ++t) {
        const auto g = analytic_gradient(s.arm[t], data.arms[t], spec);
        for (int k = 0; k < 6; ++k) {
          auto eval = [&](double delta) {
            ParamState x = s;
            if (k == 5) x.arm[t].tau = std::exp(std::log(s.arm[t].tau) + delta);
            else coord(x, t, k) += delta;
            return log_likelihood(x, data, spec) + log_prior(x, spec);
          };
          const double base = k == 5 ? std::log(s.arm[t].tau) : coord(s, t, k);
          const double h = 1e-5 * std::max(1.0, std::fabs(base)) * (k == 4 ? 1e-2 : 1.0);
          const double fd = (eval(h) - eval(-h)) / (2.0 * h);
          EXPECT_LT(std::fabs(fd - g[k]), 1e-4 * std::max(1.0, std::fabs(g[k])))
              << "arm " << t << " coordinate " << k << " analytic " << g[k] << " numeric " << fd;
        }
      }
    }
  }
}
