#include "hurdle/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hurdle/error.hpp"

namespace hurdle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// log(inverse_logit(x)) without overflow.
double log_sigmoid(double x) {
  return x < 0.0 ? x - std::log1p(std::exp(x)) : -std::log1p(std::exp(-x));
}

double normal_logpdf(double x, double mean, double sd) {
  const double u = (x - mean) / sd;
  return -kLogSqrt2Pi - std::log(sd) - 0.5 * u * u;
}

double cauchy_logpdf(double x, double scale) {
  const double u = x / scale;
  return -std::log(std::numbers::pi * scale) - std::log1p(u * u);
}

bool in_open_interval(double x, double hi) { return x > 0.0 && x < hi; }

void check_effect_support(EffectFamily f, double& e, std::size_t row,
                          std::vector<std::string>& warnings) {
  if (!std::isfinite(e)) {
    throw InputError("record " + std::to_string(row) + ": effectiveness is not finite");
  }
  switch (f) {
    case EffectFamily::Beta:
      if (e < 0.0 || e > 1.0) {
        throw InputError("record " + std::to_string(row) +
                         ": effectiveness outside [0,1] for the Beta family");
      }
      if (e == 0.0 || e == 1.0) {
        const double clamped = e == 0.0 ? kBetaClampEps : 1.0 - kBetaClampEps;
        std::ostringstream msg;
        msg << "record " << row << ": effectiveness " << e << " clamped to " << clamped;
        warnings.push_back(msg.str());
        e = clamped;
      }
      break;
    case EffectFamily::Bernoulli:
      if (e != 0.0 && e != 1.0) {
        throw InputError("record " + std::to_string(row) +
                         ": effectiveness must be 0 or 1 for the Bernoulli family");
      }
      break;
    case EffectFamily::Gamma:
      if (e <= 0.0) {
        throw InputError("record " + std::to_string(row) +
                         ": effectiveness must be positive for the Gamma family");
      }
      break;
    case EffectFamily::Normal:
      break;
  }
}

}  // namespace

std::string_view to_string(CostFamily f) {
  switch (f) {
    case CostFamily::Gamma: return "gamma";
    case CostFamily::LogNormal: return "lognormal";
    case CostFamily::Normal: return "normal";
  }
  return "?";
}

std::string_view to_string(EffectFamily f) {
  switch (f) {
    case EffectFamily::Beta: return "beta";
    case EffectFamily::Bernoulli: return "bernoulli";
    case EffectFamily::Gamma: return "gamma";
    case EffectFamily::Normal: return "normal";
  }
  return "?";
}

std::string_view to_string(Link l) {
  switch (l) {
    case Link::Logit: return "logit";
    case Link::Log: return "log";
    case Link::Identity: return "identity";
  }
  return "?";
}

std::string_view to_string(PriorFamily f) {
  return f == PriorFamily::Normal ? "normal" : "cauchy";
}

std::string_view to_string(NullLikelihood m) {
  return m == NullLikelihood::PointMass ? "point-mass" : "degenerate-density";
}

CostFamily parse_cost_family(std::string_view s) {
  const auto v = lower(s);
  if (v == "gamma") return CostFamily::Gamma;
  if (v == "lognormal" || v == "log-normal") return CostFamily::LogNormal;
  if (v == "normal") return CostFamily::Normal;
  throw ConfigError("unknown cost family '" + std::string(s) +
                    "' (expected gamma, lognormal or normal)");
}

EffectFamily parse_effect_family(std::string_view s) {
  const auto v = lower(s);
  if (v == "beta") return EffectFamily::Beta;
  if (v == "bernoulli") return EffectFamily::Bernoulli;
  if (v == "gamma") return EffectFamily::Gamma;
  if (v == "normal") return EffectFamily::Normal;
  throw ConfigError("unknown effect family '" + std::string(s) +
                    "' (expected beta, bernoulli, gamma or normal)");
}

Link parse_link(std::string_view s) {
  const auto v = lower(s);
  if (v == "logit") return Link::Logit;
  if (v == "log") return Link::Log;
  if (v == "identity") return Link::Identity;
  throw ConfigError("unknown link '" + std::string(s) + "' (expected logit, log or identity)");
}

PriorFamily parse_prior_family(std::string_view s) {
  const auto v = lower(s);
  if (v == "normal") return PriorFamily::Normal;
  if (v == "cauchy") return PriorFamily::Cauchy;
  throw ConfigError("unknown selection prior '" + std::string(s) + "' (expected normal or cauchy)");
}

NullLikelihood parse_null_likelihood(std::string_view s) {
  const auto v = lower(s);
  if (v == "point-mass" || v == "point_mass") return NullLikelihood::PointMass;
  if (v == "degenerate-density" || v == "degenerate_density") {
    return NullLikelihood::DegenerateDensity;
  }
  throw ConfigError("unknown null likelihood mode '" + std::string(s) +
                    "' (expected point-mass or degenerate-density)");
}

Link canonical_link(EffectFamily f) {
  switch (f) {
    case EffectFamily::Beta:
    case EffectFamily::Bernoulli: return Link::Logit;
    case EffectFamily::Gamma: return Link::Log;
    case EffectFamily::Normal: return Link::Identity;
  }
  return Link::Identity;
}

bool uses_tau(EffectFamily f) { return f != EffectFamily::Bernoulli; }

double default_W(CostFamily f) { return f == CostFamily::LogNormal ? 50.0 : 10000.0; }

ModelSpec ModelSpec::case_study(CostFamily cost) {
  ModelSpec spec;
  spec.cost_family = cost;
  spec.effect_family = EffectFamily::Beta;
  spec.link = Link::Logit;
  spec.w = 1.0;
  spec.W = default_W(cost);
  spec.H_psi = 1000.0;
  spec.H_zeta = 300.0;
  spec.selection_prior = {PriorFamily::Cauchy, 2.5};
  return spec;
}

void ModelSpec::validate() const {
  if (link != canonical_link(effect_family)) {
    throw ConfigError("link '" + std::string(to_string(link)) + "' is not compatible with the " +
                      std::string(to_string(effect_family)) + " effect family (expected '" +
                      std::string(to_string(canonical_link(effect_family))) + "')");
  }
  if (!(w > 0.0) || !(W > 0.0) || !std::isfinite(W)) throw ConfigError("w and W must be positive");
  if (!(w < W)) throw ConfigError("w must be smaller than W");
  if (!(H_psi > 0.0) || !(H_zeta > 0.0)) throw ConfigError("H_psi and H_zeta must be positive");
  if (!(effect_prior_sd > 0.0)) throw ConfigError("effect_prior_sd must be positive");
  if (!(selection_prior.scale > 0.0)) throw ConfigError("selection prior scale must be positive");
}

std::vector<std::uint8_t> derive_zero_indicators(std::span<const double> costs) {
  std::vector<std::uint8_t> d(costs.size());
  for (std::size_t i = 0; i < costs.size(); ++i) {
    const double c = costs[i];
    if (!std::isfinite(c) || c < 0.0) {
      throw InputError("row " + std::to_string(i + 1) + ": cost must be finite and >= 0");
    }
    d[i] = c == 0.0 ? 1 : 0;
  }
  return d;
}

CenteredCovariates center_covariates(std::span<const double> x, std::size_t J,
                                     std::span<const int> arms) {
  const std::size_t n = arms.size();
  if (x.size() != n * J) throw InputError("covariate matrix does not match the number of rows");
  CenteredCovariates out;
  out.z.assign(x.begin(), x.end());
  for (int t = 0; t < kArms; ++t) out.means[t].assign(J, 0.0);
  if (J == 0) return out;

  std::array<std::size_t, kArms> count{};
  for (std::size_t i = 0; i < n; ++i) {
    const int t = arms[i];
    if (t < 0 || t >= kArms) throw InputError("row " + std::to_string(i + 1) + ": arm must be 0 or 1");
    ++count[t];
    for (std::size_t j = 0; j < J; ++j) out.means[t][j] += x[i * J + j];
  }
  for (int t = 0; t < kArms; ++t) {
    if (count[t] == 0) continue;
    for (auto& m : out.means[t]) m /= static_cast<double>(count[t]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < J; ++j) out.z[i * J + j] -= out.means[arms[i]][j];
  }
  for (int t = 0; t < kArms; ++t) {
    for (std::size_t j = 0; j < J; ++j) {
      bool constant = true;
      for (std::size_t i = 0; i < n && constant; ++i) {
        if (arms[i] == t && out.z[i * J + j] != 0.0) constant = false;
      }
      if (constant && count[t] > 0) {
        out.warnings.push_back("covariate " + std::to_string(j + 1) + " is constant in arm " +
                               std::to_string(t) + "; its slope is not identifiable");
      }
    }
  }
  return out;
}

TrialData make_trial_data(std::vector<TrialRecord> records, EffectFamily effect_family,
                          std::vector<std::string> covariate_names) {
  TrialData data;
  data.effect_family = effect_family;
  const std::size_t J = records.empty() ? covariate_names.size() : records.front().covariates.size();
  data.n_covariates = J;
  if (covariate_names.empty()) {
    for (std::size_t j = 0; j < J; ++j) covariate_names.push_back("x" + std::to_string(j + 1));
  }
  if (covariate_names.size() != J) throw InputError("covariate names do not match covariate count");
  data.covariate_names = std::move(covariate_names);

  std::vector<double> costs;
  std::vector<double> x;
  std::vector<int> arm_labels;
  costs.reserve(records.size());
  x.reserve(records.size() * J);
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& r = records[i];
    const std::size_t row = i + 1;
    if (r.arm != 0 && r.arm != 1) throw InputError("record " + std::to_string(row) + ": arm must be 0 or 1");
    if (!std::isfinite(r.cost) || r.cost < 0.0) {
      throw InputError("record " + std::to_string(row) + ": cost must be finite and >= 0");
    }
    if (r.covariates.size() != J) {
      throw InputError("record " + std::to_string(row) + ": expected " + std::to_string(J) +
                       " covariates");
    }
    for (double v : r.covariates) {
      if (!std::isfinite(v)) throw InputError("record " + std::to_string(row) + ": covariate is not finite");
    }
    check_effect_support(effect_family, r.eff, row, data.warnings);
    costs.push_back(r.cost);
    arm_labels.push_back(r.arm);
    x.insert(x.end(), r.covariates.begin(), r.covariates.end());
  }

  const auto zero = derive_zero_indicators(costs);
  auto centred = center_covariates(x, J, arm_labels);
  data.warnings.insert(data.warnings.end(), centred.warnings.begin(), centred.warnings.end());

  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& a = data.arms[records[i].arm];
    a.eff.push_back(records[i].eff);
    a.cost.push_back(records[i].cost);
    a.zero.push_back(zero[i]);
    for (std::size_t j = 0; j < J; ++j) a.z.push_back(centred.z[i * J + j]);
  }
  for (int t = 0; t < kArms; ++t) {
    auto& a = data.arms[t];
    if (a.n() == 0) throw InputError("arm " + std::to_string(t) + " has no records");
    a.covariate_means = centred.means[t];
    for (std::size_t i = 0; i < a.n(); ++i) {
      if (a.zero[i]) {
        ++a.n_null;
      } else {
        ++a.n_pos;
        a.sum_cost += a.cost[i];
        a.sum_log_cost += std::log(a.cost[i]);
      }
    }
    const double m = a.mean_pos_cost();
    const double ml = a.mean_pos_log_cost();
    for (std::size_t i = 0; i < a.n(); ++i) {
      if (a.zero[i]) continue;
      a.centred_ss_cost += (a.cost[i] - m) * (a.cost[i] - m);
      const double dl = std::log(a.cost[i]) - ml;
      a.centred_ss_log_cost += dl * dl;
    }
    if (effect_family == EffectFamily::Beta || effect_family == EffectFamily::Gamma) {
      a.log_eff.resize(a.n());
      a.log1m_eff.resize(a.n());
      for (std::size_t i = 0; i < a.n(); ++i) {
        a.log_eff[i] = std::log(a.eff[i]);
        a.log1m_eff[i] = effect_family == EffectFamily::Beta ? std::log1p(-a.eff[i]) : 0.0;
      }
    }
  }
  data.records = std::move(records);
  return data;
}

MomentPair gamma_moments(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate)) {
    throw DomainError("gamma_moments: shape and rate must be positive and finite");
  }
  return {shape / rate, std::sqrt(shape) / rate};
}

NativeParams gamma_from_moments(double psi, double zeta) {
  if (!(psi > 0.0) || !(zeta > 0.0)) {
    throw DomainError("gamma_from_moments: mean and sd must be positive");
  }
  const double rate = psi / (zeta * zeta);
  return {psi * rate, rate};
}

MomentPair lognormal_moments(double log_mean, double log_sd) {
  if (!(log_sd > 0.0) || !std::isfinite(log_mean) || !std::isfinite(log_sd)) {
    throw DomainError("lognormal_moments: log-sd must be positive and parameters finite");
  }
  const double s2 = log_sd * log_sd;
  const double psi = std::exp(log_mean + 0.5 * s2);
  const double zeta = psi * std::sqrt(std::expm1(s2));
  if (!std::isfinite(psi) || !std::isfinite(zeta)) {
    throw DomainError("lognormal_moments: parameters imply moments that are not representable");
  }
  return {psi, zeta};
}

NativeParams lognormal_from_moments(double psi, double zeta) {
  if (!(psi > 0.0) || !(zeta > 0.0)) {
    throw DomainError("lognormal_from_moments: mean and sd must be positive");
  }
  const double r = zeta / psi;
  const double s2 = std::log1p(r * r);
  return {std::log(psi) - 0.5 * s2, std::sqrt(s2)};
}

NativeParams cost_from_moments(CostFamily f, double psi, double zeta) {
  switch (f) {
    case CostFamily::Gamma: return gamma_from_moments(psi, zeta);
    case CostFamily::LogNormal: return lognormal_from_moments(psi, zeta);
    case CostFamily::Normal:
      if (!(zeta > 0.0)) throw DomainError("normal cost: sd must be positive");
      return {psi, zeta};
  }
  return {psi, zeta};
}

NullComponent null_component(const ModelSpec& spec) {
  switch (spec.cost_family) {
    case CostFamily::Gamma: {
      const NativeParams native{spec.w, spec.W};
      return {native, gamma_moments(native.eta, native.lambda)};
    }
    case CostFamily::LogNormal: {
      const NativeParams native{-spec.W, spec.w};
      return {native, lognormal_moments(native.eta, native.lambda)};
    }
    case CostFamily::Normal: {
      const double sd = spec.w / spec.W;
      return {{0.0, sd}, {0.0, sd}};
    }
  }
  return {};
}

double null_mean(const ModelSpec& spec) {
  if (spec.null_likelihood == NullLikelihood::PointMass) return 0.0;
  return null_component(spec).moments.psi;
}

double mixture_mean(double p, double psi0, double psi1) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("mixture_mean: p must lie in [0,1]");
  return (1.0 - p) * psi0 + p * psi1;
}

double inverse_logit(double x) {
  double v;
  if (x >= 0.0) {
    v = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    v = e / (1.0 + e);
  }
  constexpr double lo = std::numeric_limits<double>::min();
  constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  return std::clamp(v, lo, hi);
}

double inverse_logit_complement(double x) { return inverse_logit(-x); }

double logit(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("logit: argument must lie in (0,1)");
  return std::log(p) - std::log1p(-p);
}

double inverse_link(double x, Link link) {
  switch (link) {
    case Link::Logit: return inverse_logit(x);
    case Link::Log:
      return std::clamp(std::exp(x), std::numeric_limits<double>::min(),
                        std::numeric_limits<double>::max());
    case Link::Identity: return x;
  }
  return x;
}

double link_function(double mu, Link link) {
  switch (link) {
    case Link::Logit: return logit(mu);
    case Link::Log:
      if (!(mu > 0.0)) throw DomainError("log link: argument must be positive");
      return std::log(mu);
    case Link::Identity: return mu;
  }
  return mu;
}

double predict_zero_prob(std::span<const double> beta, std::span<const double> z) {
  if (beta.size() != z.size() + 1) {
    throw DomainError("predict_zero_prob: expected " + std::to_string(beta.size() - 1) +
                      " covariates, got " + std::to_string(z.size()));
  }
  double eta = beta[0];
  for (std::size_t j = 0; j < z.size(); ++j) eta += beta[j + 1] * z[j];
  return inverse_logit(eta);
}

DerivedQuantities derive(const ArmParams& arm, const ModelSpec& spec) {
  DerivedQuantities d;
  d.p = inverse_logit(arm.beta.at(0));
  d.mu_c = mixture_mean(d.p, arm.psi0, null_mean(spec));
  d.mu_e = inverse_link(arm.xi, spec.link);
  return d;
}

double log_prior_arm(const ArmParams& arm, const ModelSpec& spec) {
  if (!in_open_interval(arm.psi0, spec.H_psi) || !in_open_interval(arm.zeta0, spec.H_zeta)) {
    return -kInf;
  }
  double lp = -std::log(spec.H_psi) - std::log(spec.H_zeta);
  for (double b : arm.beta) {
    lp += spec.selection_prior.family == PriorFamily::Normal
              ? normal_logpdf(b, 0.0, spec.selection_prior.scale)
              : cauchy_logpdf(b, spec.selection_prior.scale);
  }
  lp += normal_logpdf(arm.xi, 0.0, spec.effect_prior_sd);
  lp += normal_logpdf(arm.gamma, 0.0, spec.effect_prior_sd);
  if (uses_tau(spec.effect_family)) {
    if (!(arm.tau > 0.0)) return -kInf;
    lp += normal_logpdf(std::log(arm.tau), 0.0, spec.effect_prior_sd);
  }
  return lp;
}

double log_prior(const ParamState& state, const ModelSpec& spec) {
  double lp = 0.0;
  for (const auto& a : state.arm) lp += log_prior_arm(a, spec);
  return lp;
}

double selection_loglik(const ArmParams& arm, const ArmData& data, std::size_t J) {
  const double b0 = arm.beta.at(0);
  if (J == 0) {
    return static_cast<double>(data.n_null) * log_sigmoid(b0) +
           static_cast<double>(data.n_pos) * log_sigmoid(-b0);
  }
  double ll = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    double eta = b0;
    const double* z = data.z.data() + i * J;
    for (std::size_t j = 0; j < J; ++j) eta += arm.beta[j + 1] * z[j];
    ll += data.zero[i] ? log_sigmoid(eta) : log_sigmoid(-eta);
  }
  return ll;
}

double cost_log_density(CostFamily f, NativeParams p, double c) {
  switch (f) {
    case CostFamily::Gamma:
      if (!(c > 0.0)) return -kInf;
      return p.eta * std::log(p.lambda) - std::lgamma(p.eta) + (p.eta - 1.0) * std::log(c) -
             p.lambda * c;
    case CostFamily::LogNormal: {
      if (!(c > 0.0)) return -kInf;
      const double lc = std::log(c);
      return -lc + normal_logpdf(lc, p.eta, p.lambda);
    }
    case CostFamily::Normal: return normal_logpdf(c, p.eta, p.lambda);
  }
  return -kInf;
}

double positive_cost_loglik(const ArmParams& arm, const ArmData& data, const ModelSpec& spec) {
  if (data.n_pos == 0) return 0.0;
  if (!(arm.psi0 > 0.0) || !(arm.zeta0 > 0.0)) return -kInf;
  const double n = static_cast<double>(data.n_pos);
  const NativeParams p = cost_from_moments(spec.cost_family, arm.psi0, arm.zeta0);
  switch (spec.cost_family) {
    case CostFamily::Gamma:
      return n * (p.eta * std::log(p.lambda) - std::lgamma(p.eta)) +
             (p.eta - 1.0) * data.sum_log_cost - p.lambda * data.sum_cost;
    case CostFamily::LogNormal: {
      const double dm = data.mean_pos_log_cost() - p.eta;
      const double ss = data.centred_ss_log_cost + n * dm * dm;
      return -data.sum_log_cost - n * (kLogSqrt2Pi + std::log(p.lambda)) -
             ss / (2.0 * p.lambda * p.lambda);
    }
    case CostFamily::Normal: {
      const double dm = data.mean_pos_cost() - p.eta;
      const double ss = data.centred_ss_cost + n * dm * dm;
      return -n * (kLogSqrt2Pi + std::log(p.lambda)) - ss / (2.0 * p.lambda * p.lambda);
    }
  }
  return -kInf;
}

double null_cost_loglik(const ArmData& data, const ModelSpec& spec) {
  if (spec.null_likelihood == NullLikelihood::PointMass || data.n_null == 0) return 0.0;
  const auto null = null_component(spec);
  return static_cast<double>(data.n_null) *
         cost_log_density(spec.cost_family, null.native, kNullCostEps);
}

double effect_log_density(EffectFamily f, double e, double mean, double tau) {
  switch (f) {
    case EffectFamily::Beta: {
      if (!(e > 0.0 && e < 1.0) || !(mean > 0.0 && mean < 1.0) || !(tau > 0.0)) return -kInf;
      const double a = mean * tau;
      const double b = (1.0 - mean) * tau;
      return std::lgamma(tau) - std::lgamma(a) - std::lgamma(b) + (a - 1.0) * std::log(e) +
             (b - 1.0) * std::log1p(-e);
    }
    case EffectFamily::Bernoulli:
      if (!(mean > 0.0 && mean < 1.0)) return -kInf;
      if (e == 1.0) return std::log(mean);
      if (e == 0.0) return std::log1p(-mean);
      return -kInf;
    case EffectFamily::Gamma: {
      if (!(e > 0.0) || !(mean > 0.0) || !(tau > 0.0)) return -kInf;
      const double rate = tau / mean;
      return tau * std::log(rate) - std::lgamma(tau) + (tau - 1.0) * std::log(e) - rate * e;
    }
    case EffectFamily::Normal:
      if (!(tau > 0.0)) return -kInf;
      return normal_logpdf(e, mean, 1.0 / std::sqrt(tau));
  }
  return -kInf;
}

double effect_loglik(const ArmParams& arm, const ArmData& data, const ModelSpec& spec,
                     double mu_c) {
  const std::size_t n = data.n();
  const double tau = arm.tau;
  double ll = 0.0;
  switch (spec.effect_family) {
    case EffectFamily::Beta: {
      if (!(tau > 0.0)) return -kInf;
      const double lg_tau = std::lgamma(tau);
      for (std::size_t i = 0; i < n; ++i) {
        const double lin = arm.xi + arm.gamma * (data.cost[i] - mu_c);
        const double a = inverse_logit(lin) * tau;
        const double b = inverse_logit_complement(lin) * tau;
        ll += lg_tau - std::lgamma(a) - std::lgamma(b) + (a - 1.0) * data.log_eff[i] +
              (b - 1.0) * data.log1m_eff[i];
      }
      break;
    }
    case EffectFamily::Bernoulli:
      for (std::size_t i = 0; i < n; ++i) {
        const double lin = arm.xi + arm.gamma * (data.cost[i] - mu_c);
        ll += data.eff[i] == 1.0 ? log_sigmoid(lin) : log_sigmoid(-lin);
      }
      break;
    case EffectFamily::Gamma: {
      if (!(tau > 0.0)) return -kInf;
      const double base = tau * std::log(tau) - std::lgamma(tau);
      for (std::size_t i = 0; i < n; ++i) {
        const double lin = arm.xi + arm.gamma * (data.cost[i] - mu_c);
        ll += base - tau * lin + (tau - 1.0) * data.log_eff[i] - tau * data.eff[i] * std::exp(-lin);
      }
      break;
    }
    case EffectFamily::Normal: {
      if (!(tau > 0.0)) return -kInf;
      const double base = 0.5 * std::log(tau) - kLogSqrt2Pi;
      for (std::size_t i = 0; i < n; ++i) {
        const double r = data.eff[i] - (arm.xi + arm.gamma * (data.cost[i] - mu_c));
        ll += base - 0.5 * tau * r * r;
      }
      break;
    }
  }
  return std::isnan(ll) ? -kInf : ll;
}

double LikelihoodTerms::total() const {
  double s = 0.0;
  for (int t = 0; t < kArms; ++t) s += selection[t] + positive_cost[t] + null_cost[t] + effect[t];
  return s;
}

LikelihoodTerms log_likelihood_terms(const ParamState& state, const TrialData& data,
                                     const ModelSpec& spec) {
  LikelihoodTerms terms;
  for (int t = 0; t < kArms; ++t) {
    const auto& a = state.arm[t];
    const auto& d = data.arms[t];
    terms.selection[t] = selection_loglik(a, d, data.n_covariates);
    terms.positive_cost[t] = positive_cost_loglik(a, d, spec);
    terms.null_cost[t] = null_cost_loglik(d, spec);
    const double p = inverse_logit(a.beta.at(0));
    terms.effect[t] = effect_loglik(a, d, spec, mixture_mean(p, a.psi0, null_mean(spec)));
  }
  return terms;
}

double log_likelihood(const ParamState& state, const TrialData& data, const ModelSpec& spec) {
  const double ll = log_likelihood_terms(state, data, spec).total();
  return std::isnan(ll) ? -kInf : ll;
}

}  // namespace hurdle
