#include "hurdle/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hurdle/error.hpp"

namespace hurdle {

namespace {

void check_chains(std::span<const std::vector<double>> chains) {
  if (chains.size() < 2) throw DiagnosticError("rhat needs at least two chains");
  const std::size_t n = chains[0].size();
  if (n < 2) throw DiagnosticError("rhat needs chains of length >= 2");
  for (const auto& c : chains) {
    if (c.size() != n) throw DiagnosticError("rhat needs chains of equal length");
  }
}

double variance(std::span<const double> v) {
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / static_cast<double>(v.size() - 1);
}

double bounded_to_unconstrained(double v, double H) {
  return std::log(v / H) - std::log1p(-v / H);
}

}  // namespace

double mean(std::span<const double> v) {
  if (v.empty()) throw DiagnosticError("mean of an empty sequence");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) throw DiagnosticError("sd needs at least two values");
  return std::sqrt(variance(v));
}

double rhat(std::span<const std::vector<double>> chains) {
  check_chains(chains);
  const std::size_t m = chains.size();
  const double n = static_cast<double>(chains[0].size());
  std::vector<double> means;
  double w = 0.0;
  for (const auto& c : chains) {
    const double v = variance(c);
    if (!(v > 0.0)) throw DiagnosticError("rhat is undefined for a chain with zero variance");
    w += v;
    means.push_back(mean(c));
  }
  w /= static_cast<double>(m);
  const double b = n * variance(means);
  const double var_plus = (n - 1.0) / n * w + b / n;
  return std::sqrt(var_plus / w);
}

double split_rhat(std::span<const std::vector<double>> chains) {
  check_chains(chains);
  const std::size_t half = chains[0].size() / 2;
  if (half < 2) throw DiagnosticError("split rhat needs chains of length >= 4");
  std::vector<std::vector<double>> split;
  for (const auto& c : chains) {
    split.emplace_back(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(half));
    split.emplace_back(c.end() - static_cast<std::ptrdiff_t>(half), c.end());
  }
  return rhat(split);
}

double ess(std::span<const double> chain) {
  const std::size_t n = chain.size();
  if (n < 10) throw DiagnosticError("ess needs at least 10 values");
  const double m = mean(chain);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = chain[i] - m;
  double c0 = 0.0;
  for (double v : x) c0 += v * v;
  if (!(c0 > 0.0)) throw DiagnosticError("ess is undefined for a chain with zero variance");

  auto rho = [&](std::size_t k) {
    double s = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) s += x[i] * x[i + k];
    return s / c0;
  };

  double sum_gamma = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < n; k += 2) {
    double g = rho(k) + rho(k + 1);
    if (!(g > 0.0)) break;
    g = std::min(g, prev);
    sum_gamma += g;
    prev = g;
  }
  const double tau = std::max(-1.0 + 2.0 * sum_gamma, 1.0 / std::log10(static_cast<double>(n)));
  return static_cast<double>(n) / tau;
}

double ess_multi(std::span<const std::vector<double>> chains) {
  double total = 0.0;
  for (const auto& c : chains) total += ess(c);
  return total;
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DiagnosticError("quantile of an empty sequence");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile probability must lie in [0,1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

ParamState posterior_mean_state(const PosteriorDraws& draws) {
  const auto& spec = draws.spec;
  const std::size_t J = draws.n_covariates;
  ParamState acc;
  for (auto& a : acc.arm) {
    a.beta.assign(J + 1, 0.0);
    a.psi0 = a.zeta0 = a.xi = a.gamma = a.tau = 0.0;
  }
  double n = 0.0;
  for (const auto& chain : draws.chains) {
    for (const auto& d : chain) {
      n += 1.0;
      for (int t = 0; t < kArms; ++t) {
        const auto& s = d.state.arm[t];
        auto& a = acc.arm[t];
        for (std::size_t j = 0; j <= J; ++j) a.beta[j] += s.beta[j];
        a.psi0 += bounded_to_unconstrained(s.psi0, spec.H_psi);
        a.zeta0 += bounded_to_unconstrained(s.zeta0, spec.H_zeta);
        a.xi += s.xi;
        a.gamma += s.gamma;
        a.tau += std::log(s.tau);
      }
    }
  }
  if (n == 0.0) throw DiagnosticError("no draws to average");
  for (auto& a : acc.arm) {
    for (auto& b : a.beta) b /= n;
    a.psi0 = spec.H_psi * inverse_logit(a.psi0 / n);
    a.zeta0 = spec.H_zeta * inverse_logit(a.zeta0 / n);
    a.xi /= n;
    a.gamma /= n;
    a.tau = std::exp(a.tau / n);
  }
  return acc;
}

DicResult dic(const PosteriorDraws& draws, const TrialData& data) {
  if (draws.total_draws() < 2) throw DiagnosticError("dic needs at least two retained draws");
  double sum = 0.0;
  double n = 0.0;
  for (const auto& chain : draws.chains) {
    for (const auto& d : chain) {
      sum += -2.0 * log_likelihood(d.state, data, draws.spec);
      n += 1.0;
    }
  }
  DicResult r;
  r.d_bar = sum / n;
  const double ll_hat = log_likelihood(posterior_mean_state(draws), data, draws.spec);
  if (!std::isfinite(ll_hat)) {
    throw DiagnosticError(
        "log-likelihood at the posterior mean is not finite; the configuration is degenerate "
        "(check w, W and the null-cost likelihood mode)");
  }
  r.d_hat = -2.0 * ll_hat;
  r.p_d = r.d_bar - r.d_hat;
  r.dic = r.d_bar + r.p_d;
  if (r.p_d < -1.0) {
    std::ostringstream msg;
    msg << "effective number of parameters pD = " << r.p_d
        << " is negative; the posterior mean may be a poor plug-in estimate";
    r.warning = msg.str();
  }
  return r;
}

std::vector<std::string> default_summary_parameters() {
  return {"p_0", "psi0_0", "mu_c_0", "mu_e_0", "p_1", "psi0_1", "mu_c_1", "mu_e_1"};
}

SummaryRow summarize_values(const std::string& name, std::vector<double> values) {
  if (values.size() < 2) throw DiagnosticError("summary needs at least two draws");
  SummaryRow row;
  row.parameter = name;
  row.mean = mean(values);
  row.sd = sample_sd(values);
  std::sort(values.begin(), values.end());
  row.q025 = quantile_sorted(values, 0.025);
  row.q975 = quantile_sorted(values, 0.975);
  return row;
}

std::vector<SummaryRow> summarize(const PosteriorDraws& draws,
                                  const std::vector<std::string>& parameters) {
  std::vector<SummaryRow> rows;
  rows.reserve(parameters.size());
  for (const auto& name : parameters) rows.push_back(summarize_values(name, draws.pooled(name)));
  return rows;
}

std::vector<ParameterDiagnostics> convergence_report(const PosteriorDraws& draws, bool split) {
  std::vector<ParameterDiagnostics> out;
  for (const auto& name : draws.free_parameter_names()) {
    std::vector<std::vector<double>> chains;
    for (std::size_t c = 0; c < draws.n_chains(); ++c) chains.push_back(draws.column(name, c));
    ParameterDiagnostics d;
    d.parameter = name;
    try {
      d.rhat = chains.size() >= 2 ? (split ? split_rhat(chains) : rhat(chains))
                                  : std::numeric_limits<double>::quiet_NaN();
    } catch (const DiagnosticError&) {
      d.rhat = std::numeric_limits<double>::quiet_NaN();
    }
    try {
      d.ess = ess_multi(chains);
    } catch (const DiagnosticError&) {
      d.ess = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(d);
  }
  return out;
}

}  // namespace hurdle
