#include "hurdle/econ.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hurdle/error.hpp"

namespace hurdle {

namespace {

double mean_of(const std::vector<double>& v) {
  if (v.empty()) throw InputError("no draws");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

void check_W_grid(const ModelSpec& spec, const std::vector<double>& grid) {
  if (grid.empty()) throw ConfigError("the W grid is empty");
  for (double W : grid) {
    if (!(W > spec.w)) throw ConfigError("every W in the grid must exceed w");
  }
}

}  // namespace

WtpGrid::WtpGrid(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw ConfigError("willingness-to-pay grid is empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) {
      throw ConfigError("willingness-to-pay values must be finite and nonnegative");
    }
    if (i > 0 && !(values_[i] > values_[i - 1])) {
      throw ConfigError("willingness-to-pay grid must be strictly increasing");
    }
  }
}

WtpGrid WtpGrid::range(double from, double to, double step) {
  if (!(step > 0.0) || !(to >= from)) throw ConfigError("invalid willingness-to-pay range");
  std::vector<double> v;
  const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) v.push_back(from + step * static_cast<double>(i));
  return WtpGrid(std::move(v));
}

OutcomeDraws outcome_draws(const PosteriorDraws& draws) {
  OutcomeDraws out;
  for (int t = 0; t < kArms; ++t) {
    out.mu_e[t] = draws.pooled("mu_e_" + std::to_string(t));
    out.mu_c[t] = draws.pooled("mu_c_" + std::to_string(t));
  }
  return out;
}

IncrementDraws increments(const OutcomeDraws& outcomes) {
  const std::size_t n = outcomes.mu_e[0].size();
  for (int t = 0; t < kArms; ++t) {
    if (outcomes.mu_e[t].size() != n || outcomes.mu_c[t].size() != n) {
      throw InputError("outcome draws for arm " + std::to_string(t) + " are missing or incomplete");
    }
  }
  if (n == 0) throw InputError("outcome draws are empty");
  IncrementDraws inc;
  inc.delta_e.resize(n);
  inc.delta_c.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    inc.delta_e[i] = outcomes.mu_e[1][i] - outcomes.mu_e[0][i];
    inc.delta_c[i] = outcomes.mu_c[1][i] - outcomes.mu_c[0][i];
  }
  return inc;
}

IncrementDraws increments(const PosteriorDraws& draws) { return increments(outcome_draws(draws)); }

double eib(const IncrementDraws& inc, double k) {
  return k * mean_of(inc.delta_e) - mean_of(inc.delta_c);
}

std::vector<CurvePoint> eib_curve(const IncrementDraws& inc, const WtpGrid& grid) {
  const double me = mean_of(inc.delta_e);
  const double mc = mean_of(inc.delta_c);
  std::vector<CurvePoint> out;
  for (double k : grid.values()) out.push_back({k, k * me - mc});
  return out;
}

std::optional<BreakEven> break_even(const IncrementDraws& inc) {
  const double me = mean_of(inc.delta_e);
  const double mc = mean_of(inc.delta_c);
  if (me == 0.0) return std::nullopt;
  const double k = mc / me;
  if (me > 0.0) {
    if (k < 0.0) return BreakEven{0.0, BreakEvenKind::Dominant};
    return BreakEven{k, BreakEvenKind::CostEffectiveAbove};
  }
  if (k < 0.0) return BreakEven{0.0, BreakEvenKind::Dominated};
  return BreakEven{k, BreakEvenKind::CostEffectiveBelow};
}

std::vector<CurvePoint> ceac(const IncrementDraws& inc, const WtpGrid& grid) {
  const std::size_t n = inc.size();
  if (n == 0) throw InputError("no draws");
  std::vector<CurvePoint> out;
  out.reserve(grid.size());
  for (double k : grid.values()) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) hits += (k * inc.delta_e[i] - inc.delta_c[i] > 0.0);
    out.push_back({k, static_cast<double>(hits) / static_cast<double>(n)});
  }
  return out;
}

std::vector<CurvePoint> evpi(const OutcomeDraws& outcomes, const WtpGrid& grid) {
  increments(outcomes);  // shape validation
  const std::size_t n = outcomes.size();
  const double dn = static_cast<double>(n);
  std::vector<CurvePoint> out;
  out.reserve(grid.size());
  for (double k : grid.values()) {
    double perfect = 0.0;
    std::array<double, kArms> expected{};
    for (std::size_t i = 0; i < n; ++i) {
      double best = -std::numeric_limits<double>::infinity();
      for (int t = 0; t < kArms; ++t) {
        const double nb = k * outcomes.mu_e[t][i] - outcomes.mu_c[t][i];
        expected[t] += nb;
        best = std::max(best, nb);
      }
      perfect += best;
    }
    const double current = *std::max_element(expected.begin(), expected.end()) / dn;
    // max of sums never exceeds sum of maxima, so rounding is the only source of a negative value.
    out.push_back({k, std::max(0.0, perfect / dn - current)});
  }
  return out;
}

std::vector<CePlaneRow> ce_plane_export(const IncrementDraws& inc) {
  std::vector<CePlaneRow> rows;
  rows.reserve(inc.size());
  for (std::size_t i = 0; i < inc.size(); ++i) rows.push_back({i + 1, inc.delta_e[i], inc.delta_c[i]});
  return rows;
}

std::vector<double> default_W_grid() { return {10.0, 100.0, 1000.0, 10000.0, 100000.0}; }

std::vector<SensitivityRow> sensitivity_over_W(const TrialData& data, const ModelSpec& spec,
                                               const McmcConfig& cfg,
                                               const std::vector<double>& W_grid,
                                               ConvergenceThresholds thresholds) {
  check_W_grid(spec, W_grid);
  std::vector<SensitivityRow> rows;
  for (std::size_t i = 0; i < W_grid.size(); ++i) {
    ModelSpec cell_spec = spec;
    cell_spec.W = W_grid[i];
    McmcConfig cell_cfg = cfg;
    if (i > 0) cell_cfg.seed = derive_seed(cfg.seed, i);
    const auto draws = fit(data, cell_spec, cell_cfg);

    double max_rhat = 0.0;
    double min_ess = std::numeric_limits<double>::infinity();
    for (const auto& d : convergence_report(draws)) {
      if (std::isnan(d.rhat) && draws.n_chains() >= 2) max_rhat = std::numeric_limits<double>::infinity();
      else if (!std::isnan(d.rhat)) max_rhat = std::max(max_rhat, d.rhat);
      min_ess = std::min(min_ess, std::isnan(d.ess) ? 0.0 : d.ess);
    }
    const bool converged = max_rhat <= thresholds.max_rhat && min_ess >= thresholds.min_ess;

    for (int t = 0; t < kArms; ++t) {
      auto values = draws.pooled("mu_c_" + std::to_string(t));
      SensitivityRow row;
      row.W = W_grid[i];
      row.arm = t;
      row.mean = mean(values);
      std::sort(values.begin(), values.end());
      row.q25 = quantile_sorted(values, 0.25);
      row.q75 = quantile_sorted(values, 0.75);
      row.q025 = quantile_sorted(values, 0.025);
      row.q975 = quantile_sorted(values, 0.975);
      row.max_rhat = max_rhat;
      row.min_ess = min_ess;
      row.converged = converged;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<DicSweepRow> dic_over_W(const TrialData& data, const ModelSpec& spec,
                                    const McmcConfig& cfg, const std::vector<double>& W_grid) {
  check_W_grid(spec, W_grid);
  std::vector<DicSweepRow> rows;
  for (double W : W_grid) {
    ModelSpec cell_spec = spec;
    cell_spec.W = W;
    const auto draws = fit(data, cell_spec, cfg);
    rows.push_back({W, dic(draws, data)});
  }
  return rows;
}

}  // namespace hurdle
