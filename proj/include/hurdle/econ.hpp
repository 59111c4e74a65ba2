#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "hurdle/diagnostics.hpp"
#include "hurdle/model.hpp"
#include "hurdle/sampler.hpp"

namespace hurdle {

// Per-draw population means by arm, paired by (chain, index) order.
struct OutcomeDraws {
  std::array<std::vector<double>, kArms> mu_e;
  std::array<std::vector<double>, kArms> mu_c;
  std::size_t size() const { return mu_e[0].size(); }
};

struct IncrementDraws {
  std::vector<double> delta_e;  // mu_e1 - mu_e0
  std::vector<double> delta_c;  // mu_c1 - mu_c0
  std::size_t size() const { return delta_e.size(); }
};

// Willingness-to-pay values (currency per unit of effectiveness).
class WtpGrid {
 public:
  // Throws ConfigError unless values are nonnegative and strictly increasing.
  explicit WtpGrid(std::vector<double> values);
  static WtpGrid range(double from, double to, double step);
  static WtpGrid standard() { return range(0.0, 50000.0, 100.0); }

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<double> values_;
};

struct CurvePoint {
  double k;
  double value;
};

OutcomeDraws outcome_draws(const PosteriorDraws& draws);
IncrementDraws increments(const OutcomeDraws& outcomes);
IncrementDraws increments(const PosteriorDraws& draws);

double eib(const IncrementDraws& inc, double k);
std::vector<CurvePoint> eib_curve(const IncrementDraws& inc, const WtpGrid& grid);

enum class BreakEvenKind {
  // mean(delta_e) > 0: EIB > 0 for k > k*.
  CostEffectiveAbove,
  // mean(delta_e) > 0 and mean(delta_c) < 0: EIB > 0 for all k >= 0; k* clamped to 0.
  Dominant,
  // mean(delta_e) < 0: EIB > 0 for k < k*.
  CostEffectiveBelow,
  // mean(delta_e) < 0 and mean(delta_c) > 0: EIB < 0 for all k >= 0; k* clamped to 0.
  Dominated,
};

struct BreakEven {
  double k;
  BreakEvenKind kind;
};

// None when mean(delta_e) == 0.
std::optional<BreakEven> break_even(const IncrementDraws& inc);

std::vector<CurvePoint> ceac(const IncrementDraws& inc, const WtpGrid& grid);
std::vector<CurvePoint> evpi(const OutcomeDraws& outcomes, const WtpGrid& grid);

struct CePlaneRow {
  std::size_t draw;
  double delta_e;
  double delta_c;
};

std::vector<CePlaneRow> ce_plane_export(const IncrementDraws& inc);

struct SensitivityRow {
  double W = 0.0;
  int arm = 0;
  double mean = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
  double max_rhat = 0.0;
  double min_ess = 0.0;
  bool converged = true;
};

struct ConvergenceThresholds {
  double max_rhat = 1.1;
  double min_ess = 100.0;
};

// Refits the model at each W (w held fixed), summarising mu_c per arm. Grid
// cell i runs with seed derive_seed(cfg.seed, i) except cell 0, which keeps
// cfg.seed. Output is ordered by grid index, arm.
std::vector<SensitivityRow> sensitivity_over_W(const TrialData& data, const ModelSpec& spec,
                                               const McmcConfig& cfg,
                                               const std::vector<double>& W_grid,
                                               ConvergenceThresholds thresholds = {});

struct DicSweepRow {
  double W = 0.0;
  DicResult dic;
};

// DIC across W with common random numbers: every cell uses cfg.seed, so any
// difference between cells is attributable to W alone.
std::vector<DicSweepRow> dic_over_W(const TrialData& data, const ModelSpec& spec,
                                    const McmcConfig& cfg, const std::vector<double>& W_grid);

std::vector<double> default_W_grid();

}  // namespace hurdle
