#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hurdle/diagnostics.hpp"
#include "hurdle/econ.hpp"
#include "hurdle/model.hpp"
#include "hurdle/sampler.hpp"
#include "hurdle/synth.hpp"

namespace hurdle {

namespace fs = std::filesystem;

// 17 significant digits; parses back to the identical double.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // Throws InputError naming the column when absent.
  std::size_t column_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
  // Names from `required` that are not in the header.
  std::vector<std::string> missing(const std::vector<std::string>& required) const;
};

// Header row plus all-numeric rows. Errors carry the 1-based line number.
CsvTable read_numeric_csv(const fs::path& path);

// Columns arm,eff,cost[,x1..xJ]. Applies the effect family's support rules.
TrialData read_dataset(const fs::path& path, EffectFamily effect_family = EffectFamily::Beta);
void write_dataset(const fs::path& path, const std::vector<TrialRecord>& records,
                   const std::vector<std::string>& covariate_names = {});

// Wide layout: chain, iteration, then PosteriorDraws::parameter_names().
void write_draws_csv(const fs::path& path, const PosteriorDraws& draws);
// mu_e_{t} and mu_c_{t} columns of a draws file, in row order.
OutcomeDraws read_outcome_draws(const fs::path& path);

void write_ce_plane_csv(const fs::path& path, const std::vector<CePlaneRow>& rows);
std::vector<CePlaneRow> read_ce_plane_csv(const fs::path& path);
void write_curve_csv(const fs::path& path, const std::string& value_name,
                     const std::vector<CurvePoint>& curve);

struct ModelSummary {
  std::string label;  // e.g. "gamma/beta"
  std::vector<SummaryRow> rows;
};

void write_summary_csv(const fs::path& path, const std::vector<ModelSummary>& models);
// Table with one Mean/SD/95% interval column group per model.
std::string summary_markdown(const std::vector<ModelSummary>& models);
std::string model_card(const ModelSpec& spec, const McmcConfig& cfg, const TrialData& data,
                       const std::string& digest);

std::string ce_plane_svg(const IncrementDraws& inc);
std::string ceac_svg(const std::vector<CurvePoint>& curve);
std::string sensitivity_svg(const std::vector<SensitivityRow>& rows,
                            const std::vector<std::string>& family_per_row);

struct RunConfig {
  fs::path data;
  fs::path out = "out";
  std::vector<CostFamily> cost_families{CostFamily::Gamma};
  ModelSpec spec = ModelSpec::case_study();
  bool W_explicit = false;
  McmcConfig mcmc;
  double wtp_min = 0.0;
  double wtp_max = 50000.0;
  double wtp_step = 100.0;
  std::vector<double> W_grid = default_W_grid();
  bool svg = true;
  double ess_warning = 100.0;
  double rhat_warning = 1.1;

  // Model for one cost family: W falls back to that family's default unless
  // it was set explicitly.
  ModelSpec spec_for(CostFamily family) const;
  WtpGrid wtp_grid() const;
  void validate() const;
};

// Nested JSON sections: data, out, model, mcmc, econ, sensitivity, report.
// Unknown keys are rejected.
RunConfig load_run_config(const fs::path& path);
RunConfig parse_run_config(const std::string& json_text);
TruthParams load_truth(const fs::path& path);

struct RunReport {
  std::vector<fs::path> artifacts;
  std::vector<std::string> warnings;
};

// fit: draws.csv, summary.csv, summary.md, diagnostics.csv, model_card.txt, dic.csv.
RunReport run_fit(const RunConfig& config);
// econ: ce_plane.csv, eib.csv, ceac.csv, evpi.csv, break_even.txt and optional SVGs.
RunReport run_econ(const RunConfig& config, const fs::path& draws_path);
// sens: sens_W.csv and sens_W.svg.
RunReport run_sens(const RunConfig& config);
RunReport run_simulate(const TruthParams& truth, std::size_t n_per_arm, std::uint64_t seed,
                       const fs::path& out_file);
// summary: summary table layout (plus per-parameter rhat/ESS) for an existing draws file.
std::string summarize_draws_file(const fs::path& draws_path);

}  // namespace hurdle
