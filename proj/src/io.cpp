#include "hurdle/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <json.hpp>
#include <regex>
#include <set>
#include <sstream>

#include "hurdle/error.hpp"

namespace hurdle {

namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return cells;
}

std::string where(const fs::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line) + ": ";
}

double parse_cell(const std::string& cell, const fs::path& path, std::size_t line,
                  const std::string& column) {
  if (cell.empty()) throw InputError(where(path, line) + "missing value in column '" + column + "'");
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw InputError(where(path, line) + "cannot parse '" + cell + "' in column '" + column + "'");
  }
  return v;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw InputError("write to '" + path.string() + "' failed");
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? sep : "") + parts[i];
  return s;
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

// Significant-digit formatting for human-facing tables.
std::string pretty(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "NA" : (v > 0 ? "Inf" : "-Inf");
  const double a = std::fabs(v);
  if (a != 0.0 && (a < 1e-3 || a >= 1e6)) {
    std::ostringstream s;
    s << std::scientific << std::setprecision(3) << v;
    return s.str();
  }
  return fixed(v, a >= 100 ? 3 : (a >= 1 ? 4 : 5));
}

std::string model_label(CostFamily c, EffectFamily e) {
  return std::string(to_string(c)) + "/" + std::string(to_string(e));
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

struct Axis {
  double lo, hi;
  double px_lo, px_hi;
  double operator()(double v) const {
    if (hi == lo) return 0.5 * (px_lo + px_hi);
    return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
  }
};

std::pair<double, double> padded_range(const std::vector<double>& v, bool include_zero) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double x : v) {
    if (!std::isfinite(x)) continue;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (!std::isfinite(lo)) return {0.0, 1.0};
  if (include_zero) {
    lo = std::min(lo, 0.0);
    hi = std::max(hi, 0.0);
  }
  const double pad = hi > lo ? 0.05 * (hi - lo) : (std::fabs(hi) > 0 ? 0.1 * std::fabs(hi) : 1.0);
  return {lo - pad, hi + pad};
}

std::string svg_open(int width, int height) {
  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return s.str();
}

std::string svg_text(double x, double y, const std::string& text, const std::string& anchor = "middle",
                     int size = 12, const std::string& extra = "") {
  std::ostringstream s;
  s << "<text x=\"" << fixed(x, 1) << "\" y=\"" << fixed(y, 1) << "\" font-family=\"sans-serif\" font-size=\""
    << size << "\" text-anchor=\"" << anchor << "\"" << extra << ">" << xml_escape(text) << "</text>\n";
  return s.str();
}

std::string svg_line(double x1, double y1, double x2, double y2, const std::string& stroke,
                     double width = 1.0, const std::string& extra = "") {
  std::ostringstream s;
  s << "<line x1=\"" << fixed(x1, 2) << "\" y1=\"" << fixed(y1, 2) << "\" x2=\"" << fixed(x2, 2)
    << "\" y2=\"" << fixed(y2, 2) << "\" stroke=\"" << stroke << "\" stroke-width=\"" << width << "\""
    << extra << "/>\n";
  return s.str();
}

std::string svg_frame(const Axis& x, const Axis& y, const std::string& xlabel, const std::string& ylabel,
                      const std::string& title) {
  std::string s;
  s += svg_line(x.px_lo, y.px_lo, x.px_hi, y.px_lo, "black");
  s += svg_line(x.px_lo, y.px_lo, x.px_lo, y.px_hi, "black");
  for (int i = 0; i <= 4; ++i) {
    const double vx = x.lo + (x.hi - x.lo) * i / 4.0;
    const double vy = y.lo + (y.hi - y.lo) * i / 4.0;
    s += svg_line(x(vx), y.px_lo, x(vx), y.px_lo + 4, "black");
    s += svg_text(x(vx), y.px_lo + 16, pretty(vx), "middle", 10);
    s += svg_line(x.px_lo - 4, y(vy), x.px_lo, y(vy), "black");
    s += svg_text(x.px_lo - 6, y(vy) + 3, pretty(vy), "end", 10);
  }
  s += svg_text(0.5 * (x.px_lo + x.px_hi), y.px_lo + 34, xlabel);
  const double cy = 0.5 * (y.px_lo + y.px_hi);
  s += svg_text(16, cy, ylabel, "middle", 12, " transform=\"rotate(-90 16 " + fixed(cy, 1) + ")\"");
  s += svg_text(0.5 * (x.px_lo + x.px_hi), 20, title, "middle", 14);
  return s;
}

// Strict reading of a JSON object: every key must be in `allowed`.
void check_keys(const json& obj, const std::string& section, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError("config section '" + section + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown key '" + key + "' in config section '" + section + "'");
    }
  }
}

template <class T>
T get_as(const json& obj, const std::string& key, const std::string& section) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config " + section + "." + key + ": " + e.what());
  }
}

std::vector<std::string> outcome_columns() {
  std::vector<std::string> cols;
  for (int t = 0; t < kArms; ++t) {
    cols.push_back("mu_e_" + std::to_string(t));
    cols.push_back("mu_c_" + std::to_string(t));
  }
  return cols;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::size_t CsvTable::column_index(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw InputError("missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

std::vector<double> CsvTable::column(const std::string& name) const {
  const std::size_t j = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[j]);
  return out;
}

std::vector<std::string> CsvTable::missing(const std::vector<std::string>& required) const {
  std::vector<std::string> out;
  for (const auto& name : required) {
    if (std::find(header.begin(), header.end(), name) == header.end()) out.push_back(name);
  }
  return out;
}

CsvTable read_numeric_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (table.header.empty()) {
      table.header = split_csv_line(line);
      if (!table.header.empty() && table.header[0].rfind("\xEF\xBB\xBF", 0) == 0) {
        table.header[0] = table.header[0].substr(3);
      }
      for (const auto& h : table.header) {
        if (h.empty()) throw InputError(where(path, line_no) + "empty column name in header");
      }
      continue;
    }
    const auto cells = split_csv_line(line);
    if (cells.size() != table.header.size()) {
      throw InputError(where(path, line_no) + "expected " + std::to_string(table.header.size()) +
                       " cells, found " + std::to_string(cells.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) row[j] = parse_cell(cells[j], path, line_no, table.header[j]);
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw InputError("'" + path.string() + "' has no header row");
  return table;
}

TrialData read_dataset(const fs::path& path, EffectFamily effect_family) {
  const CsvTable table = read_numeric_csv(path);
  if (table.header.size() < 3 || table.header[0] != "arm" || table.header[1] != "eff" ||
      table.header[2] != "cost") {
    throw InputError("'" + path.string() + "': header must start with arm,eff,cost");
  }
  const std::vector<std::string> names(table.header.begin() + 3, table.header.end());

  // Rows are numbered from line 2 when the header is the first line; blank
  // lines are rare enough that we report the data-row position instead.
  std::vector<TrialRecord> records;
  records.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    const std::size_t line = i + 2;
    if (r[0] != 0.0 && r[0] != 1.0) throw InputError(where(path, line) + "arm must be 0 or 1");
    if (!std::isfinite(r[2]) || r[2] < 0.0) throw InputError(where(path, line) + "cost must be finite and >= 0");
    TrialRecord rec;
    rec.arm = static_cast<int>(r[0]);
    rec.eff = r[1];
    rec.cost = r[2];
    rec.covariates.assign(r.begin() + 3, r.end());
    records.push_back(std::move(rec));
  }
  // make_trial_data numbers records from 1; translate to file lines.
  const auto relocate = [&](const std::string& msg) {
    static const std::regex rec(R"(^record (\d+): )");
    std::smatch m;
    if (std::regex_search(msg, m, rec)) return where(path, std::stoul(m[1].str()) + 1) + m.suffix().str();
    return path.string() + ": " + msg;
  };
  try {
    TrialData data = make_trial_data(std::move(records), effect_family, names);
    for (auto& w : data.warnings) w = relocate(w);
    return data;
  } catch (const InputError& e) {
    throw InputError(relocate(e.what()));
  }
}

void write_dataset(const fs::path& path, const std::vector<TrialRecord>& records,
                   const std::vector<std::string>& covariate_names) {
  auto out = open_out(path);
  out << "arm,eff,cost";
  for (const auto& n : covariate_names) out << ',' << n;
  out << '\n';
  for (const auto& r : records) {
    if (r.covariates.size() != covariate_names.size()) {
      throw InputError("record covariate count does not match the header");
    }
    out << r.arm << ',' << format_double(r.eff) << ',' << format_double(r.cost);
    for (double x : r.covariates) out << ',' << format_double(x);
    out << '\n';
  }
  if (!out) throw InputError("write to '" + path.string() + "' failed");
}

void write_draws_csv(const fs::path& path, const PosteriorDraws& draws) {
  const auto names = draws.parameter_names();
  std::vector<std::vector<std::vector<double>>> cols(draws.n_chains());
  for (std::size_t c = 0; c < draws.n_chains(); ++c) {
    for (const auto& n : names) cols[c].push_back(draws.column(n, c));
  }
  std::string text = "chain,iteration," + join(names, ",") + "\n";
  for (std::size_t c = 0; c < draws.n_chains(); ++c) {
    for (std::size_t i = 0; i < draws.chains[c].size(); ++i) {
      text += std::to_string(c + 1) + "," + std::to_string(draws.chains[c][i].iteration);
      for (const auto& col : cols[c]) text += "," + format_double(col[i]);
      text += '\n';
    }
  }
  write_text(path, text);
}

OutcomeDraws read_outcome_draws(const fs::path& path) {
  const CsvTable table = read_numeric_csv(path);
  const auto missing = table.missing(outcome_columns());
  if (!missing.empty()) {
    throw InputError("draws file '" + path.string() + "' is missing column(s): " + join(missing, ", "));
  }
  OutcomeDraws out;
  for (int t = 0; t < kArms; ++t) {
    out.mu_e[t] = table.column("mu_e_" + std::to_string(t));
    out.mu_c[t] = table.column("mu_c_" + std::to_string(t));
  }
  if (out.size() == 0) throw InputError("draws file '" + path.string() + "' has no rows");
  return out;
}

void write_ce_plane_csv(const fs::path& path, const std::vector<CePlaneRow>& rows) {
  std::string text = "draw,delta_e,delta_c\n";
  for (const auto& r : rows) {
    text += std::to_string(r.draw) + "," + format_double(r.delta_e) + "," + format_double(r.delta_c) + "\n";
  }
  write_text(path, text);
}

std::vector<CePlaneRow> read_ce_plane_csv(const fs::path& path) {
  const CsvTable table = read_numeric_csv(path);
  const auto missing = table.missing({"draw", "delta_e", "delta_c"});
  if (!missing.empty()) throw InputError("'" + path.string() + "' is missing column(s): " + join(missing, ", "));
  const auto d = table.column_index("draw");
  const auto e = table.column_index("delta_e");
  const auto c = table.column_index("delta_c");
  std::vector<CePlaneRow> rows;
  for (const auto& r : table.rows) rows.push_back({static_cast<std::size_t>(r[d]), r[e], r[c]});
  return rows;
}

void write_curve_csv(const fs::path& path, const std::string& value_name,
                     const std::vector<CurvePoint>& curve) {
  std::string text = "k," + value_name + "\n";
  for (const auto& p : curve) text += format_double(p.k) + "," + format_double(p.value) + "\n";
  write_text(path, text);
}

void write_summary_csv(const fs::path& path, const std::vector<ModelSummary>& models) {
  std::string text = "model,parameter,mean,sd,q2.5,q97.5\n";
  for (const auto& m : models) {
    for (const auto& r : m.rows) {
      text += m.label + "," + r.parameter + "," + format_double(r.mean) + "," + format_double(r.sd) + "," +
              format_double(r.q025) + "," + format_double(r.q975) + "\n";
    }
  }
  write_text(path, text);
}

std::string summary_markdown(const std::vector<ModelSummary>& models) {
  if (models.empty()) throw InputError("no model summaries to tabulate");
  std::ostringstream s;
  s << "# Posterior summaries\n\n";
  s << "| Parameter |";
  for (const auto& m : models) s << ' ' << m.label << " Mean | " << m.label << " SD | " << m.label << " 95% interval |";
  s << "\n|---|";
  for (std::size_t i = 0; i < models.size(); ++i) s << "---:|---:|---:|";
  s << '\n';
  for (std::size_t r = 0; r < models[0].rows.size(); ++r) {
    s << "| " << models[0].rows[r].parameter << " |";
    for (const auto& m : models) {
      if (r >= m.rows.size() || m.rows[r].parameter != models[0].rows[r].parameter) {
        throw InputError("model summaries do not share a row layout");
      }
      const auto& row = m.rows[r];
      s << ' ' << pretty(row.mean) << " | " << pretty(row.sd) << " | (" << pretty(row.q025) << ", "
        << pretty(row.q975) << ") |";
    }
    s << '\n';
  }
  return s.str();
}

std::string model_card(const ModelSpec& spec, const McmcConfig& cfg, const TrialData& data,
                       const std::string& digest) {
  const NullComponent null = null_component(spec);
  const Link link = spec.link;
  std::ostringstream s;
  s << std::setprecision(10);
  s << "Hurdle cost-effectiveness model\n";
  s << "===============================\n\n";
  s << "Data\n";
  for (int t = 0; t < kArms; ++t) {
    const auto& a = data.arms[t];
    s << "  arm " << t << ": n = " << a.n() << ", zero costs = " << a.n_null << ", positive costs = " << a.n_pos << '\n';
  }
  s << "  covariates: " << (data.n_covariates ? join(data.covariate_names, ", ") : std::string("none (intercept only)"))
    << "\n\n";

  s << "Selection model (structural zero cost)\n";
  s << "  d_i ~ Bernoulli(pi_i), logit(pi_i) = beta_0t + sum_j beta_jt z_ij (z centred per arm)\n";
  s << "  p_t = invlogit(beta_0t)\n";
  s << "  beta ~ " << to_string(spec.selection_prior.family) << "(0, " << spec.selection_prior.scale << ")"
    << (spec.selection_prior.family == PriorFamily::Normal ? " (sd)" : " (scale)") << "\n\n";

  s << "Cost model\n";
  s << "  positive costs: c ~ " << to_string(spec.cost_family) << " with mean psi_t0 and sd zeta_t0\n";
  s << "  psi_t0 ~ Uniform(0, " << spec.H_psi << "), zeta_t0 ~ Uniform(0, " << spec.H_zeta << ")\n";
  s << "  zero costs: fixed component with w = " << spec.w << ", W = " << spec.W << '\n';
  s << "    native parameters (" << null.native.eta << ", " << null.native.lambda << "), implied mean "
    << null.moments.psi << ", sd " << null.moments.zeta << '\n';
  s << "  null-cost likelihood: " << to_string(spec.null_likelihood) << '\n';
  s << "  population mean cost mu_c = (1 - p_t) psi_t0 + p_t psi_t1, psi_t1 = " << null_mean(spec) << "\n\n";

  s << "Effectiveness model\n";
  s << "  e ~ " << to_string(spec.effect_family) << ", " << to_string(link) << "(phi_i) = xi_t + gamma_t (c_i - mu_c)\n";
  s << "  xi_t, gamma_t ~ Normal(0, sd " << spec.effect_prior_sd << ")";
  if (uses_tau(spec.effect_family)) s << ", log tau_t ~ Normal(0, sd " << spec.effect_prior_sd << ")";
  s << "\n  mu_e = inverse link of xi_t\n\n";

  s << "Sampler\n";
  s << "  adaptive single-site random-walk Metropolis\n";
  s << "  chains = " << cfg.n_chains << ", iterations = " << cfg.n_iter << ", burn-in = " << cfg.n_burnin
    << ", thin = " << cfg.thin << " (" << cfg.retained_per_chain() << " draws per chain)\n";
  s << "  seed = " << cfg.seed << ", target acceptance = " << cfg.target_accept << '\n';
  s << "  configuration digest = " << digest << '\n';
  if (!data.warnings.empty()) {
    s << "\nData warnings\n";
    for (const auto& w : data.warnings) s << "  " << w << '\n';
  }
  return s.str();
}

std::string ce_plane_svg(const IncrementDraws& inc) {
  const int W = 640, H = 480;
  const auto [xlo, xhi] = padded_range(inc.delta_e, true);
  const auto [ylo, yhi] = padded_range(inc.delta_c, true);
  const Axis x{xlo, xhi, 80.0, W - 30.0};
  const Axis y{ylo, yhi, H - 60.0, 40.0};
  std::string s = svg_open(W, H);
  s += svg_frame(x, y, "Incremental effectiveness", "Incremental cost", "Cost-effectiveness plane");
  s += svg_line(x(0), y.px_lo, x(0), y.px_hi, "#888888", 1.0, " stroke-dasharray=\"4 3\"");
  s += svg_line(x.px_lo, y(0), x.px_hi, y(0), "#888888", 1.0, " stroke-dasharray=\"4 3\"");
  const std::size_t stride = std::max<std::size_t>(1, inc.size() / 4000);
  for (std::size_t i = 0; i < inc.size(); i += stride) {
    if (!std::isfinite(inc.delta_e[i]) || !std::isfinite(inc.delta_c[i])) continue;
    s += "<circle cx=\"" + fixed(x(inc.delta_e[i]), 2) + "\" cy=\"" + fixed(y(inc.delta_c[i]), 2) +
         "\" r=\"1.5\" fill=\"#1f5fa8\" fill-opacity=\"0.5\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string ceac_svg(const std::vector<CurvePoint>& curve) {
  const int W = 640, H = 480;
  std::vector<double> ks;
  for (const auto& p : curve) ks.push_back(p.k);
  const auto [xlo, xhi] = padded_range(ks, false);
  const Axis x{xlo, xhi, 80.0, W - 30.0};
  const Axis y{0.0, 1.0, H - 60.0, 40.0};
  std::string s = svg_open(W, H);
  s += svg_frame(x, y, "Willingness to pay", "Probability cost-effective", "Cost-effectiveness acceptability curve");
  std::string pts;
  for (const auto& p : curve) pts += fixed(x(p.k), 2) + "," + fixed(y(p.value), 2) + " ";
  s += "<polyline fill=\"none\" stroke=\"#b22222\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
  s += "</svg>\n";
  return s;
}

std::string sensitivity_svg(const std::vector<SensitivityRow>& rows,
                            const std::vector<std::string>& family_per_row) {
  if (rows.size() != family_per_row.size()) throw InputError("sensitivity rows and labels differ in length");
  std::vector<std::string> families;
  std::vector<double> Ws;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (std::find(families.begin(), families.end(), family_per_row[i]) == families.end()) {
      families.push_back(family_per_row[i]);
    }
    if (std::find(Ws.begin(), Ws.end(), rows[i].W) == Ws.end()) Ws.push_back(rows[i].W);
  }
  const char* colours[] = {"#c0392b", "#2155a3", "#2e8b57", "#8e44ad"};
  const int panel_w = 400, H = 420, margin = 70;
  const int W = kArms * panel_w + 20;
  std::string s = svg_open(W, H);
  for (int t = 0; t < kArms; ++t) {
    std::vector<double> vals;
    for (const auto& r : rows) {
      if (r.arm == t) {
        vals.push_back(r.q025);
        vals.push_back(r.q975);
      }
    }
    const auto [ylo, yhi] = padded_range(vals, false);
    const double left = t * panel_w + margin;
    const Axis x{0.0, static_cast<double>(Ws.size()), left, left + panel_w - margin - 10.0};
    const Axis y{ylo, yhi, H - 60.0, 40.0};
    s += svg_line(x.px_lo, y.px_lo, x.px_hi, y.px_lo, "black");
    s += svg_line(x.px_lo, y.px_lo, x.px_lo, y.px_hi, "black");
    for (int i = 0; i <= 4; ++i) {
      const double vy = ylo + (yhi - ylo) * i / 4.0;
      s += svg_line(x.px_lo - 4, y(vy), x.px_lo, y(vy), "black");
      s += svg_text(x.px_lo - 6, y(vy) + 3, pretty(vy), "end", 10);
    }
    for (std::size_t g = 0; g < Ws.size(); ++g) {
      s += svg_text(x(g + 0.5), y.px_lo + 16, pretty(Ws[g]), "middle", 10);
    }
    s += svg_text(0.5 * (x.px_lo + x.px_hi), y.px_lo + 34, "W");
    s += svg_text(0.5 * (x.px_lo + x.px_hi), 22, "Mean cost, arm " + std::to_string(t), "middle", 14);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      if (r.arm != t) continue;
      const auto g = static_cast<double>(std::find(Ws.begin(), Ws.end(), r.W) - Ws.begin());
      const auto f = static_cast<std::size_t>(std::find(families.begin(), families.end(), family_per_row[i]) -
                                              families.begin());
      const double offset = families.size() > 1 ? (static_cast<double>(f) / (families.size() - 1) - 0.5) * 0.4 : 0.0;
      const double cx = x(g + 0.5 + offset);
      const std::string col = colours[f % 4];
      s += svg_line(cx, y(r.q025), cx, y(r.q975), col, 1.0);
      s += svg_line(cx, y(r.q25), cx, y(r.q75), col, 4.0);
      s += "<circle cx=\"" + fixed(cx, 2) + "\" cy=\"" + fixed(y(r.mean), 2) + "\" r=\"3.5\" fill=\"" +
           (r.converged ? col : std::string("white")) + "\" stroke=\"" + col + "\"/>\n";
    }
  }
  for (std::size_t f = 0; f < families.size(); ++f) {
    const double lx = 20.0 + 150.0 * static_cast<double>(f);
    s += "<circle cx=\"" + fixed(lx, 1) + "\" cy=\"" + fixed(H - 12.0, 1) + "\" r=\"4\" fill=\"" + colours[f % 4] + "\"/>\n";
    s += svg_text(lx + 8, H - 8.0, families[f], "start", 11);
  }
  s += "</svg>\n";
  return s;
}

ModelSpec RunConfig::spec_for(CostFamily family) const {
  ModelSpec s = spec;
  s.cost_family = family;
  if (!W_explicit) s.W = default_W(family);
  return s;
}

WtpGrid RunConfig::wtp_grid() const { return WtpGrid::range(wtp_min, wtp_max, wtp_step); }

void RunConfig::validate() const {
  if (cost_families.empty()) throw ConfigError("at least one cost family is required");
  for (std::size_t i = 0; i < cost_families.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (cost_families[i] == cost_families[j]) throw ConfigError("cost families must be distinct");
    }
    spec_for(cost_families[i]).validate();
  }
  (void)mcmc.validate();
  (void)wtp_grid();
  if (W_grid.empty()) throw ConfigError("the W grid is empty");
  for (double W : W_grid) {
    if (!(W > spec.w)) throw ConfigError("every W in the sensitivity grid must exceed w");
  }
  if (!(ess_warning >= 0.0) || !(rhat_warning >= 1.0)) throw ConfigError("invalid convergence thresholds");
  if (out.empty()) throw ConfigError("output directory is empty");
  std::error_code ec;
  if (fs::exists(out, ec) && !fs::is_directory(out, ec)) {
    throw ConfigError("output path '" + out.string() + "' exists and is not a directory");
  }
}

RunConfig parse_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(root, "<root>", {"data", "out", "model", "mcmc", "econ", "sensitivity", "report"});
  RunConfig cfg;
  if (root.contains("data")) cfg.data = get_as<std::string>(root, "data", "<root>");
  if (root.contains("out")) cfg.out = get_as<std::string>(root, "out", "<root>");

  if (root.contains("model")) {
    const auto& m = root["model"];
    check_keys(m, "model", {"cost_families", "effect_family", "link", "w", "W", "H_psi", "H_zeta",
                            "selection_prior", "effect_prior_sd", "null_likelihood"});
    if (m.contains("cost_families")) {
      cfg.cost_families.clear();
      for (const auto& f : get_as<std::vector<std::string>>(m, "cost_families", "model")) {
        cfg.cost_families.push_back(parse_cost_family(f));
      }
    }
    if (m.contains("effect_family")) {
      cfg.spec.effect_family = parse_effect_family(get_as<std::string>(m, "effect_family", "model"));
      cfg.spec.link = canonical_link(cfg.spec.effect_family);
    }
    if (m.contains("link")) cfg.spec.link = parse_link(get_as<std::string>(m, "link", "model"));
    if (m.contains("w")) cfg.spec.w = get_as<double>(m, "w", "model");
    if (m.contains("W")) {
      cfg.spec.W = get_as<double>(m, "W", "model");
      cfg.W_explicit = true;
    }
    if (m.contains("H_psi")) cfg.spec.H_psi = get_as<double>(m, "H_psi", "model");
    if (m.contains("H_zeta")) cfg.spec.H_zeta = get_as<double>(m, "H_zeta", "model");
    if (m.contains("effect_prior_sd")) cfg.spec.effect_prior_sd = get_as<double>(m, "effect_prior_sd", "model");
    if (m.contains("null_likelihood")) {
      cfg.spec.null_likelihood = parse_null_likelihood(get_as<std::string>(m, "null_likelihood", "model"));
    }
    if (m.contains("selection_prior")) {
      const auto& p = m["selection_prior"];
      check_keys(p, "model.selection_prior", {"family", "scale"});
      if (p.contains("family")) {
        cfg.spec.selection_prior.family = parse_prior_family(get_as<std::string>(p, "family", "model.selection_prior"));
      }
      if (p.contains("scale")) cfg.spec.selection_prior.scale = get_as<double>(p, "scale", "model.selection_prior");
    }
  }
  if (root.contains("mcmc")) {
    const auto& m = root["mcmc"];
    check_keys(m, "mcmc", {"n_iter", "n_burnin", "thin", "n_chains", "seed", "adapt_window", "target_accept", "n_threads"});
    if (m.contains("n_iter")) cfg.mcmc.n_iter = get_as<int>(m, "n_iter", "mcmc");
    if (m.contains("n_burnin")) cfg.mcmc.n_burnin = get_as<int>(m, "n_burnin", "mcmc");
    if (m.contains("thin")) cfg.mcmc.thin = get_as<int>(m, "thin", "mcmc");
    if (m.contains("n_chains")) cfg.mcmc.n_chains = get_as<int>(m, "n_chains", "mcmc");
    if (m.contains("seed")) cfg.mcmc.seed = get_as<std::uint64_t>(m, "seed", "mcmc");
    if (m.contains("adapt_window")) cfg.mcmc.adapt_window = get_as<int>(m, "adapt_window", "mcmc");
    if (m.contains("target_accept")) cfg.mcmc.target_accept = get_as<double>(m, "target_accept", "mcmc");
    if (m.contains("n_threads")) cfg.mcmc.n_threads = get_as<int>(m, "n_threads", "mcmc");
  }
  if (root.contains("econ")) {
    const auto& e = root["econ"];
    check_keys(e, "econ", {"wtp_min", "wtp_max", "wtp_step"});
    if (e.contains("wtp_min")) cfg.wtp_min = get_as<double>(e, "wtp_min", "econ");
    if (e.contains("wtp_max")) cfg.wtp_max = get_as<double>(e, "wtp_max", "econ");
    if (e.contains("wtp_step")) cfg.wtp_step = get_as<double>(e, "wtp_step", "econ");
  }
  if (root.contains("sensitivity")) {
    const auto& s = root["sensitivity"];
    check_keys(s, "sensitivity", {"W_grid"});
    if (s.contains("W_grid")) cfg.W_grid = get_as<std::vector<double>>(s, "W_grid", "sensitivity");
  }
  if (root.contains("report")) {
    const auto& r = root["report"];
    check_keys(r, "report", {"svg", "ess_warning", "rhat_warning"});
    if (r.contains("svg")) cfg.svg = get_as<bool>(r, "svg", "report");
    if (r.contains("ess_warning")) cfg.ess_warning = get_as<double>(r, "ess_warning", "report");
    if (r.contains("rhat_warning")) cfg.rhat_warning = get_as<double>(r, "rhat_warning", "report");
  }
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  RunConfig cfg = parse_run_config(buf.str());
  // Relative data paths in a config file are resolved against its directory.
  if (!cfg.data.empty() && cfg.data.is_relative() && path.has_parent_path()) {
    const auto candidate = path.parent_path() / cfg.data;
    if (!fs::exists(cfg.data) && fs::exists(candidate)) cfg.data = candidate;
  }
  return cfg;
}

TruthParams load_truth(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open truth file '" + path.string() + "'");
  json root;
  try {
    root = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("truth file is not valid JSON: ") + e.what());
  }
  check_keys(root, "<truth>", {"cost_family", "effect_family", "arms"});
  TruthParams truth = TruthParams::case_study();
  if (root.contains("cost_family")) truth.cost_family = parse_cost_family(get_as<std::string>(root, "cost_family", "truth"));
  if (root.contains("effect_family")) {
    truth.effect_family = parse_effect_family(get_as<std::string>(root, "effect_family", "truth"));
  }
  if (root.contains("arms")) {
    const auto& arms = root["arms"];
    if (!arms.is_array() || arms.size() != kArms) throw ConfigError("truth.arms must be an array of two objects");
    for (int t = 0; t < kArms; ++t) {
      const auto& a = arms[t];
      const std::string sec = "truth.arms[" + std::to_string(t) + "]";
      check_keys(a, sec, {"p", "psi0", "zeta0", "xi", "mu_e", "gamma", "tau"});
      auto& dst = truth.arm[t];
      if (a.contains("p")) dst.p = get_as<double>(a, "p", sec);
      if (a.contains("psi0")) dst.psi0 = get_as<double>(a, "psi0", sec);
      if (a.contains("zeta0")) dst.zeta0 = get_as<double>(a, "zeta0", sec);
      if (a.contains("xi") && a.contains("mu_e")) throw ConfigError(sec + ": give xi or mu_e, not both");
      if (a.contains("xi")) dst.xi = get_as<double>(a, "xi", sec);
      if (a.contains("mu_e")) dst.xi = link_function(get_as<double>(a, "mu_e", sec), canonical_link(truth.effect_family));
      if (a.contains("gamma")) dst.gamma = get_as<double>(a, "gamma", sec);
      if (a.contains("tau")) dst.tau = get_as<double>(a, "tau", sec);
    }
  }
  truth.validate();
  return truth;
}

RunReport run_fit(const RunConfig& config) {
  config.validate();
  if (config.data.empty()) throw ConfigError("no data file given");
  if (!fs::exists(config.data)) throw InputError("data file '" + config.data.string() + "' does not exist");
  const TrialData data = read_dataset(config.data, config.spec.effect_family);
  fs::create_directories(config.out);

  RunReport report;
  report.warnings = data.warnings;
  for (const auto& w : config.mcmc.validate()) report.warnings.push_back(w);

  std::vector<ModelSummary> summaries;
  std::string diag_text = "model,parameter,rhat,ess,acceptance,flag\n";
  std::string dic_text = "model,W,d_bar,d_hat,p_d,dic\n";
  std::string card;

  for (std::size_t f = 0; f < config.cost_families.size(); ++f) {
    const ModelSpec spec = config.spec_for(config.cost_families[f]);
    const std::string label = model_label(spec.cost_family, spec.effect_family);
    const PosteriorDraws draws = fit(data, spec, config.mcmc);
    for (const auto& w : draws.warnings) report.warnings.push_back(label + ": " + w);

    if (f == 0) {
      write_draws_csv(config.out / "draws.csv", draws);
      report.artifacts.push_back(config.out / "draws.csv");
    } else {
      const auto p = config.out / ("draws_" + std::string(to_string(spec.cost_family)) + ".csv");
      write_draws_csv(p, draws);
      report.artifacts.push_back(p);
    }

    summaries.push_back({label, summarize(draws, default_summary_parameters())});

    const auto diags = convergence_report(draws);
    for (std::size_t i = 0; i < diags.size(); ++i) {
      double acc = 0.0;
      for (const auto& chain_acc : draws.acceptance) acc += chain_acc[i];
      acc /= static_cast<double>(draws.acceptance.size());
      std::string flag = "ok";
      if (!(diags[i].ess >= config.ess_warning)) flag = "low_ess";
      if (draws.n_chains() >= 2 && !(diags[i].rhat < config.rhat_warning)) flag = flag == "ok" ? "high_rhat" : flag + ";high_rhat";
      if (flag != "ok") {
        report.warnings.push_back(label + ": " + diags[i].parameter + " rhat=" + pretty(diags[i].rhat) +
                                  " ess=" + pretty(diags[i].ess));
      }
      diag_text += label + "," + diags[i].parameter + "," + format_double(diags[i].rhat) + "," +
                   format_double(diags[i].ess) + "," + format_double(acc) + "," + flag + "\n";
    }

    const DicResult d = dic(draws, data);
    if (!d.warning.empty()) report.warnings.push_back(label + ": " + d.warning);
    dic_text += label + "," + format_double(spec.W) + "," + format_double(d.d_bar) + "," + format_double(d.d_hat) +
                "," + format_double(d.p_d) + "," + format_double(d.dic) + "\n";
    if (f) card += "\n\n";
    card += model_card(spec, config.mcmc, data, draws.config_digest());
    card += "  DIC = " + fixed(d.dic, 3) + " (pD = " + fixed(d.p_d, 3) + ")\n";
  }

  std::string md = summary_markdown(summaries);
  std::istringstream dic_lines(dic_text);
  std::string line;
  std::getline(dic_lines, line);
  md += "\n\n| Model | W | DIC | pD |\n|---|---:|---:|---:|\n";
  while (std::getline(dic_lines, line)) {
    const auto cells = split_csv_line(line);
    md += "| " + cells[0] + " | " + pretty(std::stod(cells[1])) + " | " + fixed(std::stod(cells[5]), 3) + " | " +
          fixed(std::stod(cells[4]), 3) + " |\n";
  }

  const std::vector<std::pair<std::string, std::string>> files = {
      {"summary.csv", ""}, {"summary.md", md}, {"diagnostics.csv", diag_text}, {"dic.csv", dic_text}, {"model_card.txt", card}};
  write_summary_csv(config.out / "summary.csv", summaries);
  for (const auto& [name, text] : files) {
    if (name != "summary.csv") write_text(config.out / name, text);
    report.artifacts.push_back(config.out / name);
  }
  return report;
}

RunReport run_econ(const RunConfig& config, const fs::path& draws_path) {
  const WtpGrid grid = config.wtp_grid();
  const OutcomeDraws outcomes = read_outcome_draws(draws_path);
  const IncrementDraws inc = increments(outcomes);
  fs::create_directories(config.out);
  RunReport report;

  write_ce_plane_csv(config.out / "ce_plane.csv", ce_plane_export(inc));
  write_curve_csv(config.out / "eib.csv", "eib", eib_curve(inc, grid));
  const auto acceptability = ceac(inc, grid);
  write_curve_csv(config.out / "ceac.csv", "probability", acceptability);
  write_curve_csv(config.out / "evpi.csv", "evpi", evpi(outcomes, grid));
  for (const char* n : {"ce_plane.csv", "eib.csv", "ceac.csv", "evpi.csv"}) report.artifacts.push_back(config.out / n);

  std::ostringstream be;
  const double me = mean(inc.delta_e);
  const double mc = mean(inc.delta_c);
  be << "draws " << inc.size() << '\n';
  be << "mean_delta_e " << format_double(me) << '\n';
  be << "mean_delta_c " << format_double(mc) << '\n';
  const auto k = break_even(inc);
  if (!k) {
    be << "break_even none\nnote mean incremental effectiveness is zero\n";
  } else {
    be << "break_even " << format_double(k->k) << '\n';
    switch (k->kind) {
      case BreakEvenKind::CostEffectiveAbove: be << "note expected incremental benefit is positive above the break-even value\n"; break;
      case BreakEvenKind::Dominant: be << "note dominant: lower cost and higher effectiveness; break-even clamped to 0\n"; break;
      case BreakEvenKind::CostEffectiveBelow: be << "note expected incremental benefit is positive below the break-even value\n"; break;
      case BreakEvenKind::Dominated: be << "note dominated: higher cost and lower effectiveness; break-even clamped to 0\n"; break;
    }
  }
  write_text(config.out / "break_even.txt", be.str());
  report.artifacts.push_back(config.out / "break_even.txt");

  if (config.svg) {
    write_text(config.out / "ce_plane.svg", ce_plane_svg(inc));
    write_text(config.out / "ceac.svg", ceac_svg(acceptability));
    report.artifacts.push_back(config.out / "ce_plane.svg");
    report.artifacts.push_back(config.out / "ceac.svg");
  }
  return report;
}

RunReport run_sens(const RunConfig& config) {
  config.validate();
  if (config.data.empty()) throw ConfigError("no data file given");
  if (!fs::exists(config.data)) throw InputError("data file '" + config.data.string() + "' does not exist");
  const TrialData data = read_dataset(config.data, config.spec.effect_family);
  fs::create_directories(config.out);
  RunReport report;
  report.warnings = data.warnings;

  std::vector<SensitivityRow> rows;
  std::vector<std::string> labels;
  for (const CostFamily f : config.cost_families) {
    const ModelSpec spec = config.spec_for(f);
    const auto cells = sensitivity_over_W(data, spec, config.mcmc, config.W_grid,
                                          {config.rhat_warning, config.ess_warning});
    for (const auto& r : cells) {
      rows.push_back(r);
      labels.emplace_back(to_string(f));
      if (!r.converged && r.arm == 0) {
        report.warnings.push_back(std::string(to_string(f)) + ": cell W=" + pretty(r.W) + " failed convergence checks");
      }
    }
  }
  std::string text = "W,arm,mean,q25,q75,q2.5,q97.5,converged,max_rhat,min_ess,family\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    text += format_double(r.W) + "," + std::to_string(r.arm) + "," + format_double(r.mean) + "," +
            format_double(r.q25) + "," + format_double(r.q75) + "," + format_double(r.q025) + "," +
            format_double(r.q975) + "," + (r.converged ? "1" : "0") + "," + format_double(r.max_rhat) + "," +
            format_double(r.min_ess) + "," + labels[i] + "\n";
  }
  write_text(config.out / "sens_W.csv", text);
  write_text(config.out / "sens_W.svg", sensitivity_svg(rows, labels));
  report.artifacts.push_back(config.out / "sens_W.csv");
  report.artifacts.push_back(config.out / "sens_W.svg");
  return report;
}

RunReport run_simulate(const TruthParams& truth, std::size_t n_per_arm, std::uint64_t seed,
                       const fs::path& out_file) {
  if (n_per_arm == 0) throw ConfigError("n per arm must be positive");
  const auto records = simulate_records(truth, n_per_arm, seed);
  write_dataset(out_file, records);
  RunReport report;
  report.artifacts.push_back(out_file);
  return report;
}

std::string summarize_draws_file(const fs::path& draws_path) {
  const CsvTable table = read_numeric_csv(draws_path);
  const auto required = default_summary_parameters();
  auto missing = table.missing(required);
  for (const auto& m : table.missing({"chain"})) missing.push_back(m);
  if (!missing.empty()) {
    throw InputError("draws file '" + draws_path.string() + "' is missing column(s): " + join(missing, ", "));
  }
  ModelSummary summary{"posterior", {}};
  for (const auto& name : required) summary.rows.push_back(summarize_values(name, table.column(name)));
  std::string out = summary_markdown({summary});

  const auto chain_col = table.column("chain");
  std::vector<double> chain_ids = chain_col;
  std::sort(chain_ids.begin(), chain_ids.end());
  chain_ids.erase(std::unique(chain_ids.begin(), chain_ids.end()), chain_ids.end());
  out += "\n| Parameter | R-hat | ESS |\n|---|---:|---:|\n";
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    const auto& name = table.header[j];
    if (name == "chain" || name == "iteration") continue;
    std::vector<std::vector<double>> chains(chain_ids.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const auto c = std::lower_bound(chain_ids.begin(), chain_ids.end(), chain_col[i]) - chain_ids.begin();
      chains[c].push_back(table.rows[i][j]);
    }
    double r = std::numeric_limits<double>::quiet_NaN();
    double e = std::numeric_limits<double>::quiet_NaN();
    try {
      if (chains.size() >= 2) r = rhat(chains);
    } catch (const DiagnosticError&) {
    }
    try {
      e = ess_multi(chains);
    } catch (const DiagnosticError&) {
    }
    out += "| " + name + " | " + pretty(r) + " | " + pretty(e) + " |\n";
  }
  return out;
}

}  // namespace hurdle
