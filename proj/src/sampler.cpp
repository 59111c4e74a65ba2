#include "hurdle/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "hurdle/error.hpp"

namespace hurdle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxInitAttempts = 100;

enum class Coord { Beta, Psi, Zeta, Xi, Gamma, LogTau };

struct CoordRef {
  int arm;
  Coord kind;
  std::size_t index;  // coefficient index for Beta
};

std::vector<CoordRef> coordinate_layout(const ModelSpec& spec, std::size_t J) {
  std::vector<CoordRef> out;
  for (int t = 0; t < kArms; ++t) {
    for (std::size_t j = 0; j <= J; ++j) out.push_back({t, Coord::Beta, j});
    out.push_back({t, Coord::Psi, 0});
    out.push_back({t, Coord::Zeta, 0});
    out.push_back({t, Coord::Xi, 0});
    out.push_back({t, Coord::Gamma, 0});
    if (uses_tau(spec.effect_family)) out.push_back({t, Coord::LogTau, 0});
  }
  return out;
}

std::string coord_name(const CoordRef& c) {
  const std::string suffix = "_" + std::to_string(c.arm);
  switch (c.kind) {
    case Coord::Beta: return "beta" + std::to_string(c.index) + suffix;
    case Coord::Psi: return "psi0" + suffix;
    case Coord::Zeta: return "zeta0" + suffix;
    case Coord::Xi: return "xi" + suffix;
    case Coord::Gamma: return "gamma" + suffix;
    case Coord::LogTau: return "tau" + suffix;
  }
  return "?";
}

// log |d(value)/du| for value = H * inverse_logit(u).
double bounded_log_jacobian(double value, double H) {
  return std::log(value) + std::log1p(-value / H);
}

double bounded_from_unconstrained(double u, double H) { return H * inverse_logit(u); }

double unconstrained_from_bounded(double value, double H) {
  return std::log(value / H) - std::log1p(-value / H);
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

ParamState draw_initial_state(const TrialData& data, const ModelSpec& spec, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u_mult(0.5, 2.0);
  std::normal_distribution<double> jitter(0.0, 1.0);
  const std::size_t J = data.n_covariates;
  ParamState s;
  for (int t = 0; t < kArms; ++t) {
    const auto& d = data.arms[t];
    if (d.n_pos == 0) {
      throw UnsupportedDataError("arm " + std::to_string(t) +
                                 " has no positive costs; the positive-cost mean is not identifiable");
    }
    std::vector<double> pos;
    pos.reserve(d.n_pos);
    double mean_e = 0.0;
    for (std::size_t i = 0; i < d.n(); ++i) {
      if (!d.zero[i]) pos.push_back(d.cost[i]);
      mean_e += d.eff[i];
    }
    mean_e /= static_cast<double>(d.n());
    const double mean_c = d.mean_pos_cost();
    double sd_c = sample_sd(pos);
    if (!(sd_c > 0.0)) sd_c = 0.5 * mean_c;

    auto& a = s.arm[t];
    const double upper_psi = spec.H_psi * (1.0 - 1e-6);
    const double upper_zeta = spec.H_zeta * (1.0 - 1e-6);
    a.psi0 = std::clamp(mean_c * u_mult(rng), spec.H_psi * 1e-6, upper_psi);
    a.zeta0 = std::clamp(sd_c * u_mult(rng), spec.H_zeta * 1e-6, upper_zeta);
    a.beta.assign(J + 1, 0.0);
    const double frac0 = (static_cast<double>(d.n_null) + 0.5) / (static_cast<double>(d.n()) + 1.0);
    a.beta[0] = logit(frac0) + jitter(rng);
    double centre = mean_e;
    switch (spec.link) {
      case Link::Logit: centre = std::clamp(mean_e, 0.01, 0.99); break;
      case Link::Log: centre = std::max(mean_e, 1e-6); break;
      case Link::Identity: break;
    }
    a.xi = link_function(centre, spec.link);
    a.gamma = 0.0;
    a.tau = std::exp(0.0 + jitter(rng));
  }
  return s;
}

std::mt19937_64 chain_rng(std::uint64_t seed, int chain, std::uint64_t purpose) {
  return std::mt19937_64(derive_seed(derive_seed(seed, static_cast<std::uint64_t>(chain)), purpose));
}

// Cached per-arm pieces of the unconstrained-scale log target.
struct ArmTerms {
  double prior = 0.0;
  double selection = 0.0;
  double cost = 0.0;
  double effect = 0.0;
  double jacobian = 0.0;
  double total() const { return prior + selection + cost + effect + jacobian; }
};

class ChainRunner {
 public:
  ChainRunner(const TrialData& data, const ModelSpec& spec, const McmcConfig& cfg, Target target,
              int chain)
      : data_(data),
        spec_(spec),
        cfg_(cfg),
        target_(target),
        layout_(coordinate_layout(spec, data.n_covariates)),
        rng_(chain_rng(cfg.seed, chain, 1)),
        psi1_(null_mean(spec)) {
    auto init_rng = chain_rng(cfg.seed, chain, 0);
    for (int attempt = 0;; ++attempt) {
      state_ = draw_initial_state(data_, spec_, init_rng);
      bool finite = true;
      for (int t = 0; t < kArms; ++t) {
        terms_[t] = evaluate_all(state_.arm[t], t);
        finite = finite && std::isfinite(terms_[t].total());
      }
      if (finite) break;
      if (attempt + 1 >= kMaxInitAttempts) {
        throw InitializationError("log-posterior is not finite at the initial state after " +
                                  std::to_string(kMaxInitAttempts) + " attempts");
      }
    }
    init_scales();
  }

  void run(std::vector<Draw>& out, std::vector<double>& acceptance) {
    const std::size_t K = layout_.size();
    std::vector<int> window_accepts(K, 0);
    std::vector<long> kept_accepts(K, 0);
    int window_iters = 0;
    int batch = 0;
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    out.clear();
    out.reserve(static_cast<std::size_t>(cfg_.retained_per_chain()));

    for (int it = 1; it <= cfg_.n_iter; ++it) {
      for (std::size_t k = 0; k < K; ++k) {
        const bool accepted = update(layout_[k], std::exp(log_scale_[k]) * normal(rng_), unif);
        if (it <= cfg_.n_burnin) {
          window_accepts[k] += accepted;
        } else {
          kept_accepts[k] += accepted;
        }
      }
      if (it <= cfg_.n_burnin && ++window_iters == cfg_.adapt_window) {
        ++batch;
        const double gain = std::min(1.0, 2.0 / std::sqrt(static_cast<double>(batch)));
        for (std::size_t k = 0; k < K; ++k) {
          const double rate = static_cast<double>(window_accepts[k]) / window_iters;
          log_scale_[k] += gain * (rate - cfg_.target_accept);
          window_accepts[k] = 0;
        }
        window_iters = 0;
      }
      if (it > cfg_.n_burnin && (it - cfg_.n_burnin) % cfg_.thin == 0) {
        Draw d;
        d.iteration = it;
        d.state = state_;
        for (int t = 0; t < kArms; ++t) d.derived[t] = derive(state_.arm[t], spec_);
        out.push_back(std::move(d));
      }
    }
    const double kept_iters = static_cast<double>(cfg_.n_iter - cfg_.n_burnin);
    acceptance.resize(K);
    for (std::size_t k = 0; k < K; ++k) acceptance[k] = kept_accepts[k] / kept_iters;
  }

 private:
  double mu_c(const ArmParams& a) const {
    return mixture_mean(inverse_logit(a.beta[0]), a.psi0, psi1_);
  }

  ArmTerms evaluate_all(const ArmParams& a, int t) const {
    ArmTerms terms;
    terms.prior = log_prior_arm(a, spec_);
    if (!std::isfinite(terms.prior)) return {-kInf, 0, 0, 0, 0};
    terms.jacobian = bounded_log_jacobian(a.psi0, spec_.H_psi) +
                     bounded_log_jacobian(a.zeta0, spec_.H_zeta);
    if (target_ == Target::Posterior) {
      const auto& d = data_.arms[t];
      terms.selection = selection_loglik(a, d, data_.n_covariates);
      terms.cost = positive_cost_loglik(a, d, spec_);
      terms.effect = effect_loglik(a, d, spec_, mu_c(a));
    }
    return terms;
  }

  bool update(const CoordRef& c, double step, std::uniform_real_distribution<double>& unif) {
    const int t = c.arm;
    const ArmParams& cur = state_.arm[t];
    ArmParams prop = cur;
    bool sel = false, cost = false, eff = false;
    switch (c.kind) {
      case Coord::Beta:
        prop.beta[c.index] += step;
        sel = true;
        eff = c.index == 0;
        break;
      case Coord::Psi:
        prop.psi0 = bounded_from_unconstrained(
            unconstrained_from_bounded(cur.psi0, spec_.H_psi) + step, spec_.H_psi);
        cost = eff = true;
        break;
      case Coord::Zeta:
        prop.zeta0 = bounded_from_unconstrained(
            unconstrained_from_bounded(cur.zeta0, spec_.H_zeta) + step, spec_.H_zeta);
        cost = true;
        break;
      case Coord::Xi: prop.xi += step; eff = true; break;
      case Coord::Gamma: prop.gamma += step; eff = true; break;
      case Coord::LogTau: prop.tau = std::exp(std::log(cur.tau) + step); eff = true; break;
    }

    ArmTerms next = terms_[t];
    next.prior = log_prior_arm(prop, spec_);
    if (!std::isfinite(next.prior)) return false;
    next.jacobian = bounded_log_jacobian(prop.psi0, spec_.H_psi) +
                    bounded_log_jacobian(prop.zeta0, spec_.H_zeta);
    if (target_ == Target::Posterior) {
      const auto& d = data_.arms[t];
      if (sel) next.selection = selection_loglik(prop, d, data_.n_covariates);
      if (cost) next.cost = positive_cost_loglik(prop, d, spec_);
      if (eff) next.effect = effect_loglik(prop, d, spec_, mu_c(prop));
    }
    const double log_alpha = next.total() - terms_[t].total();
    if (!(log_alpha > -kInf) || std::isnan(log_alpha)) return false;
    if (log_alpha >= 0.0 || std::log(unif(rng_)) < log_alpha) {
      state_.arm[t] = std::move(prop);
      terms_[t] = next;
      return true;
    }
    return false;
  }

  void init_scales() {
    const std::size_t J = data_.n_covariates;
    log_scale_.clear();
    for (const auto& c : layout_) {
      const auto& d = data_.arms[c.arm];
      const double n = static_cast<double>(d.n());
      double scale = 0.1;
      switch (c.kind) {
        case Coord::Beta: {
          const double p = (static_cast<double>(d.n_null) + 0.5) / (n + 1.0);
          scale = 2.0 / std::sqrt(std::max(1.0, n * p * (1.0 - p)));
          if (c.index > 0) {
            std::vector<double> col(d.n());
            for (std::size_t i = 0; i < d.n(); ++i) col[i] = d.z[i * J + c.index - 1];
            const double sd = sample_sd(col);
            if (sd > 0.0) scale /= sd;
          }
          break;
        }
        case Coord::Psi: {
          const double m = std::min(d.mean_pos_cost(), 0.99 * spec_.H_psi);
          const double sd = std::sqrt(d.centred_ss_cost / std::max<double>(1.0, d.n_pos - 1.0));
          const double se = std::max(sd, 0.1 * m) / std::sqrt(static_cast<double>(d.n_pos));
          scale = std::clamp(se / (m * (1.0 - m / spec_.H_psi)), 1e-3, 2.0);
          break;
        }
        case Coord::Zeta: scale = std::clamp(1.0 / std::sqrt(2.0 * d.n_pos), 1e-3, 2.0); break;
        case Coord::Xi: scale = std::clamp(2.0 / std::sqrt(n), 1e-3, 1.0); break;
        case Coord::Gamma: {
          const double sd = sample_sd(d.cost);
          scale = (sd > 0.0 ? 1.0 / sd : 1.0) / std::sqrt(n);
          break;
        }
        case Coord::LogTau: scale = 0.2; break;
      }
      log_scale_.push_back(std::log(scale));
    }
  }

  const TrialData& data_;
  const ModelSpec& spec_;
  const McmcConfig& cfg_;
  Target target_;
  std::vector<CoordRef> layout_;
  std::mt19937_64 rng_;
  double psi1_;
  ParamState state_;
  std::array<ArmTerms, kArms> terms_{};
  std::vector<double> log_scale_;
};

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::vector<std::string> McmcConfig::validate() const {
  if (n_iter <= 0) throw ConfigError("n_iter must be positive");
  if (n_burnin < 0 || n_burnin >= n_iter) throw ConfigError("n_burnin must satisfy 0 <= n_burnin < n_iter");
  if (thin < 1) throw ConfigError("thin must be >= 1");
  if (n_chains < 1) throw ConfigError("n_chains must be >= 1");
  if (adapt_window < 1) throw ConfigError("adapt_window must be >= 1");
  if (!(target_accept > 0.0 && target_accept < 1.0)) throw ConfigError("target_accept must lie in (0,1)");
  if (n_threads < 1) throw ConfigError("n_threads must be >= 1");
  std::vector<std::string> warnings;
  if (retained_per_chain() < 100) {
    warnings.push_back("only " + std::to_string(retained_per_chain()) +
                       " draws retained per chain (fewer than 100)");
  }
  return warnings;
}

std::size_t PosteriorDraws::total_draws() const {
  std::size_t n = 0;
  for (const auto& c : chains) n += c.size();
  return n;
}

std::vector<std::string> PosteriorDraws::free_parameter_names() const {
  std::vector<std::string> names;
  for (const auto& c : coordinate_layout(spec, n_covariates)) names.push_back(coord_name(c));
  return names;
}

std::vector<std::string> PosteriorDraws::parameter_names() const {
  std::vector<std::string> names;
  const auto layout = coordinate_layout(spec, n_covariates);
  for (int t = 0; t < kArms; ++t) {
    for (const auto& c : layout) {
      if (c.arm == t) names.push_back(coord_name(c));
    }
    const std::string s = "_" + std::to_string(t);
    names.push_back("p" + s);
    names.push_back("mu_c" + s);
    names.push_back("mu_e" + s);
  }
  return names;
}

std::vector<double> PosteriorDraws::column(const std::string& name, std::size_t chain) const {
  const auto pos = name.rfind('_');
  bool ok = pos != std::string::npos && pos + 2 == name.size() &&
            (name.back() == '0' || name.back() == '1');
  const int t = ok ? name.back() - '0' : 0;
  const std::string base = ok ? name.substr(0, pos) : name;
  std::size_t beta_index = 0;
  enum { P, MuC, MuE, Psi, Zeta, Xi, Gam, Tau, Beta, Unknown } which = Unknown;
  if (ok) {
    if (base == "p") which = P;
    else if (base == "mu_c") which = MuC;
    else if (base == "mu_e") which = MuE;
    else if (base == "psi0") which = Psi;
    else if (base == "zeta0") which = Zeta;
    else if (base == "xi") which = Xi;
    else if (base == "gamma") which = Gam;
    else if (base == "tau" && uses_tau(spec.effect_family)) which = Tau;
    else if (base.rfind("beta", 0) == 0 && base.size() > 4) {
      try {
        std::size_t used = 0;
        beta_index = std::stoul(base.substr(4), &used);
        if (used == base.size() - 4 && beta_index <= n_covariates) which = Beta;
      } catch (const std::exception&) {
      }
    }
  }
  if (which == Unknown) {
    std::string avail;
    for (const auto& n : parameter_names()) avail += (avail.empty() ? "" : ", ") + n;
    throw ConfigError("unknown parameter '" + name + "'; available: " + avail);
  }
  std::vector<double> out;
  out.reserve(chains.at(chain).size());
  for (const auto& d : chains.at(chain)) {
    const auto& a = d.state.arm[t];
    const auto& q = d.derived[t];
    switch (which) {
      case P: out.push_back(q.p); break;
      case MuC: out.push_back(q.mu_c); break;
      case MuE: out.push_back(q.mu_e); break;
      case Psi: out.push_back(a.psi0); break;
      case Zeta: out.push_back(a.zeta0); break;
      case Xi: out.push_back(a.xi); break;
      case Gam: out.push_back(a.gamma); break;
      case Tau: out.push_back(a.tau); break;
      case Beta: out.push_back(a.beta[beta_index]); break;
      case Unknown: break;
    }
  }
  return out;
}

std::vector<double> PosteriorDraws::pooled(const std::string& name) const {
  std::vector<double> out;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    const auto col = column(name, c);
    out.insert(out.end(), col.begin(), col.end());
  }
  return out;
}

std::string PosteriorDraws::config_digest() const {
  std::ostringstream s;
  s << std::setprecision(17) << to_string(spec.cost_family) << '|' << to_string(spec.effect_family)
    << '|' << to_string(spec.link) << '|' << spec.w << '|' << spec.W << '|' << spec.H_psi << '|'
    << spec.H_zeta << '|' << to_string(spec.selection_prior.family) << '|'
    << spec.selection_prior.scale << '|' << spec.effect_prior_sd << '|'
    << to_string(spec.null_likelihood) << '|' << config.n_iter << '|' << config.n_burnin << '|'
    << config.thin << '|' << config.n_chains << '|' << config.seed << '|' << config.adapt_window
    << '|' << config.target_accept << '|' << n_covariates;
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s.str()) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << h;
  return hex.str();
}

std::vector<ParamState> initialize_chains(const TrialData& data, const ModelSpec& spec,
                                          int n_chains, std::uint64_t seed) {
  std::vector<ParamState> states;
  states.reserve(static_cast<std::size_t>(std::max(n_chains, 0)));
  for (int c = 0; c < n_chains; ++c) {
    auto rng = chain_rng(seed, c, 0);
    states.push_back(draw_initial_state(data, spec, rng));
  }
  return states;
}

double log_posterior(const ParamState& state, const TrialData& data, const ModelSpec& spec) {
  const double lp = log_prior(state, spec);
  if (!std::isfinite(lp)) return -kInf;
  return lp + log_likelihood(state, data, spec);
}

PosteriorDraws fit(const TrialData& data, const ModelSpec& spec, const McmcConfig& cfg,
                   Target target) {
  spec.validate();
  PosteriorDraws out;
  out.warnings = cfg.validate();
  out.spec = spec;
  out.config = cfg;
  out.n_covariates = data.n_covariates;
  for (const auto& c : coordinate_layout(spec, data.n_covariates)) {
    out.coordinate_names.push_back(coord_name(c));
  }
  const auto n_chains = static_cast<std::size_t>(cfg.n_chains);
  out.chains.resize(n_chains);
  out.acceptance.resize(n_chains);
  std::vector<std::exception_ptr> errors(n_chains);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t c = next++; c < n_chains; c = next++) {
      try {
        ChainRunner runner(data, spec, cfg, target, static_cast<int>(c));
        runner.run(out.chains[c], out.acceptance[c]);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.n_threads), n_chains);
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace hurdle
