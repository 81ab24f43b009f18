#include "bvsmed/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "bvsmed/csv.hpp"
#include "bvsmed/draws_io.hpp"
#include "bvsmed/error.hpp"

namespace bvsmed {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items())
    if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

fs::path resolve_path(const fs::path& p, const fs::path& base) {
  return p.is_absolute() || base.empty() ? p : base / p;
}

template <class T>
void read_opt(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

std::vector<std::string> strings(const json& obj, const char* key) {
  return obj.contains(key) ? obj.at(key).get<std::vector<std::string>>() : std::vector<std::string>{};
}

Eigen::VectorXd number_or_vector(const json& v) {
  if (v.is_number()) return Eigen::VectorXd::Constant(1, v.get<double>());
  const auto xs = v.get<std::vector<double>>();
  if (xs.empty()) throw ConfigError("initial value vector must not be empty");
  return Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Index>(xs.size()));
}

IndicatorPolicy parse_policy(const json& v) {
  IndicatorPolicy p;
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "all-off") p.kind = IndicatorInit::AllOff;
    else if (s == "all-on") p.kind = IndicatorInit::AllOn;
    else throw ConfigError("indicator init must be all-off, all-on or {\"random\": p}");
  } else {
    check_keys(v, "indicator init", {"random"});
    p.kind = IndicatorInit::Random;
    p.prob = v.at("random").get<double>();
  }
  return p;
}

json policy_json(const IndicatorPolicy& p) {
  switch (p.kind) {
    case IndicatorInit::AllOff: return "all-off";
    case IndicatorInit::AllOn: return "all-on";
    case IndicatorInit::Random: return json{{"random", p.prob}};
  }
  return nullptr;
}

json vector_json(const Eigen::VectorXd& v) {
  if (v.size() == 1) return v(0);
  return std::vector<double>(v.data(), v.data() + v.size());
}

void parse_hyper(const json& h, HyperSpec& out) {
  check_keys(h, "hyperparameters",
             {"theta_gamma", "prior_prob_gamma", "theta_omega", "eta", "v_sq", "psi_sq", "h0", "c0", "s0", "t0",
              "k0", "nu0", "nu1", "sigma0_sq", "sigma1_sq", "mu_lambda", "h_lambda", "mu0", "mu1"});
  Hyperparameters& b = out.base;
  if (h.contains("theta_gamma") && h.contains("prior_prob_gamma"))
    throw ConfigError("give theta_gamma or prior_prob_gamma, not both");
  read_opt(h, "theta_gamma", b.theta_gamma);
  if (h.contains("prior_prob_gamma")) {
    const double p = h.at("prior_prob_gamma").get<double>();
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("prior_prob_gamma must be in (0,1)");
    b.theta_gamma = logit(p);
  }
  read_opt(h, "theta_omega", b.theta_omega);
  if (h.contains("eta")) {
    b.eta = h.at("eta").get<double>();
    out.eta_set = true;
  }
  for (const auto& [key, scalar, vec] :
       {std::tuple{"v_sq", &out.v_sq_scalar, &out.v_sq}, std::tuple{"psi_sq", &out.psi_sq_scalar, &out.psi_sq}}) {
    if (!h.contains(key)) continue;
    if (h.at(key).is_number()) *scalar = h.at(key).get<double>();
    else *vec = h.at(key).get<std::vector<double>>();
  }
  read_opt(h, "h0", b.h0);
  read_opt(h, "c0", b.c0);
  read_opt(h, "s0", b.s0);
  read_opt(h, "t0", b.t0);
  read_opt(h, "k0", b.k0);
  read_opt(h, "nu0", b.nu0);
  read_opt(h, "nu1", b.nu1);
  read_opt(h, "sigma0_sq", b.sigma0_sq);
  read_opt(h, "sigma1_sq", b.sigma1_sq);
  read_opt(h, "mu_lambda", b.mu_lambda);
  read_opt(h, "h_lambda", b.h_lambda);
}

void parse_chains(const json& c, ChainSettings& out) {
  check_keys(c, "chains",
             {"count", "seeds", "seed", "n_iter", "burn_in", "thin", "cut_feedback", "refine", "random_scan",
              "lambda_mrf_potential", "init", "adapt"});
  read_opt(c, "count", out.count);
  read_opt(c, "seeds", out.seeds);
  read_opt(c, "seed", out.base_seed);
  ChainConfig& t = out.chain;
  read_opt(c, "n_iter", t.n_iter);
  read_opt(c, "burn_in", t.burn_in);
  read_opt(c, "thin", t.thin);
  read_opt(c, "cut_feedback", t.cut_feedback);
  read_opt(c, "refine", t.refine);
  read_opt(c, "random_scan", t.random_scan);
  read_opt(c, "lambda_mrf_potential", t.lambda_mrf_potential);
  if (c.contains("init")) {
    const json& i = c.at("init");
    check_keys(i, "chains.init", {"tau", "delta", "lambda", "gamma", "omega", "sigma_sq_Sigma", "sigma_sq"});
    if (i.contains("tau")) t.init.tau_init = number_or_vector(i.at("tau"));
    if (i.contains("delta")) t.init.delta_init = number_or_vector(i.at("delta"));
    if (i.contains("lambda")) t.init.lambda_init = number_or_vector(i.at("lambda"));
    if (i.contains("gamma")) t.init.gamma_init = parse_policy(i.at("gamma"));
    if (i.contains("omega")) t.init.omega_init = parse_policy(i.at("omega"));
    read_opt(i, "sigma_sq_Sigma", t.init.sigma_sq_Sigma_init);
    read_opt(i, "sigma_sq", t.init.sigma_sq_init);
  }
  if (c.contains("adapt")) {
    const json& a = c.at("adapt");
    check_keys(a, "chains.adapt", {"initial_proposal_var_lambda", "target_accept", "window"});
    read_opt(a, "initial_proposal_var_lambda", t.adapt.initial_proposal_var_lambda);
    read_opt(a, "target_accept", t.adapt.target_accept);
    read_opt(a, "window", t.adapt.adapt_window);
  }
}

}  // namespace

void RunConfig::validate() const {
  if (data.has_value() == scenario.has_value()) throw ConfigError("give exactly one of 'data' and 'scenario'");
  if (chains.count < 1) throw ConfigError("at least one chain is required");
  if (!chains.seeds.empty() && chains.seeds.size() != chains.count)
    throw ConfigError("chains.seeds must list one seed per chain");
  chains.chain.validate();
  if (!(fdr_target > 0.0 && fdr_target < 1.0)) throw ConfigError("fdr_target must be in (0,1)");
  if (contrast.levels) contrast.levels->validate();
  if (contrast.percentiles) {
    const auto [lo, hi] = *contrast.percentiles;
    if (!(lo >= 0.0 && lo <= 100.0 && hi >= 0.0 && hi <= 100.0) || lo == hi)
      throw ConfigError("contrast percentiles must be two different values in [0,100]");
  }
  if (!uses_mrf(model_variant) && hyper.eta_set && hyper.base.eta != 0.0)
    throw ConfigError("eta must be 0 for IB variants");
  if (hyper.base.eta < 0.0) throw ConfigError("eta must be non-negative");
}

void apply_overrides(json& j, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key.path=value: " + o);
    std::string pointer = "/" + o.substr(0, eq);
    std::replace(pointer.begin(), pointer.end(), '.', '/');
    const std::string text = o.substr(eq + 1);
    json value;
    try {
      value = json::parse(text);
    } catch (const json::exception&) {
      value = text;
    }
    j[json::json_pointer(pointer)] = value;
  }
}

RunConfig parse_run_config(const json& j, const fs::path& base_dir) {
  try {
    check_keys(j, "config",
               {"data", "scenario", "model_variant", "hyperparameters", "eta_from", "chains", "contrast",
                "fdr_target", "output_dir", "phase_scan", "workers"});
    RunConfig cfg;
    cfg.source = j;
    if (j.contains("data")) {
      const json& d = j.at("data");
      check_keys(d, "data", {"path", "schema", "preprocess"});
      DataSource src;
      src.path = resolve_path(d.at("path").get<std::string>(), base_dir);
      const json& s = d.at("schema");
      check_keys(s, "data.schema", {"exposure", "outcome", "mediators", "covariates", "ignored"});
      src.schema.exposure = s.at("exposure").get<std::string>();
      src.schema.outcome = s.at("outcome").get<std::string>();
      if (s.contains("mediators") && s.at("mediators").is_string()) {
        if (s.at("mediators").get<std::string>() != "rest")
          throw ConfigError("data.schema.mediators must be a list or \"rest\"");
        src.schema.mediators_rest = true;
      } else {
        src.schema.mediators = strings(s, "mediators");
        src.schema.mediators_rest = src.schema.mediators.empty();
      }
      src.schema.covariates = strings(s, "covariates");
      src.schema.ignored = strings(s, "ignored");
      if (d.contains("preprocess")) {
        const json& p = d.at("preprocess");
        check_keys(p, "data.preprocess", {"log_skew_threshold", "zscore_group_column", "inverse_normal_exposure"});
        PreprocessOptions opts;
        read_opt(p, "log_skew_threshold", opts.log_transform_abs_skewness_threshold);
        read_opt(p, "inverse_normal_exposure", opts.inverse_normal_exposure);
        if (p.contains("zscore_group_column")) {
          const auto col = p.at("zscore_group_column").get<std::string>();
          opts.zscore_groups = read_text_column(src.path, col);
          src.schema.ignored.push_back(col);
        }
        src.preprocess = opts;
      }
      cfg.data = src;
    }
    if (j.contains("scenario")) {
      const json& s = j.at("scenario");
      check_keys(s, "scenario", {"preset", "seed", "covariance", "permutation"});
      ScenarioSource src;
      src.preset = s.at("preset").get<std::string>();
      read_opt(s, "seed", src.seed);
      if (s.contains("covariance")) src.covariance_path = resolve_path(s.at("covariance").get<std::string>(), base_dir);
      if (s.contains("permutation")) src.permutation = s.at("permutation").get<std::vector<Index>>();
      const auto names = scenario_preset_names();
      if (src.preset == "IV-like") {
        if (!src.covariance_path) throw ConfigError("scenario IV-like needs a covariance file");
      } else if (std::find(names.begin(), names.end(), src.preset) == names.end()) {
        throw ConfigError("unknown scenario preset '" + src.preset + "'");
      } else if (src.covariance_path || src.permutation) {
        throw ConfigError("covariance and permutation apply to the IV-like scenario only");
      }
      cfg.scenario = src;
    }
    if (j.contains("model_variant")) cfg.model_variant = parse_model_variant(j.at("model_variant").get<std::string>());
    if (j.contains("hyperparameters")) parse_hyper(j.at("hyperparameters"), cfg.hyper);
    if (j.contains("eta_from")) cfg.eta_from = resolve_path(j.at("eta_from").get<std::string>(), base_dir);
    cfg.chains.chain.n_iter = 20000;
    cfg.chains.chain.burn_in = 10000;
    cfg.chains.chain.thin = 5;
    if (j.contains("chains")) parse_chains(j.at("chains"), cfg.chains);
    cfg.chains.chain.model_variant = cfg.model_variant;
    if (j.contains("contrast")) {
      const json& c = j.at("contrast");
      check_keys(c, "contrast", {"a", "a_prime", "percentiles"});
      if (c.contains("percentiles")) {
        if (c.contains("a") || c.contains("a_prime")) throw ConfigError("give contrast levels or percentiles, not both");
        const auto p = c.at("percentiles").get<std::vector<double>>();
        if (p.size() != 2) throw ConfigError("contrast.percentiles needs two values");
        cfg.contrast.percentiles = std::pair{p[0], p[1]};
      } else {
        cfg.contrast.levels = EffectContrast{c.at("a").get<double>(), c.at("a_prime").get<double>()};
      }
    }
    read_opt(j, "fdr_target", cfg.fdr_target);
    if (j.contains("output_dir")) cfg.output_dir = resolve_path(j.at("output_dir").get<std::string>(), base_dir);
    if (j.contains("phase_scan")) {
      const json& p = j.at("phase_scan");
      check_keys(p, "phase_scan", {"eta_grid", "m_pt", "jump_threshold", "burn_in", "thin", "seed"});
      read_opt(p, "eta_grid", cfg.phase_scan.eta_grid);
      read_opt(p, "m_pt", cfg.phase_scan.m_pt);
      read_opt(p, "jump_threshold", cfg.phase_scan.jump_threshold);
      read_opt(p, "burn_in", cfg.phase_scan.burn_in);
      read_opt(p, "thin", cfg.phase_scan.thin);
      read_opt(p, "seed", cfg.phase_scan.seed);
    }
    read_opt(j, "workers", cfg.workers);
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
}

RunConfig load_run_config(const fs::path& path, const std::vector<std::string>& overrides) {
  json j = read_json(path);
  try {
    apply_overrides(j, overrides);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid override: ") + e.what());
  }
  return parse_run_config(j, path.parent_path());
}

LoadedData load_run_data(const RunConfig& cfg) {
  LoadedData out;
  if (cfg.data) {
    out.data = load_dataset(cfg.data->path, cfg.data->schema);
    if (cfg.data->preprocess) {
      PreprocessResult r = preprocess(out.data, *cfg.data->preprocess);
      out.data = std::move(r.data);
      out.preprocess = std::move(r.report);
    }
    return out;
  }
  const ScenarioSource& s = *cfg.scenario;
  ScenarioSpec spec;
  if (s.preset == "IV-like") {
    const csv::Table t = csv::read_file(*s.covariance_path);
    const Index q = static_cast<Index>(t.header.size());
    if (static_cast<Index>(t.rows.size()) != q) throw ConfigError("covariance file must be square with a header row");
    Eigen::MatrixXd cov(q, q);
    for (Index r = 0; r < q; ++r)
      for (Index c = 0; c < q; ++c)
        if (!csv::parse_double(t.rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)], cov(r, c)))
          throw DataError("non-numeric covariance entry at row " + std::to_string(r + 1));
    spec = scenario_iv_like(cov, s.permutation, s.seed);
  } else {
    spec = scenario_preset(s.preset, s.seed);
  }
  GeneratedScenario g = generate_scenario(spec);
  out.data = std::move(g.data);
  out.truth = std::move(g.truth);
  return out;
}

Hyperparameters resolve_hyperparameters(const RunConfig& cfg, Index q) {
  Hyperparameters hp = cfg.hyper.base;
  const Hyperparameters defaults = Hyperparameters::defaults(q);
  hp.v_sq = defaults.v_sq;
  hp.psi_sq = defaults.psi_sq;
  if (cfg.hyper.v_sq_scalar) hp.v_sq.setConstant(*cfg.hyper.v_sq_scalar);
  if (cfg.hyper.psi_sq_scalar) hp.psi_sq.setConstant(*cfg.hyper.psi_sq_scalar);
  auto take = [q](const std::vector<double>& v, const char* name) {
    if (static_cast<Index>(v.size()) != q) throw ConfigError(std::string(name) + " must have one entry per mediator");
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), q));
  };
  if (cfg.hyper.v_sq) hp.v_sq = take(*cfg.hyper.v_sq, "v_sq");
  if (cfg.hyper.psi_sq) hp.psi_sq = take(*cfg.hyper.psi_sq, "psi_sq");

  if (uses_mrf(cfg.model_variant)) {
    if (!cfg.hyper.eta_set) {
      if (!cfg.eta_from) throw ConfigError("MVN-MRF-SSB needs hyperparameters.eta or an eta_from phase-scan file");
      const json scan = read_json(*cfg.eta_from);
      if (!scan.contains("eta_selected")) throw ConfigError("phase-scan file lacks eta_selected");
      hp.eta = scan.at("eta_selected").get<double>();
    }
  } else if (hp.eta != 0.0) {
    throw ConfigError("eta must be 0 for IB variants");
  }
  hp.validate(q);
  return hp;
}

EffectContrast resolve_contrast(const RunConfig& cfg, const MediationDataset& data) {
  EffectContrast c;
  if (cfg.contrast.levels) {
    c = *cfg.contrast.levels;
  } else if (cfg.contrast.percentiles) {
    c.a_prime = sample_quantile(data.A, cfg.contrast.percentiles->first / 100.0);
    c.a = sample_quantile(data.A, cfg.contrast.percentiles->second / 100.0);
  }
  c.validate();
  return c;
}

std::vector<ChainConfig> resolve_chains(const RunConfig& cfg) {
  std::vector<ChainConfig> out;
  for (std::size_t k = 0; k < cfg.chains.count; ++k) {
    ChainConfig c = cfg.chains.chain;
    c.model_variant = cfg.model_variant;
    c.seed = cfg.chains.seeds.empty() ? cfg.chains.base_seed + k : cfg.chains.seeds[k];
    out.push_back(c);
  }
  return out;
}

PhaseScanConfig resolve_phase_scan(const RunConfig& cfg) {
  PhaseScanConfig p;
  p.eta_grid = cfg.phase_scan.eta_grid;
  if (p.eta_grid.empty()) {
    for (int g = 0; g <= 12; ++g) p.eta_grid.push_back(0.1 * g);
  }
  p.m_pt = cfg.phase_scan.m_pt;
  p.jump_threshold = cfg.phase_scan.jump_threshold;
  p.chain_template = cfg.chains.chain;
  p.chain_template.model_variant = ModelVariant::MvnMrfSsb;
  p.chain_template.burn_in = cfg.phase_scan.burn_in;
  p.chain_template.thin = cfg.phase_scan.thin;
  p.chain_template.seed = cfg.phase_scan.seed;
  p.chain_template.n_iter = p.chain_template.burn_in + p.m_pt * p.chain_template.thin;
  p.validate();
  return p;
}

json to_json(const Hyperparameters& hp) {
  auto vec = [](const Eigen::VectorXd& v) {
    if (v.size() > 0 && (v.array() == v(0)).all()) return json(v(0));
    return json(std::vector<double>(v.data(), v.data() + v.size()));
  };
  return json{{"theta_gamma", hp.theta_gamma},
              {"prior_prob_gamma", logistic(hp.theta_gamma)},
              {"theta_omega", hp.theta_omega},
              {"eta", hp.eta},
              {"v_sq", vec(hp.v_sq)},
              {"psi_sq", vec(hp.psi_sq)},
              {"h0", hp.h0},
              {"c0", hp.c0},
              {"s0", hp.s0},
              {"t0", hp.t0},
              {"k0", hp.k0},
              {"nu0", hp.nu0},
              {"nu1", hp.nu1},
              {"sigma0_sq", hp.sigma0_sq},
              {"sigma1_sq", hp.sigma1_sq},
              {"mu_lambda", hp.mu_lambda},
              {"h_lambda", hp.h_lambda}};
}

json to_json(const ChainConfig& c) {
  return json{{"n_iter", c.n_iter},
              {"burn_in", c.burn_in},
              {"thin", c.thin},
              {"seed", c.seed},
              {"model_variant", to_string(c.model_variant)},
              {"lambda_pinned", pins_lambda(c.model_variant)},
              {"cut_feedback", c.cut_feedback},
              {"refine", c.refine},
              {"random_scan", c.random_scan},
              {"lambda_mrf_potential", c.lambda_mrf_potential},
              {"init",
               {{"tau", vector_json(c.init.tau_init)},
                {"delta", vector_json(c.init.delta_init)},
                {"lambda", vector_json(c.init.lambda_init)},
                {"gamma", policy_json(c.init.gamma_init)},
                {"omega", policy_json(c.init.omega_init)},
                {"sigma_sq_Sigma", c.init.sigma_sq_Sigma_init},
                {"sigma_sq", c.init.sigma_sq_init}}},
              {"adapt",
               {{"initial_proposal_var_lambda", c.adapt.initial_proposal_var_lambda},
                {"target_accept", c.adapt.target_accept},
                {"window", c.adapt.adapt_window}}}};
}

json to_json(const EffectContrast& c) {
  return json{{"a", c.a}, {"a_prime", c.a_prime}, {"multiplier", c.multiplier()}};
}

}  // namespace bvsmed
