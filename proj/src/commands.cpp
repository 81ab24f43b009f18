#include "bvsmed/commands.hpp"

#include <chrono>
#include <fstream>

#include "bvsmed/csv.hpp"
#include "bvsmed/draws_io.hpp"
#include "bvsmed/error.hpp"

namespace bvsmed {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPsrThreshold = 1.05;

ScenarioSpec spec_for(const ScenarioSource& s) {
  if (s.preset != "IV-like") return scenario_preset(s.preset, s.seed);
  const csv::Table t = csv::read_file(*s.covariance_path);
  const Index q = static_cast<Index>(t.header.size());
  Eigen::MatrixXd cov(q, q);
  for (Index r = 0; r < q; ++r)
    for (Index c = 0; c < q; ++c)
      if (!csv::parse_double(t.rows.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)), cov(r, c)))
        throw DataError("non-numeric covariance entry at row " + std::to_string(r + 1));
  return scenario_iv_like(cov, s.permutation, s.seed);
}

json scenario_json(const ScenarioSource& s) {
  json j{{"preset", s.preset}, {"seed", s.seed}};
  if (s.covariance_path) j["covariance"] = s.covariance_path->string();
  if (s.permutation) j["permutation"] = *s.permutation;
  return j;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

void write_truth_csv(const ScenarioSpec& spec, const TrueActiveSets& truth, const std::vector<std::string>& names,
                     const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  csv::write_row(out, {"mediator", "tau_true", "delta_true", "gamma_true", "joint_true"});
  for (Index j = 0; j < spec.q; ++j) {
    csv::write_row(out, {names.at(static_cast<std::size_t>(j)), csv::format_double(spec.tau_true(j)),
                         csv::format_double(spec.delta_true(j)), truth.gamma_true(j) ? "1" : "0",
                         truth.joint_true(j) ? "1" : "0"});
  }
}

TruthFile read_truth_csv(const fs::path& path) {
  const csv::Table t = csv::read_file(path);
  const long name = t.column("mediator"), g = t.column("gamma_true"), jt = t.column("joint_true");
  if (name < 0 || g < 0 || jt < 0) throw ConfigError("truth file needs mediator, gamma_true and joint_true columns");
  TruthFile out;
  const auto q = static_cast<Index>(t.rows.size());
  out.truth.gamma_true.resize(q);
  out.truth.joint_true.resize(q);
  for (Index j = 0; j < q; ++j) {
    const auto& row = t.rows[static_cast<std::size_t>(j)];
    out.names.push_back(row[static_cast<std::size_t>(name)]);
    out.truth.gamma_true(j) = row[static_cast<std::size_t>(g)] == "1";
    out.truth.joint_true(j) = row[static_cast<std::size_t>(jt)] == "1";
  }
  return out;
}

void cmd_simulate(const ScenarioSource& source, const fs::path& out_dir) {
  const ScenarioSpec spec = spec_for(source);
  const GeneratedScenario g = generate_scenario(spec);
  fs::create_directories(out_dir);
  save_dataset(g.data, out_dir / "data.csv");
  write_truth_csv(spec, g.truth, g.data.mediator_names, out_dir / "truth.csv");
  json manifest = make_manifest("simulate", scenario_json(source), {source.seed}, 0.0, 0.0);
  manifest.erase("wall_seconds");
  manifest["n"] = spec.n;
  manifest["q"] = spec.q;
  manifest["p"] = spec.p;
  manifest["gamma_true_count"] = g.truth.gamma_true.count();
  manifest["joint_true_count"] = g.truth.joint_true.count();
  write_json(manifest, out_dir / "manifest.json");
}

FitResult cmd_fit(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const LoadedData loaded = load_run_data(cfg);
  const MediationDataset& data = loaded.data;
  data.validate();
  FitResult result;
  result.hp = resolve_hyperparameters(cfg, data.q());
  const EffectContrast contrast = resolve_contrast(cfg, data);
  const std::vector<ChainConfig> configs = resolve_chains(cfg);

  const fs::path out = cfg.output_dir;
  fs::create_directories(out);
  const std::vector<ChainOutcome> outcomes = run_chains(configs, data, result.hp, cfg.workers);
  std::vector<ChainDraws> chains;
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    result.chain_errors.push_back(outcomes[k].error);
    if (outcomes[k].draws) {
      write_chain_draws(*outcomes[k].draws, data, out / "draws", k);
      chains.push_back(*outcomes[k].draws);
    }
  }

  json resolved;
  resolved["model_variant"] = to_string(cfg.model_variant);
  resolved["lambda_pinned"] = pins_lambda(cfg.model_variant);
  resolved["hyperparameters"] = to_json(result.hp);
  resolved["chains"] = json::array();
  for (const auto& c : configs) resolved["chains"].push_back(to_json(c));
  resolved["contrast"] = to_json(contrast);
  if (cfg.contrast.percentiles)
    resolved["contrast"]["percentiles"] = {cfg.contrast.percentiles->first, cfg.contrast.percentiles->second};
  resolved["fdr_target"] = cfg.fdr_target;
  resolved["data"] = {{"n", data.n()}, {"q", data.q()}, {"p", data.p()}};
  if (cfg.scenario) resolved["scenario"] = scenario_json(*cfg.scenario);
  if (cfg.data) resolved["data"]["path"] = cfg.data->path.string();
  if (loaded.preprocess) {
    resolved["preprocess"] = {{"log_transformed", loaded.preprocess->log_transformed},
                              {"groups", loaded.preprocess->groups},
                              {"exposure_inverse_normal", loaded.preprocess->exposure_inverse_normal}};
  }
  resolved["pooling"] = "all kept draws of all successful chains are pooled; PSR screened at 1.05";
  std::vector<std::uint64_t> seeds;
  for (const auto& c : configs) seeds.push_back(c.seed);

  json manifest = make_manifest("fit", json{{"source", cfg.source}, {"resolved", resolved}}, seeds, result.hp.eta, 0.0);
  manifest["chain_errors"] = result.chain_errors;

  if (chains.empty()) {
    manifest["wall_seconds"] = seconds_since(start);
    write_json(manifest, out / "manifest.json");
    throw NumericalError("every chain failed: " + result.chain_errors.front());
  }

  result.summary = summarize_selection(chains, contrast, cfg.fdr_target);
  result.psr = convergence_report(chains, result.summary.ppi.joint);
  for (const auto& m : result.psr)
    if (!(m.psr < kPsrThreshold)) result.converged = false;

  json summary = to_json(result.summary, data.mediator_names);
  summary["status"] = result.converged ? "converged" : "unconverged";
  if (loaded.truth) {
    write_truth_csv(spec_for(*cfg.scenario), *loaded.truth, data.mediator_names, out / "truth.csv");
  }
  write_json(summary, out / "selection.json");
  write_effects_csv(result.summary, data.mediator_names, out / "effects.csv");
  write_ppi_csv(result.summary, data.mediator_names, out / "ppi.csv");
  write_json(json{{"threshold", kPsrThreshold}, {"converged", result.converged}, {"monitored", to_json(result.psr)}},
             out / "psr.json");
  manifest["accept_rates"] = json::array();
  for (const auto& c : chains)
    manifest["accept_rates"].push_back({{"lambda", c.accept_rates.lambda_accept},
                                        {"gamma_flip", c.accept_rates.gamma_flip},
                                        {"omega_flip", c.accept_rates.omega_flip}});
  manifest["wall_seconds"] = seconds_since(start);
  write_json(manifest, out / "manifest.json");
  return result;
}

PhaseScanResult cmd_phase_scan(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const LoadedData loaded = load_run_data(cfg);
  loaded.data.validate();
  RunConfig scan_cfg = cfg;
  scan_cfg.model_variant = ModelVariant::MvnMrfSsb;
  scan_cfg.hyper.eta_set = true;
  scan_cfg.hyper.base.eta = 0.0;
  const Hyperparameters hp = resolve_hyperparameters(scan_cfg, loaded.data.q());
  const PhaseScanConfig pcfg = resolve_phase_scan(cfg);
  const PhaseScanResult r = phase_transition_scan(pcfg, loaded.data, hp, cfg.workers);
  const fs::path out = cfg.output_dir;
  fs::create_directories(out);
  write_phase_scan_csv(r, out / "phase_scan.csv");
  write_json(to_json(r), out / "phase_scan.json");
  std::vector<std::uint64_t> seeds;
  for (std::size_t g = 0; g < pcfg.eta_grid.size(); ++g) seeds.push_back(phase_scan_seed(pcfg.chain_template.seed, g));
  json resolved{{"eta_grid", pcfg.eta_grid},
                {"m_pt", pcfg.m_pt},
                {"jump_threshold", pcfg.jump_threshold},
                {"chain", to_json(pcfg.chain_template)},
                {"hyperparameters", to_json(hp)}};
  write_json(make_manifest("phase-scan", json{{"source", cfg.source}, {"resolved", resolved}}, seeds, r.eta_selected,
                           seconds_since(start)),
             out / "manifest.json");
  return r;
}

SelectionSummary cmd_summarize(const fs::path& draws_dir, const EffectContrast& contrast, double fdr_target,
                               const fs::path& out_dir) {
  const std::size_t k = count_stored_chains(draws_dir);
  if (k == 0) throw ConfigError("no stored chains in " + draws_dir.string());
  std::vector<ChainDraws> chains;
  for (std::size_t c = 0; c < k; ++c) chains.push_back(read_chain_draws(draws_dir, c));
  std::vector<std::string> names = csv::read_file(draw_file(draws_dir, 0, "tau")).header;
  names.erase(names.begin());
  SelectionSummary s = summarize_selection(chains, contrast, fdr_target);
  const auto psr = convergence_report(chains, s.ppi.joint);
  bool converged = true;
  for (const auto& m : psr)
    if (!(m.psr < kPsrThreshold)) converged = false;
  json summary = to_json(s, names);
  summary["status"] = converged ? "converged" : "unconverged";
  write_json(summary, out_dir / "selection.json");
  write_effects_csv(s, names, out_dir / "effects.csv");
  write_ppi_csv(s, names, out_dir / "ppi.csv");
  write_json(json{{"threshold", kPsrThreshold}, {"converged", converged}, {"monitored", to_json(psr)}},
             out_dir / "psr.json");
  return s;
}

EvalResult cmd_eval(const fs::path& summary_json, const fs::path& truth_csv, const fs::path& out_json) {
  const SelectionSummary s = selection_from_json(read_json(summary_json));
  const TruthFile truth = read_truth_csv(truth_csv);
  if (truth.truth.gamma_true.size() != s.ppi.joint.size())
    throw ConfigError("summary and truth file disagree on the number of mediators");
  EvalResult r;
  r.gamma = operating_characteristics(s.gamma.selected, truth.truth.gamma_true);
  r.joint = operating_characteristics(s.joint.selected, truth.truth.joint_true);
  write_json(json{{"gamma_selection", to_json(r.gamma)}, {"joint_selection", to_json(r.joint)}}, out_json);
  return r;
}

ReplicateResult cmd_replicate(const RunConfig& cfg, const std::vector<std::uint64_t>& seeds) {
  if (!cfg.scenario) throw ConfigError("replicate needs a scenario configuration");
  if (seeds.empty()) throw ConfigError("replicate needs at least one seed");
  ReplicateResult out;
  std::vector<OperatingCharacteristics> g, jt;
  for (const std::uint64_t seed : seeds) {
    RunConfig rc = cfg;
    rc.scenario->seed = seed;
    rc.output_dir = cfg.output_dir / ("rep_" + std::to_string(seed));
    const fs::path oc_path = rc.output_dir / "oc.json";
    if (!fs::exists(oc_path)) {
      cmd_fit(rc);
      cmd_eval(rc.output_dir / "selection.json", rc.output_dir / "truth.csv", oc_path);
    }
    const EvalResult r = cmd_eval(rc.output_dir / "selection.json", rc.output_dir / "truth.csv", oc_path);
    out.runs.push_back(r);
    g.push_back(r.gamma);
    jt.push_back(r.joint);
  }
  out.gamma = aggregate_oc(g);
  out.joint = aggregate_oc(jt);
  write_oc_table_csv(out.gamma, out.joint, cfg.output_dir / "oc_table.csv");
  write_json(json{{"seeds", seeds}, {"gamma_selection", to_json(out.gamma)}, {"joint_selection", to_json(out.joint)}},
             cfg.output_dir / "oc_summary.json");
  return out;
}

}  // namespace bvsmed
