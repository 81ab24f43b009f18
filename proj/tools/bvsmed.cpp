// Command-line front end: simulate | fit | phase-scan | summarize | eval | replicate.
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "bvsmed/commands.hpp"
#include "bvsmed/csv.hpp"
#include "bvsmed/draws_io.hpp"
#include "bvsmed/error.hpp"

namespace {

namespace fs = std::filesystem;
using namespace bvsmed;

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kUnconverged = 3;
constexpr int kRuntimeFailure = 4;

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    double v = 0.0;
    if (!csv::parse_double(cell, v)) throw ConfigError("bad grid value '" + cell + "'");
    out.push_back(v);
  }
  return out;
}

// "1-20" or "3,5,9".
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  try {
    while (std::getline(ss, item, ',')) {
      const auto dash = item.find('-');
      if (dash == std::string::npos) {
        out.push_back(std::stoull(item));
      } else {
        const auto lo = std::stoull(item.substr(0, dash)), hi = std::stoull(item.substr(dash + 1));
        if (hi < lo) throw ConfigError("empty seed range " + item);
        for (auto s = lo; s <= hi; ++s) out.push_back(s);
      }
    }
  } catch (const std::logic_error&) {
    throw ConfigError("bad seed list '" + text + "'");
  }
  return out;
}

RunConfig load(const std::string& path, const std::vector<std::string>& sets, const std::string& out, unsigned workers) {
  RunConfig cfg = load_run_config(path, sets);
  if (!out.empty()) cfg.output_dir = out;
  if (workers > 0) cfg.workers = workers;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian variable selection for high-dimensional mediation analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", build_version());

  std::string config_path, out_dir;
  std::vector<std::string> sets;
  unsigned workers = 0;

  auto* simulate = app.add_subcommand("simulate", "generate a simulation scenario");
  std::string scenario;
  std::uint64_t seed = 1;
  std::string covariance;
  simulate->add_option("--config", config_path, "run configuration with a scenario section");
  simulate->add_option("--scenario", scenario, "preset name (I, II, III, I-small, ...) or IV-like");
  simulate->add_option("--seed", seed, "generator seed");
  simulate->add_option("--covariance", covariance, "covariance CSV for IV-like");
  simulate->add_option("--out", out_dir, "output directory")->required();

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--set", sets, "override a config value, e.g. chains.n_iter=2000");
    cmd->add_option("--out", out_dir, "output directory (overrides output_dir)");
    cmd->add_option("--workers", workers, "worker threads (default: BVSMED_WORKERS or all cores)");
  };
  auto* fit = app.add_subcommand("fit", "fit a model and write draws and summaries");
  add_common(fit);
  auto* scan = app.add_subcommand("phase-scan", "select eta by the phase-transition scan");
  add_common(scan);
  std::string grid;
  scan->add_option("--grid", grid, "comma-separated eta grid starting at 0");
  auto* replicate = app.add_subcommand("replicate", "repeat a scenario fit over generator seeds");
  add_common(replicate);
  std::string seed_list;
  replicate->add_option("--seeds", seed_list, "seed list, e.g. 1-20 or 3,5,9")->required();

  auto* summarize = app.add_subcommand("summarize", "summarize stored draws");
  std::string draws_dir;
  double fdr = 0.05, a = 1.0, a_prime = -1.0;
  summarize->add_option("--draws", draws_dir, "directory with chain CSVs")->required()->check(CLI::ExistingDirectory);
  summarize->add_option("--fdr", fdr, "Bayesian FDR target");
  summarize->add_option("--a", a, "exposure level a");
  summarize->add_option("--a-prime", a_prime, "exposure level a'");
  summarize->add_option("--out", out_dir, "output directory (default: the draws directory)");

  auto* eval = app.add_subcommand("eval", "operating characteristics against a truth file");
  std::string summary_path, truth_path;
  eval->add_option("--summary", summary_path, "selection.json")->required()->check(CLI::ExistingFile);
  eval->add_option("--truth", truth_path, "truth.csv")->required()->check(CLI::ExistingFile);
  eval->add_option("--out", out_dir, "output JSON (default: oc.json next to the summary)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*simulate) {
      ScenarioSource src;
      if (!config_path.empty()) {
        const RunConfig cfg = load_run_config(config_path);
        if (!cfg.scenario) throw ConfigError("configuration has no scenario section");
        src = *cfg.scenario;
      } else {
        if (scenario.empty()) throw ConfigError("give --scenario or --config");
        src.preset = scenario;
        src.seed = seed;
        if (!covariance.empty()) src.covariance_path = covariance;
      }
      cmd_simulate(src, out_dir);
      std::cout << "wrote " << out_dir << '\n';
      return kOk;
    }
    if (*fit) {
      const RunConfig cfg = load(config_path, sets, out_dir, workers);
      const FitResult r = cmd_fit(cfg);
      std::cout << "selected " << r.summary.joint.selected.size() << " pathways at kappa=" << r.summary.joint.kappa
                << "; output in " << cfg.output_dir << '\n';
      for (std::size_t k = 0; k < r.chain_errors.size(); ++k)
        if (!r.chain_errors[k].empty()) std::cerr << "chain " << k << " failed: " << r.chain_errors[k] << '\n';
      if (r.summary.joint.warning) std::cerr << "warning: no threshold meets the FDR target\n";
      for (const auto& e : r.chain_errors)
        if (!e.empty()) return kRuntimeFailure;
      if (!r.converged) {
        std::cerr << "unconverged: a monitored PSR is at or above 1.05 (see psr.json)\n";
        return kUnconverged;
      }
      return kOk;
    }
    if (*scan) {
      RunConfig cfg = load(config_path, sets, out_dir, workers);
      if (!grid.empty()) cfg.phase_scan.eta_grid = parse_grid(grid);
      const PhaseScanResult r = cmd_phase_scan(cfg);
      std::cout << "selected eta=" << r.eta_selected << "; output in " << cfg.output_dir << '\n';
      if (r.warning) std::cerr << "warning: " << r.message << '\n';
      return kOk;
    }
    if (*replicate) {
      const RunConfig cfg = load(config_path, sets, out_dir, workers);
      const ReplicateResult r = cmd_replicate(cfg, parse_seeds(seed_list));
      std::cout << "evaluated " << r.runs.size() << " replicates; table in " << (cfg.output_dir / "oc_table.csv")
                << '\n';
      return kOk;
    }
    if (*summarize) {
      const fs::path out = out_dir.empty() ? fs::path(draws_dir) : fs::path(out_dir);
      const SelectionSummary s = cmd_summarize(draws_dir, EffectContrast{a, a_prime}, fdr, out);
      std::cout << "selected " << s.joint.selected.size() << " pathways; output in " << out << '\n';
      return kOk;
    }
    if (*eval) {
      const fs::path out = out_dir.empty() ? fs::path(summary_path).parent_path() / "oc.json" : fs::path(out_dir);
      cmd_eval(summary_path, truth_path, out);
      std::cout << "wrote " << out << '\n';
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kOk;
}
