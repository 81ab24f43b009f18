#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "bvsmed/dataset.hpp"
#include "bvsmed/inference.hpp"
#include "bvsmed/scenario.hpp"
#include "bvsmed/tuning.hpp"

namespace bvsmed {

struct DataSource {
  std::filesystem::path path;
  ColumnSchema schema;
  std::optional<PreprocessOptions> preprocess;
};

struct ScenarioSource {
  std::string preset;  // a scenario_preset name, or "IV-like"
  std::uint64_t seed = 1;
  std::optional<std::filesystem::path> covariance_path;  // IV-like only
  std::optional<std::vector<Index>> permutation;         // IV-like only, 0-based
};

struct ContrastSpec {
  std::optional<EffectContrast> levels;
  std::optional<std::pair<double, double>> percentiles;  // (for a', for a), in percent
};

/// Hyperparameters before q is known; slab scales may be scalars.
struct HyperSpec {
  Hyperparameters base = Hyperparameters::defaults(0);
  std::optional<double> v_sq_scalar;
  std::optional<double> psi_sq_scalar;
  std::optional<std::vector<double>> v_sq;
  std::optional<std::vector<double>> psi_sq;
  bool eta_set = false;
};

struct ChainSettings {
  std::size_t count = 3;
  std::vector<std::uint64_t> seeds;  // empty: base_seed, base_seed + 1, ...
  std::uint64_t base_seed = 1;
  ChainConfig chain;                 // template shared by all chains
};

struct PhaseScanSettings {
  std::vector<double> eta_grid;
  long m_pt = 2000;
  double jump_threshold = 0.05;
  long burn_in = 1000;
  long thin = 1;
  std::uint64_t seed = 1;
};

/// Parsed run configuration. Defaults mirror the simulation-study settings.
struct RunConfig {
  std::optional<DataSource> data;
  std::optional<ScenarioSource> scenario;
  ModelVariant model_variant = ModelVariant::MvnMrfSsb;
  HyperSpec hyper;
  std::optional<std::filesystem::path> eta_from;  // phase-scan JSON
  ChainSettings chains;
  ContrastSpec contrast;
  double fdr_target = 0.05;
  std::filesystem::path output_dir = "bvsmed_out";
  PhaseScanSettings phase_scan;
  unsigned workers = 0;
  nlohmann::json source;  // the JSON this config was parsed from

  void validate() const;
};

/// Relative paths are resolved against base_dir. Throws ConfigError.
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Applies "a.b.c=value" overrides; value is parsed as JSON when possible.
void apply_overrides(nlohmann::json& j, const std::vector<std::string>& overrides);

struct LoadedData {
  MediationDataset data;
  std::optional<TrueActiveSets> truth;
  std::optional<PreprocessReport> preprocess;
};

LoadedData load_run_data(const RunConfig& cfg);

/// Resolves slab scales for q and eta from the config or phase-scan file.
/// Throws ConfigError when MVN-MRF-SSB has neither, or an IB variant has eta > 0.
Hyperparameters resolve_hyperparameters(const RunConfig& cfg, Index q);

EffectContrast resolve_contrast(const RunConfig& cfg, const MediationDataset& data);

std::vector<ChainConfig> resolve_chains(const RunConfig& cfg);

PhaseScanConfig resolve_phase_scan(const RunConfig& cfg);

nlohmann::json to_json(const Hyperparameters& hp);
nlohmann::json to_json(const ChainConfig& c);
nlohmann::json to_json(const EffectContrast& c);

}  // namespace bvsmed
