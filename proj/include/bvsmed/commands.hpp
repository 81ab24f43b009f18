#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bvsmed/config.hpp"
#include "bvsmed/reports.hpp"

namespace bvsmed {

/// Writes data.csv, truth.csv and manifest.json for a generated scenario.
/// Output is byte-identical for identical inputs.
void cmd_simulate(const ScenarioSource& source, const std::filesystem::path& out_dir);

void write_truth_csv(const ScenarioSpec& spec, const TrueActiveSets& truth, const std::vector<std::string>& names,
                     const std::filesystem::path& path);

struct TruthFile {
  std::vector<std::string> names;
  TrueActiveSets truth;
};

TruthFile read_truth_csv(const std::filesystem::path& path);

struct FitResult {
  SelectionSummary summary;
  std::vector<MonitoredScalar> psr;
  bool converged = true;
  std::vector<std::string> chain_errors;  // one entry per chain, empty when it succeeded
  Hyperparameters hp;
};

/// Runs all chains and writes draws, selection, effects, PPI plot data, PSR
/// report and manifest into cfg.output_dir.
FitResult cmd_fit(const RunConfig& cfg);

PhaseScanResult cmd_phase_scan(const RunConfig& cfg);

/// Recomputes the selection summary from stored draws.
SelectionSummary cmd_summarize(const std::filesystem::path& draws_dir, const EffectContrast& contrast,
                               double fdr_target, const std::filesystem::path& out_dir);

struct EvalResult {
  OperatingCharacteristics gamma;
  OperatingCharacteristics joint;
};

EvalResult cmd_eval(const std::filesystem::path& summary_json, const std::filesystem::path& truth_csv,
                    const std::filesystem::path& out_json);

struct ReplicateResult {
  std::vector<EvalResult> runs;
  OcAggregate gamma;
  OcAggregate joint;
};

/// One fit per scenario seed under output_dir/rep_<seed>; seeds whose
/// evaluation already exists are reused. Writes oc_table.csv and oc_summary.json.
ReplicateResult cmd_replicate(const RunConfig& cfg, const std::vector<std::uint64_t>& seeds);

}  // namespace bvsmed
