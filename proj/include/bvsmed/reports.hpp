#pragma once

#include <filesystem>
#include <vector>

#include "json.hpp"

#include "bvsmed/inference.hpp"
#include "bvsmed/tuning.hpp"

namespace bvsmed {

nlohmann::json to_json(const PosteriorSummary& s);
nlohmann::json to_json(const FdrSelection& s, const std::vector<std::string>& names);
nlohmann::json to_json(const SelectionSummary& s, const std::vector<std::string>& names);
nlohmann::json to_json(const PhaseScanResult& r);
nlohmann::json to_json(const OperatingCharacteristics& oc);
nlohmann::json to_json(const OcAggregate& agg);
nlohmann::json to_json(const std::vector<MonitoredScalar>& psr);

/// Selected pathways with tau and IE posterior medians and 95% HPDIs.
void write_effects_csv(const SelectionSummary& s, const std::vector<std::string>& names,
                       const std::filesystem::path& path);

/// Plot data: mediator, ppi_gamma, ppi_joint and the two thresholds.
void write_ppi_csv(const SelectionSummary& s, const std::vector<std::string>& names,
                   const std::filesystem::path& path);

/// Plot data: eta, median, transition flag, selected flag.
void write_phase_scan_csv(const PhaseScanResult& r, const std::filesystem::path& path);

/// Mean and SD rows for the gamma and joint selections of a replication study.
void write_oc_table_csv(const OcAggregate& gamma, const OcAggregate& joint, const std::filesystem::path& path);

SelectionSummary selection_from_json(const nlohmann::json& j);

}  // namespace bvsmed
