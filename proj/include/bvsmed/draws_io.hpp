#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "bvsmed/dataset.hpp"
#include "bvsmed/sampler.hpp"

namespace bvsmed {

/// Parameter groups stored as one CSV per chain.
const std::vector<std::string>& draw_groups();

std::filesystem::path draw_file(const std::filesystem::path& dir, std::size_t chain, std::string_view group);

/// Writes chain<k>_<group>.csv for every group plus chain<k>_meta.json. Every
/// file starts with an `iteration` column; values round-trip exactly.
void write_chain_draws(const ChainDraws& draws, const MediationDataset& names, const std::filesystem::path& dir,
                       std::size_t chain);

/// Inverse of write_chain_draws.
ChainDraws read_chain_draws(const std::filesystem::path& dir, std::size_t chain);

/// Number of consecutive chains stored in a directory (chain0, chain1, ...).
std::size_t count_stored_chains(const std::filesystem::path& dir);

std::uint64_t fnv1a(std::string_view bytes);

/// Output of `git describe` for the build.
std::string build_version();

/// Manifest shared by all subcommands: the resolved configuration, its hash,
/// seeds, eta, build version and wall time.
nlohmann::json make_manifest(std::string_view command, const nlohmann::json& config,
                             const std::vector<std::uint64_t>& seeds, double eta, double wall_seconds);

void write_json(const nlohmann::json& value, const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace bvsmed
