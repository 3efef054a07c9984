#pragma once

#include <filesystem>
#include <string>

#include "cod2m/models.hpp"
#include "json.hpp"

namespace cod2m {

std::string activation_name(Activation a);
Activation parse_activation(const std::string& s);

/// Model documents tagged `"format": "net-genome v1"` / `"fuzzy-system v1"`.
/// Reals are written in shortest round-trip form, so reading back is exact.
nlohmann::json to_json(const NetGenome& genome);
nlohmann::json to_json(const FuzzySystem& fs);
NetGenome net_genome_from_json(const nlohmann::json& doc);
FuzzySystem fuzzy_system_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const AlphaPolicy& policy);
AlphaPolicy alpha_policy_from_json(const nlohmann::json& doc);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const nlohmann::json& doc, const std::filesystem::path& path);

}  // namespace cod2m
