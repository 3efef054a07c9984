#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "cod2m/experiment.hpp"
#include "cod2m/synthgen.hpp"
#include "json.hpp"

namespace cod2m::io {

/// Keys exactly: terrain, samples_per_day, day_conditions, sensor_models, seed.
nlohmann::json to_json(const synthgen::GenConfig& config);
synthgen::GenConfig gen_config_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const neuroevo::NeatConfig& cfg);
neuroevo::NeatConfig neat_config_from_json(const nlohmann::json& doc, neuroevo::NeatConfig base = {});

nlohmann::json to_json(const fuzzyga::FgaConfig& cfg);
fuzzyga::FgaConfig fga_config_from_json(const nlohmann::json& doc, fuzzyga::FgaConfig base = {});

/// A study config file: the study itself plus where its data comes from.
struct StudyFile {
  experiment::StudyConfig study;
  std::optional<std::filesystem::path> dataset;     // relative paths resolve against the file's directory
  std::optional<synthgen::GenConfig> synthgen;      // defaults when neither is given
  std::optional<std::filesystem::path> output;
};

StudyFile study_file_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
StudyFile load_study_file(const std::filesystem::path& path);

/// Dataset named by the study file, or generated from its synthgen section.
Dataset study_dataset(const StudyFile& file);

/// Every number the report needs, so CSVs can be regenerated without retraining.
nlohmann::json results_to_json(const std::vector<experiment::CaseResult>& results);
std::vector<experiment::CaseResult> results_from_json(const nlohmann::json& doc);

/// Trained agents with their models embedded ("cod2m-agents v1").
nlohmann::json agents_to_json(const std::vector<experiment::TrainedAgent>& agents);
std::vector<experiment::TrainedAgent> agents_from_json(const nlohmann::json& doc);

}  // namespace cod2m::io
