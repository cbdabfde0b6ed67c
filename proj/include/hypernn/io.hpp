#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "hypernn/data.hpp"
#include "hypernn/evaluation.hpp"
#include "hypernn/model.hpp"
#include "hypernn/rules.hpp"
#include "hypernn/training.hpp"

namespace hypernn {

inline constexpr int kModelFormatVersion = 1;
inline constexpr const char* kToolVersion = "hypernn 0.1.0";

// Versioned model document {version, d, M, tau, phi, boxes: [...]}.
nlohmann::json model_to_json(const HyperNNModel& model);
HyperNNModel model_from_json(const nlohmann::json& j);

nlohmann::json standardizer_to_json(const Standardizer& st,
                                    const std::vector<std::string>& feature_names);
std::pair<Standardizer, std::vector<std::string>> standardizer_from_json(
    const nlohmann::json& j);

nlohmann::json split_to_json(const SplitSpec& split);

nlohmann::json report_to_json(const TrainReport& report);
std::string report_to_csv(const TrainReport& report);

nlohmann::json ruleset_to_json(const RuleSet& rules);

std::string cv_table_to_csv(const GridResult& result);
nlohmann::json cv_table_to_json(const GridResult& result);
std::string sweep_to_csv(const SweepResult& result);
std::string benchmark_to_csv(const std::vector<BenchmarkRecord>& records);
nlohmann::json benchmark_to_json(const std::vector<BenchmarkRecord>& records);

nlohmann::json config_to_json(const TrainConfig& config);

// Flat "key = value" config files, '#' comments. Unknown keys are errors.
TrainConfig parse_config_text(const std::string& text, TrainConfig base = {});
TrainConfig load_config_file(const std::string& path, TrainConfig base = {});
std::string config_to_text(const TrainConfig& config);

// FNV-1a over the raw file bytes, for dataset fingerprints.
std::string file_content_hash(const std::string& path);

struct RunManifest {
    std::string command;
    TrainConfig config;
    std::string dataset_path;
    std::size_t dataset_rows = 0;
    std::size_t dataset_cols = 0;
    std::string dataset_hash;
    unsigned long long seed = 0;
    std::vector<std::string> artifacts;
    std::string tool_version = kToolVersion;

    nlohmann::json to_json() const;
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace hypernn
