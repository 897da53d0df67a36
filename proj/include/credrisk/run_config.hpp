#pragma once

#include "credrisk/ingest.hpp"
#include "credrisk/neural_net.hpp"
#include "credrisk/pipeline.hpp"
#include "credrisk/synth.hpp"
#include "credrisk/trainer.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace credrisk {

/// Everything a pipeline command needs. Relative paths in a config file are
/// resolved against the file's directory.
struct RunConfig {
    std::filesystem::path features;
    std::filesystem::path labels;
    /// Empty means the built-in 43-field manifest.
    std::filesystem::path manifest;
    std::filesystem::path model;
    std::filesystem::path out_dir = "out";
    /// Empty means the built-in 21-grade scale.
    std::vector<std::string> scale;
    YearRange period;
    PrepareOptions prepare;
    MlpConfig mlp;
    TrainConfig train;
    std::vector<std::size_t> sweep_widths{10, 25, 50, 100, 200};

    RatingScale rating_scale() const;
    FeatureManifest feature_manifest() const;
};

/// Unknown keys are rejected so typos surface as ConfigError.
RunConfig run_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

/// `noise_scale` may be a single number or a per-feature list; `manifest` may
/// name a manifest file.
SynthConfig synth_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
SynthConfig load_synth_config(const std::filesystem::path& path);

/// Sets train.seed to `seed` and derives the split and SMOTE seeds from it.
void apply_master_seed(RunConfig& config, std::uint64_t seed);

} // namespace credrisk
