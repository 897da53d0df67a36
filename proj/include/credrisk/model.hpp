#pragma once

#include "credrisk/ingest.hpp"
#include "credrisk/neural_net.hpp"
#include "credrisk/preprocess.hpp"
#include "credrisk/rating_scale.hpp"

#include <filesystem>
#include <string>

namespace credrisk {

/// Everything needed to score raw feature rows: the network, the training
/// normalization statistics, the class map and the feature manifest.
struct CreditModel {
    RatingScale scale = RatingScale::standard();
    ClassIndexMap class_map;
    FeatureManifest manifest;
    NormalizationStats normalization;
    MlpConfig config;
    MlpParams params;
};

inline constexpr int kModelFormatVersion = 1;

/// Versioned JSON document whose payload is protected by a SHA-256 checksum.
/// Output is a pure function of the model, so equal models give equal bytes.
std::string serialize_model(const CreditModel& model);
/// Throws DataError on an unknown format/version, checksum mismatch or
/// inconsistent shapes.
CreditModel deserialize_model(const std::string& text);

void save_model(const std::filesystem::path& path, const CreditModel& model);
CreditModel load_model(const std::filesystem::path& path);

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);

} // namespace credrisk
