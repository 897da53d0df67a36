#pragma once

#include "credrisk/preprocess.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace credrisk {

enum class NormalizationMode {
    /// Statistics fitted on the training split only.
    train_only,
    /// Statistics fitted on the full sample set before splitting.
    full_set,
};

std::string to_string(NormalizationMode mode);
NormalizationMode parse_normalization_mode(std::string_view text);
std::string to_string(SplitMode mode);
SplitMode parse_split_mode(std::string_view text);

struct PrepareOptions {
    double train_fraction = 0.8;
    std::uint64_t split_seed = 42;
    SplitMode split_mode = SplitMode::by_sample;
    NormalizationMode normalization = NormalizationMode::train_only;
    bool oversample = true;
    std::size_t smote_k = kDefaultSmoteNeighbors;
    std::uint64_t smote_seed = 17;
};

struct PreparedData {
    /// Training split before normalization and oversampling.
    Dataset train_raw;
    /// Test split before normalization.
    Dataset test_raw;
    /// Normalized, oversampled training set.
    Dataset train;
    /// Normalized test set.
    Dataset test;
    NormalizationStats stats;
    std::vector<std::string> warnings;
};

/// split -> fit normalizer -> normalize -> SMOTE on the normalized training set.
PreparedData prepare(const Dataset& dataset, const PrepareOptions& options);

} // namespace credrisk
