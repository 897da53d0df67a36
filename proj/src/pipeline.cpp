#include "credrisk/pipeline.hpp"

#include "credrisk/error.hpp"

namespace credrisk {

std::string to_string(NormalizationMode mode) {
    return mode == NormalizationMode::train_only ? "train_only" : "full_set";
}

NormalizationMode parse_normalization_mode(std::string_view text) {
    if (text == "train_only") return NormalizationMode::train_only;
    if (text == "full_set") return NormalizationMode::full_set;
    throw ConfigError("unknown normalization mode '" + std::string(text) + "' (expected train_only or full_set)");
}

std::string to_string(SplitMode mode) {
    return mode == SplitMode::by_sample ? "by_sample" : "by_company";
}

SplitMode parse_split_mode(std::string_view text) {
    if (text == "by_sample") return SplitMode::by_sample;
    if (text == "by_company") return SplitMode::by_company;
    throw ConfigError("unknown split mode '" + std::string(text) + "' (expected by_sample or by_company)");
}

PreparedData prepare(const Dataset& dataset, const PrepareOptions& options) {
    auto parts = split(dataset, options.train_fraction, options.split_seed, options.split_mode);

    PreparedData out;
    out.stats = fit_normalizer(options.normalization == NormalizationMode::full_set ? dataset : parts.train);
    out.train_raw = std::move(parts.train);
    out.test_raw = std::move(parts.test);
    out.test = normalized(out.stats, out.test_raw);
    auto train = normalized(out.stats, out.train_raw);
    if (options.oversample) {
        auto balanced = smote(train, options.smote_k, options.smote_seed);
        out.warnings = std::move(balanced.warnings);
        out.train = std::move(balanced.balanced);
    } else {
        out.train = std::move(train);
    }
    return out;
}

} // namespace credrisk
