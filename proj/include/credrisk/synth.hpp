#pragma once

#include "credrisk/ingest.hpp"
#include "credrisk/rating_scale.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace credrisk {

enum class TransitionKind {
    /// One notch up or down with equal probability, reflecting at the ends.
    symmetric,
    /// One notch toward worse credit; the worst class is absorbing.
    deteriorating,
};

std::string to_string(TransitionKind kind);
TransitionKind parse_transition_kind(std::string_view text);

/// Parameters of a synthetic company-year panel.
///
/// Each company starts in a class drawn from `class_weights` and changes class
/// with probability `transition_prob` per year. Features are the class prototype
/// plus Gaussian noise, then mapped to reporting units as
/// `unit_f * (offset_f + value)`.
///
/// When `prototypes` is empty, prototypes lie on a random line through feature
/// space with `prototype_spacing` noise units between adjacent classes, so the
/// class structure is ordinal.
struct SynthConfig {
    std::size_t companies = 306;
    /// Companies that get one blanked cell in one year; the completeness filter
    /// drops them. Capped at `companies`.
    std::size_t incomplete_companies = 70;
    std::size_t years = 7;
    int first_year = 2010;
    FeatureManifest manifest = FeatureManifest::standard();
    RatingScale scale = RatingScale::standard();
    /// Observed classes, best first.
    std::vector<std::string> classes{"A+", "A-", "BB+", "B-", "CCC+", "D"};
    /// Prior over `classes` for a company's first year (illustrative bi-modal default).
    std::vector<double> class_weights{0.06, 0.36, 0.08, 0.34, 0.10, 0.06};
    /// Optional explicit prototypes, one feature vector per class.
    std::vector<std::vector<double>> prototypes;
    double prototype_spacing = 2.5;
    /// Per-feature noise standard deviation; empty means 1.0 for every feature.
    std::vector<double> noise_scale;
    double transition_prob = 0.07;
    TransitionKind transitions = TransitionKind::symmetric;
    std::uint64_t seed = 2024;

    std::size_t feature_dim() const { return manifest.size(); }
    YearRange period() const { return {first_year, first_year + static_cast<int>(years) - 1}; }
    /// Throws ConfigError on inconsistent sizes, weights not summing to 1, or
    /// probabilities outside [0, 1].
    void validate() const;
};

/// Generator ground truth.
struct SynthTruth {
    /// Prototype per class in noise units (before the reporting-unit map).
    std::vector<std::vector<double>> prototypes;
    std::vector<double> offsets;
    std::vector<double> units;
    /// Class index per company per year.
    std::vector<std::vector<std::size_t>> trajectories;
    std::vector<std::string> company_ids;
    std::vector<std::string> incomplete_ids;
    std::size_t transitions_observed = 0;
    std::size_t transitions_possible = 0;
};

struct SynthPanel {
    FeatureManifest manifest;
    ClassIndexMap class_map;
    YearRange period;
    /// Labeled records, company-major, years ascending.
    std::vector<CompanyYearRecord> records;
    SynthTruth truth;
};

/// Deterministic per seed. Feature-space geometry (prototypes, offsets, units)
/// depends only on `seed`, `manifest`, class count and spacing, so two configs
/// that differ only in `companies`, weights or transitions share it.
SynthPanel generate(const SynthConfig& config);

/// Same as generate() but with the feature geometry of `reference` (e.g. an
/// out-of-distribution cohort scored by a model trained on `reference` data).
SynthPanel generate_with_truth(const SynthConfig& config, const SynthTruth& reference);

/// Writes `features.csv` and `labels.csv` into `dir` (created if needed).
void write_panel(const SynthPanel& panel, const std::filesystem::path& dir);

} // namespace credrisk
