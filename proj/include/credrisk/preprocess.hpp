#pragma once

#include "credrisk/ingest.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace credrisk {

/// Per-feature mean and population standard deviation.
struct NormalizationStats {
    std::vector<double> mean;
    std::vector<double> std;

    std::size_t size() const { return mean.size(); }
    friend bool operator==(const NormalizationStats&, const NormalizationStats&) = default;
};

/// Features whose standard deviation falls below this are treated as constant.
inline constexpr double kDegenerateStd = 1e-12;

enum class SplitMode {
    /// Uniform partition of individual company-year samples.
    by_sample,
    /// Whole companies go to one side; train size is approximate.
    by_company,
};

struct SplitResult {
    Dataset train;
    Dataset test;
    std::uint64_t seed = 0;
};

/// Seeded random partition. In `by_sample` mode |train| = round(fraction * m),
/// clamped so that both sides keep at least one sample; relative input order is
/// preserved on each side.
SplitResult split(const Dataset& dataset, double train_fraction, std::uint64_t seed,
                  SplitMode mode = SplitMode::by_sample);

NormalizationStats fit_normalizer(const Dataset& train);

/// (x - mean) / std for every cell, returned as a samples-by-features matrix.
Eigen::MatrixXd apply_normalizer(const NormalizationStats& stats, const Dataset& data);
void apply_normalizer_inplace(const NormalizationStats& stats, Eigen::Ref<Eigen::MatrixXd> rows);
/// Copy of `data` with normalized features.
Dataset normalized(const NormalizationStats& stats, const Dataset& data);

struct SmoteResult {
    Dataset balanced;
    std::vector<std::string> warnings;
    /// For each synthetic row, in order: (source row, neighbour row) as indices into the input.
    std::vector<std::pair<std::size_t, std::size_t>> origins;
};

inline constexpr std::size_t kDefaultSmoteNeighbors = 5;

/// Oversamples every minority class up to the majority count by interpolating
/// between a sample and one of its k nearest same-class neighbours. Original
/// rows come first, unchanged and in input order; synthetic rows follow,
/// ordered by (class, source index, synthesis counter).
SmoteResult smote(const Dataset& train, std::size_t k, std::uint64_t seed);

} // namespace credrisk
