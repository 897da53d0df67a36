#pragma once

#include "credrisk/error.hpp"
#include "credrisk/evaluate.hpp"
#include "credrisk/ingest.hpp"
#include "credrisk/neural_net.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace credrisk {

struct TrainConfig {
    std::size_t epochs = 3000;
    /// 0 means full batch: one gradient step per epoch over the whole training set.
    std::size_t batch_size = 0;
    OptimizerConfig optimizer;
    std::uint64_t seed = 1;
    /// History is recorded at epoch 1, every `eval_every` epochs, and at the last epoch.
    std::size_t eval_every = 100;
};

struct HistoryEntry {
    /// Number of parameter updates applied when the snapshot was taken.
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double train_rms = 0.0;
    std::optional<double> test_accuracy;
    std::optional<double> test_rms;
};

struct TrainHistory {
    HeadKind head = HeadKind::classification;
    std::vector<HistoryEntry> entries;
};

struct TrainedModel {
    MlpConfig config;
    MlpParams params;
    TrainHistory history;
};

/// Training stopped because the loss or parameters became non-finite. Carries
/// the history so far and the last finite parameters.
class DivergenceError : public NumericError {
public:
    DivergenceError(const std::string& what, TrainHistory history, MlpParams last_finite)
        : NumericError(what), history(std::move(history)), last_finite(std::move(last_finite)) {}

    TrainHistory history;
    MlpParams last_finite;
};

/// Trains from freshly initialized parameters (seeded by `train_config.seed`).
/// `train_set` must be normalized and labeled with dense class indices.
TrainedModel train(const Dataset& train_set, const MlpConfig& config, const TrainConfig& train_config,
                   const Dataset* test_set = nullptr);

/// Mean loss over a normalized, labeled dataset.
double dataset_loss(const MlpConfig& config, const MlpParams& params, const Dataset& data);

struct HeadMetrics {
    double train_accuracy = 0.0;
    double train_rms = 0.0;
    double test_accuracy = 0.0;
    double test_rms = 0.0;
    double test_notch_distance = 0.0;
};

struct SweepRow {
    std::size_t width = 0;
    HeadMetrics classification;
    HeadMetrics regression;
};

/// Trains one classifier and one regressor per hidden width on the same data
/// with a per-width derived seed; rows follow the order of `widths`.
std::vector<SweepRow> sweep(std::span<const std::size_t> widths, const Dataset& train_set,
                            const Dataset& test_set, const MlpConfig& config_template,
                            const TrainConfig& train_template);

} // namespace credrisk
