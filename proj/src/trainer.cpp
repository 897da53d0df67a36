#include "credrisk/trainer.hpp"

#include "credrisk/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace credrisk {

namespace {

void check_training_inputs(const Dataset& train_set, const MlpConfig& config, const TrainConfig& tc) {
    config.validate();
    if (tc.epochs < 1) {
        throw ConfigError("training needs at least one epoch");
    }
    if (tc.eval_every < 1) {
        throw ConfigError("eval_every must be at least 1");
    }
    if (train_set.empty()) {
        throw ConfigError("training set is empty");
    }
    if (train_set.feature_count() != config.input_dim) {
        throw ConfigError("training set has " + std::to_string(train_set.feature_count()) +
                          " features, model expects " + std::to_string(config.input_dim));
    }
    if (config.head == HeadKind::classification && train_set.class_map.size() != config.classes) {
        throw ConfigError("training set has " + std::to_string(train_set.class_map.size()) +
                          " classes, classifier expects " + std::to_string(config.classes));
    }
}

HistoryEntry snapshot(std::size_t epoch, const MlpConfig& config, const MlpParams& params,
                      const Dataset& train_set, const Dataset* test_set) {
    HistoryEntry entry;
    entry.epoch = epoch;
    entry.train_loss = dataset_loss(config, params, train_set);
    const auto train_report = eval_report(config, params, train_set);
    entry.train_accuracy = train_report.accuracy;
    entry.train_rms = train_report.rms;
    if (test_set != nullptr && !test_set->empty()) {
        const auto test_report = eval_report(config, params, *test_set);
        entry.test_accuracy = test_report.accuracy;
        entry.test_rms = test_report.rms;
    }
    if (!std::isfinite(entry.train_loss)) {
        throw NumericError("non-finite training loss at epoch " + std::to_string(epoch));
    }
    return entry;
}

} // namespace

double dataset_loss(const MlpConfig& config, const MlpParams& params, const Dataset& data) {
    if (data.empty()) {
        throw ConfigError("loss of an empty dataset");
    }
    const Eigen::MatrixXd outputs = forward_batch(config, params, data.design_matrix());
    const Eigen::VectorXd targets = data.targets();
    const LossKind kind = config.loss_kind();
    double total = 0.0;
    for (Eigen::Index i = 0; i < outputs.rows(); ++i) {
        total += loss(outputs.row(i).transpose(), targets(i), kind);
    }
    return total / static_cast<double>(outputs.rows());
}

TrainedModel train(const Dataset& train_set, const MlpConfig& config, const TrainConfig& train_config,
                   const Dataset* test_set) {
    check_training_inputs(train_set, config, train_config);

    TrainedModel model{config, init_params(config, train_config.seed), {config.head, {}}};
    OptimizerState state;
    const Eigen::MatrixXd inputs = train_set.design_matrix();
    const Eigen::VectorXd targets = train_set.targets();
    const auto m = static_cast<std::size_t>(inputs.rows());
    const bool full_batch = train_config.batch_size == 0 || train_config.batch_size >= m;

    Rng shuffle_rng(derive_seed(train_config.seed, 1));
    std::vector<Eigen::Index> order(m);
    std::iota(order.begin(), order.end(), Eigen::Index{0});

    auto diverged = [&](const std::string& why) {
        return DivergenceError("training diverged: " + why, model.history, model.params);
    };

    for (std::size_t epoch = 1; epoch <= train_config.epochs; ++epoch) {
        try {
            if (full_batch) {
                const auto step = backward(config, model.params, inputs, targets);
                optimizer_step(model.params, step.gradients, state, train_config.optimizer);
            } else {
                std::shuffle(order.begin(), order.end(), shuffle_rng);
                for (std::size_t start = 0; start < m; start += train_config.batch_size) {
                    const auto count = static_cast<Eigen::Index>(std::min(train_config.batch_size, m - start));
                    Eigen::MatrixXd batch_x(count, inputs.cols());
                    Eigen::VectorXd batch_y(count);
                    for (Eigen::Index r = 0; r < count; ++r) {
                        const auto src = order[start + static_cast<std::size_t>(r)];
                        batch_x.row(r) = inputs.row(src);
                        batch_y(r) = targets(src);
                    }
                    const auto step = backward(config, model.params, batch_x, batch_y);
                    optimizer_step(model.params, step.gradients, state, train_config.optimizer);
                }
            }
            if (epoch == 1 || epoch % train_config.eval_every == 0 || epoch == train_config.epochs) {
                model.history.entries.push_back(snapshot(epoch, config, model.params, train_set, test_set));
            }
        } catch (const DataError&) {
            throw;
        } catch (const NumericError& e) {
            throw diverged(std::string(e.what()) + " (epoch " + std::to_string(epoch) + ")");
        }
    }
    return model;
}

std::vector<SweepRow> sweep(std::span<const std::size_t> widths, const Dataset& train_set,
                            const Dataset& test_set, const MlpConfig& config_template,
                            const TrainConfig& train_template) {
    if (widths.empty()) {
        throw ConfigError("sweep needs at least one hidden width");
    }
    std::vector<SweepRow> rows;
    rows.reserve(widths.size());
    for (const auto width : widths) {
        SweepRow row;
        row.width = width;
        TrainConfig tc = train_template;
        tc.seed = derive_seed(train_template.seed, width);
        for (const auto head : {HeadKind::classification, HeadKind::regression}) {
            MlpConfig config = config_template;
            config.hidden_width = width;
            config.head = head;
            const auto trained = train(train_set, config, tc);
            const auto train_report = eval_report(trained.config, trained.params, train_set);
            const auto test_report = eval_report(trained.config, trained.params, test_set);
            HeadMetrics metrics{train_report.accuracy, train_report.rms, test_report.accuracy, test_report.rms,
                                test_report.mean_notch_distance};
            (head == HeadKind::classification ? row.classification : row.regression) = metrics;
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace credrisk
