#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace credrisk {

enum class HeadKind {
    /// Softmax over C classes, trained with sparse categorical cross-entropy.
    classification,
    /// Single linear output unit, trained with mean squared error against class indices.
    regression,
};

enum class Activation { relu, tanh };

enum class LossKind { sparse_categorical_cross_entropy, mean_squared_error };

std::string to_string(HeadKind head);
std::string to_string(Activation activation);
std::string to_string(LossKind loss);
HeadKind parse_head_kind(std::string_view text);
Activation parse_activation(std::string_view text);

struct MlpConfig {
    std::size_t input_dim = 43;
    std::size_t hidden_layers = 3;
    std::size_t hidden_width = 50;
    HeadKind head = HeadKind::classification;
    /// Output classes for the classification head; ignored by the regression head.
    std::size_t classes = 6;
    Activation activation = Activation::relu;

    /// Throws ConfigError when a dimension is zero or a classifier has fewer than 2 classes.
    void validate() const;
    std::size_t output_dim() const { return head == HeadKind::classification ? classes : 1; }
    LossKind loss_kind() const {
        return head == HeadKind::classification ? LossKind::sparse_categorical_cross_entropy
                                                : LossKind::mean_squared_error;
    }

    friend bool operator==(const MlpConfig&, const MlpConfig&) = default;
};

struct DenseLayer {
    Eigen::MatrixXd weights; // out x in
    Eigen::VectorXd bias;    // out
};

/// Weights and biases of every layer, input side first. Also used as the
/// container for gradients and optimizer moments.
struct MlpParams {
    std::vector<DenseLayer> layers;

    std::size_t parameter_count() const;
    bool all_finite() const;
    /// Same shapes, every entry zero.
    MlpParams zeros_like() const;

    friend bool operator==(const MlpParams& a, const MlpParams& b);
};

using MlpGradients = MlpParams;

/// Throws ConfigError if `params` does not have the layer shapes `config` implies.
void check_shapes(const MlpConfig& config, const MlpParams& params);

/// Zero-mean normal weights with variance 2/fan_in (ReLU) or 1/fan_in (tanh), zero biases.
MlpParams init_params(const MlpConfig& config, std::uint64_t seed);

/// Head output for one normalized input: C probabilities, or a 1-vector score.
/// Throws DataError on a wrong-sized or non-finite input.
Eigen::VectorXd forward(const MlpConfig& config, const MlpParams& params,
                        const Eigen::Ref<const Eigen::VectorXd>& x);

/// Head outputs for a samples-by-features matrix; one row per sample.
Eigen::MatrixXd forward_batch(const MlpConfig& config, const MlpParams& params,
                              const Eigen::Ref<const Eigen::MatrixXd>& inputs);

inline constexpr double kProbabilityFloor = 1e-15;

/// Per-sample loss from a head output: -ln(max(p[target], 1e-15)) or (output - target)^2.
double loss(const Eigen::Ref<const Eigen::VectorXd>& output, double target, LossKind kind);

struct BackwardResult {
    MlpGradients gradients;
    /// Mean loss over the batch.
    double loss = 0.0;
    /// Head outputs, one row per sample (same as forward_batch).
    Eigen::MatrixXd outputs;
};

/// Gradient of the mean batch loss with respect to every parameter.
/// `inputs` is samples-by-features, `targets` holds class indices or real targets.
/// Throws NumericError naming the layer if an intermediate becomes non-finite.
BackwardResult backward(const MlpConfig& config, const MlpParams& params,
                        const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                        const Eigen::Ref<const Eigen::VectorXd>& targets);

enum class OptimizerKind { adam, gradient_descent };

std::string to_string(OptimizerKind kind);
OptimizerKind parse_optimizer_kind(std::string_view text);

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::adam;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    friend bool operator==(const OptimizerConfig&, const OptimizerConfig&) = default;
};

struct OptimizerState {
    std::uint64_t step = 0;
    MlpParams first_moment;
    MlpParams second_moment;
};

/// Applies one update in place. Params and state are left untouched when the
/// update would produce a non-finite value (NumericError).
void optimizer_step(MlpParams& params, const MlpGradients& grads, OptimizerState& state,
                    const OptimizerConfig& config);

} // namespace credrisk
