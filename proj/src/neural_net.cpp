#include "credrisk/neural_net.hpp"

#include "credrisk/error.hpp"
#include "credrisk/random.hpp"

#include <cmath>

namespace credrisk {

std::string to_string(HeadKind head) {
    return head == HeadKind::classification ? "classification" : "regression";
}

std::string to_string(Activation activation) {
    return activation == Activation::relu ? "relu" : "tanh";
}

std::string to_string(LossKind loss) {
    return loss == LossKind::sparse_categorical_cross_entropy ? "sparse_categorical_cross_entropy"
                                                              : "mean_squared_error";
}

HeadKind parse_head_kind(std::string_view text) {
    if (text == "classification") return HeadKind::classification;
    if (text == "regression") return HeadKind::regression;
    throw ConfigError("unknown head '" + std::string(text) + "' (expected classification or regression)");
}

Activation parse_activation(std::string_view text) {
    if (text == "relu") return Activation::relu;
    if (text == "tanh") return Activation::tanh;
    throw ConfigError("unknown activation '" + std::string(text) + "' (expected relu or tanh)");
}

std::string to_string(OptimizerKind kind) {
    return kind == OptimizerKind::adam ? "adam" : "gradient_descent";
}

OptimizerKind parse_optimizer_kind(std::string_view text) {
    if (text == "adam") return OptimizerKind::adam;
    if (text == "gradient_descent" || text == "sgd") return OptimizerKind::gradient_descent;
    throw ConfigError("unknown optimizer '" + std::string(text) + "' (expected adam or gradient_descent)");
}

void MlpConfig::validate() const {
    if (input_dim < 1 || hidden_layers < 1 || hidden_width < 1) {
        throw ConfigError("MLP input dimension, depth and width must all be at least 1");
    }
    if (head == HeadKind::classification && classes < 2) {
        throw ConfigError("a classification head needs at least 2 classes, got " + std::to_string(classes));
    }
}

std::size_t MlpParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) {
        n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
    }
    return n;
}

bool MlpParams::all_finite() const {
    for (const auto& l : layers) {
        if (!l.weights.allFinite() || !l.bias.allFinite()) {
            return false;
        }
    }
    return true;
}

MlpParams MlpParams::zeros_like() const {
    MlpParams out;
    out.layers.reserve(layers.size());
    for (const auto& l : layers) {
        out.layers.push_back({Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()),
                              Eigen::VectorXd::Zero(l.bias.size())});
    }
    return out;
}

bool operator==(const MlpParams& a, const MlpParams& b) {
    if (a.layers.size() != b.layers.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.layers.size(); ++i) {
        const auto& x = a.layers[i];
        const auto& y = b.layers[i];
        if (x.weights.rows() != y.weights.rows() || x.weights.cols() != y.weights.cols() ||
            x.bias.size() != y.bias.size() || x.weights != y.weights || x.bias != y.bias) {
            return false;
        }
    }
    return true;
}

namespace {

std::vector<std::pair<std::size_t, std::size_t>> layer_shapes(const MlpConfig& config) {
    std::vector<std::pair<std::size_t, std::size_t>> shapes; // (out, in)
    std::size_t in = config.input_dim;
    for (std::size_t l = 0; l < config.hidden_layers; ++l) {
        shapes.emplace_back(config.hidden_width, in);
        in = config.hidden_width;
    }
    shapes.emplace_back(config.output_dim(), in);
    return shapes;
}

void activate(Activation act, Eigen::MatrixXd& z) {
    if (act == Activation::relu) {
        z = z.cwiseMax(0.0);
    } else {
        z = z.array().tanh().matrix();
    }
}

// Derivative of the activation, expressed through the post-activation value.
void scale_by_derivative(Activation act, const Eigen::MatrixXd& activated, Eigen::MatrixXd& delta) {
    if (act == Activation::relu) {
        delta = (activated.array() > 0.0).select(delta, 0.0);
    } else {
        delta = (delta.array() * (1.0 - activated.array().square())).matrix();
    }
}

void softmax_columns(Eigen::MatrixXd& logits) {
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
        auto col = logits.col(c);
        const double max = col.maxCoeff();
        col = (col.array() - max).exp().matrix();
        col /= col.sum();
    }
}

struct ForwardTrace {
    std::vector<Eigen::MatrixXd> activations; // activations[0] = inputs^T, then each hidden layer
    Eigen::MatrixXd logits;                   // out x n
};

ForwardTrace run_layers(const MlpConfig& config, const MlpParams& params,
                        const Eigen::Ref<const Eigen::MatrixXd>& inputs) {
    ForwardTrace trace;
    trace.activations.reserve(params.layers.size());
    trace.activations.emplace_back(inputs.transpose());
    for (std::size_t l = 0; l + 1 < params.layers.size(); ++l) {
        const auto& layer = params.layers[l];
        Eigen::MatrixXd z = layer.weights * trace.activations.back();
        z.colwise() += layer.bias;
        activate(config.activation, z);
        if (!z.allFinite()) {
            throw NumericError("non-finite activation in hidden layer " + std::to_string(l + 1));
        }
        trace.activations.push_back(std::move(z));
    }
    const auto& out = params.layers.back();
    trace.logits = out.weights * trace.activations.back();
    trace.logits.colwise() += out.bias;
    if (!trace.logits.allFinite()) {
        throw NumericError("non-finite value in output layer " + std::to_string(params.layers.size()));
    }
    return trace;
}

void check_inputs(const MlpConfig& config, const Eigen::Ref<const Eigen::MatrixXd>& inputs) {
    if (static_cast<std::size_t>(inputs.cols()) != config.input_dim) {
        throw DataError("model expects " + std::to_string(config.input_dim) + " features, got " +
                        std::to_string(inputs.cols()));
    }
    if (!inputs.allFinite()) {
        throw DataError("model input contains non-finite values");
    }
}

} // namespace

void check_shapes(const MlpConfig& config, const MlpParams& params) {
    config.validate();
    const auto shapes = layer_shapes(config);
    if (shapes.size() != params.layers.size()) {
        throw ConfigError("parameter set has " + std::to_string(params.layers.size()) +
                          " layers, configuration implies " + std::to_string(shapes.size()));
    }
    for (std::size_t l = 0; l < shapes.size(); ++l) {
        const auto& layer = params.layers[l];
        const auto [out, in] = shapes[l];
        if (static_cast<std::size_t>(layer.weights.rows()) != out ||
            static_cast<std::size_t>(layer.weights.cols()) != in ||
            static_cast<std::size_t>(layer.bias.size()) != out) {
            throw ConfigError("layer " + std::to_string(l + 1) + " has shape " +
                              std::to_string(layer.weights.rows()) + "x" +
                              std::to_string(layer.weights.cols()) + ", expected " + std::to_string(out) +
                              "x" + std::to_string(in));
        }
    }
}

MlpParams init_params(const MlpConfig& config, std::uint64_t seed) {
    config.validate();
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double gain = config.activation == Activation::relu ? 2.0 : 1.0;

    MlpParams params;
    for (const auto& [out, in] : layer_shapes(config)) {
        const double scale = std::sqrt(gain / static_cast<double>(in));
        DenseLayer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out))};
        // Column-major fill order fixes the draw sequence.
        for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
            for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
                layer.weights(r, c) = scale * normal(rng);
            }
        }
        params.layers.push_back(std::move(layer));
    }
    return params;
}

Eigen::MatrixXd forward_batch(const MlpConfig& config, const MlpParams& params,
                              const Eigen::Ref<const Eigen::MatrixXd>& inputs) {
    check_inputs(config, inputs);
    auto trace = run_layers(config, params, inputs);
    if (config.head == HeadKind::classification) {
        softmax_columns(trace.logits);
    }
    return trace.logits.transpose();
}

Eigen::VectorXd forward(const MlpConfig& config, const MlpParams& params,
                        const Eigen::Ref<const Eigen::VectorXd>& x) {
    const Eigen::MatrixXd row = x.transpose();
    return forward_batch(config, params, row).row(0).transpose();
}

double loss(const Eigen::Ref<const Eigen::VectorXd>& output, double target, LossKind kind) {
    if (kind == LossKind::mean_squared_error) {
        if (output.size() != 1 || !std::isfinite(target)) {
            throw DataError("squared-error loss needs a scalar output and a finite target");
        }
        const double d = output(0) - target;
        return d * d;
    }
    const auto c = static_cast<double>(output.size());
    if (!(target >= 0.0 && target < c) || target != std::floor(target)) {
        throw DataError("class target " + std::to_string(target) + " outside 0.." +
                        std::to_string(output.size() - 1));
    }
    return -std::log(std::max(output(static_cast<Eigen::Index>(target)), kProbabilityFloor));
}

BackwardResult backward(const MlpConfig& config, const MlpParams& params,
                        const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                        const Eigen::Ref<const Eigen::VectorXd>& targets) {
    if (inputs.rows() == 0) {
        throw DataError("backward needs a non-empty batch");
    }
    if (targets.size() != inputs.rows()) {
        throw DataError("batch has " + std::to_string(inputs.rows()) + " inputs but " +
                        std::to_string(targets.size()) + " targets");
    }
    check_inputs(config, inputs);
    auto trace = run_layers(config, params, inputs);
    const auto n = inputs.rows();
    const double inv_n = 1.0 / static_cast<double>(n);

    BackwardResult result;
    Eigen::MatrixXd delta; // dLoss/dLogits, out x n
    if (config.head == HeadKind::classification) {
        const auto classes = trace.logits.rows();
        double total = 0.0;
        Eigen::MatrixXd probs = trace.logits;
        for (Eigen::Index c = 0; c < n; ++c) {
            const double t = targets(c);
            if (!(t >= 0.0 && t < static_cast<double>(classes)) || t != std::floor(t)) {
                throw DataError("class target " + std::to_string(t) + " outside 0.." +
                                std::to_string(classes - 1));
            }
            auto col = probs.col(c);
            const double max = col.maxCoeff();
            const double lse = max + std::log((col.array() - max).exp().sum());
            total += lse - col(static_cast<Eigen::Index>(t));
            col = (col.array() - lse).exp().matrix();
        }
        result.loss = total * inv_n;
        delta = probs;
        for (Eigen::Index c = 0; c < n; ++c) {
            delta(static_cast<Eigen::Index>(targets(c)), c) -= 1.0;
        }
        delta *= inv_n;
        result.outputs = probs.transpose();
    } else {
        if (!targets.allFinite()) {
            throw DataError("regression targets must be finite");
        }
        const Eigen::RowVectorXd residual = trace.logits.row(0) - targets.transpose();
        result.loss = residual.squaredNorm() * inv_n;
        delta = (2.0 * inv_n) * residual;
        result.outputs = trace.logits.transpose();
    }

    result.gradients.layers.resize(params.layers.size());
    for (std::size_t l = params.layers.size(); l-- > 0;) {
        const auto& input = trace.activations[l];
        auto& g = result.gradients.layers[l];
        g.weights = delta * input.transpose();
        g.bias = delta.rowwise().sum();
        if (!g.weights.allFinite() || !g.bias.allFinite()) {
            throw NumericError("non-finite gradient in layer " + std::to_string(l + 1));
        }
        if (l > 0) {
            Eigen::MatrixXd upstream = params.layers[l].weights.transpose() * delta;
            scale_by_derivative(config.activation, input, upstream);
            delta = std::move(upstream);
        }
    }
    if (!std::isfinite(result.loss)) {
        throw NumericError("non-finite loss");
    }
    return result;
}

void optimizer_step(MlpParams& params, const MlpGradients& grads, OptimizerState& state,
                    const OptimizerConfig& config) {
    if (grads.layers.size() != params.layers.size()) {
        throw ConfigError("gradient and parameter layer counts differ");
    }
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        if (grads.layers[l].weights.rows() != params.layers[l].weights.rows() ||
            grads.layers[l].weights.cols() != params.layers[l].weights.cols() ||
            grads.layers[l].bias.size() != params.layers[l].bias.size()) {
            throw ConfigError("gradient shape differs from parameters in layer " + std::to_string(l + 1));
        }
    }

    if (config.kind == OptimizerKind::gradient_descent) {
        MlpParams next = params;
        for (std::size_t l = 0; l < next.layers.size(); ++l) {
            next.layers[l].weights -= config.learning_rate * grads.layers[l].weights;
            next.layers[l].bias -= config.learning_rate * grads.layers[l].bias;
        }
        if (!next.all_finite()) {
            throw NumericError("gradient-descent update produced non-finite parameters");
        }
        params = std::move(next);
        ++state.step;
        return;
    }

    OptimizerState next_state = state;
    if (next_state.first_moment.layers.empty()) {
        next_state.first_moment = params.zeros_like();
        next_state.second_moment = params.zeros_like();
    }
    ++next_state.step;
    const double t = static_cast<double>(next_state.step);
    const double correction1 = 1.0 - std::pow(config.beta1, t);
    const double correction2 = 1.0 - std::pow(config.beta2, t);

    MlpParams next = params;
    auto update = [&](auto& theta, const auto& g, auto& m, auto& v) {
        m = config.beta1 * m + (1.0 - config.beta1) * g;
        v = config.beta2 * v + (1.0 - config.beta2) * g.cwiseProduct(g);
        theta.array() -= config.learning_rate * (m.array() / correction1) /
                         ((v.array() / correction2).sqrt() + config.epsilon);
    };
    for (std::size_t l = 0; l < next.layers.size(); ++l) {
        update(next.layers[l].weights, grads.layers[l].weights, next_state.first_moment.layers[l].weights,
               next_state.second_moment.layers[l].weights);
        update(next.layers[l].bias, grads.layers[l].bias, next_state.first_moment.layers[l].bias,
               next_state.second_moment.layers[l].bias);
    }
    if (!next.all_finite()) {
        throw NumericError("Adam update produced non-finite parameters");
    }
    params = std::move(next);
    state = std::move(next_state);
}

} // namespace credrisk
