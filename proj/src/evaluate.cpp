#include "credrisk/evaluate.hpp"

#include "credrisk/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

namespace credrisk {

std::size_t argmax_class(const Eigen::Ref<const Eigen::VectorXd>& probabilities) {
    if (probabilities.size() == 0) {
        throw ConfigError("argmax of an empty probability vector");
    }
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < probabilities.size(); ++i) {
        if (probabilities(i) > probabilities(best)) {
            best = i;
        }
    }
    return static_cast<std::size_t>(best);
}

std::size_t round_to_class(double score, std::size_t classes) {
    if (classes == 0) {
        throw ConfigError("cannot round a score onto zero classes");
    }
    const double top = static_cast<double>(classes - 1);
    const double rounded = std::clamp(std::round(score), 0.0, top);
    return static_cast<std::size_t>(rounded);
}

Prediction predict_class(const MlpConfig& config, const Eigen::Ref<const Eigen::VectorXd>& output,
                         std::size_t classes) {
    if (config.head == HeadKind::classification) {
        if (static_cast<std::size_t>(output.size()) != config.classes) {
            throw DataError("classifier output has " + std::to_string(output.size()) + " entries, expected " +
                            std::to_string(config.classes));
        }
        double expected = 0.0;
        for (Eigen::Index c = 0; c < output.size(); ++c) {
            expected += static_cast<double>(c) * output(c);
        }
        return {expected, argmax_class(output)};
    }
    if (output.size() != 1) {
        throw DataError("regression output must be a single value");
    }
    return {output(0), round_to_class(output(0), classes)};
}

std::vector<Prediction> predict(const MlpConfig& config, const MlpParams& params,
                                const Eigen::Ref<const Eigen::MatrixXd>& inputs, std::size_t classes) {
    const Eigen::MatrixXd outputs = forward_batch(config, params, inputs);
    std::vector<Prediction> out;
    out.reserve(static_cast<std::size_t>(outputs.rows()));
    for (Eigen::Index i = 0; i < outputs.rows(); ++i) {
        out.push_back(predict_class(config, outputs.row(i).transpose(), classes));
    }
    return out;
}

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted, std::size_t count) {
    if (truth >= classes_ || predicted >= classes_) {
        throw ConfigError("confusion matrix cell (" + std::to_string(truth) + ", " + std::to_string(predicted) +
                          ") outside " + std::to_string(classes_) + " classes");
    }
    counts_[truth * classes_ + predicted] += count;
}

std::size_t ConfusionMatrix::total() const {
    return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
}

std::size_t ConfusionMatrix::trace() const {
    std::size_t t = 0;
    for (std::size_t i = 0; i < classes_; ++i) {
        t += at(i, i);
    }
    return t;
}

std::size_t ConfusionMatrix::row_sum(std::size_t truth) const {
    std::size_t s = 0;
    for (std::size_t j = 0; j < classes_; ++j) {
        s += at(truth, j);
    }
    return s;
}

double mean_notch_distance(const ConfusionMatrix& confusion) {
    const std::size_t n = confusion.total();
    if (n == 0) {
        return 0.0;
    }
    std::size_t weighted = 0;
    for (std::size_t i = 0; i < confusion.classes(); ++i) {
        for (std::size_t j = 0; j < confusion.classes(); ++j) {
            weighted += confusion.at(i, j) * (i > j ? i - j : j - i);
        }
    }
    return static_cast<double>(weighted) / static_cast<double>(n);
}

EvalReport make_report(HeadKind head, std::span<const Prediction> predictions,
                       std::span<const std::size_t> truth, std::size_t classes) {
    if (predictions.empty()) {
        throw ConfigError("cannot evaluate an empty dataset");
    }
    if (predictions.size() != truth.size()) {
        throw ConfigError("prediction and label counts differ");
    }
    EvalReport report;
    report.head = head;
    report.n = predictions.size();
    report.confusion = ConfusionMatrix(classes);
    double squared = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        report.confusion.add(truth[i], predictions[i].class_index);
        const double estimate = head == HeadKind::regression ? predictions[i].score
                                                             : static_cast<double>(predictions[i].class_index);
        const double d = estimate - static_cast<double>(truth[i]);
        squared += d * d;
    }
    const auto n = static_cast<double>(report.n);
    report.accuracy = static_cast<double>(report.confusion.trace()) / n;
    report.rms = std::sqrt(squared / n);
    report.mean_notch_distance = mean_notch_distance(report.confusion);
    report.predictions.assign(predictions.begin(), predictions.end());
    report.truth.assign(truth.begin(), truth.end());
    return report;
}

EvalReport eval_report(const MlpConfig& config, const MlpParams& params, const Dataset& data) {
    if (data.empty()) {
        throw ConfigError("cannot evaluate an empty dataset");
    }
    const std::size_t classes = data.class_map.size();
    const auto predictions = predict(config, params, data.design_matrix(), classes);
    std::vector<std::size_t> truth;
    truth.reserve(data.size());
    for (const auto& s : data.samples) {
        if (!s.label) {
            throw DataError("evaluation requires labeled samples");
        }
        truth.push_back(*s.label);
    }
    return make_report(config.head, predictions, truth, classes);
}

std::pair<double, double> least_squares_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw ConfigError("least squares needs at least two paired points");
    }
    const auto n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) {
        throw ConfigError("least squares needs at least two distinct x values");
    }
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

TrendResult trend_slope(std::span<const ScorePoint> scores) {
    std::vector<std::string> order;
    std::unordered_map<std::string, std::map<int, double>> series;
    std::map<int, std::pair<double, std::size_t>> by_year;
    for (const auto& p : scores) {
        auto [it, inserted] = series.try_emplace(p.company_id);
        if (inserted) {
            order.push_back(p.company_id);
        }
        if (!it->second.emplace(p.year, p.score).second) {
            throw DataError("company " + p.company_id + " has two scores for year " + std::to_string(p.year));
        }
        auto& acc = by_year[p.year];
        acc.first += p.score;
        ++acc.second;
    }

    TrendResult result;
    double slope_sum = 0.0;
    for (const auto& id : order) {
        const auto& points = series[id];
        if (points.size() < 2) {
            result.excluded.push_back(id);
            continue;
        }
        std::vector<double> years;
        std::vector<double> values;
        for (const auto& [year, score] : points) {
            years.push_back(static_cast<double>(year));
            values.push_back(score);
        }
        const auto [slope, intercept] = least_squares_line(years, values);
        result.companies.push_back({id, slope, intercept, points.size()});
        slope_sum += slope;
    }
    if (!result.companies.empty()) {
        result.mean_slope = slope_sum / static_cast<double>(result.companies.size());
    }

    std::vector<double> years;
    std::vector<double> means;
    for (const auto& [year, acc] : by_year) {
        const double mean = acc.first / static_cast<double>(acc.second);
        result.year_means.push_back({year, mean, acc.second});
        years.push_back(static_cast<double>(year));
        means.push_back(mean);
    }
    if (years.size() >= 2) {
        result.year_mean_slope = least_squares_line(years, means).first;
    }
    return result;
}

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) {
            ++j;
        }
        const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = rank;
        }
        i = j + 1;
    }
    return ranks;
}

namespace {

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) {
        return std::nullopt;
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

} // namespace

CorrelationResult correlation(std::span<const double> model_scores, std::span<const double> external_scores) {
    if (model_scores.size() != external_scores.size()) {
        throw ConfigError("correlation inputs differ in length");
    }
    if (model_scores.size() < 3) {
        throw ConfigError("correlation needs at least 3 pairs, got " + std::to_string(model_scores.size()));
    }
    CorrelationResult result;
    result.n = model_scores.size();
    result.pearson = pearson(model_scores, external_scores);
    const auto rx = average_ranks(model_scores);
    const auto ry = average_ranks(external_scores);
    result.spearman = pearson(rx, ry);
    return result;
}

ScoreRange score_range(std::span<const double> scores) {
    if (scores.empty()) {
        throw ConfigError("score range of an empty cohort");
    }
    const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    return {*lo, *hi, *hi - *lo};
}

} // namespace credrisk
