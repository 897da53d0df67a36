#pragma once

#include "credrisk/ingest.hpp"
#include "credrisk/neural_net.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace credrisk {

/// Model output for one sample. `score` is the continuous risk score: the raw
/// regression output, or the probability-weighted class index for a
/// classifier. Higher means riskier.
struct Prediction {
    double score = 0.0;
    std::size_t class_index = 0;
};

/// Argmax with ties broken toward the lower (better) class.
std::size_t argmax_class(const Eigen::Ref<const Eigen::VectorXd>& probabilities);
/// Nearest integer, clamped to [0, classes-1].
std::size_t round_to_class(double score, std::size_t classes);

/// `output` is one head output row as returned by forward(); `classes` is only
/// used by the regression head for clamping.
Prediction predict_class(const MlpConfig& config, const Eigen::Ref<const Eigen::VectorXd>& output,
                         std::size_t classes);

/// Predictions for every row of a normalized samples-by-features matrix.
std::vector<Prediction> predict(const MlpConfig& config, const MlpParams& params,
                                const Eigen::Ref<const Eigen::MatrixXd>& inputs, std::size_t classes);

/// Square count matrix, rows = true class, columns = predicted class.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::size_t classes = 0) : classes_(classes), counts_(classes * classes, 0) {}

    void add(std::size_t truth, std::size_t predicted, std::size_t count = 1);
    std::size_t at(std::size_t truth, std::size_t predicted) const { return counts_[truth * classes_ + predicted]; }
    std::size_t classes() const { return classes_; }
    std::size_t total() const;
    std::size_t trace() const;
    std::size_t row_sum(std::size_t truth) const;

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

private:
    std::size_t classes_;
    std::vector<std::size_t> counts_;
};

/// Mean absolute class-index distance over all counted samples; 0 for an empty matrix.
double mean_notch_distance(const ConfusionMatrix& confusion);

struct EvalReport {
    HeadKind head = HeadKind::classification;
    std::size_t n = 0;
    double accuracy = 0.0;
    /// Root-mean-square error in class-index units: on the raw score for the
    /// regression head, on the argmax index for the classification head.
    double rms = 0.0;
    double mean_notch_distance = 0.0;
    ConfusionMatrix confusion;
    std::vector<Prediction> predictions;
    std::vector<std::size_t> truth;
};

/// Builds a report from predictions already made; throws ConfigError when empty.
EvalReport make_report(HeadKind head, std::span<const Prediction> predictions,
                       std::span<const std::size_t> truth, std::size_t classes);

/// Scores a normalized, labeled dataset.
EvalReport eval_report(const MlpConfig& config, const MlpParams& params, const Dataset& data);

struct ScorePoint {
    std::string company_id;
    int year = 0;
    double score = 0.0;
};

struct CompanyTrend {
    std::string company_id;
    double slope = 0.0;
    double intercept = 0.0;
    std::size_t years = 0;
};

struct YearMean {
    int year = 0;
    double mean_score = 0.0;
    std::size_t companies = 0;
};

struct TrendResult {
    /// Per-company least-squares fits, in order of first appearance.
    std::vector<CompanyTrend> companies;
    /// Mean of per-company slopes; absent when no company qualifies.
    std::optional<double> mean_slope;
    /// Cross-company mean score per year, ascending years.
    std::vector<YearMean> year_means;
    /// Least-squares slope of the year-mean series; absent with fewer than 2 years.
    std::optional<double> year_mean_slope;
    /// Companies with fewer than two distinct years.
    std::vector<std::string> excluded;
};

/// Ordinary least-squares slope and intercept of y on x; throws ConfigError when
/// x has fewer than two distinct values.
std::pair<double, double> least_squares_line(std::span<const double> x, std::span<const double> y);

/// Per-company score trend against year; positive slope means deteriorating credit.
/// Throws DataError if a company repeats a year.
TrendResult trend_slope(std::span<const ScorePoint> scores);

struct CorrelationResult {
    /// Absent when either series has zero variance.
    std::optional<double> pearson;
    std::optional<double> spearman;
    std::size_t n = 0;
};

/// Ranks starting at 1; tied values share their average rank.
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson on values and Spearman on average ranks. Throws ConfigError on
/// unequal lengths or fewer than 3 pairs.
CorrelationResult correlation(std::span<const double> model_scores, std::span<const double> external_scores);

struct ScoreRange {
    double min = 0.0;
    double max = 0.0;
    double spread = 0.0;
};

/// Throws ConfigError on an empty input.
ScoreRange score_range(std::span<const double> scores);

} // namespace credrisk
