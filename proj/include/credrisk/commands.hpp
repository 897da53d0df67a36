#pragma once

#include "credrisk/evaluate.hpp"
#include "credrisk/model.hpp"
#include "credrisk/run_config.hpp"
#include "credrisk/synth.hpp"
#include "credrisk/trainer.hpp"

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace credrisk::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitData = 2,
    kExitNumeric = 3,
};

/// A failure tagged with the pipeline stage it came from.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& message, int exit_code)
        : std::runtime_error("[" + stage + "] " + message), stage_(std::move(stage)), exit_code_(exit_code) {}

    const std::string& stage() const { return stage_; }
    int exit_code() const { return exit_code_; }

private:
    std::string stage_;
    int exit_code_;
};

/// Exit code for any exception escaping a command.
int exit_code_for(const std::exception& e);

struct GenerateOutcome {
    std::size_t records = 0;
    std::size_t companies = 0;
};

/// Writes features.csv, labels.csv, manifest.csv and truth.json.
GenerateOutcome cmd_generate(const SynthConfig& config, const std::filesystem::path& out_dir);

struct IngestSummary {
    std::size_t records = 0;
    std::size_t companies_seen = 0;
    std::size_t companies_kept = 0;
    std::size_t samples = 0;
    std::map<std::string, std::size_t> class_counts;
    std::vector<std::string> warnings;
};

IngestSummary cmd_ingest_check(const RunConfig& config);

struct TrainOutcome {
    CreditModel model;
    EvalReport test_report;
    TrainHistory history;
    std::filesystem::path model_path;
};

/// split -> normalize -> SMOTE -> train -> evaluate on the test split. Writes
/// the model file, history.csv, report.json/csv, confusion.csv/svg,
/// test_features.csv, test_labels.csv and test_predictions.csv.
TrainOutcome cmd_train(const RunConfig& config);

/// Writes sweep.csv and sweep.svg. Uses `config.sweep_widths`.
std::vector<SweepRow> cmd_sweep(const RunConfig& config);

struct ScoredRow {
    std::string company_id;
    int fiscal_year = 0;
    Prediction prediction;
    std::string grade;
};

struct ScoreOutcome {
    std::vector<ScoredRow> rows;
    ScoreRange range;
    std::size_t skipped = 0;
};

/// Scores every complete row of a feature file with the stored normalization.
/// Writes scores.csv and score_summary.json.
ScoreOutcome cmd_score(const std::filesystem::path& model_path, const std::filesystem::path& features_path,
                       const std::filesystem::path& out_dir);

/// Reads a scores.csv-style file (company_id, fiscal_year, score). Writes
/// trend.csv, trend_years.csv, trend_summary.json and trend.svg.
TrendResult cmd_trend(const std::filesystem::path& scored_path, const std::filesystem::path& out_dir);

struct ComparisonOutcome {
    CorrelationResult correlation;
    std::size_t joined = 0;
};

/// Joins model scores with an external score file on company_id (and
/// fiscal_year when both files carry it) and correlates them. Model scores are
/// higher-is-riskier; `external_higher_is_better` states the external
/// convention. Writes comparison.csv, correlation.json and comparison.svg.
ComparisonOutcome cmd_compare_external(const std::filesystem::path& model_scores,
                                       const std::filesystem::path& external_scores,
                                       const std::string& external_column, bool external_higher_is_better,
                                       const std::filesystem::path& out_dir);

} // namespace credrisk::cli
