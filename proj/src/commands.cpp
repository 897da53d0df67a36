#include "credrisk/commands.hpp"

#include "credrisk/csv.hpp"
#include "credrisk/error.hpp"
#include "credrisk/pipeline.hpp"
#include "credrisk/svg_plot.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <unordered_map>

namespace credrisk::cli {

using nlohmann::json;
namespace fs = std::filesystem;

int exit_code_for(const std::exception& e) {
    if (const auto* s = dynamic_cast<const StageError*>(&e)) return s->exit_code();
    if (dynamic_cast<const ConfigError*>(&e)) return kExitUsage;
    if (dynamic_cast<const NumericError*>(&e)) return kExitNumeric;
    return kExitData;
}

namespace {

template <class F>
auto stage(const std::string& name, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const ConfigError& e) {
        throw StageError(name, e.what(), kExitUsage);
    } catch (const NumericError& e) {
        throw StageError(name, e.what(), kExitNumeric);
    } catch (const std::exception& e) {
        throw StageError(name, e.what(), kExitData);
    }
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw DataError("cannot create output directory '" + dir.string() + "'");
    }
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot write '" + path.string() + "'");
    }
    return out;
}

void write_json(const fs::path& path, const json& doc) {
    auto out = open_out(path);
    out << doc.dump(2) << '\n';
}

json optional_json(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

std::string fmt(double v) {
    return csv::format_double(v);
}

std::string fmt(const std::optional<double>& v) {
    return v ? csv::format_double(*v) : std::string{};
}

FilterResult load_labeled(const RunConfig& config) {
    if (config.features.empty()) {
        throw StageError("config", "no feature file configured", kExitUsage);
    }
    if (config.labels.empty()) {
        throw StageError("config", "no label file configured", kExitUsage);
    }
    const auto manifest = stage("load-manifest", [&] { return config.feature_manifest(); });
    const auto scale = stage("config", [&] { return config.rating_scale(); });
    auto records = stage("load-features", [&] { return load_financials(config.features, manifest); });
    stage("load-labels", [&] {
        join_labels(records, config.labels, scale);
        return 0;
    });
    auto filtered = stage("filter", [&] { return filter_complete(records, manifest, config.period, scale); });
    if (filtered.dataset.empty()) {
        throw StageError("filter", "no usable samples after the completeness filter", kExitData);
    }
    return filtered;
}

void write_confusion(const fs::path& dir, const EvalReport& report, const ClassIndexMap& classes,
                     const std::string& title) {
    auto out = open_out(dir / "confusion.csv");
    std::vector<std::string> header{"true\\predicted"};
    for (const auto& g : classes.grades()) header.push_back(g);
    csv::write_row(out, header);
    std::vector<std::vector<std::size_t>> grid(classes.size(), std::vector<std::size_t>(classes.size()));
    for (std::size_t i = 0; i < classes.size(); ++i) {
        std::vector<std::string> row{classes.grade(i)};
        for (std::size_t j = 0; j < classes.size(); ++j) {
            grid[i][j] = report.confusion.at(i, j);
            row.push_back(std::to_string(grid[i][j]));
        }
        csv::write_row(out, row);
    }
    plot::write(dir / "confusion.svg",
                plot::render_grid(title, classes.grades(), classes.grades(), grid, "true", "predicted"));
}

json report_json(const EvalReport& report, const ClassIndexMap& classes) {
    json confusion = json::array();
    for (std::size_t i = 0; i < report.confusion.classes(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < report.confusion.classes(); ++j) row.push_back(report.confusion.at(i, j));
        confusion.push_back(row);
    }
    return {{"head", to_string(report.head)},
            {"n", report.n},
            {"accuracy", report.accuracy},
            {"rms", report.rms},
            {"rms_basis", report.head == HeadKind::regression ? "raw score" : "argmax class index"},
            {"mean_notch_distance", report.mean_notch_distance},
            {"classes", classes.grades()},
            {"confusion", confusion}};
}

} // namespace

GenerateOutcome cmd_generate(const SynthConfig& config, const fs::path& out_dir) {
    const auto panel = stage("generate", [&] { return generate(config); });
    stage("write", [&] {
        ensure_dir(out_dir);
        write_panel(panel, out_dir);
        panel.manifest.save(out_dir / "manifest.csv");
        json truth = {{"seed", config.seed},
                      {"classes", config.classes},
                      {"period", {{"first", panel.period.first}, {"last", panel.period.last}}},
                      {"transitions_observed", panel.truth.transitions_observed},
                      {"transitions_possible", panel.truth.transitions_possible},
                      {"incomplete_companies", panel.truth.incomplete_ids},
                      {"prototypes", panel.truth.prototypes},
                      {"offsets", panel.truth.offsets},
                      {"units", panel.truth.units}};
        write_json(out_dir / "truth.json", truth);
        return 0;
    });
    return {panel.records.size(), panel.truth.company_ids.size()};
}

IngestSummary cmd_ingest_check(const RunConfig& config) {
    const auto manifest = stage("load-manifest", [&] { return config.feature_manifest(); });
    const auto scale = stage("config", [&] { return config.rating_scale(); });
    auto records = stage("load-features", [&] { return load_financials(config.features, manifest); });
    if (!config.labels.empty()) {
        stage("load-labels", [&] {
            join_labels(records, config.labels, scale);
            return 0;
        });
    }
    const auto filtered = stage("filter", [&] { return filter_complete(records, manifest, config.period, scale); });
    IngestSummary summary;
    summary.records = records.size();
    summary.companies_seen = filtered.companies_seen;
    summary.companies_kept = filtered.companies_kept;
    summary.samples = filtered.dataset.size();
    summary.warnings = filtered.warnings;
    const auto counts = filtered.dataset.class_counts();
    for (std::size_t c = 0; c < counts.size(); ++c) {
        summary.class_counts[filtered.dataset.class_map.grade(c)] = counts[c];
    }
    return summary;
}

TrainOutcome cmd_train(const RunConfig& config) {
    const auto filtered = load_labeled(config);
    const auto& dataset = filtered.dataset;
    const auto prepared = stage("preprocess", [&] { return prepare(dataset, config.prepare); });

    MlpConfig mlp = config.mlp;
    mlp.input_dim = dataset.feature_count();
    mlp.classes = dataset.class_map.size();
    stage("config", [&] {
        mlp.validate();
        return 0;
    });

    stage("write", [&] {
        ensure_dir(config.out_dir);
        return 0;
    });

    auto write_history = [&](const TrainHistory& history) {
        auto out = open_out(config.out_dir / "history.csv");
        csv::write_row(out, {"epoch", "train_loss", "train_accuracy", "train_rms", "test_accuracy", "test_rms"});
        for (const auto& e : history.entries) {
            csv::write_row(out, {std::to_string(e.epoch), fmt(e.train_loss), fmt(e.train_accuracy), fmt(e.train_rms),
                                 fmt(e.test_accuracy), fmt(e.test_rms)});
        }
    };

    TrainedModel trained;
    try {
        trained = stage("train", [&] { return train(prepared.train, mlp, config.train, &prepared.test); });
    } catch (const StageError&) {
        throw;
    }
    // DivergenceError is converted by stage(); keep the partial history for inspection.
    TrainOutcome outcome;
    outcome.history = trained.history;
    outcome.model.scale = config.rating_scale();
    outcome.model.class_map = dataset.class_map;
    outcome.model.manifest = dataset.manifest;
    outcome.model.normalization = prepared.stats;
    outcome.model.config = trained.config;
    outcome.model.params = trained.params;
    outcome.test_report = stage("evaluate", [&] { return eval_report(trained.config, trained.params, prepared.test); });
    outcome.model_path = config.model.empty() ? config.out_dir / "model.json" : config.model;

    stage("write", [&] {
        save_model(outcome.model_path, outcome.model);
        write_history(trained.history);

        json report = report_json(outcome.test_report, dataset.class_map);
        report["train_samples"] = prepared.train_raw.size();
        report["train_samples_balanced"] = prepared.train.size();
        report["test_samples"] = prepared.test.size();
        report["companies_seen"] = filtered.companies_seen;
        report["companies_kept"] = filtered.companies_kept;
        report["warnings"] = prepared.warnings;
        write_json(config.out_dir / "report.json", report);
        {
            auto out = open_out(config.out_dir / "report.csv");
            csv::write_row(out, {"metric", "value"});
            csv::write_row(out, {"head", to_string(outcome.test_report.head)});
            csv::write_row(out, {"n", std::to_string(outcome.test_report.n)});
            csv::write_row(out, {"accuracy", fmt(outcome.test_report.accuracy)});
            csv::write_row(out, {"rms", fmt(outcome.test_report.rms)});
            csv::write_row(out, {"mean_notch_distance", fmt(outcome.test_report.mean_notch_distance)});
        }
        write_confusion(config.out_dir, outcome.test_report, dataset.class_map,
                        "Test confusion matrix (" + to_string(mlp.head) + ")");

        std::vector<CompanyYearRecord> test_records;
        test_records.reserve(prepared.test_raw.size());
        for (const auto& s : prepared.test_raw.samples) {
            CompanyYearRecord rec;
            rec.company_id = s.company_id;
            rec.fiscal_year = s.fiscal_year;
            rec.values.assign(s.features.begin(), s.features.end());
            rec.label = dataset.class_map.grade(*s.label);
            test_records.push_back(std::move(rec));
        }
        write_financials(config.out_dir / "test_features.csv", test_records, dataset.manifest);
        write_labels(config.out_dir / "test_labels.csv", test_records);

        auto out = open_out(config.out_dir / "test_predictions.csv");
        csv::write_row(out, {"company_id", "fiscal_year", "true_grade", "score", "class_index", "grade"});
        for (std::size_t i = 0; i < prepared.test.size(); ++i) {
            const auto& s = prepared.test.samples[i];
            const auto& p = outcome.test_report.predictions[i];
            csv::write_row(out, {s.company_id, std::to_string(s.fiscal_year), dataset.class_map.grade(*s.label),
                                 fmt(p.score), std::to_string(p.class_index), dataset.class_map.grade(p.class_index)});
        }
        return 0;
    });
    return outcome;
}

std::vector<SweepRow> cmd_sweep(const RunConfig& config) {
    if (config.sweep_widths.empty()) {
        throw StageError("config", "sweep needs at least one width", kExitUsage);
    }
    const auto filtered = load_labeled(config);
    const auto& dataset = filtered.dataset;
    const auto prepared = stage("preprocess", [&] { return prepare(dataset, config.prepare); });
    MlpConfig mlp = config.mlp;
    mlp.input_dim = dataset.feature_count();
    mlp.classes = dataset.class_map.size();

    const auto rows = stage("sweep", [&] {
        return sweep(config.sweep_widths, prepared.train, prepared.test, mlp, config.train);
    });

    stage("write", [&] {
        ensure_dir(config.out_dir);
        auto out = open_out(config.out_dir / "sweep.csv");
        csv::write_row(out, {"width", "cls_train_accuracy", "cls_train_rms", "cls_test_accuracy", "cls_test_rms",
                             "cls_test_notch", "reg_train_accuracy", "reg_train_rms", "reg_test_accuracy",
                             "reg_test_rms", "reg_test_notch"});
        plot::Chart chart{"Test accuracy and RMS vs nodes per layer", "nodes per hidden layer", "accuracy",
                          "RMS (class units)", {}};
        plot::Series cls_acc{"classification accuracy", {}, {}, true, plot::Axis::left};
        plot::Series reg_acc{"regression accuracy", {}, {}, true, plot::Axis::left};
        plot::Series cls_rms{"classification RMS", {}, {}, true, plot::Axis::right};
        plot::Series reg_rms{"regression RMS", {}, {}, true, plot::Axis::right};
        for (const auto& r : rows) {
            const auto& c = r.classification;
            const auto& g = r.regression;
            csv::write_row(out, {std::to_string(r.width), fmt(c.train_accuracy), fmt(c.train_rms), fmt(c.test_accuracy),
                                 fmt(c.test_rms), fmt(c.test_notch_distance), fmt(g.train_accuracy), fmt(g.train_rms),
                                 fmt(g.test_accuracy), fmt(g.test_rms), fmt(g.test_notch_distance)});
            const auto w = static_cast<double>(r.width);
            for (auto* s : {&cls_acc, &reg_acc, &cls_rms, &reg_rms}) s->x.push_back(w);
            cls_acc.y.push_back(c.test_accuracy);
            reg_acc.y.push_back(g.test_accuracy);
            cls_rms.y.push_back(c.test_rms);
            reg_rms.y.push_back(g.test_rms);
        }
        chart.series = {cls_acc, reg_acc, cls_rms, reg_rms};
        plot::write(config.out_dir / "sweep.svg", plot::render(chart));
        return 0;
    });
    return rows;
}

ScoreOutcome cmd_score(const fs::path& model_path, const fs::path& features_path, const fs::path& out_dir) {
    const auto model = stage("load-model", [&] { return load_model(model_path); });
    const auto records = stage("load-features", [&] {
        try {
            return load_financials(features_path, model.manifest);
        } catch (const DataError& e) {
            throw DataError(std::string(e.what()) + " (model expects " + std::to_string(model.manifest.size()) +
                            " features)");
        }
    });
    ScoreOutcome outcome;
    const auto rows = complete_rows(records, model.manifest, &outcome.skipped);
    if (rows.empty()) {
        throw StageError("score", "no complete rows to score", kExitData);
    }
    const std::size_t classes = model.class_map.size();
    const auto predictions = stage("score", [&] {
        const Eigen::MatrixXd x = apply_normalizer(model.normalization, rows);
        return predict(model.config, model.params, x, classes);
    });
    std::vector<double> scores;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& s = rows.samples[i];
        outcome.rows.push_back(
            {s.company_id, s.fiscal_year, predictions[i], model.class_map.grade(predictions[i].class_index)});
        scores.push_back(predictions[i].score);
    }
    outcome.range = score_range(scores);

    stage("write", [&] {
        ensure_dir(out_dir);
        auto out = open_out(out_dir / "scores.csv");
        csv::write_row(out, {"company_id", "fiscal_year", "score", "class_index", "grade"});
        for (const auto& r : outcome.rows) {
            csv::write_row(out, {r.company_id, std::to_string(r.fiscal_year), fmt(r.prediction.score),
                                 std::to_string(r.prediction.class_index), r.grade});
        }
        write_json(out_dir / "score_summary.json",
                   {{"rows_scored", outcome.rows.size()},
                    {"rows_skipped_incomplete", outcome.skipped},
                    {"head", to_string(model.config.head)},
                    {"score_convention", "higher is riskier (class-index units)"},
                    {"score_min", outcome.range.min},
                    {"score_max", outcome.range.max},
                    {"score_spread", outcome.range.spread}});
        return 0;
    });
    return outcome;
}

TrendResult cmd_trend(const fs::path& scored_path, const fs::path& out_dir) {
    const auto points = stage("load-scores", [&] {
        const auto table = csv::read(scored_path);
        const auto id = table.column("company_id");
        const auto year = table.column("fiscal_year");
        const auto score = table.column("score");
        if (!id || !year || !score) {
            throw DataError(scored_path.string() + ": needs company_id, fiscal_year and score columns");
        }
        std::vector<ScorePoint> out;
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const auto y = csv::parse_int(table.rows[r][*year]);
            const auto s = csv::parse_double(table.rows[r][*score]);
            if (!y || !s) {
                throw DataError(scored_path.string() + ": malformed row at line " +
                                std::to_string(table.line_numbers[r]));
            }
            out.push_back({table.rows[r][*id], static_cast<int>(*y), *s});
        }
        return out;
    });
    const auto result = stage("trend", [&] { return trend_slope(points); });
    if (result.companies.empty()) {
        throw StageError("trend", "no company has scores for two or more distinct years", kExitData);
    }

    stage("write", [&] {
        ensure_dir(out_dir);
        {
            auto out = open_out(out_dir / "trend.csv");
            csv::write_row(out, {"company_id", "slope", "intercept", "years"});
            for (const auto& c : result.companies) {
                csv::write_row(out, {c.company_id, fmt(c.slope), fmt(c.intercept), std::to_string(c.years)});
            }
        }
        {
            auto out = open_out(out_dir / "trend_years.csv");
            csv::write_row(out, {"fiscal_year", "mean_score", "companies"});
            for (const auto& y : result.year_means) {
                csv::write_row(out, {std::to_string(y.year), fmt(y.mean_score), std::to_string(y.companies)});
            }
        }
        write_json(out_dir / "trend_summary.json", {{"companies", result.companies.size()},
                                                    {"mean_slope", optional_json(result.mean_slope)},
                                                    {"year_mean_slope", optional_json(result.year_mean_slope)},
                                                    {"excluded", result.excluded},
                                                    {"convention", "positive slope = deteriorating credit"}});

        plot::Chart chart{"Predicted score by year", "fiscal year", "score (higher = riskier)", "", {}};
        std::unordered_map<std::string, std::size_t> index;
        for (const auto& c : result.companies) {
            index[c.company_id] = chart.series.size();
            chart.series.push_back({c.company_id, {}, {}, true, plot::Axis::left});
        }
        for (const auto& p : points) {
            if (auto it = index.find(p.company_id); it != index.end()) {
                chart.series[it->second].x.push_back(p.year);
                chart.series[it->second].y.push_back(p.score);
            }
        }
        plot::Series mean{"cohort mean", {}, {}, true, plot::Axis::left};
        for (const auto& y : result.year_means) {
            mean.x.push_back(y.year);
            mean.y.push_back(y.mean_score);
        }
        chart.series.push_back(std::move(mean));
        plot::write(out_dir / "trend.svg", plot::render(chart));
        return 0;
    });
    return result;
}

ComparisonOutcome cmd_compare_external(const fs::path& model_scores, const fs::path& external_scores,
                                       const std::string& external_column, bool external_higher_is_better,
                                       const fs::path& out_dir) {
    struct Row {
        std::string key;
        std::string company_id;
        std::string year;
        double value = 0.0;
    };
    auto load = [](const fs::path& path, const std::string& column, bool use_year) {
        const auto table = csv::read(path);
        const auto id = table.column("company_id");
        const auto value = table.column(column);
        const auto year = table.column("fiscal_year");
        if (!id || !value) {
            throw DataError(path.string() + ": needs company_id and " + column + " columns");
        }
        std::vector<Row> rows;
        std::set<std::string> keys;
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const auto& row = table.rows[r];
            const auto v = csv::parse_double(row[*value]);
            if (!v) {
                throw DataError(path.string() + ": non-numeric " + column + " at line " +
                                std::to_string(table.line_numbers[r]));
            }
            Row out{row[*id], row[*id], use_year && year ? row[*year] : std::string{}, *v};
            if (use_year && year) {
                out.key += '\x1f' + out.year;
            }
            if (!keys.insert(out.key).second) {
                throw DataError(path.string() + ": duplicate join key for company " + out.company_id +
                                " at line " + std::to_string(table.line_numbers[r]));
            }
            rows.push_back(std::move(out));
        }
        return std::make_pair(rows, year.has_value());
    };

    const auto [use_year, joined_rows] = stage("load-scores", [&] {
        const auto external_table = csv::read(external_scores);
        const auto model_table = csv::read(model_scores);
        const bool both_years =
            external_table.column("fiscal_year").has_value() && model_table.column("fiscal_year").has_value();
        const auto model_rows = load(model_scores, "score", both_years).first;
        const auto external_rows = load(external_scores, external_column, both_years).first;
        std::unordered_map<std::string, double> external;
        for (const auto& r : external_rows) external.emplace(r.key, r.value);
        std::vector<std::pair<Row, double>> joined;
        for (const auto& r : model_rows) {
            if (auto it = external.find(r.key); it != external.end()) {
                joined.emplace_back(r, it->second);
            }
        }
        return std::make_pair(both_years, joined);
    });

    if (joined_rows.size() < 3) {
        throw StageError("compare", "only " + std::to_string(joined_rows.size()) +
                                        " rows joined; correlation needs at least 3",
                         kExitData);
    }
    std::vector<double> model_values;
    std::vector<double> external_values;
    for (const auto& [row, ext] : joined_rows) {
        model_values.push_back(row.value);
        external_values.push_back(ext);
    }
    ComparisonOutcome outcome;
    outcome.joined = joined_rows.size();
    outcome.correlation = stage("compare", [&] { return correlation(model_values, external_values); });

    stage("write", [&] {
        ensure_dir(out_dir);
        {
            auto out = open_out(out_dir / "comparison.csv");
            std::vector<std::string> header{"company_id"};
            if (use_year) header.push_back("fiscal_year");
            header.push_back("model_score");
            header.push_back(external_column);
            csv::write_row(out, header);
            for (const auto& [row, ext] : joined_rows) {
                std::vector<std::string> fields{row.company_id};
                if (use_year) fields.push_back(row.year);
                fields.push_back(fmt(row.value));
                fields.push_back(fmt(ext));
                csv::write_row(out, fields);
            }
        }
        // Model score rises with risk, so agreement shows up as a negative
        // correlation against a higher-is-better external score.
        const int expected = external_higher_is_better ? -1 : 1;
        auto sign = [](const std::optional<double>& v) -> json {
            if (!v) return nullptr;
            return *v > 0 ? 1 : (*v < 0 ? -1 : 0);
        };
        json doc = {{"n", outcome.correlation.n},
                    {"pearson", optional_json(outcome.correlation.pearson)},
                    {"spearman", optional_json(outcome.correlation.spearman)},
                    {"model_score_convention", "higher is riskier"},
                    {"external_column", external_column},
                    {"external_higher_is_better", external_higher_is_better},
                    {"expected_sign_if_consistent", expected},
                    {"pearson_sign", sign(outcome.correlation.pearson)},
                    {"spearman_sign", sign(outcome.correlation.spearman)}};
        write_json(out_dir / "correlation.json", doc);

        plot::Chart chart{"Model score vs " + external_column, "model score (higher = riskier)", external_column, "",
                          {{"companies", model_values, external_values, false, plot::Axis::left}}};
        plot::write(out_dir / "comparison.svg", plot::render(chart));
        return 0;
    });
    return outcome;
}

} // namespace credrisk::cli
