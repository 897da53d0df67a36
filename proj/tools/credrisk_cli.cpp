// Command-line front end: generate, ingest-check, train, sweep, score, trend,
// compare-external.

#include "credrisk/commands.hpp"
#include "credrisk/error.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

using namespace credrisk;
using namespace credrisk::cli;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string head;
    std::optional<std::size_t> width;
    std::optional<std::size_t> epochs;
    std::string features;
    std::string labels;
    std::string model;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config, "JSON run configuration");
    app->add_option("--seed", c.seed, "master seed");
    app->add_option("--out-dir", c.out_dir, "output directory");
    app->add_option("--head", c.head, "classification or regression")
        ->check(CLI::IsMember({"classification", "regression"}));
    app->add_option("--width", c.width, "nodes per hidden layer");
    app->add_option("--epochs", c.epochs, "training epochs");
    app->add_option("--features", c.features, "feature CSV");
    app->add_option("--labels", c.labels, "label CSV");
    app->add_option("--model", c.model, "model file");
}

RunConfig resolve(const Common& c) {
    RunConfig cfg = c.config.empty() ? RunConfig{} : load_run_config(c.config);
    if (c.seed) apply_master_seed(cfg, *c.seed);
    if (!c.out_dir.empty()) cfg.out_dir = c.out_dir;
    if (!c.head.empty()) cfg.mlp.head = parse_head_kind(c.head);
    if (c.width) cfg.mlp.hidden_width = *c.width;
    if (c.epochs) cfg.train.epochs = *c.epochs;
    if (!c.features.empty()) cfg.features = c.features;
    if (!c.labels.empty()) cfg.labels = c.labels;
    if (!c.model.empty()) cfg.model = c.model;
    return cfg;
}

void print_report(const EvalReport& r) {
    std::cout << "test samples: " << r.n << "\n"
              << "accuracy: " << r.accuracy << "\n"
              << "rms: " << r.rms << "\n"
              << "mean notch distance: " << r.mean_notch_distance << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Credit-rating MLP toolkit"};
    app.require_subcommand(1);

    Common common;

    auto* gen = app.add_subcommand("generate", "write a synthetic company-year panel");
    std::string synth_config;
    std::optional<std::size_t> companies;
    std::optional<std::uint64_t> gen_seed;
    std::string gen_out = "data";
    std::string transitions;
    std::optional<double> transition_prob;
    gen->add_option("--config", synth_config, "JSON synthetic-data configuration");
    gen->add_option("--companies", companies, "number of companies");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out-dir", gen_out, "output directory");
    gen->add_option("--transitions", transitions, "symmetric or deteriorating")
        ->check(CLI::IsMember({"symmetric", "deteriorating"}));
    gen->add_option("--transition-prob", transition_prob, "yearly class-change probability");

    auto* ingest = app.add_subcommand("ingest-check", "load, join and filter; print counts");
    add_common(ingest, common);

    auto* train_cmd = app.add_subcommand("train", "train one model and evaluate on the held-out split");
    add_common(train_cmd, common);

    auto* sweep_cmd = app.add_subcommand("sweep", "train both heads across hidden-layer widths");
    add_common(sweep_cmd, common);
    std::vector<std::size_t> widths;
    sweep_cmd->add_option("--widths", widths, "hidden widths to try");

    auto* score = app.add_subcommand("score", "score a feature file with a saved model");
    std::string score_model;
    std::string score_features;
    std::string score_out = "out";
    score->add_option("--model", score_model, "model file")->required();
    score->add_option("--features", score_features, "feature CSV")->required();
    score->add_option("--out-dir", score_out, "output directory");

    auto* trend = app.add_subcommand("trend", "per-company score slopes over years");
    std::string trend_scores;
    std::string trend_out = "out";
    trend->add_option("--scores", trend_scores, "scores.csv from the score command")->required();
    trend->add_option("--out-dir", trend_out, "output directory");

    auto* compare = app.add_subcommand("compare-external", "correlate model scores with an external score");
    std::string cmp_model;
    std::string cmp_external;
    std::string cmp_column = "score";
    bool higher_is_better = false;
    std::string cmp_out = "out";
    compare->add_option("--scores", cmp_model, "scores.csv from the score command")->required();
    compare->add_option("--external", cmp_external, "external score CSV")->required();
    compare->add_option("--external-column", cmp_column, "column holding the external score");
    compare->add_flag("--higher-is-better", higher_is_better, "external score rises with credit quality");
    compare->add_option("--out-dir", cmp_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen->parsed()) {
            SynthConfig cfg = synth_config.empty() ? SynthConfig{} : load_synth_config(synth_config);
            if (companies) cfg.companies = *companies;
            if (gen_seed) cfg.seed = *gen_seed;
            if (!transitions.empty()) cfg.transitions = parse_transition_kind(transitions);
            if (transition_prob) cfg.transition_prob = *transition_prob;
            cfg.validate();
            const auto out = cmd_generate(cfg, gen_out);
            std::cout << "wrote " << out.records << " company-year records for " << out.companies
                      << " companies to " << gen_out << "\n";
        } else if (ingest->parsed()) {
            const auto s = cmd_ingest_check(resolve(common));
            std::cout << "records: " << s.records << "\n"
                      << "companies seen: " << s.companies_seen << "\n"
                      << "companies kept: " << s.companies_kept << "\n"
                      << "samples: " << s.samples << "\n";
            for (const auto& [grade, n] : s.class_counts) std::cout << "  " << grade << ": " << n << "\n";
            for (const auto& w : s.warnings) std::cerr << "warning: " << w << "\n";
        } else if (train_cmd->parsed()) {
            const auto out = cmd_train(resolve(common));
            print_report(out.test_report);
            std::cout << "model: " << out.model_path.string() << "\n";
        } else if (sweep_cmd->parsed()) {
            auto cfg = resolve(common);
            if (!widths.empty()) cfg.sweep_widths = widths;
            const auto rows = cmd_sweep(cfg);
            std::cout << "width,cls_test_accuracy,cls_test_rms,reg_test_accuracy,reg_test_rms\n";
            for (const auto& r : rows) {
                std::cout << r.width << ',' << r.classification.test_accuracy << ',' << r.classification.test_rms
                          << ',' << r.regression.test_accuracy << ',' << r.regression.test_rms << "\n";
            }
        } else if (score->parsed()) {
            const auto out = cmd_score(score_model, score_features, score_out);
            std::cout << "scored " << out.rows.size() << " rows (" << out.skipped << " incomplete skipped); range "
                      << out.range.min << " .. " << out.range.max << "\n";
        } else if (trend->parsed()) {
            const auto out = cmd_trend(trend_scores, trend_out);
            std::cout << "companies: " << out.companies.size() << "\n";
            if (out.mean_slope) std::cout << "mean slope: " << *out.mean_slope << "\n";
        } else if (compare->parsed()) {
            const auto out = cmd_compare_external(cmp_model, cmp_external, cmp_column, higher_is_better, cmp_out);
            std::cout << "joined rows: " << out.joined << "\n";
            if (out.correlation.pearson) std::cout << "pearson: " << *out.correlation.pearson << "\n";
            if (out.correlation.spearman) std::cout << "spearman: " << *out.correlation.spearman << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return kExitOk;
}
