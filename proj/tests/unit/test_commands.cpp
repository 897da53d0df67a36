#include "credrisk/commands.hpp"
#include "credrisk/csv.hpp"
#include "credrisk/error.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

using namespace credrisk;
using namespace credrisk::cli;
using credrisk::testing::read_text;
using credrisk::testing::TempDir;
using credrisk::testing::write_text;

namespace {

RunConfig small_run(const TempDir& dir, std::size_t companies = 40) {
    SynthConfig sc;
    sc.companies = companies;
    sc.incomplete_companies = 5;
    cmd_generate(sc, dir / "data");
    RunConfig cfg;
    cfg.features = dir / "data/features.csv";
    cfg.labels = dir / "data/labels.csv";
    cfg.out_dir = dir / "out";
    cfg.train.epochs = 40;
    cfg.train.eval_every = 10;
    cfg.mlp.hidden_width = 10;
    return cfg;
}

} // namespace

TEST(CmdGenerate, DefaultPanelIngestsTo1652Samples) {
    TempDir dir;
    const auto g = cmd_generate(SynthConfig{}, dir.path());
    EXPECT_EQ(g.companies, 306u);
    RunConfig cfg;
    cfg.features = dir / "features.csv";
    cfg.labels = dir / "labels.csv";
    cfg.manifest = dir / "manifest.csv";
    const auto s = cmd_ingest_check(cfg);
    EXPECT_EQ(s.companies_kept, 236u);
    EXPECT_EQ(s.samples, 1652u);
    EXPECT_TRUE(std::filesystem::exists(dir / "truth.json"));
}

TEST(CmdGenerate, ZeroCompaniesWritesHeaderOnlyFiles) {
    TempDir dir;
    SynthConfig sc;
    sc.companies = 0;
    const auto g = cmd_generate(sc, dir.path());
    EXPECT_EQ(g.records, 0u);
    EXPECT_EQ(csv::read(dir / "features.csv").rows.size(), 0u);
    EXPECT_EQ(csv::read(dir / "labels.csv").header, (std::vector<std::string>{"company_id", "fiscal_year", "rating"}));
}

TEST(CmdTrain, MissingLabelFileIsStageTagged) {
    TempDir dir;
    auto cfg = small_run(dir);
    cfg.labels = dir / "nope.csv";
    try {
        cmd_train(cfg);
        FAIL() << "expected failure";
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), "load-labels");
        EXPECT_NE(e.exit_code(), 0);
    }
}

TEST(CmdTrain, WritesArtifactsAndScoreReproducesPredictions) {
    TempDir dir;
    const auto cfg = small_run(dir);
    const auto out = cmd_train(cfg);
    for (const char* f : {"model.json", "history.csv", "report.json", "report.csv", "confusion.csv", "confusion.svg",
                          "test_features.csv", "test_labels.csv", "test_predictions.csv"}) {
        EXPECT_TRUE(std::filesystem::exists(cfg.out_dir / f)) << f;
    }
    const auto scored = cmd_score(out.model_path, cfg.out_dir / "test_features.csv", dir / "scored");
    ASSERT_EQ(scored.rows.size(), out.test_report.predictions.size());
    for (std::size_t i = 0; i < scored.rows.size(); ++i) {
        EXPECT_EQ(scored.rows[i].prediction.class_index, out.test_report.predictions[i].class_index);
        EXPECT_EQ(scored.rows[i].prediction.score, out.test_report.predictions[i].score);
    }
}

TEST(CmdTrain, RepeatRunGivesByteIdenticalModel) {
    TempDir dir;
    auto cfg = small_run(dir);
    cmd_train(cfg);
    const auto first = read_text(cfg.out_dir / "model.json");
    cfg.out_dir = dir / "again";
    cmd_train(cfg);
    EXPECT_EQ(read_text(cfg.out_dir / "model.json"), first);
}

TEST(CmdSweep, OneRowPerWidth) {
    TempDir dir;
    auto cfg = small_run(dir, 25);
    cfg.sweep_widths = {4, 8};
    cfg.train.epochs = 10;
    const auto rows = cmd_sweep(cfg);
    EXPECT_EQ(rows.size(), 2u);
    EXPECT_EQ(csv::read(cfg.out_dir / "sweep.csv").rows.size(), 2u);
    EXPECT_TRUE(std::filesystem::exists(cfg.out_dir / "sweep.svg"));
}

TEST(CmdScore, CohortAndClampedRegressionScore) {
    TempDir dir;
    CreditModel m;
    m.manifest = FeatureManifest::standard();
    m.class_map = ClassIndexMap({"A+", "A-", "BB+", "B-", "CCC+", "D"}, m.scale);
    m.normalization.mean.assign(43, 0.0);
    m.normalization.std.assign(43, 1.0);
    m.config.head = HeadKind::regression;
    m.params = init_params(m.config, 1).zeros_like();
    m.params.layers.back().bias[0] = 6.8;
    save_model(dir / "m.json", m);

    SynthConfig sc;
    sc.companies = 7;
    sc.incomplete_companies = 0;
    sc.years = 5;
    sc.first_year = 2016;
    cmd_generate(sc, dir / "cohort");
    const auto s = cmd_score(dir / "m.json", dir / "cohort/features.csv", dir / "out");
    ASSERT_EQ(s.rows.size(), 35u);
    for (const auto& r : s.rows) {
        EXPECT_DOUBLE_EQ(r.prediction.score, 6.8);
        EXPECT_EQ(r.prediction.class_index, 5u);
        EXPECT_EQ(r.grade, "D");
    }
    EXPECT_EQ(s.range.spread, 0.0);
}

TEST(CmdScore, WrongFeatureFileRejected) {
    TempDir dir;
    CreditModel m;
    m.manifest = FeatureManifest::standard();
    m.class_map = ClassIndexMap({"A+", "D"}, m.scale);
    m.normalization.mean.assign(43, 0.0);
    m.normalization.std.assign(43, 1.0);
    m.config.classes = 2;
    m.params = init_params(m.config, 1);
    save_model(dir / "m.json", m);
    write_text(dir / "f.csv", "company_id,fiscal_year,Revenue\nC1,2016,1\n");
    try {
        cmd_score(dir / "m.json", dir / "f.csv", dir / "out");
        FAIL();
    } catch (const StageError& e) {
        EXPECT_NE(std::string(e.what()).find("43"), std::string::npos);
        EXPECT_EQ(e.exit_code(), kExitData);
    }
}

TEST(CmdTrend, RisingCohort) {
    TempDir dir;
    write_text(dir / "s.csv",
               "company_id,fiscal_year,score\nA,2016,1\nA,2017,2\nA,2018,3\nB,2016,0\nB,2017,0.5\nB,2018,1\n");
    const auto r = cmd_trend(dir / "s.csv", dir / "out");
    ASSERT_TRUE(r.mean_slope.has_value());
    EXPECT_NEAR(*r.mean_slope, 0.75, 1e-12);
    for (const auto& c : r.companies) EXPECT_GT(c.slope, 0.0);
    EXPECT_TRUE(std::filesystem::exists(dir / "out/trend.svg"));
}

TEST(CmdCompareExternal, SignConvention) {
    TempDir dir;
    std::string model = "company_id,score\n";
    std::string ext = "company_id,risk\n";
    for (int i = 0; i < 10; ++i) {
        model += "C" + std::to_string(i) + "," + std::to_string(i) + "\n";
        ext += "C" + std::to_string(i) + "," + std::to_string(-i + (i % 3) * 0.1) + "\n";
    }
    write_text(dir / "m.csv", model);
    write_text(dir / "e.csv", ext);
    const auto r = cmd_compare_external(dir / "m.csv", dir / "e.csv", "risk", true, dir / "out");
    EXPECT_EQ(r.joined, 10u);
    EXPECT_LT(*r.correlation.pearson, 0.0);
    const auto doc = nlohmann::json::parse(read_text(dir / "out/correlation.json"));
    EXPECT_EQ(doc["expected_sign_if_consistent"], -1);
    EXPECT_EQ(doc["pearson_sign"], -1);

    write_text(dir / "dup.csv", "company_id,risk\nC1,1\nC1,2\nC2,3\nC3,4\n");
    EXPECT_THROW(cmd_compare_external(dir / "m.csv", dir / "dup.csv", "risk", true, dir / "out"), StageError);
}

TEST(RunConfig, UnknownKeyRejectedAndPathsResolved) {
    EXPECT_THROW(run_config_from_json(nlohmann::json::parse(R"({"modle": {}})")), ConfigError);
    const auto cfg = run_config_from_json(
        nlohmann::json::parse(R"({"data": {"features": "f.csv"}, "model": {"head": "regression"}})"), "/base");
    EXPECT_EQ(cfg.features, std::filesystem::path("/base/f.csv"));
    EXPECT_EQ(cfg.mlp.head, HeadKind::regression);
    const auto back = run_config_from_json(to_json(cfg));
    EXPECT_EQ(back.mlp, cfg.mlp);
    EXPECT_EQ(back.features, cfg.features);
}

TEST(RunConfig, ShippedExamplesParse) {
    EXPECT_NO_THROW(load_run_config(CREDRISK_SOURCE_DIR "/configs/train_classification.json"));
    EXPECT_NO_THROW(load_run_config(CREDRISK_SOURCE_DIR "/configs/train_regression.json"));
    EXPECT_NO_THROW(load_synth_config(CREDRISK_SOURCE_DIR "/configs/synth_default.json"));
}
