// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.
// Usage: credrisk_acceptance [name-substring ...]

#include "credrisk/commands.hpp"
#include "credrisk/csv.hpp"
#include "credrisk/pipeline.hpp"
#include "credrisk/preprocess.hpp"
#include "credrisk/random.hpp"
#include "credrisk/synth.hpp"
#include "credrisk/trainer.hpp"

#include "finite_difference.hpp"
#include "test_util.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace credrisk;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    std::string name;
    double budget_seconds;
    std::function<Outcome()> run;
};

template <class... Args>
std::string format(const char* fmt, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

Dataset default_dataset() {
    const auto p = generate(SynthConfig{});
    return filter_complete(p.records, p.manifest, p.period, RatingScale::standard()).dataset;
}

// ---------------------------------------------------------------------------

Outcome sample_arithmetic() {
    const auto p = generate(SynthConfig{});
    const auto f = filter_complete(p.records, p.manifest, p.period, RatingScale::standard());
    const auto s = split(f.dataset, 0.8, 42);
    const std::size_t samples = f.dataset.size();
    const bool ok = f.companies_kept == 236 && samples == 1652 && samples == f.companies_kept * 7 &&
                    s.train.size() == 1322 && s.test.size() == 330;
    return {ok, format("companies %zu, samples %zu, train %zu, test %zu", f.companies_kept, samples, s.train.size(),
                       s.test.size())};
}

Outcome gradient_oracle() {
    Rng rng(20240601);
    std::uniform_int_distribution<std::size_t> width(1, 50);
    std::uniform_int_distribution<std::size_t> depth(1, 3);
    std::uniform_int_distribution<std::size_t> input(1, 8);
    std::uniform_int_distribution<std::size_t> classes(2, 6);
    std::normal_distribution<double> normal(0.0, 1.0);
    constexpr int kConfigs = 100;
    constexpr std::size_t kBatch = 3;
    double worst = 0.0;
    for (int trial = 0; trial < kConfigs; ++trial) {
        MlpConfig c;
        c.input_dim = input(rng);
        c.hidden_width = width(rng);
        c.hidden_layers = depth(rng);
        c.head = trial % 2 == 0 ? HeadKind::classification : HeadKind::regression;
        c.classes = classes(rng);
        auto params = init_params(c, rng());
        for (auto& l : params.layers) {
            for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias[i] = 0.1 * normal(rng);
        }
        Eigen::MatrixXd x(kBatch, c.input_dim);
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
        Eigen::VectorXd t(kBatch);
        for (std::size_t i = 0; i < kBatch; ++i) {
            t[static_cast<Eigen::Index>(i)] = c.head == HeadKind::classification
                                                  ? static_cast<double>(rng() % c.classes)
                                                  : static_cast<double>(rng() % 6);
        }
        const auto analytic = backward(c, params, x, t).gradients;
        const auto numeric = testing::numeric_gradient(c, params, x, t, 1e-5);
        worst = std::max(worst, testing::relative_error(analytic, numeric));
    }
    return {worst < 1e-5, format("%d configs, max relative error %.3e (limit 1e-5)", kConfigs, worst)};
}

Outcome normalization_invariant() {
    const auto d = default_dataset();
    auto s = split(d, 0.8, 42);
    // One constant column exercises the degenerate path.
    for (auto& row : s.train.samples) row.features[5] = 1234.5;
    const auto stats = fit_normalizer(s.train);
    const Eigen::MatrixXd x = apply_normalizer(stats, s.train);
    double worst_mean = 0.0;
    double worst_std = 0.0;
    bool degenerate_zero = true;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double mean = x.col(j).mean();
        const double sd = std::sqrt((x.col(j).array() - mean).square().mean());
        if (j == 5) {
            degenerate_zero = degenerate_zero && (x.col(j).array() == 0.0).all();
            continue;
        }
        worst_mean = std::max(worst_mean, std::abs(mean));
        worst_std = std::max(worst_std, std::abs(sd - 1.0));
    }
    return {worst_mean < 1e-9 && worst_std < 1e-9 && degenerate_zero,
            format("max |mean| %.2e, max |std-1| %.2e, degenerate column all zero: %s", worst_mean, worst_std,
                   degenerate_zero ? "yes" : "no")};
}

Outcome smote_invariants() {
    const auto raw = default_dataset();
    const auto d = normalized(fit_normalizer(raw), raw);
    const auto r = smote(d, kDefaultSmoteNeighbors, 17);
    const auto counts = r.balanced.class_counts();
    const auto majority = *std::max_element(counts.begin(), counts.end());
    bool balanced = std::all_of(counts.begin(), counts.end(), [&](std::size_t c) { return c == majority; });
    bool originals = true;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto& a = d.samples[i];
        const auto& b = r.balanced.samples[i];
        originals = originals && a.features == b.features && a.label == b.label && !b.synthetic;
    }
    std::size_t violations = 0;
    const std::size_t synthetic = r.balanced.size() - d.size();
    bool provenance = r.origins.size() == synthetic;
    for (std::size_t k = 0; provenance && k < synthetic; ++k) {
        const auto& s = r.balanced.samples[d.size() + k];
        const auto& xi = d.samples[r.origins[k].first];
        const auto& xn = d.samples[r.origins[k].second];
        provenance = s.synthetic && xi.label == s.label && xn.label == s.label;
        for (std::size_t j = 0; j < s.features.size(); ++j) {
            const double lo = std::min(xi.features[j], xn.features[j]) - 1e-12;
            const double hi = std::max(xi.features[j], xn.features[j]) + 1e-12;
            violations += s.features[j] < lo || s.features[j] > hi;
        }
    }
    return {balanced && originals && provenance && violations == 0,
            format("%zu x %zu input, %zu synthetic rows, every class at %zu: %s, originals intact: %s, hull "
                   "violations %zu",
                   d.size(), d.feature_count(), synthetic, majority, balanced ? "yes" : "no",
                   originals ? "yes" : "no", violations)};
}

Outcome trainability() {
    int passes = 0;
    std::string accs;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SynthConfig sc;
        sc.seed = 500 + seed;
        sc.noise_scale.assign(sc.feature_dim(), 0.1);
        const auto p = generate(sc);
        const auto d = filter_complete(p.records, p.manifest, p.period, RatingScale::standard()).dataset;
        PrepareOptions po;
        po.split_seed = derive_seed(seed, 1);
        po.smote_seed = derive_seed(seed, 2);
        const auto prep = prepare(d, po);
        MlpConfig mc;
        mc.classes = d.class_map.size();
        TrainConfig tc;
        tc.epochs = 3000;
        tc.seed = seed;
        tc.eval_every = 3000;
        const auto m = train(prep.train, mc, tc);
        const double acc = eval_report(m.config, m.params, prep.test).accuracy;
        passes += acc >= 0.95;
        accs += format("%s%.3f", accs.empty() ? "" : ", ", acc);
    }
    return {passes >= 3, format("test accuracy per seed [%s], %d/5 >= 0.95", accs.c_str(), passes)};
}

Outcome head_comparison() {
    int acc_ok = 0;
    int rms_ok = 0;
    int notch_ok = 0;
    std::string rows;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        // Default generator: prototypes evenly spaced on a line, so classes are ordinal.
        SynthConfig sc;
        sc.seed = 700 + seed;
        const auto p = generate(sc);
        const auto d = filter_complete(p.records, p.manifest, p.period, RatingScale::standard()).dataset;
        PrepareOptions po;
        po.split_seed = derive_seed(seed, 1);
        po.smote_seed = derive_seed(seed, 2);
        const auto prep = prepare(d, po);
        MlpConfig mc;
        mc.classes = d.class_map.size();
        TrainConfig tc;
        tc.seed = seed;
        tc.eval_every = tc.epochs;
        const std::size_t widths[] = {50};
        const auto row = sweep(widths, prep.train, prep.test, mc, tc).front();
        const auto& c = row.classification;
        const auto& r = row.regression;
        acc_ok += c.test_accuracy >= r.test_accuracy;
        rms_ok += r.test_rms <= c.test_rms;
        notch_ok += r.test_notch_distance <= c.test_notch_distance;
        rows += format("\n      seed %llu: accuracy cls %.3f reg %.3f | rms cls %.3f reg %.3f | notch cls %.3f reg %.3f",
                       static_cast<unsigned long long>(seed), c.test_accuracy, r.test_accuracy, c.test_rms, r.test_rms,
                       c.test_notch_distance, r.test_notch_distance);
    }
    return {acc_ok >= 4 && rms_ok >= 4 && notch_ok >= 4,
            format("cls acc >= reg acc in %d/5, reg rms <= cls rms in %d/5, reg notch <= cls notch in %d/5", acc_ok,
                   rms_ok, notch_ok) +
                rows};
}

Outcome transition_statistic() {
    SynthConfig sc;
    sc.companies = 2000;
    sc.incomplete_companies = 0;
    sc.transition_prob = 0.07;
    const auto p = generate(sc);
    // Count from the trajectories directly rather than trusting the generator's tally.
    std::size_t changes = 0;
    std::size_t pairs = 0;
    for (const auto& t : p.truth.trajectories) {
        for (std::size_t y = 1; y < t.size(); ++y) {
            ++pairs;
            changes += t[y] != t[y - 1];
        }
    }
    // Reflection at the ends means a drawn move at a boundary still changes class,
    // so the observed change frequency equals the transition probability.
    const double freq = static_cast<double>(changes) / static_cast<double>(pairs);
    return {pairs >= 10000 && std::abs(freq - 0.07) <= 0.01,
            format("%zu changes over %zu year-to-year transitions: %.4f (target 0.07 +/- 0.01)", changes, pairs,
                   freq)};
}

Outcome trend_detection() {
    testing::TempDir dir;
    SynthConfig base;
    cli::cmd_generate(base, dir / "train");
    RunConfig rc;
    rc.features = dir / "train/features.csv";
    rc.labels = dir / "train/labels.csv";
    rc.out_dir = dir / "model";
    rc.train.epochs = 300;
    rc.train.eval_every = 300;
    const auto trained = cli::cmd_train(rc);
    const auto reference = generate(base).truth;

    int positive = 0;
    std::string slopes;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SynthConfig cohort = base;
        cohort.companies = 7;
        cohort.incomplete_companies = 0;
        cohort.years = 5;
        cohort.first_year = 2016;
        cohort.transitions = TransitionKind::deteriorating;
        cohort.transition_prob = 0.5;
        cohort.seed = 9000 + seed;
        const auto panel = generate_with_truth(cohort, reference);
        const auto cdir = dir / ("cohort" + std::to_string(seed));
        write_panel(panel, cdir);
        cli::cmd_score(trained.model_path, cdir / "features.csv", cdir);
        const auto t = cli::cmd_trend(cdir / "scores.csv", cdir);
        const double slope = t.mean_slope.value_or(0.0);
        positive += slope > 0.0;
        slopes += format("%s%.3f", slopes.empty() ? "" : ", ", slope);
    }
    return {positive >= 4, format("cohort mean slope per seed [%s], positive in %d/5", slopes.c_str(), positive)};
}

Outcome determinism() {
    testing::TempDir dir;
    cli::cmd_generate(SynthConfig{}, dir / "data");
    RunConfig rc;
    rc.features = dir / "data/features.csv";
    rc.labels = dir / "data/labels.csv";
    rc.out_dir = dir / "a";
    cli::cmd_train(rc);
    rc.out_dir = dir / "b";
    cli::cmd_train(rc);
    const auto a = testing::read_text(dir / "a/model.json");
    const auto b = testing::read_text(dir / "b/model.json");
    return {!a.empty() && a == b, format("two 3000-epoch runs, model files %zu bytes, identical: %s", a.size(),
                                         a == b ? "yes" : "no")};
}

Outcome hand_values() {
    const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(6, 1.0 / 6.0);
    const double ce = loss(uniform, 3, LossKind::sparse_categorical_cross_entropy);
    const auto d = testing::make_dataset({{1.0}, {2.0}, {3.0}}, {0, 0, 0}, {"A+"});
    const auto z = apply_normalizer(fit_normalizer(d), d);
    const std::vector<double> a{1, 3, 2, 4};
    const std::vector<double> b{1, 2, 3, 4};
    const double rho = *correlation(a, b).spearman;
    const bool ok = std::abs(ce - std::log(6.0)) <= 1e-9 && std::abs(z(0, 0) + 1.2247) <= 1e-3 &&
                    std::abs(z(1, 0)) <= 1e-3 && std::abs(z(2, 0) - 1.2247) <= 1e-3 && std::abs(rho - 0.8) <= 1e-9;
    return {ok, format("CE %.12f vs ln6 %.12f; z = [%.4f, %.4f, %.4f]; spearman %.12f", ce, std::log(6.0), z(0, 0),
                       z(1, 0), z(2, 0), rho)};
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {"sample arithmetic", 5, sample_arithmetic},
        {"gradient oracle", 60, gradient_oracle},
        {"normalization invariant", 1, normalization_invariant},
        {"SMOTE invariants", 10, smote_invariants},
        {"trainability", 600, trainability},
        {"head comparison", 1200, head_comparison},
        {"transition statistic", 10, transition_statistic},
        {"trend detection", 60, trend_detection},
        {"determinism", 600, determinism},
        {"hand values", 1, hand_values},
    };

    int failures = 0;
    int ran = 0;
    for (const auto& c : criteria) {
        bool selected = argc <= 1;
        for (int i = 1; i < argc; ++i) selected = selected || c.name.find(argv[i]) != std::string::npos;
        if (!selected) continue;
        ++ran;
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.budget_seconds;
        const bool pass = out.pass && in_time;
        failures += !pass;
        std::printf("[%s] %s: %s (%.2fs, budget %.0fs%s)\n", pass ? "PASS" : "FAIL", c.name.c_str(),
                    out.detail.c_str(), secs, c.budget_seconds, in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", ran - failures, ran);
    return failures == 0 ? 0 : 1;
}
