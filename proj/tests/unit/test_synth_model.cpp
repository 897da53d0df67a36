#include "credrisk/error.hpp"
#include "credrisk/model.hpp"
#include "credrisk/synth.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace credrisk;
using credrisk::testing::TempDir;

TEST(Synth, PaperSizedPanel) {
    SynthConfig cfg;
    cfg.companies = 236;
    cfg.incomplete_companies = 0;
    const auto p = generate(cfg);
    EXPECT_EQ(p.records.size(), 1652u);
    for (const auto& r : p.records) EXPECT_TRUE(r.complete());
}

TEST(Synth, ZeroTransitionProbabilityKeepsClass) {
    SynthConfig cfg;
    cfg.transition_prob = 0.0;
    const auto p = generate(cfg);
    for (const auto& t : p.truth.trajectories) {
        for (auto c : t) EXPECT_EQ(c, t.front());
    }
    EXPECT_EQ(p.truth.transitions_observed, 0u);
}

TEST(Synth, DeterministicPerSeed) {
    SynthConfig cfg;
    cfg.companies = 20;
    const auto a = generate(cfg);
    const auto b = generate(cfg);
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        EXPECT_EQ(a.records[i].values, b.records[i].values);
        EXPECT_EQ(a.records[i].label, b.records[i].label);
    }
    cfg.seed += 1;
    EXPECT_NE(generate(cfg).records[0].values, a.records[0].values);
}

TEST(Synth, TransitionsMoveOneNotch) {
    SynthConfig cfg;
    cfg.transition_prob = 0.5;
    const auto p = generate(cfg);
    for (const auto& t : p.truth.trajectories) {
        for (std::size_t y = 1; y < t.size(); ++y) {
            const auto d = t[y] > t[y - 1] ? t[y] - t[y - 1] : t[y - 1] - t[y];
            EXPECT_LE(d, 1u);
        }
    }
}

TEST(Synth, DeterioratingNeverImproves) {
    SynthConfig cfg;
    cfg.transitions = TransitionKind::deteriorating;
    cfg.transition_prob = 0.4;
    const auto p = generate(cfg);
    for (const auto& t : p.truth.trajectories) {
        for (std::size_t y = 1; y < t.size(); ++y) EXPECT_GE(t[y], t[y - 1]);
    }
}

TEST(Synth, ClassDistributionMatchesWeights) {
    // Chi-square goodness of fit of first-year classes; 5 degrees of freedom,
    // 0.1% critical value 20.5.
    SynthConfig cfg;
    cfg.companies = 5000;
    cfg.incomplete_companies = 0;
    cfg.years = 1;
    const auto p = generate(cfg);
    std::vector<double> counts(cfg.classes.size(), 0.0);
    for (const auto& t : p.truth.trajectories) counts[t[0]] += 1.0;
    double chi2 = 0.0;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        const double expected = cfg.class_weights[c] * 5000.0;
        chi2 += (counts[c] - expected) * (counts[c] - expected) / expected;
    }
    EXPECT_LT(chi2, 20.5);
}

TEST(Synth, NoiselessDataIsNearestPrototypeSeparable) {
    SynthConfig cfg;
    cfg.companies = 50;
    cfg.incomplete_companies = 0;
    cfg.noise_scale.assign(cfg.feature_dim(), 0.0);
    const auto p = generate(cfg);
    const auto& t = p.truth;
    std::size_t correct = 0;
    for (const auto& r : p.records) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < t.prototypes.size(); ++c) {
            double d = 0.0;
            for (std::size_t f = 0; f < r.values.size(); ++f) {
                const double x = *r.values[f] / t.units[f] - t.offsets[f];
                d += (x - t.prototypes[c][f]) * (x - t.prototypes[c][f]);
            }
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        correct += p.class_map.grade(best) == *r.label;
    }
    EXPECT_EQ(correct, p.records.size());
}

TEST(Synth, SharedGeometryAcrossCohorts) {
    SynthConfig base;
    const auto ref = generate(base);
    SynthConfig cohort = base;
    cohort.companies = 7;
    cohort.incomplete_companies = 0;
    cohort.seed = 99;
    const auto p = generate_with_truth(cohort, ref.truth);
    EXPECT_EQ(p.truth.prototypes, ref.truth.prototypes);
    EXPECT_EQ(p.truth.units, ref.truth.units);
    EXPECT_EQ(p.records.size(), 49u);
}

TEST(Synth, InvalidConfigRejected) {
    SynthConfig cfg;
    cfg.class_weights = {0.5, 0.5, 0.0, 0.0, 0.0, 0.1};
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = SynthConfig{};
    cfg.transition_prob = 1.5;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = SynthConfig{};
    cfg.prototypes.assign(5, std::vector<double>(43, 0.0));
    EXPECT_THROW(cfg.validate(), ConfigError);
}

namespace {

CreditModel sample_model() {
    CreditModel m;
    m.manifest = FeatureManifest::standard();
    m.class_map = ClassIndexMap({"A+", "A-", "BB+", "B-", "CCC+", "D"}, m.scale);
    m.normalization.mean.assign(43, 0.5);
    m.normalization.std.assign(43, 1.0 / 3.0);
    m.params = init_params(m.config, 5);
    m.params.layers[1].bias[3] = 0.1;
    return m;
}

} // namespace

TEST(Model, RoundTripIsExact) {
    const auto m = sample_model();
    const auto text = serialize_model(m);
    const auto back = deserialize_model(text);
    EXPECT_EQ(back.params, m.params);
    EXPECT_EQ(back.normalization, m.normalization);
    EXPECT_EQ(back.class_map, m.class_map);
    EXPECT_EQ(back.manifest, m.manifest);
    EXPECT_EQ(back.config, m.config);
    EXPECT_EQ(serialize_model(back), text);
}

TEST(Model, FileRoundTrip) {
    TempDir dir;
    const auto m = sample_model();
    save_model(dir / "m.json", m);
    EXPECT_EQ(load_model(dir / "m.json").params, m.params);
}

TEST(Model, TamperingDetected) {
    auto text = serialize_model(sample_model());
    const auto pos = text.find("0.5");
    ASSERT_NE(pos, std::string::npos);
    text.replace(pos, 3, "0.6");
    EXPECT_THROW(deserialize_model(text), DataError);
    EXPECT_THROW(deserialize_model("{not json"), DataError);
    EXPECT_THROW(deserialize_model("{\"format\":\"other\"}"), DataError);
}

TEST(Model, Sha256KnownVector) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
