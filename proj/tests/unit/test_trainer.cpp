#include "credrisk/error.hpp"
#include "credrisk/random.hpp"
#include "credrisk/trainer.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace credrisk;
using credrisk::testing::make_dataset;

namespace {

/// Two Gaussian blobs far apart along the first coordinate.
Dataset separable(std::size_t per_class, std::uint64_t seed, std::size_t dims = 4) {
    Rng rng(seed);
    std::normal_distribution<double> n(0.0, 0.3);
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> labels;
    for (std::size_t c = 0; c < 2; ++c) {
        for (std::size_t i = 0; i < per_class; ++i) {
            std::vector<double> x(dims);
            for (auto& v : x) v = n(rng);
            x[0] += c == 0 ? -2.0 : 2.0;
            rows.push_back(x);
            labels.push_back(c);
        }
    }
    return make_dataset(rows, labels, {"A+", "D"});
}

MlpConfig net(std::size_t dims, HeadKind head = HeadKind::classification) {
    MlpConfig c;
    c.input_dim = dims;
    c.hidden_width = 8;
    c.hidden_layers = 2;
    c.classes = 2;
    c.head = head;
    return c;
}

} // namespace

TEST(Train, SeparableSetFitsPerfectly) {
    const auto d = separable(30, 1);
    TrainConfig tc;
    tc.epochs = 500;
    const auto m = train(d, net(4), tc);
    EXPECT_EQ(m.history.entries.back().train_accuracy, 1.0);
    EXPECT_EQ(m.history.entries.back().epoch, 500u);
}

TEST(Train, Deterministic) {
    const auto d = separable(20, 2);
    TrainConfig tc;
    tc.epochs = 50;
    tc.seed = 77;
    const auto a = train(d, net(4), tc);
    const auto b = train(d, net(4), tc);
    EXPECT_EQ(a.params, b.params);
    tc.seed = 78;
    EXPECT_FALSE(train(d, net(4), tc).params == a.params);
}

TEST(Train, ZeroEpochsRejected) {
    TrainConfig tc;
    tc.epochs = 0;
    EXPECT_THROW(train(separable(5, 1), net(4), tc), ConfigError);
}

TEST(Train, EmptyOrMismatchedInputRejected) {
    Dataset empty = separable(5, 1);
    empty.samples.clear();
    TrainConfig tc;
    tc.epochs = 5;
    EXPECT_THROW(train(empty, net(4), tc), ConfigError);
    EXPECT_THROW(train(separable(5, 1), net(3), tc), ConfigError);
}

TEST(Train, FinalLossNotAboveFirstEpoch) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        for (auto head : {HeadKind::classification, HeadKind::regression}) {
            const auto d = separable(25, seed);
            TrainConfig tc;
            tc.epochs = 200;
            tc.seed = seed;
            const auto m = train(d, net(4, head), tc);
            ASSERT_GE(m.history.entries.size(), 2u);
            EXPECT_EQ(m.history.entries.front().epoch, 1u);
            EXPECT_LE(m.history.entries.back().train_loss, m.history.entries.front().train_loss);
        }
    }
}

TEST(Train, HistoryTracksTestSet) {
    const auto d = separable(20, 3);
    const auto t = separable(10, 4);
    TrainConfig tc;
    tc.epochs = 250;
    tc.eval_every = 100;
    const auto m = train(d, net(4), tc, &t);
    std::vector<std::size_t> epochs;
    for (const auto& e : m.history.entries) {
        epochs.push_back(e.epoch);
        EXPECT_TRUE(e.test_accuracy.has_value());
    }
    EXPECT_EQ(epochs, (std::vector<std::size_t>{1, 100, 200, 250}));
}

TEST(Train, MiniBatchesRun) {
    const auto d = separable(20, 5);
    TrainConfig tc;
    tc.epochs = 100;
    tc.batch_size = 8;
    const auto m = train(d, net(4), tc);
    EXPECT_GE(m.history.entries.back().train_accuracy, 0.95);
}

TEST(Train, DivergenceIsReported) {
    const auto d = separable(20, 6);
    TrainConfig tc;
    tc.epochs = 200;
    tc.optimizer.kind = OptimizerKind::gradient_descent;
    tc.optimizer.learning_rate = 1e200;
    try {
        train(d, net(4, HeadKind::regression), tc);
        FAIL() << "expected divergence";
    } catch (const DivergenceError& e) {
        EXPECT_TRUE(e.last_finite.all_finite());
    }
}

TEST(Sweep, OneRowPerWidth) {
    const auto d = separable(15, 7);
    const auto t = separable(5, 8);
    TrainConfig tc;
    tc.epochs = 30;
    const std::vector<std::size_t> widths{2, 4, 8};
    const auto rows = sweep(widths, d, t, net(4), tc);
    ASSERT_EQ(rows.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(rows[i].width, widths[i]);
        EXPECT_GE(rows[i].classification.test_accuracy, 0.0);
        EXPECT_LE(rows[i].regression.test_accuracy, 1.0);
    }
    const std::vector<std::size_t> one{4};
    EXPECT_EQ(sweep(one, d, t, net(4), tc).size(), 1u);
}
