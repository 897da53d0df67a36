#include "credrisk/preprocess.hpp"

#include "credrisk/error.hpp"
#include "credrisk/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace credrisk {

namespace {

Dataset empty_like(const Dataset& d) {
    Dataset out;
    out.manifest = d.manifest;
    out.class_map = d.class_map;
    return out;
}

} // namespace

SplitResult split(const Dataset& dataset, double train_fraction, std::uint64_t seed, SplitMode mode) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ConfigError("train fraction must lie strictly between 0 and 1");
    }
    const std::size_t m = dataset.size();
    if (m < 2) {
        throw ConfigError("split needs at least 2 samples, got " + std::to_string(m));
    }
    const auto target = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(m))), 1, m - 1);

    Rng rng(seed);
    std::vector<bool> in_train(m, false);

    if (mode == SplitMode::by_sample) {
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i = 0; i < target; ++i) {
            in_train[order[i]] = true;
        }
    } else {
        std::vector<std::string> companies;
        std::unordered_map<std::string, std::vector<std::size_t>> rows;
        for (std::size_t i = 0; i < m; ++i) {
            auto [it, inserted] = rows.try_emplace(dataset.samples[i].company_id);
            if (inserted) {
                companies.push_back(dataset.samples[i].company_id);
            }
            it->second.push_back(i);
        }
        if (companies.size() < 2) {
            throw ConfigError("company-grouped split needs at least 2 companies");
        }
        std::shuffle(companies.begin(), companies.end(), rng);
        std::size_t assigned = 0;
        for (std::size_t c = 0; c < companies.size(); ++c) {
            const auto& idx = rows[companies[c]];
            // Stop at the company count closest to the target; the last company
            // always stays on the test side.
            if (c + 1 == companies.size() || assigned >= target ||
                (assigned > 0 && assigned + idx.size() > target &&
                 assigned + idx.size() - target > target - assigned)) {
                break;
            }
            for (auto i : idx) {
                in_train[i] = true;
            }
            assigned += idx.size();
        }
    }

    SplitResult result{empty_like(dataset), empty_like(dataset), seed};
    for (std::size_t i = 0; i < m; ++i) {
        (in_train[i] ? result.train : result.test).samples.push_back(dataset.samples[i]);
    }
    return result;
}

NormalizationStats fit_normalizer(const Dataset& train) {
    if (train.empty()) {
        throw ConfigError("cannot fit normalization statistics on an empty dataset");
    }
    const std::size_t f = train.feature_count();
    const double m = static_cast<double>(train.size());
    NormalizationStats stats{std::vector<double>(f, 0.0), std::vector<double>(f, 0.0)};
    for (const auto& s : train.samples) {
        if (s.features.size() != f) {
            throw DataError("sample " + s.company_id + "/" + std::to_string(s.fiscal_year) +
                            " has the wrong feature count");
        }
        for (std::size_t j = 0; j < f; ++j) {
            stats.mean[j] += s.features[j];
        }
    }
    for (auto& v : stats.mean) {
        v /= m;
    }
    // A constant column keeps its exact value as mean so it normalizes to exactly 0.
    const auto& first = train.samples.front().features;
    for (std::size_t j = 0; j < f; ++j) {
        const bool constant = std::all_of(train.samples.begin(), train.samples.end(),
                                          [&](const Sample& s) { return s.features[j] == first[j]; });
        if (constant) {
            stats.mean[j] = first[j];
        }
    }
    // Two-pass variance around the mean.
    for (const auto& s : train.samples) {
        for (std::size_t j = 0; j < f; ++j) {
            const double d = s.features[j] - stats.mean[j];
            stats.std[j] += d * d;
        }
    }
    for (auto& v : stats.std) {
        v = std::sqrt(v / m);
        if (!(v >= kDegenerateStd)) {
            v = 1.0;
        }
    }
    return stats;
}

void apply_normalizer_inplace(const NormalizationStats& stats, Eigen::Ref<Eigen::MatrixXd> rows) {
    if (static_cast<std::size_t>(rows.cols()) != stats.size()) {
        throw DataError("normalizer expects " + std::to_string(stats.size()) + " features, got " +
                        std::to_string(rows.cols()));
    }
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
        const auto jj = static_cast<std::size_t>(j);
        rows.col(j) = (rows.col(j).array() - stats.mean[jj]) / stats.std[jj];
    }
}

Eigen::MatrixXd apply_normalizer(const NormalizationStats& stats, const Dataset& data) {
    if (data.feature_count() != stats.size()) {
        throw DataError("normalizer expects " + std::to_string(stats.size()) + " features, dataset has " +
                        std::to_string(data.feature_count()));
    }
    Eigen::MatrixXd x = data.design_matrix();
    apply_normalizer_inplace(stats, x);
    return x;
}

Dataset normalized(const NormalizationStats& stats, const Dataset& data) {
    const Eigen::MatrixXd x = apply_normalizer(stats, data);
    Dataset out = data;
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        auto& f = out.samples[i].features;
        for (std::size_t j = 0; j < f.size(); ++j) {
            f[j] = x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return out;
}

SmoteResult smote(const Dataset& train, std::size_t k, std::uint64_t seed) {
    if (k < 1) {
        throw ConfigError("SMOTE neighbour count must be at least 1");
    }
    const std::size_t classes = train.class_map.size();
    std::vector<std::vector<std::size_t>> members(classes);
    for (std::size_t i = 0; i < train.samples.size(); ++i) {
        const auto& label = train.samples[i].label;
        if (!label || *label >= classes) {
            throw DataError("SMOTE requires every training sample to carry a mapped label");
        }
        members[*label].push_back(i);
    }

    SmoteResult result{train, {}, {}};
    std::size_t majority = 0;
    for (const auto& m : members) {
        majority = std::max(majority, m.size());
    }

    for (std::size_t c = 0; c < classes; ++c) {
        const auto& rows = members[c];
        const std::size_t n = rows.size();
        if (n == majority) {
            continue;
        }
        const auto& grade = train.class_map.grade(c);
        if (n == 0) {
            result.warnings.push_back("class " + grade + " has no training samples; it cannot be oversampled");
            continue;
        }
        if (n == 1) {
            throw DataError("SMOTE cannot oversample class " + grade + ": it has a single sample");
        }
        std::size_t kc = k;
        if (kc > n - 1) {
            kc = n - 1;
            result.warnings.push_back("SMOTE neighbour count for class " + grade + " clamped to " +
                                      std::to_string(kc));
        }

        // k nearest same-class neighbours per source row; ties break toward lower position.
        std::vector<std::vector<std::size_t>> neighbours(n);
        std::vector<std::pair<double, std::size_t>> dist(n);
        for (std::size_t a = 0; a < n; ++a) {
            const auto& xa = train.samples[rows[a]].features;
            for (std::size_t b = 0; b < n; ++b) {
                const auto& xb = train.samples[rows[b]].features;
                double d2 = 0.0;
                for (std::size_t j = 0; j < xa.size(); ++j) {
                    const double d = xa[j] - xb[j];
                    d2 += d * d;
                }
                dist[b] = {b == a ? std::numeric_limits<double>::infinity() : d2, b};
            }
            std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kc), dist.end());
            neighbours[a].reserve(kc);
            for (std::size_t q = 0; q < kc; ++q) {
                neighbours[a].push_back(dist[q].second);
            }
        }

        // Every source row contributes deficit / n points; the remainder goes to
        // randomly chosen distinct rows.
        Rng rng(derive_seed(seed, c));
        const std::size_t deficit = majority - n;
        std::vector<std::size_t> quota(n, deficit / n);
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t r = 0; r < deficit % n; ++r) {
            ++quota[order[r]];
        }

        std::uniform_int_distribution<std::size_t> pick(0, kc - 1);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (std::size_t a = 0; a < n; ++a) {
            const auto& source = train.samples[rows[a]];
            for (std::size_t q = 0; q < quota[a]; ++q) {
                const std::size_t nn = rows[neighbours[a][pick(rng)]];
                const auto& other = train.samples[nn].features;
                const double u = unit(rng);
                Sample s;
                s.company_id = source.company_id;
                s.fiscal_year = source.fiscal_year;
                s.label = c;
                s.synthetic = true;
                s.features.resize(source.features.size());
                for (std::size_t j = 0; j < s.features.size(); ++j) {
                    s.features[j] = source.features[j] + u * (other[j] - source.features[j]);
                }
                result.balanced.samples.push_back(std::move(s));
                result.origins.emplace_back(rows[a], nn);
            }
        }
    }
    return result;
}

} // namespace credrisk
