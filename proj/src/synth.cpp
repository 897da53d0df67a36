#include "credrisk/synth.hpp"

#include "credrisk/error.hpp"
#include "credrisk/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace credrisk {

std::string to_string(TransitionKind kind) {
    return kind == TransitionKind::symmetric ? "symmetric" : "deteriorating";
}

TransitionKind parse_transition_kind(std::string_view text) {
    if (text == "symmetric") return TransitionKind::symmetric;
    if (text == "deteriorating") return TransitionKind::deteriorating;
    throw ConfigError("unknown transition kind '" + std::string(text) + "' (expected symmetric or deteriorating)");
}

void SynthConfig::validate() const {
    const std::size_t c = classes.size();
    if (c < 1) {
        throw ConfigError("synthetic config needs at least one class");
    }
    (void)ClassIndexMap(classes, scale);
    if (years < 1) {
        throw ConfigError("synthetic config needs at least one year");
    }
    if (class_weights.size() != c) {
        throw ConfigError("class_weights has " + std::to_string(class_weights.size()) + " entries for " +
                          std::to_string(c) + " classes");
    }
    double total = 0.0;
    for (double w : class_weights) {
        if (!(w >= 0.0)) {
            throw ConfigError("class weights must be non-negative");
        }
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ConfigError("class weights must sum to 1, got " + std::to_string(total));
    }
    if (!(transition_prob >= 0.0 && transition_prob <= 1.0)) {
        throw ConfigError("transition_prob must lie in [0, 1]");
    }
    if (!prototypes.empty()) {
        if (prototypes.size() != c) {
            throw ConfigError("expected one prototype per class");
        }
        for (const auto& p : prototypes) {
            if (p.size() != feature_dim()) {
                throw ConfigError("prototype length differs from the manifest size");
            }
        }
    }
    if (!noise_scale.empty() && noise_scale.size() != feature_dim()) {
        throw ConfigError("noise_scale must have one entry per feature");
    }
    for (double s : noise_scale) {
        if (!(s >= 0.0)) {
            throw ConfigError("noise_scale entries must be non-negative");
        }
    }
}

namespace {

SynthTruth make_geometry(const SynthConfig& config) {
    const std::size_t f = config.feature_dim();
    const std::size_t c = config.classes.size();
    Rng rng(derive_seed(config.seed, 0));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> exponent(4.0, 9.0);
    std::uniform_real_distribution<double> offset(1.0, 3.0);

    SynthTruth truth;
    std::vector<double> direction(f);
    for (auto& d : direction) {
        d = normal(rng);
    }
    const double norm = std::sqrt(std::inner_product(direction.begin(), direction.end(), direction.begin(), 0.0));
    for (auto& d : direction) {
        d /= norm;
    }
    truth.offsets.resize(f);
    truth.units.resize(f);
    for (std::size_t j = 0; j < f; ++j) {
        truth.offsets[j] = offset(rng);
        truth.units[j] = std::pow(10.0, exponent(rng));
    }

    if (!config.prototypes.empty()) {
        truth.prototypes = config.prototypes;
    } else {
        const double centre = (static_cast<double>(c) - 1.0) / 2.0;
        truth.prototypes.assign(c, std::vector<double>(f));
        for (std::size_t k = 0; k < c; ++k) {
            const double t = config.prototype_spacing * (static_cast<double>(k) - centre);
            for (std::size_t j = 0; j < f; ++j) {
                truth.prototypes[k][j] = t * direction[j];
            }
        }
    }
    return truth;
}

std::string company_id(std::size_t i) {
    std::string digits = std::to_string(i + 1);
    if (digits.size() < 5) {
        digits.insert(0, 5 - digits.size(), '0');
    }
    return "C" + digits;
}

std::size_t next_class(std::size_t current, std::size_t classes, TransitionKind kind, Rng& rng) {
    if (classes < 2) {
        return current;
    }
    if (kind == TransitionKind::deteriorating) {
        return std::min(current + 1, classes - 1);
    }
    const bool up = std::bernoulli_distribution(0.5)(rng);
    if (current == 0) {
        return 1;
    }
    if (current == classes - 1) {
        return classes - 2;
    }
    return up ? current - 1 : current + 1;
}

SynthPanel build(const SynthConfig& config, SynthTruth truth) {
    const std::size_t f = config.feature_dim();
    const std::size_t c = config.classes.size();

    SynthPanel panel;
    panel.manifest = config.manifest;
    panel.class_map = ClassIndexMap(config.classes, config.scale);
    panel.period = config.period();

    std::vector<double> noise = config.noise_scale;
    if (noise.empty()) {
        noise.assign(f, 1.0);
    }

    Rng selection(derive_seed(config.seed, 1));
    std::vector<std::size_t> ids(config.companies);
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    std::shuffle(ids.begin(), ids.end(), selection);
    std::vector<bool> incomplete(config.companies, false);
    for (std::size_t i = 0; i < std::min(config.incomplete_companies, config.companies); ++i) {
        incomplete[ids[i]] = true;
    }

    const std::uint64_t company_base = derive_seed(config.seed, 2);
    panel.records.reserve(config.companies * config.years);
    for (std::size_t i = 0; i < config.companies; ++i) {
        Rng rng(derive_seed(company_base, i));
        std::normal_distribution<double> normal(0.0, 1.0);
        std::discrete_distribution<std::size_t> first_class(config.class_weights.begin(), config.class_weights.end());
        std::bernoulli_distribution changes(config.transition_prob);

        const auto id = company_id(i);
        truth.company_ids.push_back(id);
        std::vector<std::size_t> trajectory;
        std::size_t cls = first_class(rng);
        for (std::size_t y = 0; y < config.years; ++y) {
            if (y > 0) {
                ++truth.transitions_possible;
                if (changes(rng)) {
                    const auto next = next_class(cls, c, config.transitions, rng);
                    if (next != cls) {
                        ++truth.transitions_observed;
                    }
                    cls = next;
                }
            }
            trajectory.push_back(cls);

            CompanyYearRecord rec;
            rec.company_id = id;
            rec.fiscal_year = config.first_year + static_cast<int>(y);
            rec.label = config.classes[cls];
            rec.values.reserve(f);
            for (std::size_t j = 0; j < f; ++j) {
                const double latent = truth.prototypes[cls][j] + noise[j] * normal(rng);
                rec.values.emplace_back(truth.units[j] * (truth.offsets[j] + latent));
            }
            panel.records.push_back(std::move(rec));
        }
        if (incomplete[i]) {
            std::uniform_int_distribution<std::size_t> pick_year(0, config.years - 1);
            std::uniform_int_distribution<std::size_t> pick_field(0, f - 1);
            const std::size_t year = pick_year(rng);
            const std::size_t field = pick_field(rng);
            panel.records[panel.records.size() - config.years + year].values[field].reset();
            truth.incomplete_ids.push_back(id);
        }
        truth.trajectories.push_back(std::move(trajectory));
    }
    panel.truth = std::move(truth);
    return panel;
}

} // namespace

SynthPanel generate(const SynthConfig& config) {
    config.validate();
    return build(config, make_geometry(config));
}

SynthPanel generate_with_truth(const SynthConfig& config, const SynthTruth& reference) {
    config.validate();
    if (reference.prototypes.size() != config.classes.size() || reference.units.size() != config.feature_dim() ||
        reference.offsets.size() != config.feature_dim()) {
        throw ConfigError("reference geometry does not match the class count or manifest size");
    }
    SynthTruth truth;
    truth.prototypes = reference.prototypes;
    truth.offsets = reference.offsets;
    truth.units = reference.units;
    return build(config, std::move(truth));
}

void write_panel(const SynthPanel& panel, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw DataError("cannot create output directory '" + dir.string() + "': " + ec.message());
    }
    write_financials(dir / "features.csv", panel.records, panel.manifest);
    write_labels(dir / "labels.csv", panel.records);
}

} // namespace credrisk
