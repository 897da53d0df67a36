#include "credrisk/run_config.hpp"

#include "credrisk/error.hpp"
#include "credrisk/random.hpp"

#include <fstream>
#include <initializer_list>

namespace credrisk {

using nlohmann::json;

namespace {

void expect_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& context) {
    if (!obj.is_object()) {
        throw ConfigError(context + " must be an object");
    }
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* a : allowed) {
            known = known || key == a;
        }
        if (!known) {
            throw ConfigError("unknown key '" + key + "' in " + context);
        }
    }
}

template <class T>
void read(const json& obj, const char* key, T& target, const std::string& context) {
    if (!obj.contains(key) || obj.at(key).is_null()) {
        return;
    }
    try {
        target = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(context + "." + key + ": " + e.what());
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    if (value.empty()) {
        return {};
    }
    std::filesystem::path p(value);
    return p.is_relative() && !base.empty() ? base / p : p;
}

void read_path(const json& obj, const char* key, std::filesystem::path& target, const std::filesystem::path& base,
               const std::string& context) {
    std::string value;
    read(obj, key, value, context);
    if (!value.empty()) {
        target = resolve(base, value);
    }
}

json parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path.string() + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

} // namespace

RatingScale RunConfig::rating_scale() const {
    return scale.empty() ? RatingScale::standard() : RatingScale(scale);
}

FeatureManifest RunConfig::feature_manifest() const {
    return manifest.empty() ? FeatureManifest::standard() : FeatureManifest::load(manifest);
}

RunConfig run_config_from_json(const json& doc, const std::filesystem::path& base_dir) {
    RunConfig cfg;
    expect_keys(doc, {"data", "preprocess", "model", "train", "sweep", "out_dir", "model_path"}, "config");

    std::string out_dir;
    read(doc, "out_dir", out_dir, "config");
    if (!out_dir.empty()) {
        cfg.out_dir = resolve(base_dir, out_dir);
    }
    read_path(doc, "model_path", cfg.model, base_dir, "config");

    if (doc.contains("data")) {
        const auto& d = doc.at("data");
        expect_keys(d, {"features", "labels", "manifest", "scale", "period"}, "data");
        read_path(d, "features", cfg.features, base_dir, "data");
        read_path(d, "labels", cfg.labels, base_dir, "data");
        read_path(d, "manifest", cfg.manifest, base_dir, "data");
        read(d, "scale", cfg.scale, "data");
        if (d.contains("period")) {
            const auto& p = d.at("period");
            expect_keys(p, {"first", "last"}, "data.period");
            read(p, "first", cfg.period.first, "data.period");
            read(p, "last", cfg.period.last, "data.period");
        }
    }
    if (doc.contains("preprocess")) {
        const auto& p = doc.at("preprocess");
        expect_keys(p, {"train_fraction", "split_seed", "split_mode", "normalization", "smote", "smote_k", "smote_seed"},
                    "preprocess");
        read(p, "train_fraction", cfg.prepare.train_fraction, "preprocess");
        read(p, "split_seed", cfg.prepare.split_seed, "preprocess");
        read(p, "smote", cfg.prepare.oversample, "preprocess");
        read(p, "smote_k", cfg.prepare.smote_k, "preprocess");
        read(p, "smote_seed", cfg.prepare.smote_seed, "preprocess");
        std::string text;
        read(p, "split_mode", text, "preprocess");
        if (!text.empty()) cfg.prepare.split_mode = parse_split_mode(text);
        text.clear();
        read(p, "normalization", text, "preprocess");
        if (!text.empty()) cfg.prepare.normalization = parse_normalization_mode(text);
    }
    if (doc.contains("model")) {
        const auto& m = doc.at("model");
        expect_keys(m, {"head", "hidden_layers", "hidden_width", "activation"}, "model");
        read(m, "hidden_layers", cfg.mlp.hidden_layers, "model");
        read(m, "hidden_width", cfg.mlp.hidden_width, "model");
        std::string text;
        read(m, "head", text, "model");
        if (!text.empty()) cfg.mlp.head = parse_head_kind(text);
        text.clear();
        read(m, "activation", text, "model");
        if (!text.empty()) cfg.mlp.activation = parse_activation(text);
    }
    if (doc.contains("train")) {
        const auto& t = doc.at("train");
        expect_keys(t, {"epochs", "batch_size", "seed", "eval_every", "optimizer"}, "train");
        read(t, "epochs", cfg.train.epochs, "train");
        read(t, "batch_size", cfg.train.batch_size, "train");
        read(t, "seed", cfg.train.seed, "train");
        read(t, "eval_every", cfg.train.eval_every, "train");
        if (t.contains("optimizer")) {
            const auto& o = t.at("optimizer");
            expect_keys(o, {"kind", "learning_rate", "beta1", "beta2", "epsilon"}, "train.optimizer");
            std::string kind;
            read(o, "kind", kind, "train.optimizer");
            if (!kind.empty()) cfg.train.optimizer.kind = parse_optimizer_kind(kind);
            read(o, "learning_rate", cfg.train.optimizer.learning_rate, "train.optimizer");
            read(o, "beta1", cfg.train.optimizer.beta1, "train.optimizer");
            read(o, "beta2", cfg.train.optimizer.beta2, "train.optimizer");
            read(o, "epsilon", cfg.train.optimizer.epsilon, "train.optimizer");
        }
    }
    if (doc.contains("sweep")) {
        const auto& s = doc.at("sweep");
        expect_keys(s, {"widths"}, "sweep");
        read(s, "widths", cfg.sweep_widths, "sweep");
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return run_config_from_json(parse_file(path), path.parent_path());
}

json to_json(const RunConfig& c) {
    return {
        {"out_dir", c.out_dir.string()},
        {"model_path", c.model.string()},
        {"data",
         {{"features", c.features.string()},
          {"labels", c.labels.string()},
          {"manifest", c.manifest.string()},
          {"scale", c.scale},
          {"period", {{"first", c.period.first}, {"last", c.period.last}}}}},
        {"preprocess",
         {{"train_fraction", c.prepare.train_fraction},
          {"split_seed", c.prepare.split_seed},
          {"split_mode", to_string(c.prepare.split_mode)},
          {"normalization", to_string(c.prepare.normalization)},
          {"smote", c.prepare.oversample},
          {"smote_k", c.prepare.smote_k},
          {"smote_seed", c.prepare.smote_seed}}},
        {"model",
         {{"head", to_string(c.mlp.head)},
          {"hidden_layers", c.mlp.hidden_layers},
          {"hidden_width", c.mlp.hidden_width},
          {"activation", to_string(c.mlp.activation)}}},
        {"train",
         {{"epochs", c.train.epochs},
          {"batch_size", c.train.batch_size},
          {"seed", c.train.seed},
          {"eval_every", c.train.eval_every},
          {"optimizer",
           {{"kind", to_string(c.train.optimizer.kind)},
            {"learning_rate", c.train.optimizer.learning_rate},
            {"beta1", c.train.optimizer.beta1},
            {"beta2", c.train.optimizer.beta2},
            {"epsilon", c.train.optimizer.epsilon}}}}},
        {"sweep", {{"widths", c.sweep_widths}}},
    };
}

SynthConfig synth_config_from_json(const json& doc, const std::filesystem::path& base_dir) {
    SynthConfig cfg;
    expect_keys(doc,
                {"companies", "incomplete_companies", "years", "first_year", "manifest", "scale", "classes",
                 "class_weights", "prototypes", "prototype_spacing", "noise_scale", "transition_prob", "transitions",
                 "seed"},
                "synth config");
    const std::string ctx = "synth config";
    read(doc, "companies", cfg.companies, ctx);
    read(doc, "incomplete_companies", cfg.incomplete_companies, ctx);
    read(doc, "years", cfg.years, ctx);
    read(doc, "first_year", cfg.first_year, ctx);
    std::filesystem::path manifest;
    read_path(doc, "manifest", manifest, base_dir, ctx);
    if (!manifest.empty()) {
        cfg.manifest = FeatureManifest::load(manifest);
    }
    std::vector<std::string> scale;
    read(doc, "scale", scale, ctx);
    if (!scale.empty()) {
        cfg.scale = RatingScale(scale);
    }
    read(doc, "classes", cfg.classes, ctx);
    read(doc, "class_weights", cfg.class_weights, ctx);
    read(doc, "prototypes", cfg.prototypes, ctx);
    read(doc, "prototype_spacing", cfg.prototype_spacing, ctx);
    if (doc.contains("noise_scale")) {
        const auto& n = doc.at("noise_scale");
        if (n.is_number()) {
            cfg.noise_scale.assign(cfg.feature_dim(), n.get<double>());
        } else {
            read(doc, "noise_scale", cfg.noise_scale, ctx);
        }
    }
    read(doc, "transition_prob", cfg.transition_prob, ctx);
    std::string transitions;
    read(doc, "transitions", transitions, ctx);
    if (!transitions.empty()) {
        cfg.transitions = parse_transition_kind(transitions);
    }
    read(doc, "seed", cfg.seed, ctx);
    cfg.validate();
    return cfg;
}

SynthConfig load_synth_config(const std::filesystem::path& path) {
    return synth_config_from_json(parse_file(path), path.parent_path());
}

void apply_master_seed(RunConfig& config, std::uint64_t seed) {
    config.train.seed = seed;
    config.prepare.split_seed = derive_seed(seed, 1);
    config.prepare.smote_seed = derive_seed(seed, 2);
}

} // namespace credrisk
