#include "credrisk/model.hpp"

#include "credrisk/error.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>
#include <sstream>

namespace credrisk {

using nlohmann::json;

namespace {

constexpr const char* kFormatName = "credrisk-model";

json layer_to_json(const DenseLayer& layer) {
    std::vector<double> weights;
    weights.reserve(static_cast<std::size_t>(layer.weights.size()));
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
        for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
            weights.push_back(layer.weights(r, c));
        }
    }
    return {{"rows", layer.weights.rows()},
            {"cols", layer.weights.cols()},
            {"weights", std::move(weights)},
            {"bias", std::vector<double>(layer.bias.data(), layer.bias.data() + layer.bias.size())}};
}

DenseLayer layer_from_json(const json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto weights = j.at("weights").get<std::vector<double>>();
    const auto bias = j.at("bias").get<std::vector<double>>();
    if (rows < 1 || cols < 1 || static_cast<Eigen::Index>(weights.size()) != rows * cols ||
        static_cast<Eigen::Index>(bias.size()) != rows) {
        throw DataError("model file layer has inconsistent dimensions");
    }
    DenseLayer layer{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            layer.weights(r, c) = weights[static_cast<std::size_t>(r * cols + c)];
        }
        layer.bias(r) = bias[static_cast<std::size_t>(r)];
    }
    return layer;
}

json payload_of(const CreditModel& model) {
    json manifest = json::array();
    for (const auto& f : model.manifest.fields()) {
        manifest.push_back({{"name", f.name}, {"group", to_string(f.group)}});
    }
    json layers = json::array();
    for (const auto& l : model.params.layers) {
        layers.push_back(layer_to_json(l));
    }
    return {
        {"scale", model.scale.grades()},
        {"classes", model.class_map.grades()},
        {"manifest", std::move(manifest)},
        {"normalization", {{"mean", model.normalization.mean}, {"std", model.normalization.std}}},
        {"config",
         {{"input_dim", model.config.input_dim},
          {"hidden_layers", model.config.hidden_layers},
          {"hidden_width", model.config.hidden_width},
          {"head", to_string(model.config.head)},
          {"classes", model.config.classes},
          {"activation", to_string(model.config.activation)}}},
        {"layers", std::move(layers)},
    };
}

} // namespace

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1) {
        throw NumericError("SHA-256 computation failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
}

std::string serialize_model(const CreditModel& model) {
    check_shapes(model.config, model.params);
    const json payload = payload_of(model);
    const json doc = {{"format", kFormatName},
                      {"version", kModelFormatVersion},
                      {"checksum", {{"algorithm", "sha256"}, {"value", sha256_hex(payload.dump())}}},
                      {"payload", payload}};
    return doc.dump(1) + "\n";
}

CreditModel deserialize_model(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (doc.at("format").get<std::string>() != kFormatName) {
            throw DataError("not a credrisk model file");
        }
        const int version = doc.at("version").get<int>();
        if (version != kModelFormatVersion) {
            throw DataError("unsupported model format version " + std::to_string(version));
        }
        const auto& payload = doc.at("payload");
        if (doc.at("checksum").at("algorithm").get<std::string>() != "sha256" ||
            doc.at("checksum").at("value").get<std::string>() != sha256_hex(payload.dump())) {
            throw DataError("model file checksum mismatch");
        }

        CreditModel model;
        model.scale = RatingScale(payload.at("scale").get<std::vector<std::string>>());
        model.class_map = ClassIndexMap(payload.at("classes").get<std::vector<std::string>>(), model.scale);
        std::vector<FeatureField> fields;
        for (const auto& f : payload.at("manifest")) {
            fields.push_back({f.at("name").get<std::string>(),
                              parse_statement_group(f.at("group").get<std::string>())});
        }
        model.manifest = FeatureManifest(std::move(fields));
        model.normalization.mean = payload.at("normalization").at("mean").get<std::vector<double>>();
        model.normalization.std = payload.at("normalization").at("std").get<std::vector<double>>();

        const auto& cfg = payload.at("config");
        model.config.input_dim = cfg.at("input_dim").get<std::size_t>();
        model.config.hidden_layers = cfg.at("hidden_layers").get<std::size_t>();
        model.config.hidden_width = cfg.at("hidden_width").get<std::size_t>();
        model.config.head = parse_head_kind(cfg.at("head").get<std::string>());
        model.config.classes = cfg.at("classes").get<std::size_t>();
        model.config.activation = parse_activation(cfg.at("activation").get<std::string>());
        for (const auto& l : payload.at("layers")) {
            model.params.layers.push_back(layer_from_json(l));
        }

        check_shapes(model.config, model.params);
        if (model.manifest.size() != model.config.input_dim ||
            model.normalization.mean.size() != model.config.input_dim ||
            model.normalization.std.size() != model.config.input_dim) {
            throw DataError("model file manifest, normalization and input dimension disagree");
        }
        if (model.config.head == HeadKind::classification && model.config.classes != model.class_map.size()) {
            throw DataError("model file class map does not match the classification head");
        }
        return model;
    } catch (const json::exception& e) {
        throw DataError(std::string("model file is missing or has malformed fields: ") + e.what());
    } catch (const ConfigError& e) {
        throw DataError(std::string("model file is inconsistent: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const CreditModel& model) {
    const auto text = serialize_model(model);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text)) {
        throw DataError("cannot write model file '" + path.string() + "'");
    }
}

CreditModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open model file '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return deserialize_model(buffer.str());
}

} // namespace credrisk
