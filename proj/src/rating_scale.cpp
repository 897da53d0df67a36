#include "credrisk/rating_scale.hpp"

#include "credrisk/error.hpp"

#include <algorithm>

namespace credrisk {

RatingScale::RatingScale(std::vector<std::string> grades) : grades_(std::move(grades)) {
    if (grades_.empty()) {
        throw ConfigError("rating scale must contain at least one grade");
    }
    for (std::size_t i = 0; i < grades_.size(); ++i) {
        if (grades_[i].empty()) {
            throw ConfigError("rating scale contains an empty grade symbol at position " +
                              std::to_string(i));
        }
        if (!index_.emplace(grades_[i], i).second) {
            throw ConfigError("rating scale contains duplicate grade '" + grades_[i] + "'");
        }
    }
}

RatingScale RatingScale::standard() {
    // S&P long-term scale without the standalone "C" grade: 21 symbols.
    return RatingScale({"AAA", "AA+", "AA", "AA-", "A+",   "A",   "A-",
                        "BBB+", "BBB", "BBB-", "BB+", "BB",   "BB-", "B+",
                        "B",   "B-",  "CCC+", "CCC", "CCC-", "CC",  "D"});
}

std::size_t RatingScale::parse(std::string_view symbol) const {
    auto it = index_.find(std::string(symbol));
    if (it == index_.end()) {
        throw DataError("unknown grade '" + std::string(symbol) + "'");
    }
    return it->second;
}

bool RatingScale::contains(std::string_view symbol) const {
    return index_.contains(std::string(symbol));
}

const std::string& RatingScale::symbol(std::size_t global_index) const {
    if (global_index >= grades_.size()) {
        throw ConfigError("grade index " + std::to_string(global_index) + " outside scale of size " +
                          std::to_string(grades_.size()));
    }
    return grades_[global_index];
}

ClassIndexMap::ClassIndexMap(std::vector<std::string> grades, const RatingScale& scale)
    : grades_(std::move(grades)) {
    std::size_t previous = 0;
    for (std::size_t i = 0; i < grades_.size(); ++i) {
        const std::size_t global = scale.parse(grades_[i]);
        if (i > 0 && global <= previous) {
            throw ConfigError("class grades must be distinct and ordered best first; '" +
                              grades_[i] + "' is out of order");
        }
        previous = global;
        index_.emplace(grades_[i], i);
    }
}

std::size_t ClassIndexMap::index_of(std::string_view symbol) const {
    auto it = index_.find(std::string(symbol));
    if (it == index_.end()) {
        throw DataError("grade '" + std::string(symbol) + "' is not one of the model classes");
    }
    return it->second;
}

bool ClassIndexMap::contains(std::string_view symbol) const {
    return index_.contains(std::string(symbol));
}

const std::string& ClassIndexMap::grade(std::size_t class_index) const {
    if (class_index >= grades_.size()) {
        throw ConfigError("class index " + std::to_string(class_index) + " outside 0.." +
                          std::to_string(grades_.size()) + "-1");
    }
    return grades_[class_index];
}

ClassIndexMap build_class_map(std::span<const std::string> labels, const RatingScale& scale) {
    if (labels.empty()) {
        throw ConfigError("cannot build a class map from an empty label collection");
    }
    std::vector<std::size_t> globals;
    globals.reserve(labels.size());
    for (const auto& label : labels) {
        globals.push_back(scale.parse(label));
    }
    std::sort(globals.begin(), globals.end());
    globals.erase(std::unique(globals.begin(), globals.end()), globals.end());

    std::vector<std::string> grades;
    grades.reserve(globals.size());
    for (auto g : globals) {
        grades.push_back(scale.symbol(g));
    }
    return ClassIndexMap(std::move(grades), scale);
}

} // namespace credrisk
