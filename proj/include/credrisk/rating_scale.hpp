#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace credrisk {

/// Ordered credit-grade alphabet, best grade first.
///
/// The default scale has 21 grades from "AAA" down to "D". Position in the
/// scale is the global index: smaller means better credit.
class RatingScale {
public:
    /// Throws ConfigError if `grades` is empty or has empty/duplicate symbols.
    explicit RatingScale(std::vector<std::string> grades);

    static RatingScale standard();

    /// Global index of `symbol`; throws DataError naming the token if unknown.
    std::size_t parse(std::string_view symbol) const;
    bool contains(std::string_view symbol) const;
    const std::string& symbol(std::size_t global_index) const;

    std::size_t size() const { return grades_.size(); }
    const std::vector<std::string>& grades() const { return grades_; }

private:
    std::vector<std::string> grades_;
    std::unordered_map<std::string, std::size_t> index_;
};

inline std::size_t parse_grade(std::string_view symbol, const RatingScale& scale) {
    return scale.parse(symbol);
}

/// Mapping from the grades observed in a dataset to dense class indices
/// 0..C-1, ordered like the rating scale (higher index = worse credit).
class ClassIndexMap {
public:
    ClassIndexMap() = default;

    /// `grades` must be distinct and listed best first; throws ConfigError otherwise.
    ClassIndexMap(std::vector<std::string> grades, const RatingScale& scale);

    /// Class index of `symbol`; throws DataError if the grade is not mapped.
    std::size_t index_of(std::string_view symbol) const;
    bool contains(std::string_view symbol) const;
    const std::string& grade(std::size_t class_index) const;

    std::size_t size() const { return grades_.size(); }
    bool empty() const { return grades_.empty(); }
    const std::vector<std::string>& grades() const { return grades_; }

    friend bool operator==(const ClassIndexMap& a, const ClassIndexMap& b) {
        return a.grades_ == b.grades_;
    }

private:
    std::vector<std::string> grades_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Distinct labels sorted by global index and numbered 0..C-1.
/// Throws ConfigError on an empty collection, DataError on an unknown grade.
ClassIndexMap build_class_map(std::span<const std::string> labels, const RatingScale& scale);

} // namespace credrisk
