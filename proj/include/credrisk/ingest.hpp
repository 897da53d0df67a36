#pragma once

#include "credrisk/rating_scale.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace credrisk {

enum class StatementGroup { income, balance, cashflow };

std::string to_string(StatementGroup group);
StatementGroup parse_statement_group(std::string_view text);

struct FeatureField {
    std::string name;
    StatementGroup group = StatementGroup::income;

    friend bool operator==(const FeatureField&, const FeatureField&) = default;
};

/// Ordered feature list. Column binding in feature files is by name, and the
/// manifest order defines the feature order everywhere downstream.
class FeatureManifest {
public:
    FeatureManifest() = default;
    explicit FeatureManifest(std::vector<FeatureField> fields);

    /// 43 common income-statement, balance-sheet and cash-flow fields.
    static FeatureManifest standard();
    /// Reads a `name,group` file.
    static FeatureManifest load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    std::size_t size() const { return fields_.size(); }
    const std::vector<FeatureField>& fields() const { return fields_; }
    std::vector<std::string> names() const;

    friend bool operator==(const FeatureManifest&, const FeatureManifest&) = default;

private:
    std::vector<FeatureField> fields_;
};

/// One company-fiscal-year row as read from disk. Missing cells are nullopt.
struct CompanyYearRecord {
    std::string company_id;
    int fiscal_year = 0;
    std::vector<std::optional<double>> values;
    std::optional<std::string> label;

    bool complete() const;
};

/// Inclusive range of fiscal years.
struct YearRange {
    int first = 2010;
    int last = 2016;

    int length() const { return last - first + 1; }
    bool contains(int year) const { return year >= first && year <= last; }
};

/// A complete row ready for modelling.
struct Sample {
    std::string company_id;
    int fiscal_year = 0;
    std::vector<double> features;
    /// Class index into the dataset's ClassIndexMap; nullopt for unlabeled rows.
    std::optional<std::size_t> label;
    /// True for rows created by oversampling.
    bool synthetic = false;
};

struct Dataset {
    FeatureManifest manifest;
    ClassIndexMap class_map;
    std::vector<Sample> samples;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    std::size_t feature_count() const { return manifest.size(); }

    /// Samples-by-features matrix.
    Eigen::MatrixXd design_matrix() const;
    /// Class indices as reals; throws DataError if any sample is unlabeled.
    Eigen::VectorXd targets() const;
    /// Sample count per class index (size = class_map.size()).
    std::vector<std::size_t> class_counts() const;
    /// Number of distinct company ids.
    std::size_t company_count() const;
};

/// Loads a feature file whose header names `company_id`, `fiscal_year` and every
/// manifest field (extra columns are ignored). Empty, "NA" and non-numeric cells
/// become missing values.
std::vector<CompanyYearRecord> load_financials(const std::filesystem::path& path,
                                               const FeatureManifest& manifest);

/// Writes records in the format load_financials reads. Values are written in
/// shortest round-trip form, missing values as empty cells.
void write_financials(const std::filesystem::path& path, std::span<const CompanyYearRecord> records,
                      const FeatureManifest& manifest);

/// Attaches grades from a `company_id,fiscal_year,rating` file. Records with no
/// matching row keep an absent label.
void join_labels(std::vector<CompanyYearRecord>& records, const std::filesystem::path& labels_path,
                 const RatingScale& scale);

/// Writes the labels of all labeled records as a `company_id,fiscal_year,rating` file.
void write_labels(const std::filesystem::path& path, std::span<const CompanyYearRecord> records);

struct FilterResult {
    Dataset dataset;
    std::size_t companies_seen = 0;
    std::size_t companies_kept = 0;
    std::vector<std::string> warnings;
};

/// Company-level completeness filter: a company survives only if every year of
/// `period` has a record with all values present and a label. The class map is
/// built from the surviving labels.
FilterResult filter_complete(std::span<const CompanyYearRecord> records, const FeatureManifest& manifest,
                             const YearRange& period, const RatingScale& scale);

/// Same filter, mapping labels through a fixed class map; surviving labels
/// outside the map raise DataError.
FilterResult filter_complete(std::span<const CompanyYearRecord> records, const FeatureManifest& manifest,
                             const YearRange& period, const ClassIndexMap& class_map);

/// Every complete record as an unlabeled sample, in input order. Incomplete
/// records are counted in `skipped`.
Dataset complete_rows(std::span<const CompanyYearRecord> records, const FeatureManifest& manifest,
                      std::size_t* skipped = nullptr);

} // namespace credrisk
