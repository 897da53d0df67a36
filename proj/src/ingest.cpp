#include "credrisk/ingest.hpp"

#include "credrisk/csv.hpp"
#include "credrisk/error.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace credrisk {

namespace {

std::string record_key(const std::string& company, int year) {
    return company + '\x1f' + std::to_string(year);
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot write '" + path.string() + "'");
    }
    return out;
}

} // namespace

std::string to_string(StatementGroup group) {
    switch (group) {
    case StatementGroup::income:
        return "income";
    case StatementGroup::balance:
        return "balance";
    case StatementGroup::cashflow:
        return "cashflow";
    }
    return "income";
}

StatementGroup parse_statement_group(std::string_view text) {
    if (text == "income") return StatementGroup::income;
    if (text == "balance") return StatementGroup::balance;
    if (text == "cashflow") return StatementGroup::cashflow;
    throw DataError("unknown statement group '" + std::string(text) + "'");
}

FeatureManifest::FeatureManifest(std::vector<FeatureField> fields) : fields_(std::move(fields)) {
    if (fields_.empty()) {
        throw ConfigError("feature manifest must list at least one field");
    }
    std::unordered_set<std::string> seen;
    for (const auto& field : fields_) {
        if (field.name.empty()) {
            throw ConfigError("feature manifest contains an empty field name");
        }
        if (!seen.insert(field.name).second) {
            throw ConfigError("feature manifest lists '" + field.name + "' twice");
        }
    }
}

FeatureManifest FeatureManifest::standard() {
    using G = StatementGroup;
    return FeatureManifest({
        {"TotalRevenue", G::income},
        {"CostOfRevenue", G::income},
        {"GrossProfit", G::income},
        {"SellingGeneralAndAdministration", G::income},
        {"ResearchAndDevelopment", G::income},
        {"OperatingExpense", G::income},
        {"OperatingIncome", G::income},
        {"InterestExpense", G::income},
        {"InterestIncome", G::income},
        {"OtherIncomeExpense", G::income},
        {"PretaxIncome", G::income},
        {"TaxProvision", G::income},
        {"NetIncome", G::income},
        {"EBIT", G::income},
        {"EBITDA", G::income},
        {"CashAndCashEquivalents", G::balance},
        {"AccountsReceivable", G::balance},
        {"Inventory", G::balance},
        {"OtherCurrentAssets", G::balance},
        {"TotalCurrentAssets", G::balance},
        {"NetPPE", G::balance},
        {"Goodwill", G::balance},
        {"OtherNonCurrentAssets", G::balance},
        {"TotalAssets", G::balance},
        {"AccountsPayable", G::balance},
        {"CurrentDebt", G::balance},
        {"OtherCurrentLiabilities", G::balance},
        {"TotalCurrentLiabilities", G::balance},
        {"LongTermDebt", G::balance},
        {"TotalLiabilities", G::balance},
        {"RetainedEarnings", G::balance},
        {"StockholdersEquity", G::balance},
        {"DepreciationAndAmortization", G::cashflow},
        {"ChangeInWorkingCapital", G::cashflow},
        {"StockBasedCompensation", G::cashflow},
        {"OperatingCashFlow", G::cashflow},
        {"CapitalExpenditure", G::cashflow},
        {"AcquisitionsNet", G::cashflow},
        {"InvestingCashFlow", G::cashflow},
        {"DebtIssuance", G::cashflow},
        {"DebtRepayment", G::cashflow},
        {"DividendsPaid", G::cashflow},
        {"FinancingCashFlow", G::cashflow},
    });
}

FeatureManifest FeatureManifest::load(const std::filesystem::path& path) {
    const auto table = csv::read(path);
    const auto name_col = table.column("name");
    const auto group_col = table.column("group");
    if (!name_col || !group_col) {
        throw DataError(path.string() + ": manifest header must contain 'name' and 'group'");
    }
    std::vector<FeatureField> fields;
    fields.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        fields.push_back({row[*name_col], parse_statement_group(row[*group_col])});
    }
    return FeatureManifest(std::move(fields));
}

void FeatureManifest::save(const std::filesystem::path& path) const {
    auto out = open_for_write(path);
    csv::write_row(out, {"name", "group"});
    for (const auto& field : fields_) {
        csv::write_row(out, {field.name, to_string(field.group)});
    }
}

std::vector<std::string> FeatureManifest::names() const {
    std::vector<std::string> out;
    out.reserve(fields_.size());
    for (const auto& field : fields_) {
        out.push_back(field.name);
    }
    return out;
}

bool CompanyYearRecord::complete() const {
    return std::all_of(values.begin(), values.end(), [](const auto& v) { return v.has_value(); });
}

Eigen::MatrixXd Dataset::design_matrix() const {
    const auto rows = static_cast<Eigen::Index>(samples.size());
    const auto cols = static_cast<Eigen::Index>(feature_count());
    Eigen::MatrixXd x(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& f = samples[static_cast<std::size_t>(i)].features;
        for (Eigen::Index j = 0; j < cols; ++j) {
            x(i, j) = f[static_cast<std::size_t>(j)];
        }
    }
    return x;
}

Eigen::VectorXd Dataset::targets() const {
    Eigen::VectorXd y(static_cast<Eigen::Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!samples[i].label) {
            throw DataError("sample " + samples[i].company_id + "/" +
                            std::to_string(samples[i].fiscal_year) + " has no label");
        }
        y(static_cast<Eigen::Index>(i)) = static_cast<double>(*samples[i].label);
    }
    return y;
}

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(class_map.size(), 0);
    for (const auto& s : samples) {
        if (s.label && *s.label < counts.size()) {
            ++counts[*s.label];
        }
    }
    return counts;
}

std::size_t Dataset::company_count() const {
    std::unordered_set<std::string> ids;
    for (const auto& s : samples) {
        ids.insert(s.company_id);
    }
    return ids.size();
}

std::vector<CompanyYearRecord> load_financials(const std::filesystem::path& path,
                                               const FeatureManifest& manifest) {
    const auto table = csv::read(path);
    const auto id_col = table.column("company_id");
    const auto year_col = table.column("fiscal_year");

    std::vector<std::string> absent;
    if (!id_col) absent.push_back("company_id");
    if (!year_col) absent.push_back("fiscal_year");
    std::vector<std::size_t> feature_cols;
    feature_cols.reserve(manifest.size());
    for (const auto& field : manifest.fields()) {
        if (auto col = table.column(field.name)) {
            feature_cols.push_back(*col);
        } else {
            absent.push_back(field.name);
        }
    }
    if (!absent.empty()) {
        std::string list;
        for (const auto& name : absent) {
            list += (list.empty() ? "" : ", ") + name;
        }
        throw DataError(path.string() + ": header is missing required columns: " + list);
    }

    std::vector<CompanyYearRecord> records;
    records.reserve(table.rows.size());
    std::unordered_set<std::string> keys;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto line = std::to_string(table.line_numbers[r]);
        CompanyYearRecord rec;
        rec.company_id = row[*id_col];
        if (rec.company_id.empty()) {
            throw DataError(path.string() + ": row at line " + line + " has an empty company_id");
        }
        const auto year = csv::parse_int(row[*year_col]);
        if (!year) {
            throw DataError(path.string() + ": row at line " + line + " has an invalid fiscal_year '" +
                            row[*year_col] + "'");
        }
        rec.fiscal_year = static_cast<int>(*year);
        if (!keys.insert(record_key(rec.company_id, rec.fiscal_year)).second) {
            throw DataError(path.string() + ": row at line " + line + " repeats company " +
                            rec.company_id + " year " + std::to_string(rec.fiscal_year));
        }
        rec.values.reserve(feature_cols.size());
        for (auto col : feature_cols) {
            rec.values.push_back(csv::parse_double(row[col]));
        }
        records.push_back(std::move(rec));
    }
    return records;
}

void write_financials(const std::filesystem::path& path, std::span<const CompanyYearRecord> records,
                      const FeatureManifest& manifest) {
    auto out = open_for_write(path);
    std::vector<std::string> header{"company_id", "fiscal_year"};
    for (const auto& name : manifest.names()) {
        header.push_back(name);
    }
    csv::write_row(out, header);
    for (const auto& rec : records) {
        if (rec.values.size() != manifest.size()) {
            throw DataError("record " + rec.company_id + "/" + std::to_string(rec.fiscal_year) +
                            " has " + std::to_string(rec.values.size()) + " values, manifest has " +
                            std::to_string(manifest.size()));
        }
        std::vector<std::string> row{rec.company_id, std::to_string(rec.fiscal_year)};
        for (const auto& v : rec.values) {
            row.push_back(v ? csv::format_double(*v) : std::string{});
        }
        csv::write_row(out, row);
    }
}

void join_labels(std::vector<CompanyYearRecord>& records, const std::filesystem::path& labels_path,
                 const RatingScale& scale) {
    const auto table = csv::read(labels_path);
    const auto id_col = table.column("company_id");
    const auto year_col = table.column("fiscal_year");
    const auto rating_col = table.column("rating");
    if (!id_col || !year_col || !rating_col) {
        throw DataError(labels_path.string() +
                        ": label header must contain company_id, fiscal_year and rating");
    }
    std::unordered_map<std::string, std::string> labels;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto line = std::to_string(table.line_numbers[r]);
        const auto year = csv::parse_int(row[*year_col]);
        if (!year) {
            throw DataError(labels_path.string() + ": invalid fiscal_year at line " + line);
        }
        const auto& grade = row[*rating_col];
        if (!scale.contains(grade)) {
            throw DataError(labels_path.string() + ": unknown grade '" + grade + "' at line " + line);
        }
        const auto key = record_key(row[*id_col], static_cast<int>(*year));
        if (!labels.emplace(key, grade).second) {
            throw DataError(labels_path.string() + ": duplicate label for company " + row[*id_col] +
                            " year " + std::to_string(*year) + " at line " + line);
        }
    }
    for (auto& rec : records) {
        auto it = labels.find(record_key(rec.company_id, rec.fiscal_year));
        if (it != labels.end()) {
            rec.label = it->second;
        }
    }
}

void write_labels(const std::filesystem::path& path, std::span<const CompanyYearRecord> records) {
    auto out = open_for_write(path);
    csv::write_row(out, {"company_id", "fiscal_year", "rating"});
    for (const auto& rec : records) {
        if (rec.label) {
            csv::write_row(out, {rec.company_id, std::to_string(rec.fiscal_year), *rec.label});
        }
    }
}

namespace {

struct Survivors {
    std::vector<const CompanyYearRecord*> rows; // grouped by company, years ascending
    std::size_t seen = 0;
    std::size_t kept = 0;
};

Survivors select_complete_companies(std::span<const CompanyYearRecord> records,
                                    const FeatureManifest& manifest, const YearRange& period) {
    if (period.length() < 1) {
        throw ConfigError("year range " + std::to_string(period.first) + "-" +
                          std::to_string(period.last) + " is empty");
    }
    std::vector<std::string> order;
    std::unordered_map<std::string, std::map<int, const CompanyYearRecord*>> by_company;
    for (const auto& rec : records) {
        auto [it, inserted] = by_company.try_emplace(rec.company_id);
        if (inserted) {
            order.push_back(rec.company_id);
        }
        if (period.contains(rec.fiscal_year)) {
            it->second[rec.fiscal_year] = &rec;
        }
    }

    Survivors out;
    out.seen = order.size();
    for (const auto& id : order) {
        const auto& years = by_company[id];
        bool ok = static_cast<int>(years.size()) == period.length();
        for (auto it = years.begin(); ok && it != years.end(); ++it) {
            const auto* rec = it->second;
            ok = rec->values.size() == manifest.size() && rec->complete() && rec->label.has_value();
        }
        if (!ok) {
            continue;
        }
        ++out.kept;
        for (const auto& [year, rec] : years) {
            out.rows.push_back(rec);
        }
    }
    return out;
}

Sample to_sample(const CompanyYearRecord& rec) {
    Sample s;
    s.company_id = rec.company_id;
    s.fiscal_year = rec.fiscal_year;
    s.features.reserve(rec.values.size());
    for (const auto& v : rec.values) {
        s.features.push_back(*v);
    }
    return s;
}

FilterResult assemble(const Survivors& survivors, const FeatureManifest& manifest,
                      ClassIndexMap class_map) {
    FilterResult result;
    result.companies_seen = survivors.seen;
    result.companies_kept = survivors.kept;
    result.dataset.manifest = manifest;
    result.dataset.samples.reserve(survivors.rows.size());
    for (const auto* rec : survivors.rows) {
        auto s = to_sample(*rec);
        s.label = class_map.index_of(*rec->label);
        result.dataset.samples.push_back(std::move(s));
    }
    result.dataset.class_map = std::move(class_map);
    if (result.dataset.empty()) {
        result.warnings.push_back("no company has complete, labeled records for every year of the period");
    }
    return result;
}

} // namespace

FilterResult filter_complete(std::span<const CompanyYearRecord> records, const FeatureManifest& manifest,
                             const YearRange& period, const RatingScale& scale) {
    const auto survivors = select_complete_companies(records, manifest, period);
    ClassIndexMap class_map;
    if (!survivors.rows.empty()) {
        std::vector<std::string> labels;
        labels.reserve(survivors.rows.size());
        for (const auto* rec : survivors.rows) {
            labels.push_back(*rec->label);
        }
        class_map = build_class_map(labels, scale);
    }
    return assemble(survivors, manifest, std::move(class_map));
}

FilterResult filter_complete(std::span<const CompanyYearRecord> records, const FeatureManifest& manifest,
                             const YearRange& period, const ClassIndexMap& class_map) {
    return assemble(select_complete_companies(records, manifest, period), manifest, class_map);
}

Dataset complete_rows(std::span<const CompanyYearRecord> records, const FeatureManifest& manifest,
                      std::size_t* skipped) {
    Dataset out;
    out.manifest = manifest;
    std::size_t dropped = 0;
    for (const auto& rec : records) {
        if (rec.values.size() != manifest.size() || !rec.complete()) {
            ++dropped;
            continue;
        }
        out.samples.push_back(to_sample(rec));
    }
    if (skipped != nullptr) {
        *skipped = dropped;
    }
    return out;
}

} // namespace credrisk
