#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace credrisk::csv {

/// A parsed comma-delimited file. `rows[i]` came from line `line_numbers[i]`
/// of the source (1-based, header is line 1).
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;

    /// Column position of `name`, if present.
    std::optional<std::size_t> column(std::string_view name) const;
};

/// Splits one line on commas; double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_line(std::string_view line);

/// Reads a header-first file. Blank lines are skipped. Throws DataError if the
/// file cannot be opened, has no header, or a row's field count differs from
/// the header's.
Table read(const std::filesystem::path& path);
Table parse(std::istream& in, const std::string& source_name);

/// Quotes a field when it contains a comma, quote or newline.
std::string escape(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);
/// Parses a whole-field real number; nullopt for empty, "NA", or non-numeric text.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

std::string trim(std::string_view text);

} // namespace credrisk::csv
