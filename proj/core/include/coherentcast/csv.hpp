#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace coherentcast {

struct CsvRow {
    std::size_t line = 0;  ///< 1-based line in the source
    std::vector<std::string> fields;
};

/// Plain comma-separated table: no quoting, surrounding whitespace trimmed, blank lines skipped.
struct CsvTable {
    std::string source;
    std::vector<std::string> header;
    std::vector<CsvRow> rows;

    /// Column index by name; throws InputError naming the source when absent.
    std::size_t column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text, const std::string& source, bool has_header = true);
/// Throws InputError (line 0) when the file cannot be opened.
CsvTable read_csv_file(const std::string& path, bool has_header = true);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view contents);

std::vector<std::string> split_fields(std::string_view line, char sep = ',');
std::optional<double> parse_number(std::string_view text);
/// Shortest representation that round-trips through parse_number.
std::string format_number(double value);

}  // namespace coherentcast
